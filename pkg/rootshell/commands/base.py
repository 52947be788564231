import argparse
import datetime
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from rootshell.abc import ErrorCode, GroupForm
from rootshell.schemas import RunReport
from rootshell.services.root_core import E6_MODELS, RootSystem, build_product_system, build_root_system, to_fraction
from rootshell.utils import normalize_payload

Handler = Callable[[argparse.Namespace], RunReport]


@dataclass(frozen=True)
class Argument:
    flags: tuple[str, ...]
    options: dict[str, Any]


def arg(*flags: str, **options) -> Argument:
    return Argument(flags, options)


@dataclass
class Route:
    name: str | None
    help: str
    arguments: tuple[Argument, ...]
    handler: Handler


@dataclass
class CommandRouter:
    """サブコマンドの登録先。main.py で parser に include される"""

    prefix: str
    help: str
    arguments: tuple[Argument, ...] = ()
    routes: list[Route] = field(default_factory=list)

    def command(self, name: str | None = None, *, help: str, arguments: tuple[Argument, ...] = ()):
        def decorator(fn: Handler) -> Handler:
            self.routes.append(Route(name, help, tuple(arguments), fn))
            return fn

        return decorator

    def include(self, subparsers, parents: list[argparse.ArgumentParser]) -> list[argparse.ArgumentParser]:
        """Add this group to ``subparsers``; returns every parser created."""
        if len(self.routes) == 1 and self.routes[0].name is None:
            route = self.routes[0]
            parser = subparsers.add_parser(self.prefix, help=route.help, parents=parents)
            _add_arguments(parser, self.arguments + route.arguments)
            parser.set_defaults(handler=route.handler, command=self.prefix)
            return [parser]

        group = subparsers.add_parser(self.prefix, help=self.help)
        actions = group.add_subparsers(dest="action", metavar="ACTION", required=True)
        created = [group]
        for route in self.routes:
            parser = actions.add_parser(route.name, help=route.help, parents=parents)
            _add_arguments(parser, self.arguments + route.arguments)
            parser.set_defaults(handler=route.handler, command=f"{self.prefix} {route.name}")
            created.append(parser)
        return created


def _add_arguments(parser: argparse.ArgumentParser, arguments: tuple[Argument, ...]) -> None:
    for argument in arguments:
        parser.add_argument(*argument.flags, **argument.options)


# ---- フラグ値のパーサ ----

def _invalid(detail: str) -> argparse.ArgumentTypeError:
    return argparse.ArgumentTypeError(detail)


def nodes_type(text: str) -> tuple[int, ...]:
    """'1,3' -> (0, 2); nodes are 1-based on the command line."""
    try:
        nodes = tuple(int(x) - 1 for x in text.split(",") if x.strip())
    except ValueError:
        raise _invalid(f"expected comma-separated node numbers, got {text!r}")
    if any(n < 0 for n in nodes):
        raise _invalid("node numbers start at 1")
    return tuple(sorted(set(nodes)))


def vector_type(text: str) -> tuple[Fraction, ...]:
    """'2,-1,-1' or '1/2,-1/2'; exact rationals."""
    try:
        return tuple(to_fraction(Fraction(x.strip())) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise _invalid(f"expected comma-separated rationals, got {text!r}")


def float_vector_type(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise _invalid(f"expected comma-separated numbers, got {text!r}")


def grid_type(text: str) -> tuple[float, ...]:
    """'min,max,count' for an evenly spaced axis, or 'a;b;c' for explicit values."""
    try:
        if ";" in text:
            return tuple(float(x) for x in text.split(";") if x.strip())
        parts = [x for x in text.split(",") if x.strip()]
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise _invalid(f"expected 'min,max,count' or 'a;b;c', got {text!r}")
    if count < 1:
        raise _invalid("grid count must be positive")
    return tuple(float(x) for x in np.linspace(lo, hi, count))


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise _invalid(f"expected an integer, got {text!r}")
    if value < 1:
        raise _invalid("expected a positive integer")
    return value


def complex_type(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise _invalid(f"expected a complex number like 1.5 or 1+0.25j, got {text!r}")


def require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise ErrorCode.INVALID_INVOCATION.of(f"{args.command} needs {', '.join(missing)}")


# ---- レポート ----

def report(args: argparse.Namespace, parameters: dict[str, Any], results: dict[str, Any],
           verdicts: dict[str, bool] | None = None, table: list | None = None) -> RunReport:
    return RunReport(
        command=args.command,
        parameters=normalize_payload(parameters),
        seed=getattr(args, "seed", None),
        timestamp=datetime.datetime.now(datetime.timezone.utc),
        results=normalize_payload(results),
        verdicts={k: bool(v) for k, v in (verdicts or {}).items()},
        table=[row.model_dump() if hasattr(row, "model_dump") else dict(row) for row in table or []],
    )


def _close(a: float, b: float, rel: float, abs_: float) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)


def compare_payload(current: Any, stored: Any, tolerances: dict[str, float],
                    default_rel: float = 1e-9, path: str = "") -> list[str]:
    """Paths where ``current`` drifts from ``stored``.

    ``tolerances`` maps a dotted path (``results.ratio``) or a bare key (``ratio``)
    to a relative tolerance.
    """
    key = path.rsplit(".", 1)[-1]
    if isinstance(stored, dict):
        if not isinstance(current, dict):
            return [f"{path}: expected an object"]
        drift = []
        for k in sorted(set(stored) | set(current)):
            child = f"{path}.{k}" if path else k
            if k not in current:
                drift.append(f"{child}: missing")
            elif k not in stored:
                drift.append(f"{child}: not in baseline")
            else:
                drift += compare_payload(current[k], stored[k], tolerances, default_rel, child)
        return drift
    if isinstance(stored, list):
        if not isinstance(current, list) or len(current) != len(stored):
            return [f"{path}: length changed"]
        drift = []
        for i, (a, b) in enumerate(zip(current, stored)):
            drift += compare_payload(a, b, tolerances, default_rel, f"{path}[{i}]")
        return drift
    numeric = (int, float)
    if isinstance(stored, numeric) and isinstance(current, numeric) \
            and not isinstance(stored, bool) and not isinstance(current, bool):
        rel = tolerances.get(path.split("[")[0], tolerances.get(key.split("[")[0], default_rel))
        if not _close(float(current), float(stored), rel, rel * 1e-12):
            return [f"{path}: {current} != {stored} (rel {rel})"]
        return []
    return [] if current == stored else [f"{path}: {current!r} != {stored!r}"]


# ---- 共通の引数 ----

ROOT_SYSTEM_ARGS = (
    arg("--type", help="Cartan type A-G"),
    arg("--rank", type=positive_int),
    arg("--product", help="reducible system as a comma list, e.g. B3,A2"),
    arg("--model", choices=E6_MODELS, help="E6 model (r9 or e8)"),
    arg("--form", choices=[f.value for f in GroupForm], help="split (m=1) or complex (m=2)"),
)


def _parse_component(text: str) -> tuple[str, int]:
    text = text.strip()
    if len(text) < 2 or not text[1:].isdigit():
        raise ErrorCode.INVALID_INVOCATION.of(f"expected a component like B3, got {text!r}")
    return text[0].upper(), int(text[1:])


def root_system_from(args: argparse.Namespace) -> RootSystem:
    form = args.form or GroupForm.SPLIT.value
    if getattr(args, "product", None):
        return build_product_system([_parse_component(p) for p in args.product.split(",")], form)
    require(args, "type", "rank")
    return build_root_system(args.type, args.rank, form, args.model)


def root_system_parameters(args: argparse.Namespace) -> dict[str, Any]:
    return {k: getattr(args, k, None) for k in ("type", "rank", "product", "model", "form")
            if getattr(args, k, None) is not None}


def one_based(nodes) -> list[int]:
    return [n + 1 for n in nodes]
