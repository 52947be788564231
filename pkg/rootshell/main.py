"""rootshell のコマンドライン。

使い方:
python -m rootshell.main tables weyl
python -m rootshell.main semidense check --type B --rank 3 --nodes 1,3
python -m rootshell.main mc intersect --n 2 --H0 1/2,-1/2 --t 8 --samples 100000 --seed 1

終了コード: 0 = 実行して検証も成功, 1 = 検証失敗または計算エラー, 2 = 引数エラー
"""
import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from rootshell.abc import ErrorCode, RootshellError
from rootshell.commands import routers
from rootshell.commands.base import compare_payload, positive_int
from rootshell.schemas import RunReport
from rootshell.utils import dumps_stable, load_key_value_file, normalize_payload, settings

logger = logging.getLogger("rootshell")

# namespace entries the config file may not touch
RESERVED_KEYS = frozenset({"handler", "command", "action", "config", "command_group"})


def common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("common options")
    group.add_argument("--seed", type=int, default=settings["SEED"])
    group.add_argument("--threads", type=positive_int, default=settings["THREADS"],
                       help="worker threads (default from ROOTSHELL_THREADS or settings.yml)")
    output = parser.add_mutually_exclusive_group()
    output.add_argument("--json", action="store_true", help="JSON report on stdout (default)")
    output.add_argument("--csv", action="store_true", help="table or grid rows as CSV on stdout")
    group.add_argument("--output", type=Path, help="write the payload to a file instead of stdout")
    group.add_argument("--timestamp", action="store_true", help="include the run timestamp in the JSON report")
    group.add_argument("--baseline", type=Path, help="fail when results drift from a stored report")
    group.add_argument("--write-baseline", type=Path, help="store this report as a baseline")
    group.add_argument("--config", type=Path, help="key=value defaults, overridden by explicit flags")
    group.add_argument("-v", "--verbose", action="store_true")
    return parser


def build_parser() -> tuple[argparse.ArgumentParser, list[argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="rootshell",
        description="Root-system combinatorics and harmonic-analysis checks for shells in symmetric spaces.",
    )
    subparsers = parser.add_subparsers(dest="command_group", metavar="COMMAND", required=True)
    parents = [common_parser()]
    created = []
    for router in routers:
        created += router.include(subparsers, parents)
    return parser, created


def _config_value(value: str):
    lowered = value.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    return value


def apply_config(argv: list[str], parsers: list[argparse.ArgumentParser]) -> dict[str, str]:
    """Install the --config file as parser defaults so explicit flags still win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return {}
    if not known.config.exists():
        raise ErrorCode.INVALID_CONFIG.of(f"config file {known.config} does not exist")
    values = {k: _config_value(v) for k, v in load_key_value_file(known.config).items() if k not in RESERVED_KEYS}
    for parser in parsers:
        parser.set_defaults(**values)
    logger.debug("config %s: %s", known.config, sorted(values))
    return values


def check_baseline(report: RunReport, path: Path) -> None:
    try:
        stored = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ErrorCode.INVALID_CONFIG.of(f"cannot read baseline {path}: {e}")
    current = report.payload()["results"]
    drift = compare_payload(current, stored.get("results", {}), stored.get("tolerances", {}))
    report.verdicts["baseline"] = not drift
    if drift:
        report.results["baseline_drift"] = drift[:50]
        logger.warning("%d fields drift from %s", len(drift), path)


def write_baseline(report: RunReport, path: Path) -> None:
    payload = report.payload()
    payload["tolerances"] = {}
    path.write_text(dumps_stable(payload) + "\n", encoding="utf-8")


def render_csv(report: RunReport) -> str:
    if not report.table:
        raise ErrorCode.INVALID_INVOCATION.of(f"{report.command} has no tabular output; drop --csv")
    fieldnames = list(dict.fromkeys(k for row in report.table for k in row))
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in report.table:
        cells = {}
        for key, value in normalize_payload(row).items():
            cells[key] = json.dumps(value, sort_keys=True) if isinstance(value, (list, dict)) else value
        writer.writerow(cells)
    return buffer.getvalue()


def emit(report: RunReport, args: argparse.Namespace) -> str:
    if args.csv:
        return render_csv(report)
    return report.dumps(include_timestamp=args.timestamp) + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, parsers = build_parser()
    try:
        apply_config(argv, parsers)
    except RootshellError as e:
        print(f"rootshell: {e}", file=sys.stderr)
        return e.exit_status
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        report = args.handler(args)
        if args.baseline:
            check_baseline(report, args.baseline)
        text = emit(report, args)
        if args.write_baseline:
            write_baseline(report, args.write_baseline)
    except RootshellError as e:
        logger.error("%s failed: %s", args.command, e)
        return e.exit_status
    except Exception:
        logger.exception("%s failed", args.command)
        return 1

    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for name, ok in report.verdicts.items():
        if not ok:
            logger.warning("verification %s failed", name)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
