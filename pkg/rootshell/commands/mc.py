import logging

from rootshell.abc import ErrorCode
from rootshell.commands.base import (
    ROOT_SYSTEM_ARGS, CommandRouter, arg, float_vector_type, grid_type, positive_int, report, require, root_system_from,
    root_system_parameters, vector_type,
)
from rootshell.services.geometry import (
    ShellSpec, anker_upper_check, brion_consequence_check, inverse_symmetry_check, mc_intersection_ratio,
    mc_intersection_sweep, support_check, triangle_check,
)
from rootshell.utils import settings

logger = logging.getLogger(__name__)

SHELL_ARGS = (
    arg("--n", type=int, choices=(2, 3, 4), default=2),
    arg("--H0", type=vector_type, help="dominant trace-zero direction, e.g. 1/2,-1/2"),
    arg("--eps0", type=float),
    arg("--samples", type=positive_int),
)

router = CommandRouter("mc", "Monte Carlo geometry on SL_n(ℝ)")


def _shell_defaults(args) -> tuple[float, int]:
    return args.eps0 or settings["shell"]["eps0"], args.samples or settings["shell"]["samples"]


@router.command(
    "intersect",
    help="vol(e^H S_t ∩ S_t)/vol(S_t) and its quotient by (log t)^k e^{−ρ(H)}; --sweep for a (t, H) grid",
    arguments=SHELL_ARGS + (
        arg("--t", type=grid_type),
        arg("--H", type=float_vector_type, help="dominant trace-zero H (default 0)"),
        arg("--sweep", action="store_true", help="H = s·tH0 for s in --fractions and every t"),
        arg("--fractions", type=grid_type, default="0;0.5;1"),
        arg("--max-spread", type=float, default=4.0),
    ),
)
def cmd_mc_intersect(args):
    require(args, "H0", "t")
    eps0, samples = _shell_defaults(args)
    parameters = {"n": args.n, "H0": args.H0, "eps0": eps0, "t": args.t, "samples": samples}

    if args.sweep:
        # (t, s) の格子で商のばらつきを見る
        rows = mc_intersection_sweep(args.n, args.H0, eps0, args.t, args.fractions, samples, args.seed, args.threads)
        # 当たりのない行は商が 0 なので除く
        quotients = [row.bound_quotient for row in rows if row.hits > 0]
        spread = max(quotients) / min(quotients) if quotients else 1.0
        logger.info("sweep over %d points, quotient spread %.3g", len(rows), spread)
        table = [{"t": row.t, **{f"H{i + 1}": h for i, h in enumerate(row.H)},
                  "ratio": row.ratio, "bound_quotient": row.bound_quotient} for row in rows]
        results = {"rows": [row.model_dump() for row in rows], "quotient_spread": spread,
                   "k": rows[0].k if rows else None}
        return report(args, parameters | {"fractions": args.fractions}, results,
                      {"bound_quotient_bounded": spread <= args.max_spread}, table)

    if len(args.t) != 1:
        raise ErrorCode.INVALID_INVOCATION.of("several t values need --sweep")
    spec = ShellSpec(args.n, tuple(args.H0), eps0, args.t[0])
    H = args.H or (0.0,) * args.n
    estimate = mc_intersection_ratio(spec, H, samples, args.seed, args.threads)
    results = estimate.model_dump(include={"ratio", "stderr", "bound_quotient", "k", "samples", "hits", "semidense",
                                           "polytopal_norm", "H"})
    return report(args, parameters | {"H": H}, results)


@router.command(
    "triangle",
    help="κ(g⁻¹h) ∈ Conv(W.(κ(g⁻¹m) + κ(m⁻¹h))) and κ(g⁻¹) = −w0κ(g) on random points",
    arguments=(
        arg("--n", type=int, choices=(2, 3), default=3),
        arg("--trials", type=positive_int, default=10_000),
        arg("--tol", type=float, default=1e-6),
    ),
)
def cmd_mc_triangle(args):
    triangle = triangle_check(args.n, args.trials, args.seed, args.tol)
    symmetry = inverse_symmetry_check(args.n, min(args.trials, 1000), args.seed, args.tol)
    results = {"triangle": triangle.model_dump(), "inverse_symmetry": symmetry}
    verdicts = {"triangle": triangle.violations == 0, "inverse_symmetry": symmetry["passed"]}
    return report(args, {"n": args.n, "trials": args.trials, "tol": args.tol}, results, verdicts)


@router.command(
    "support",
    help="no intersection once ‖H‖_P exceeds t + 1",
    arguments=SHELL_ARGS + (
        arg("--t", type=float, default=6.0),
        arg("--scales", type=grid_type, default="1.05;1.5;2"),
    ),
)
def cmd_mc_support(args):
    require(args, "H0")
    eps0, samples = _shell_defaults(args)
    out = support_check(ShellSpec(args.n, tuple(args.H0), eps0, args.t), args.scales, samples, args.seed, args.threads)
    parameters = {"n": args.n, "H0": args.H0, "eps0": eps0, "t": args.t, "samples": samples}
    return report(args, parameters, {"rows": out["rows"], "hits": out["hits"]}, {"zero_beyond_polytope": out["passed"]},
                  out["rows"])


@router.command(
    "brion",
    help="∫ over P_{2τ} of e^{2θ(ρ(H) − 2‖H‖_P ρ(H0))} grows linearly in τ",
    arguments=ROOT_SYSTEM_ARGS + (
        arg("--H0", type=vector_type),
        arg("--theta", type=float, default=0.25),
        arg("--tau", type=grid_type, default="4;8;16;32;64"),
        arg("--max-spread", type=float, default=3.0),
    ),
)
def cmd_mc_brion(args):
    rs = root_system_from(args)
    require(args, "H0")
    out = brion_consequence_check(rs, args.H0, args.theta, args.tau, args.max_spread)
    rows = out.pop("rows")
    passed = out.pop("passed")
    results = out | {"rows": [row.model_dump() for row in rows]}
    return report(args, root_system_parameters(args) | {"H0": args.H0, "theta": args.theta}, results,
                  {"linear_in_tau": passed}, rows)


@router.command(
    "anker",
    help="ratio against e^{−ρ(H)}∏_{α>0}(1 + α(H)) on a grid of H",
    arguments=SHELL_ARGS + (
        arg("--t", type=float, default=6.0),
        arg("--H", type=float_vector_type, action="append", help="repeat for several H"),
        arg("--C", type=float),
    ),
)
def cmd_mc_anker(args):
    require(args, "H0")
    eps0, samples = _shell_defaults(args)
    spec = ShellSpec(args.n, tuple(args.H0), eps0, args.t)
    # --H がなければ原点と中心の半分で調べる
    H_grid = args.H or [tuple(0.0 for _ in range(args.n)), tuple(0.5 * x for x in spec.center)]
    out = anker_upper_check(spec, H_grid, samples, args.seed, args.threads, args.C)
    parameters = {"n": args.n, "H0": args.H0, "eps0": eps0, "t": args.t, "samples": samples}
    return report(args, parameters, {"rows": out["rows"], "sup_quotient": out["sup_quotient"], "C": out["C"]},
                  {"anker_upper": out["passed"]}, out["rows"])
