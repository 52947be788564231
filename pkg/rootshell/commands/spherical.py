import logging

from rootshell.abc import RankOneGroup
from rootshell.commands.base import (
    ROOT_SYSTEM_ARGS, CommandRouter, arg, complex_type, float_vector_type, grid_type, positive_int, report, require,
    root_system_from, root_system_parameters,
)
from rootshell.services.harmonic import (
    MajorantParams, SpectralParam, c_rank_one, disk_choice, hc_expansion_rank1, khat_decay_check, majorant_equivalence,
    spherical_mc, spherical_rank_one, time_average_lower_bound, verify_cx_bound, verify_gv_decay, verify_sph_bound,
)
from rootshell.utils import settings

logger = logging.getLogger(__name__)

GROUP_ARG = arg("--group", choices=[g.value for g in RankOneGroup], default=RankOneGroup.SL2R.value)

router = CommandRouter("spherical", "spherical functions and their majorants")


def _grid_result(args, parameters: dict, grid):
    results = grid.model_dump()
    return report(args, parameters, results, {grid.name: grid.passed}, grid.values)


@router.command(
    "eval",
    help="φ_λ(e^t) for SL2(ℝ) or SL2(ℂ) over a t grid",
    arguments=(GROUP_ARG, arg("--lambda", dest="lam", type=complex_type), arg("--t", type=grid_type)),
)
def cmd_spherical_eval(args):
    require(args, "lam", "t")
    values = spherical_rank_one(args.group, args.lam, args.t)
    table = [{"t": t, "re": v.real, "im": v.imag, "abs": abs(v)} for t, v in zip(args.t, values)]
    results = {
        "values": {f"{t:.17g}": complex(v) for t, v in zip(args.t, values)},
        "c": c_rank_one(args.group, args.lam) if abs(args.lam) > 0 else None,
    }
    return report(args, {"group": args.group, "lambda": args.lam, "t": args.t}, results, table=table)


@router.command(
    "mc",
    help="Monte Carlo φ_λ(e^H) on SL_n(ℝ), n = 2, 3",
    arguments=(
        arg("--n", type=int, choices=(2, 3), default=3),
        arg("--lambda", dest="lam", type=float_vector_type, help="diagonal coordinates of λ"),
        arg("--H", type=float_vector_type),
        arg("--samples", type=positive_int),
    ),
)
def cmd_spherical_mc(args):
    require(args, "lam", "H")
    samples = args.samples or settings["shell"]["samples"]
    mean, stderr = spherical_mc(args.n, args.lam, args.H, samples, args.seed, args.threads)
    results = {"value": mean, "stderr": stderr, "samples": samples}
    if args.n == 2:
        t = float(args.H[0] - args.H[1])
        lam = (args.lam[0] - args.lam[1]) / 2
        exact = complex(spherical_rank_one(RankOneGroup.SL2R, lam, t)[0])
        results["quadrature"] = exact
        results["deviation_in_stderr"] = abs(mean - exact) / stderr if stderr > 0 else 0.0
    return report(args, {"n": args.n, "lambda": args.lam, "H": args.H, "samples": samples}, results)


@router.command(
    "verify-bd",
    help="|φ_λ| against (1+|λ|)^a Θ e^{−ρt+|Im λ|t}",
    arguments=(
        GROUP_ARG,
        arg("--lambda-grid", type=grid_type, default="0,20,41"),
        arg("--t", type=grid_type, default="0,20,41"),
        arg("--im-grid", type=grid_type, default="0"),
        arg("--a", type=float),
        arg("--kappa", type=float),
        arg("--C", type=float),
    ),
)
def cmd_spherical_verify_bd(args):
    defaults = MajorantParams.from_settings()
    params = MajorantParams(a=args.a or defaults.a, kappa=args.kappa or defaults.kappa, C=args.C or defaults.C)
    grid = verify_sph_bound(args.group, args.lambda_grid, args.t, args.im_grid, params)
    return _grid_result(args, {"group": args.group}, grid)


@router.command(
    "verify-cx",
    help="two-sided SL2(ℂ) bound; the lower side on tλ ≤ 1",
    arguments=(
        arg("--lambda-grid", type=grid_type, default="0,20,41"),
        arg("--t", type=grid_type, default="0,20,41"),
        arg("--C", type=float),
        arg("--lower", type=float, default=0.3),
    ),
)
def cmd_spherical_verify_cx(args):
    grid = verify_cx_bound(args.lambda_grid, args.t, args.C, args.lower)
    return _grid_result(args, {"lower": args.lower}, grid)


@router.command(
    "lowerbound",
    help="time average of |k̂_t(λ)|² over [τ, 2τ] on a compact Ω",
    arguments=(
        GROUP_ARG,
        arg("--lambda-grid", type=grid_type, default="1,3,9"),
        arg("--tau", type=grid_type, default="20;40"),
        arg("--eps0", type=float),
        arg("--c0", type=float),
        arg("--max-spread", type=float, default=3.0),
    ),
)
def cmd_spherical_lowerbound(args):
    eps0 = args.eps0 or settings["shell"]["eps0"]
    out = time_average_lower_bound(args.group, args.lambda_grid, args.tau, eps0, args.c0)
    rows = out.pop("rows")
    # τ ごとの非対角項 × τ の上限
    sup_by_tau = [max(abs(r.off_diagonal_times_tau) for r in rows if r.tau == tau) for tau in args.tau]
    positive = [v for v in sup_by_tau if v > 0]
    spread = max(positive) / min(positive) if positive else 1.0
    results = out | {"sup_off_diagonal_times_tau_by_tau": sup_by_tau, "off_diagonal_spread": spread}
    verdicts = {"lower_bound": out["passed"], "off_diagonal_bounded": spread < args.max_spread}
    return report(args, {"group": args.group, "lambda": args.lambda_grid, "tau": args.tau, "eps0": eps0},
                  results, verdicts, rows)


@router.command(
    "gv",
    help="rank-one main term c(λ)e^{(iλ−ρ)t} + c(−λ)e^{(−iλ−ρ)t} and its residual decay",
    arguments=(
        GROUP_ARG,
        arg("--lambda-grid", type=grid_type, default="1;2;4"),
        arg("--t", type=grid_type, default="5,30,26"),
        arg("--margin", type=float, default=0.05),
        arg("--C", type=float),
    ),
)
def cmd_spherical_gv(args):
    grid = verify_gv_decay(args.group, args.lambda_grid, args.t, args.margin, args.C)
    return _grid_result(args, {"group": args.group, "margin": args.margin}, grid)


@router.command(
    "khat",
    help="decay of the transform of a smooth shell profile in λ",
    arguments=(
        GROUP_ARG,
        arg("--lambda-grid", type=grid_type, default="0,40,41"),
        arg("--t", type=grid_type, default="1,10,10"),
        arg("--eps0", type=float),
        arg("--N", type=int, default=2),
        arg("--C", type=float),
    ),
)
def cmd_spherical_khat(args):
    eps0 = args.eps0 or settings["shell"]["eps0"]
    grid = khat_decay_check(args.group, args.lambda_grid, args.t, eps0, args.N, args.C)
    return _grid_result(args, {"group": args.group, "eps0": eps0, "N": args.N}, grid)


@router.command(
    "hc",
    help="shell transform against its two-term expansion",
    arguments=(
        GROUP_ARG,
        arg("--lambda", dest="lam", type=complex_type),
        arg("--t", type=grid_type, default="5,30,6"),
        arg("--eps0", type=float),
    ),
)
def cmd_spherical_hc(args):
    require(args, "lam")
    eps0 = args.eps0 or settings["shell"]["eps0"]
    rows = [{"t": t} | hc_expansion_rank1(args.group, args.lam, t, eps0) for t in args.t]
    # 残差が 2·max|c|·ε0² 以内に収まるか
    ok = all(row["residual"] <= row["bound"] for row in rows)
    table = [{"t": r["t"], "residual": r["residual"], "bound": r["bound"]} for r in rows]
    return report(args, {"group": args.group, "lambda": args.lam, "eps0": eps0}, {"rows": rows},
                  {"residual_within_bound": ok}, table)


@router.command(
    "disk",
    help="radius C·s of a disk around λ along ρ avoiding the root hyperplanes",
    arguments=ROOT_SYSTEM_ARGS + (
        arg("--lambda", dest="lam", type=float_vector_type, help="coordinates in the fundamental weights"),
        arg("--lambda-im", type=float_vector_type),
        arg("--s", type=float),
        arg("--kappa", type=float),
        arg("--kappa-prime", type=float),
        arg("--points", type=positive_int, default=64),
    ),
)
def cmd_spherical_disk(args):
    rs = root_system_from(args)
    require(args, "lam", "s")
    kappa = args.kappa or settings["majorant"]["kappa"]
    kappa_prime = args.kappa_prime or kappa / 2
    lam = SpectralParam(tuple(args.lam), tuple(args.lambda_im or ()))
    choice = disk_choice(rs, lam, args.s, kappa, kappa_prime, args.points)
    results = {k: getattr(choice, k) for k in ("C", "k", "tau", "sigma", "min_pairing", "max_imaginary", "points")}
    parameters = root_system_parameters(args) | {"lambda": args.lam, "s": args.s, "kappa": kappa, "kappa_prime": kappa_prime}
    return report(args, parameters, results, {"certificate": choice.certificate})


@router.command(
    "equivalence",
    help="f_α against (|α(H)|+1)/(|α(H)⟨λ,α⟩|+1) on ‖λ‖ ≤ R",
    arguments=ROOT_SYSTEM_ARGS + (
        arg("--R", type=float, default=5.0),
        arg("--samples", type=positive_int, default=200),
        arg("--H-max", type=float, default=20.0),
    ),
)
def cmd_spherical_equivalence(args):
    rs = root_system_from(args)
    grid = majorant_equivalence(rs, args.R, args.samples, args.seed, args.H_max)
    logger.info("equivalence ratios in [%.6g, %.6g]", grid.inf_ratio, grid.sup_ratio)
    return _grid_result(args, root_system_parameters(args) | {"R": args.R}, grid)
