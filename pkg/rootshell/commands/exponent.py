import logging
import math

from rootshell.abc import ErrorCode, RootshellError
from rootshell.commands.base import (
    ROOT_SYSTEM_ARGS, CommandRouter, arg, grid_type, nodes_type, one_based, positive_int, report, root_system_from,
    root_system_parameters,
)
from rootshell.services.exponent import (
    H0_for, check_rootsize_constants, check_S_identities, check_S_lower_bound, exponent_table, log_exponent_k, spectral_integral, verify_power_k,
)
from rootshell.services.semidense import extremal_subsystem, extremal_subsystem_of_product
from rootshell.services.subsystems import standard_subsystem

logger = logging.getLogger(__name__)

LEVI_ARGS = ROOT_SYSTEM_ARGS + (
    arg("--nodes", type=nodes_type, help="simple roots of the Levi Φ_M (default: extremal)"),
)

router = CommandRouter("exponent", "barycentric exponent calculus", arguments=LEVI_ARGS)


def _levi(args, rs):
    if args.nodes is None:
        return extremal_subsystem(rs) if rs.is_irreducible else extremal_subsystem_of_product(rs)
    if any(n >= rs.rank for n in args.nodes):
        raise ErrorCode.INVALID_INVOCATION.of(f"nodes must lie in 1..{rs.rank}")
    return standard_subsystem(rs, args.nodes)


def _parameters(args, M) -> dict:
    return root_system_parameters(args) | {"levi_nodes": one_based(M.nodes or ())}


@router.command("k", help="the log-exponent k for Φ_M")
def cmd_exponent_k(args):
    rs = root_system_from(args)
    M = _levi(args, rs)
    tbl = exponent_table(rs, M, threads=args.threads)
    results = {"type": rs.label, "levi": M.describe(), "rows": len(tbl.rows)}
    try:
        results["k"] = log_exponent_k(rs, M, tbl)
    except RootshellError as e:
        if e.code is not ErrorCode.NOT_SEMIDENSE:
            raise
        results["k"] = None
        results["not_semidense"] = e.detail
    return report(args, _parameters(args, M), results)


@router.command(
    "table",
    help="every (σ, i, w) row with n, s, S and e; identities and the lower bound are verified",
)
def cmd_exponent_table(args):
    rs = root_system_from(args)
    M = _levi(args, rs)
    tbl = exponent_table(rs, M, threads=args.threads)
    identities = check_S_identities(tbl)
    lower = check_S_lower_bound(tbl)
    # T_σ 上の根の大きさの定数をサンプルで確認する
    rootsize = check_rootsize_constants(rs, seed=args.seed)
    results = {
        "type": rs.label,
        "levi": M.describe(),
        "weyl_elements": len(tbl.elements),
        "rows": len(tbl.rows),
        "identity_violations": [v.model_dump() for v in identities[:20]],
        "lower_bound_violations": len(lower),
        "first_lower_bound_violation": lower[0].model_dump() if lower else None,
        "k": None if lower else max(max(row.e) for row in tbl.rows),
        "rootsize_violations": [v.model_dump() for v in rootsize[:20]],
    }
    return report(args, _parameters(args, M), results, {"S_identities": not identities, "rootsize_constants": not rootsize}, tbl.csv_rows())


@router.command(
    "verify",
    help="bounded ratios of the barycentric integrals and of the spectral integral against (log t)^k",
    arguments=(
        arg("--t", type=grid_type, help="t values, e.g. '10;100;1000'"),
        arg("--N", type=positive_int, help="decay exponent of (1 + x)^{-N}"),
        arg("--max-spread", type=float, default=1.25),
        arg("--spectral", action="store_true", help="also integrate the rank <= 2 spectral integral"),
        arg("--spectral-spread", type=float, default=3.0),
    ),
)
def cmd_exponent_verify(args):
    rs = root_system_from(args)
    M = _levi(args, rs)
    t_grid = args.t or (1e2, 1e3, 1e4)
    power = verify_power_k(rs, M, t_grid=t_grid, N=args.N)
    k = log_exponent_k(rs, M)
    results = {
        "type": rs.label,
        "k": k,
        "N": power["N"],
        "t_grid": power["t_grid"],
        "max_ratio_by_t": power["max_ratio_by_t"],
        "spread": power["spread"],
    }
    verdicts = {"power_k_spread": power["spread"] < args.max_spread}

    if args.spectral:
        spectral_t = args.t or (10.0, 1e2, 1e3)
        values = [spectral_integral(rs, M, t) for t in spectral_t]
        ratios = [v / math.log(t) ** k for v, t in zip(values, spectral_t)]
        spread = max(ratios) / min(ratios)
        logger.info("spectral integral ratios %s", ratios)
        results["spectral"] = {"t_grid": list(spectral_t), "values": values, "ratios": ratios, "spread": spread,
                               "H0": list(H0_for(rs, M))}
        verdicts["spectral_spread"] = spread < args.spectral_spread
    return report(args, _parameters(args, M), results, verdicts, power["rows"])
