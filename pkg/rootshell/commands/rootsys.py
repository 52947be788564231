import logging

from rootshell.commands.base import ROOT_SYSTEM_ARGS, CommandRouter, one_based, report, root_system_from, root_system_parameters
from rootshell.services.root_core import longest_element, rho, weyl_order
from rootshell.services.semidense import extremal_coweights

logger = logging.getLogger(__name__)

router = CommandRouter("rootsys", "root system data", arguments=ROOT_SYSTEM_ARGS)


@router.command(help="counts, ρ, fundamental coweights and a reduced word for w0")
def cmd_rootsys(args):
    rs = root_system_from(args)
    w0 = longest_element(rs)
    results = {
        "label": rs.label,
        "rank": rs.rank,
        "ambient_dim": rs.ambient_dim,
        "model": rs.model,
        "roots": len(rs.roots),
        "positive_roots": len(rs.positive_roots),
        "weyl_order": weyl_order(rs),
        "simple_roots": [list(v) for v in rs.simple_vectors],
        "rho": list(rho(rs)),
        "fundamental_coweights": [list(v) for v in rs.fundamental_coweights],
        "w0_word": one_based(w0.word),
        "w0_length": w0.word_length,
    }
    # 極値余ウェイトは既約のときだけ
    if rs.is_irreducible:
        results["extremal_nodes"] = one_based(extremal_coweights(rs))
    logger.info("%s: %d roots", rs.label, len(rs.roots))
    table = [{"index": i, "root": " ".join(str(a) for a in r), "positive": i in rs.positive_roots}
             for i, r in enumerate(rs.roots)]
    return report(args, root_system_parameters(args), results, table=table)
