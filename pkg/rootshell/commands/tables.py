from rootshell.commands.base import CommandRouter, arg, positive_int, report
from rootshell.services.root_core import build_root_system
from rootshell.services.semidense import WEYL_TABLE_TYPES, extremal_coweights, weyl_table, weyl_table_row

router = CommandRouter("tables", "reference tables")


@router.command(
    "weyl",
    help="|W|, |W_M|, |W/W_M| and root counts for one extremal coweight per type",
    arguments=(
        arg("--classical-rank", type=positive_int, default=4, help="rank used for the A-D rows"),
        arg("--all-extremal", action="store_true", help="one row per extremal node of every type"),
    ),
)
def cmd_tables_weyl(args):
    if args.all_extremal:
        rows = []
        for type_label, rank in WEYL_TABLE_TYPES:
            rs = build_root_system(type_label, rank or max(args.classical_rank, {"C": 3, "D": 4}.get(type_label, 1)))
            rows += [weyl_table_row(rs, node) for node in extremal_coweights(rs)]
    else:
        rows = weyl_table(args.classical_rank)
    results = {f"{row.type}{row.rank}/{row.node}": row.model_dump() for row in rows}
    # |W/W_M| = |Φ⁺∖Φ_M⁺| + 1 exactly for A, B, C and G2/W_M| = |Φ⁺∖Φ_M⁺| + 1 exactly for A, B, C and G2
    verdicts = {"coset_identity": all(row.coset_identity == (row.type in "ABCG") for row in rows)}
    return report(args, {"classical_rank": args.classical_rank, "all_extremal": args.all_extremal}, results, verdicts, rows)
