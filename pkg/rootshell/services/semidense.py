import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import sympy

from rootshell.abc import CartanType, ErrorCode
from rootshell.schemas import ExceptionalCase, ScanRow, SemidenseVerdict, SemidenseWitness, WeylTableRow
from rootshell.services.root_core import (
    RootSystem,
    Vector,
    build_root_system,
    coroot,
    is_dominant,
    primitive_direction,
    reflect,
    sub,
    to_fraction,
    unit,
    vec,
    weyl_orbit,
    weyl_order,
)
from rootshell.services.subsystems import (
    SubsystemMask,
    _span_mask,
    bitcount,
    levi_split,
    orthogonal_subsystem,
    standard_subsystem,
    subsystem_base,
    subsystem_orbit,
)
from rootshell.utils import settings

logger = logging.getLogger(__name__)

# Bourbaki nodes (0-based) of the extremal fundamental coweights
EXTREMAL_NODES = {
    CartanType.B: (0,),
    CartanType.C: (0,),
    CartanType.D: (0,),
    CartanType.G: (0, 1),
    CartanType.F: (0, 3),
}
EXTREMAL_NODES_E = {6: (0, 5), 7: (6,), 8: (7,)}


def _extremal_nodes(type_label: CartanType, rank: int) -> list[int]:
    if type_label is CartanType.A:
        return sorted({0, rank - 1})
    if type_label is CartanType.E:
        return list(EXTREMAL_NODES_E[rank])
    return list(EXTREMAL_NODES[type_label])


def extremal_coweights(rs: RootSystem) -> list[int]:
    if not rs.is_irreducible:
        raise ErrorCode.REDUCIBLE_SYSTEM.of(f"{rs.label} is reducible; extremal coweights are defined per factor")
    return _extremal_nodes(rs.type_label, rs.rank)


def extremal_subsystem_of_product(rs: RootSystem, factor: int = 0) -> SubsystemMask:
    """Replace one factor by its extremal subsystem and keep the others whole."""
    if not 0 <= factor < len(rs.components):
        raise ErrorCode.INVALID_INVOCATION.of(f"factor {factor} outside 0..{len(rs.components) - 1}")
    offset = sum(r for _, r in rs.components[:factor])
    type_label, rank = rs.components[factor]
    node = offset + _extremal_nodes(type_label, rank)[0]
    return standard_subsystem(rs, [k for k in range(rs.rank) if k != node])


def extremal_subsystem(rs: RootSystem, node: int | None = None) -> SubsystemMask:
    node = extremal_coweights(rs)[0] if node is None else node
    return standard_subsystem(rs, [k for k in range(rs.rank) if k != node])


def centralizer_subsystem(rs: RootSystem, H0: Vector) -> SubsystemMask:
    if not is_dominant(rs, H0):
        raise ErrorCode.NOT_DOMINANT.of(f"H0 = {H0} is not dominant")
    return orthogonal_subsystem(rs, [H0])


@lru_cache(maxsize=32)
def standard_family(rs: RootSystem) -> tuple[tuple[tuple[int, ...], int, int], ...]:
    """(nodes, member bits, size) for every standard subsystem, largest node sets first."""
    out = []
    for size in range(rs.rank, -1, -1):
        for nodes in combinations(range(rs.rank), size):
            mask = standard_subsystem(rs, nodes)
            out.append((nodes, mask.bits, mask.size))
    return tuple(out)


def corank_one_normal(rs: RootSystem, phi0: SubsystemMask) -> Vector:
    """The line in span(Φ) orthogonal to a corank-one subsystem."""
    rows = [[sympy.Rational(str(a)) for a in rs.roots[i]] for i in subsystem_base(phi0)]
    simple = sympy.Matrix([[sympy.Rational(str(a)) for a in s] for s in rs.simple_vectors])
    rows += [list(v) for v in simple.nullspace()]
    null = sympy.Matrix(rows).nullspace()
    if len(null) != 1:
        raise ErrorCode.NOT_SEMISTANDARD.of("subsystem is not of corank one")
    return tuple(to_fraction(a) for a in null[0])


def _validate_semistandard(rs: RootSystem, phi0: SubsystemMask) -> None:
    if not phi0.members:
        return
    base = subsystem_base(phi0)
    closure = _span_mask(rs, rs.lattice[base])
    if frozenset(int(i) for i, x in enumerate(closure) if x) != phi0.members:
        raise ErrorCode.NOT_SEMISTANDARD.of("Φ0 is not the set of roots in its own span")


def _phi0_orbit(rs: RootSystem, phi0: SubsystemMask, cap: int) -> list[tuple[int, tuple[int, ...], Vector | None]]:
    """(bits, witness word, normal or None) for each member of W.Φ0."""
    if phi0.members and phi0.rank == rs.rank - 1:
        normal = corank_one_normal(rs, phi0)
        orbit = weyl_orbit(rs, normal, cap=cap)
        seen, out = set(), []
        for v, word in orbit.items():
            bits = orthogonal_subsystem(rs, [v]).bits
            if bits not in seen:
                seen.add(bits)
                out.append((bits, word, v))
        return out
    orbit = subsystem_orbit(rs, phi0, cap=cap)
    return [(SubsystemMask(rs, members).bits, word, None) for members, word in orbit.items()]


def _scan(family, orbit) -> tuple[int, tuple] | None:
    for k, (nodes, psi_bits, psi_size) in enumerate(family):
        for bits, word, normal in orbit:
            inter = bitcount(psi_bits & bits)
            if 2 * (inter + len(nodes)) < psi_size:
                return k, (nodes, psi_size, inter, word, normal)
    return None


def check_semidense(rs: RootSystem, phi0: SubsystemMask, cap: int | None = None, threads: int = 1) -> SemidenseVerdict:
    """|Ψ ∩ wΦ0| + rank(Ψ) ≥ ½|Ψ| over standard Ψ and the W-orbit of Φ0."""
    cap = cap or settings["ORBIT_CAP"]
    _validate_semistandard(rs, phi0)
    family = standard_family(rs)
    orbit = _phi0_orbit(rs, phi0, cap)
    logger.info("semidense check on %s: %d standard subsystems x %d conjugates", rs.label, len(family), len(orbit))

    threads = max(1, threads)
    chunk = -(-len(family) // threads)
    parts = [family[i:i + chunk] for i in range(0, len(family), chunk)]
    if threads == 1:
        found = [_scan(parts[0], orbit)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            found = list(pool.map(lambda p: _scan(p, orbit), parts))

    witness = None
    for hit in found:
        if hit is None:
            continue
        _, (nodes, psi_size, inter, word, normal) = hit
        witness = SemidenseWitness(
            psi_nodes=[n + 1 for n in nodes],
            psi_size=psi_size,
            psi_rank=len(nodes),
            intersection=inter,
            lhs=inter + len(nodes),
            rhs=str(Fraction(psi_size, 2)),
            word=[n + 1 for n in word],
            normal=[str(a) for a in normal] if normal is not None else None,
        )
        break

    return SemidenseVerdict(
        holds=witness is None,
        phi0_size=phi0.size,
        phi0_type=phi0.describe(),
        orbit_size=len(orbit),
        standard_count=len(family),
        witness=witness,
    )


def base_case(rs: RootSystem, phi0: SubsystemMask) -> tuple[int, int]:
    """(2(|Φ0| + rank Φ), |Φ|): the inequality at Ψ = Φ in doubled integer form."""
    return 2 * (phi0.size + rs.rank), len(rs.roots)


def scan_extremal_classical(max_rank: int | None = None, threads: int = 1) -> list[ScanRow]:
    max_rank = max_rank or settings["SCAN_MAX_RANK"]
    if max_rank > settings["SCAN_MAX_RANK"]:
        raise ErrorCode.INVALID_INVOCATION.of(f"max_rank {max_rank} exceeds the configured bound {settings['SCAN_MAX_RANK']}")
    rows = []
    for type_label, start in ((CartanType.A, 2), (CartanType.B, 2), (CartanType.C, 3), (CartanType.D, 4)):
        for rank in range(start, max_rank + 1):
            rs = build_root_system(type_label, rank)
            for node in extremal_coweights(rs):
                phi0 = extremal_subsystem(rs, node)
                verdict = check_semidense(rs, phi0, threads=threads)
                lhs, rhs = base_case(rs, phi0)
                rows.append(ScanRow(
                    type=type_label.value, rank=rank, node=node + 1, phi0_type=verdict.phi0_type,
                    holds=verdict.holds, base_case_lhs=lhs, base_case_rhs=rhs,
                ))
    return rows


def scan_all_semistandard(rs: RootSystem, cap: int | None = None) -> dict[str, bool]:
    """Every proper standard Φ0 up to conjugacy, checked over its whole orbit."""
    out = {}
    for nodes, _, _ in standard_family(rs):
        if len(nodes) in (0, rs.rank):
            continue
        phi0 = standard_subsystem(rs, nodes)
        key = ",".join(str(n + 1) for n in nodes)
        out[key] = check_semidense(rs, phi0, cap=cap).holds
    return out


# ---- 例外型の具体的な反例 ----

def witness_intersection(rs: RootSystem, normal: Vector, psi: SubsystemMask) -> int:
    return bitcount(orthogonal_subsystem(rs, [normal]).bits & psi.bits)


def _psi_from_roots(rs: RootSystem, vectors: list[Vector]) -> SubsystemMask:
    rows = rs.lattice[[rs.index[v] for v in vectors]]
    inside = _span_mask(rs, rows)
    return SubsystemMask(rs, frozenset(int(i) for i, x in enumerate(inside) if x))


def _case(rs: RootSystem, phi0: SubsystemMask, description: str, normal: Vector, psi: SubsystemMask) -> ExceptionalCase:
    inter = witness_intersection(rs, normal, psi)
    return ExceptionalCase(
        type=rs.label, phi0_type=phi0.describe(), description=description,
        intersection=inter, psi_rank=psi.rank, psi_size=psi.size,
        fails=2 * (inter + psi.rank) < psi.size,
    )


def _maximal_cases(rs: RootSystem) -> list[ExceptionalCase]:
    out = []
    whole = SubsystemMask(rs, frozenset(range(len(rs.roots))))
    for node in range(rs.rank):
        phi0 = standard_subsystem(rs, [k for k in range(rs.rank) if k != node])
        lhs, rhs = base_case(rs, phi0)
        out.append(ExceptionalCase(
            type=rs.label, phi0_type=phi0.describe(), description=f"maximal standard without node {node + 1}, Psi = Phi",
            intersection=phi0.size, psi_rank=rs.rank, psi_size=whole.size, fails=lhs < rhs,
        ))
    return out


def verify_exceptional_failures() -> dict[str, list[ExceptionalCase] | dict]:
    e = lambda d, i: unit(d, i - 1)  # noqa: E731
    report: dict = {}

    g2 = build_root_system("G", 2)
    f4 = build_root_system("F", 4)
    report["G2"] = _maximal_cases(g2)
    report["F4"] = _maximal_cases(f4)

    e8 = build_root_system("E", 8)
    cases = _maximal_cases(e8)
    phi0 = orthogonal_subsystem(e8, [sub(e(8, 1), e(8, 8))])
    swap = sub(e(8, 3), e(8, 8))
    normal = reflect(e8, swap, sub(e(8, 1), e(8, 8)))
    psi = _psi_from_roots(e8, [sub(e(8, 1), e(8, 2)), sub(e(8, 2), e(8, 3))])
    cases.append(_case(e8, phi0, "E7 orthogonal to e1-e8, w swaps e3 and e8, Psi = <e1-e2, e2-e3>", normal, psi))
    report["E8"] = cases

    e6 = build_root_system("E", 6, model="r9")
    cases = _maximal_cases(e6)
    phi0 = orthogonal_subsystem(e6, [sub(e(9, 1), e(9, 3))])
    normal = reflect(e6, sub(e(9, 1), e(9, 2)), sub(e(9, 1), e(9, 3)))
    beta = tuple(Fraction(a, 3) for a in (1, -2, 1, -2, 1, 1, -2, 1, 1))
    psi = _psi_from_roots(e6, [sub(e(9, 2), e(9, 3)), beta])
    cases.append(_case(e6, phi0, "A5 orthogonal to e1-e3, w swaps e1 and e2, Psi = <e2-e3, beta>", normal, psi))

    e6b = build_root_system("E", 6, model="e8")
    n_d5 = vec(1, 1, -3, 0, 0, 0, 0, 1)
    phi0 = orthogonal_subsystem(e6b, [n_d5])
    normal = reflect(e6b, sub(e(8, 3), e(8, 6)), n_d5)
    gamma = tuple(Fraction(-1, 2) for _ in range(8))
    psi = _psi_from_roots(e6b, [tuple(a + b for a, b in zip(e(8, 6), e(8, 7))), gamma])
    cases.append(_case(e6b, phi0, "D5 orthogonal to e1+e2-3e3+e8, w swaps e3 and e6, Psi = <e6+e7, -(e1+...+e8)/2>", normal, psi))
    report["E6"] = cases

    # Ψ = Φ の判定で落ちない 2 つの部分系は全探索で判定する
    report["E6_exhaustive"] = {
        "A5": check_semidense(e6, standard_subsystem(e6, [0, 2, 3, 4, 5])).holds,
        "D5": check_semidense(e6, extremal_subsystem(e6, 0)).holds,
    }
    return report


# ---- 悪い超平面と剰余類の表 ----

def coroot_lines(rs: RootSystem) -> set[tuple[int, ...]]:
    return {primitive_direction(coroot(rs, i)) for i in rs.positive_roots}


def bad_hyperplanes(rs: RootSystem, H0: Vector, cap: int | None = None) -> dict[str, object]:
    """Lines W.ℝ(H0 − wH0) for w ∈ W, compared with the coroot lines."""
    if not is_dominant(rs, H0) or all(a == 0 for a in H0):
        raise ErrorCode.NOT_DOMINANT.of("bad_hyperplanes needs a nonzero dominant H0")
    cap = cap or settings["ORBIT_CAP"]
    H0 = tuple(to_fraction(a) for a in H0)
    lines: set[tuple[int, ...]] = set()
    seeds: set[tuple[int, ...]] = set()
    for v in weyl_orbit(rs, H0, cap=cap):
        if v != H0:
            seeds.add(primitive_direction(sub(H0, v)))
    for seed in seeds:
        if seed in lines:
            continue
        orbit = weyl_orbit(rs, tuple(Fraction(a) for a in seed), cap=cap)
        lines.update(primitive_direction(v) for v in orbit)
    roots = coroot_lines(rs)
    return {
        "lines": sorted(lines),
        "coroot_lines": sorted(roots),
        "extra_lines": sorted(lines - roots),
        "equals_coroot_lines": lines == roots,
        "contains_coroot_lines": roots <= lines,
    }


WEYL_TABLE_TYPES = (("A", None), ("B", None), ("C", None), ("D", None), ("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2))


def weyl_table_row(rs: RootSystem, node: int | None = None) -> WeylTableRow:
    node = extremal_coweights(rs)[0] if node is None else node
    nodes = [k for k in range(rs.rank) if k != node]
    levi_pos, outside = levi_split(rs, nodes)
    order = weyl_order(rs)
    levi_order = weyl_order(rs, nodes)
    levi = standard_subsystem(rs, nodes)
    return WeylTableRow(
        type=rs.type_label.value, rank=rs.rank, node=node + 1, levi_type=levi.describe() if levi.members else "empty",
        weyl_order=order, levi_weyl_order=levi_order, coset_count=order // levi_order,
        roots=len(rs.roots), levi_roots=levi.size, unipotent_roots=len(outside),
        coset_identity=order // levi_order == len(outside) + 1,
    )


def weyl_table(classical_rank: int = 4) -> list[WeylTableRow]:
    rows = []
    for type_label, rank in WEYL_TABLE_TYPES:
        rank = rank or classical_rank
        if type_label == "C":
            rank = max(rank, 3)
        if type_label == "D":
            rank = max(rank, 4)
        rows.append(weyl_table_row(build_root_system(type_label, rank)))
    return rows

