import pytest

from rootshell.abc import ErrorCode, RootshellError
from rootshell.services.root_core import build_product_system, build_root_system, vec
from rootshell.services.semidense import (
    bad_hyperplanes, base_case, centralizer_subsystem, check_semidense, extremal_coweights, extremal_subsystem,
    verify_exceptional_failures, weyl_table,
)
from rootshell.services.subsystems import SubsystemMask, orthogonal_subsystem, standard_subsystem


def test_extremal_subsystems_hold():
    for type_label, rank in (("A", 2), ("A", 3), ("B", 3), ("C", 3), ("D", 4)):
        rs = build_root_system(type_label, rank)
        verdict = check_semidense(rs, extremal_subsystem(rs))
        assert verdict.holds, rs.label
        assert verdict.witness is None


def test_b3_short_a1xa1_fails_at_whole_system():
    rs = build_root_system("B", 3)
    verdict = check_semidense(rs, standard_subsystem(rs, (0, 2)))
    assert not verdict.holds
    assert verdict.phi0_type == "A1xA1"
    w = verdict.witness
    # Ψ = Φ: 4 + 3 < 18 / 2
    assert w.psi_nodes == [1, 2, 3]
    assert w.psi_size == 18
    assert w.intersection == 4
    assert w.lhs == 7
    assert w.rhs == "9"


def test_non_closed_subsystem_is_rejected():
    rs = build_root_system("B", 2)
    short = orthogonal_subsystem(rs, [vec(1, 0)])
    assert short.size == 2
    check_semidense(rs, short)

    # the long roots ±e1±e2 alone are not all roots of their span
    members = frozenset(i for i, r in enumerate(rs.roots) if sum(x * x for x in r) == 2)
    with pytest.raises(RootshellError) as info:
        check_semidense(rs, SubsystemMask(rs, members))
    assert info.value.code is ErrorCode.NOT_SEMISTANDARD


def test_centralizer_needs_dominant():
    rs = build_root_system("A", 2)
    assert centralizer_subsystem(rs, vec(1, 1, -2)).describe() == "A1"
    with pytest.raises(RootshellError) as info:
        centralizer_subsystem(rs, vec(-1, 0, 1))
    assert info.value.code is ErrorCode.NOT_DOMINANT


def test_extremal_coweights_need_irreducible():
    assert extremal_coweights(build_root_system("A", 4)) == [0, 3]
    assert extremal_coweights(build_root_system("E", 7)) == [6]
    with pytest.raises(RootshellError) as info:
        extremal_coweights(build_product_system([("A", 1), ("A", 1)]))
    assert info.value.code is ErrorCode.REDUCIBLE_SYSTEM


def test_base_case():
    rs = build_root_system("B", 3)
    assert base_case(rs, extremal_subsystem(rs)) == (2 * (8 + 3), 18)


def test_exceptional_failures():
    report = verify_exceptional_failures()
    # every maximal standard subsystem of G2 and F4 already fails at Ψ = Φ
    for case in report["G2"] + report["F4"]:
        assert case.fails, case.description
    assert report["E8"][-1].fails
    assert report["E8"][-1].phi0_type == "E7"
    a5, d5 = report["E6"][-2], report["E6"][-1]
    assert a5.phi0_type == "A5" and a5.fails and a5.intersection == 0
    assert d5.phi0_type == "D5" and not d5.fails and d5.intersection == 2
    assert report["E6_exhaustive"] == {"A5": False, "D5": True}


def test_e7_extremal_holds():
    rs = build_root_system("E", 7)
    verdict = check_semidense(rs, extremal_subsystem(rs), threads=2)
    assert verdict.holds
    assert verdict.phi0_type == "E6"


def test_bad_hyperplanes_contain_coroot_lines():
    rs = build_root_system("A", 2)
    out = bad_hyperplanes(rs, vec(2, -1, -1))
    assert out["contains_coroot_lines"]
    assert len(out["coroot_lines"]) == 3
    with pytest.raises(RootshellError):
        bad_hyperplanes(rs, vec(0, 0, 0))


def test_weyl_table():
    rows = {(row.type, row.rank): row for row in weyl_table(4)}
    cases = [
        (("A", 4), 120, 24, 5),
        (("B", 4), 384, 48, 8),
        (("C", 4), 384, 48, 8),
        (("D", 4), 192, 24, 8),
        (("E", 6), 51840, 1920, 27),
        (("E", 7), 2903040, 51840, 56),
        (("E", 8), 696729600, 2903040, 240),
        (("F", 4), 1152, 48, 24),
        (("G", 2), 12, 2, 6),
    ]
    for key, order, levi_order, cosets in cases:
        row = rows[key]
        assert (row.weyl_order, row.levi_weyl_order, row.coset_count) == (order, levi_order, cosets), key
        # |W/W_M| = |Φ⁺∖Φ_M⁺| + 1 only for A, B, C and G2
        assert row.coset_identity is (row.type in "ABCG"), key
