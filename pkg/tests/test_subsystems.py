import pytest

from rootshell.abc import CartanType, ErrorCode, RootshellError
from rootshell.services.root_core import build_root_system, element_from_word, vec
from rootshell.services.subsystems import (
    classify_type, in_WI, levi_split, linearly_dependent, orthogonal_subsystem, standard_subsystem, subsystem_base,
    subsystem_orbit,
)


def test_standard_subsystem_types():
    cases = [
        (("A", 3), (0, 1), "A2", 6),
        (("B", 3), (0, 2), "A1xA1", 4),
        (("B", 3), (1, 2), "B2", 8),
        (("E", 6), (1, 2, 3, 4, 5), "D5", 40),
        (("E", 7), (0, 1, 2, 3, 4, 5), "E6", 72),
        (("E", 8), (0, 1, 2, 3, 4, 5, 6), "E7", 126),
        (("F", 4), (1, 2, 3), "C3", 18),
        (("G", 2), (0,), "A1", 2),
    ]
    for (type_label, rank), nodes, expected, size in cases:
        mask = standard_subsystem(build_root_system(type_label, rank), nodes)
        assert mask.describe() == expected
        assert mask.size == size
        assert mask.rank == len(nodes)


def test_empty_subsystem():
    mask = standard_subsystem(build_root_system("A", 1), ())
    assert mask.describe() == "empty"
    assert mask.size == 0
    with pytest.raises(RootshellError) as info:
        classify_type(mask)
    assert info.value.code is ErrorCode.NOT_SEMISTANDARD


def test_base_of_standard_subsystem_is_simple():
    rs = build_root_system("D", 5)
    nodes = (0, 1, 3)
    mask = standard_subsystem(rs, nodes)
    assert sorted(subsystem_base(mask)) == sorted(rs.simple_roots[k] for k in nodes)


def test_orthogonal_subsystem():
    rs = build_root_system("A", 3)
    mask = orthogonal_subsystem(rs, [vec(1, 1, -1, -1)])
    assert classify_type(mask) == [(CartanType.A, 1), (CartanType.A, 1)]
    assert mask.size == 4


def test_levi_split_counts():
    rs = build_root_system("B", 4)
    levi, outside = levi_split(rs, (1, 2, 3))
    assert len(levi) == 9
    assert len(outside) == 16 - 9


def test_in_WI():
    rs = build_root_system("A", 3)
    assert in_WI(rs, (0, 1), element_from_word(rs, (0, 1, 0)))
    assert not in_WI(rs, (0, 1), element_from_word(rs, (2,)))


def test_subsystem_orbit_sizes():
    rs = build_root_system("A", 3)
    # conjugates of a single A1 are the six root pairs ±α
    assert len(subsystem_orbit(rs, standard_subsystem(rs, (0,)))) == 6
    assert len(subsystem_orbit(rs, standard_subsystem(rs, (0, 2)))) == 3


def test_standard_members_agree_with_gram_determinant():
    cases = [(("A", 3), (0, 2)), (("B", 3), (1, 2)), (("C", 3), (0, 1)), (("G", 2), (1,)), (("D", 4), (0, 2, 3))]
    for (type_label, rank), nodes in cases:
        rs = build_root_system(type_label, rank)
        mask = standard_subsystem(rs, nodes)
        generators = [rs.roots[rs.simple_roots[i]] for i in nodes]
        expected = frozenset(i for i, r in enumerate(rs.roots) if linearly_dependent(generators, r))
        assert mask.members == expected, rs.label
        # the span of simple roots meets Φ in the roots supported on those nodes
        support = frozenset(
            i for i, coords in enumerate(rs.simple_coordinates)
            if all(c == 0 for k, c in enumerate(coords) if k not in nodes)
        )
        assert mask.members == support, rs.label
