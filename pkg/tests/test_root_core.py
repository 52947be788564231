from fractions import Fraction

import pytest

from rootshell.abc import ErrorCode, RootshellError
from rootshell.services.root_core import (
    act, build_product_system, build_root_system, conv_dominance, element_from_word, identity, is_dominant,
    longest_element, primitive_direction, reflect, rho, scale, vec, weyl_enumerate, weyl_orbit, weyl_order,
)


def test_root_counts():
    cases = [
        (("A", 1), 2),
        (("A", 2), 6),
        (("B", 3), 18),
        (("C", 3), 18),
        (("D", 4), 24),
        (("G", 2), 12),
        (("F", 4), 48),
        (("E", 6), 72),
        (("E", 7), 126),
        (("E", 8), 240),
    ]
    for (type_label, rank), expected in cases:
        rs = build_root_system(type_label, rank)
        assert len(rs.roots) == expected, rs.label
        assert len(rs.positive_roots) == expected // 2, rs.label


def test_e6_models_agree():
    r9 = build_root_system("E", 6, model="r9")
    e8 = build_root_system("E", 6, model="e8")
    assert len(r9.roots) == len(e8.roots) == 72
    assert weyl_order(r9) == weyl_order(e8) == 51840


def test_weyl_orders_by_stabilizer_chain():
    cases = [
        (("A", 2), 6),
        (("B", 3), 48),
        (("C", 4), 384),
        (("D", 4), 192),
        (("G", 2), 12),
        (("F", 4), 1152),
        (("E", 6), 51840),
        (("E", 7), 2903040),
        (("E", 8), 696729600),
    ]
    for (type_label, rank), expected in cases:
        assert weyl_order(build_root_system(type_label, rank)) == expected


def test_enumeration_matches_order():
    for type_label, rank in (("A", 3), ("B", 3), ("G", 2)):
        rs = build_root_system(type_label, rank)
        elements = weyl_enumerate(rs)
        assert len(elements) == weyl_order(rs)
        assert len({w.root_perm for w in elements}) == len(elements)


def test_invalid_cartan_types():
    cases = [("B", 1), ("C", 2), ("D", 3), ("E", 9), ("F", 3), ("G", 3), ("X", 2)]
    for type_label, rank in cases:
        with pytest.raises(RootshellError) as info:
            build_root_system(type_label, rank)
        assert info.value.code is ErrorCode.INVALID_CARTAN_TYPE
        assert info.value.exit_status == 2


def test_rho_and_longest_element():
    rs = build_root_system("A", 2)
    assert rho(rs) == vec(1, 0, -1)
    for type_label, rank in (("A", 2), ("B", 3), ("G", 2), ("F", 4)):
        rs = build_root_system(type_label, rank)
        w0 = longest_element(rs)
        # w0 sends ρ to −ρ and has length |Φ⁺|
        assert act(rs, w0, rho(rs)) == scale(-1, rho(rs))
        assert w0.word_length == len(rs.positive_roots)


def test_fundamental_coweights_are_dual():
    rs = build_root_system("E", 7)
    for i, w in enumerate(rs.fundamental_coweights):
        for j, a in enumerate(rs.simple_vectors):
            assert sum(x * y for x, y in zip(w, a)) == (1 if i == j else 0)


def test_words_compose_right_to_left():
    rs = build_root_system("A", 2)
    assert element_from_word(rs, (0, 0)) == identity(rs)
    v = vec(3, 1, -4)
    s1s2 = element_from_word(rs, (0, 1))
    assert act(rs, s1s2, v) == reflect(rs, rs.simple_roots[0], reflect(rs, rs.simple_roots[1], v))


def test_orbit_words_are_witnesses():
    rs = build_root_system("B", 3)
    start = rs.fundamental_coweights[0]
    orbit = weyl_orbit(rs, start)
    assert len(orbit) == 6
    for v, word in orbit.items():
        assert act(rs, element_from_word(rs, word), start) == v


def test_orbit_cap():
    rs = build_root_system("E", 8)
    with pytest.raises(RootshellError) as info:
        weyl_orbit(rs, rho(rs), cap=1000)
    assert info.value.code is ErrorCode.ORBIT_CAP_EXCEEDED


def test_conv_dominance():
    rs = build_root_system("A", 2)
    Y = vec(2, 0, -2)
    cases = [
        (vec(0, 0, 0), True),
        (vec(-2, 0, 2), True),
        (vec(1, 1, -2), True),
        (vec(3, -1, -2), False),
    ]
    for H, expected in cases:
        assert conv_dominance(rs, H, Y) is expected
    with pytest.raises(RootshellError):
        conv_dominance(rs, Y, vec(-2, 0, 2))


def test_primitive_direction():
    cases = [
        ((Fraction(1, 2), Fraction(-1, 2), 0), (1, -1, 0)),
        ((0, -4, 6), (0, 2, -3)),
        ((0, 0, 0), (0, 0, 0)),
    ]
    for v, expected in cases:
        assert primitive_direction(v) == expected


def test_product_system():
    rs = build_product_system([("B", 3), ("A", 2)])
    assert rs.label == "B3xA2"
    assert rs.rank == 5
    assert len(rs.roots) == 18 + 6
    assert not rs.is_irreducible
    assert is_dominant(rs, rs.fundamental_coweights[3])
