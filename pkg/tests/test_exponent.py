import math

import pytest

from rootshell.abc import ErrorCode, RootshellError
from rootshell.services.exponent import (
    I_integral, check_rootsize_constants, check_S_identities, check_S_lower_bound, exponent_table, log_exponent_k,
    phi_sigma_i, rootsize_constants, spectral_integral, verify_power_k,
)
from rootshell.services.root_core import build_root_system, weyl_order
from rootshell.services.semidense import extremal_subsystem
from rootshell.services.subsystems import standard_subsystem


def test_a1_without_levi_has_one_log():
    rs = build_root_system("A", 1)
    M = standard_subsystem(rs, ())
    tbl = exponent_table(rs, M)
    assert len(tbl.rows) == 2
    assert log_exponent_k(rs, M, tbl) == 1


def test_table_shape_and_endpoints():
    cases = [("A", 2), ("B", 2), ("A", 3)]
    for type_label, rank in cases:
        rs = build_root_system(type_label, rank)
        M = extremal_subsystem(rs)
        tbl = exponent_table(rs, M)
        assert len(tbl.rows) == weyl_order(rs) * math.factorial(rank)
        for row in tbl.rows:
            assert row.S[0] == 2 * len(M.positive) - len(rs.positive_roots)
            assert row.S[rank] == 0
            assert row.e[0] == 0


def test_S_identities():
    for type_label, rank in (("A", 2), ("B", 2), ("G", 2)):
        rs = build_root_system(type_label, rank)
        tbl = exponent_table(rs, extremal_subsystem(rs), threads=2)
        assert check_S_identities(tbl) == [], rs.label
        # G2 is not semi-dense at its extremal subsystem
        assert bool(check_S_lower_bound(tbl)) is (type_label == "G"), rs.label


def test_threads_do_not_change_the_table():
    rs = build_root_system("B", 3)
    M = extremal_subsystem(rs)
    one = exponent_table(rs, M, threads=1)
    four = exponent_table(rs, M, threads=4)
    assert one.rows == four.rows


def test_lower_bound_fails_off_semidense():
    rs = build_root_system("B", 3)
    M = standard_subsystem(rs, (0, 2))
    assert check_S_lower_bound(exponent_table(rs, M))
    with pytest.raises(RootshellError) as info:
        log_exponent_k(rs, M)
    assert info.value.code is ErrorCode.NOT_SEMIDENSE


def test_rank_cap():
    rs = build_root_system("E", 6)
    with pytest.raises(RootshellError) as info:
        exponent_table(rs, extremal_subsystem(rs))
    assert info.value.code is ErrorCode.ENUMERATION_CAP_EXCEEDED


def test_phi_sigma_chain():
    rs = build_root_system("A", 2)
    sigma = (1, 0)
    assert phi_sigma_i(rs, sigma, 0).size == 6
    assert phi_sigma_i(rs, sigma, 1).size == 2
    assert phi_sigma_i(rs, sigma, 2).size == 0
    with pytest.raises(RootshellError):
        phi_sigma_i(rs, sigma, 3)


def test_I_integral_closed_form():
    # ∫_{1/t}^∞ (1 + x)^{−3} dx = ½(1 + 1/t)^{−2}
    for t in (2.0, 10.0, 1e3):
        assert I_integral((0,), t, 3) == pytest.approx(0.5 / (1 + 1 / t) ** 2, rel=1e-7)
    assert I_integral((), 10.0, 3) == 1.0
    with pytest.raises(RootshellError) as info:
        I_integral((0,), 10.0, 1)
    assert info.value.code is ErrorCode.NON_CONVERGENT


def test_power_k_a1():
    rs = build_root_system("A", 1)
    out = verify_power_k(rs, standard_subsystem(rs, ()), t_grid=(1e2, 1e3, 1e4))
    assert out["spread"] < 1.25
    # the log row tends to a constant
    log_rows = [row for row in out["rows"] if row.e == 1]
    assert log_rows
    for row in log_rows:
        assert row.ratios[0] < row.ratios[-1] < 1.05


def test_rootsize_constants_hold_on_samples():
    for type_label, rank in (("A", 2), ("B", 2), ("G", 2), ("A", 3), ("C", 3)):
        rs = build_root_system(type_label, rank)
        assert check_rootsize_constants(rs, samples=1000, seed=1) == [], rs.label


def test_rootsize_constants_a2():
    rs = build_root_system("A", 2)
    # α = e1 − e3 pairs to 1 with both fundamental weights
    alpha = next(k for k, r in enumerate(rs.roots) if tuple(r) == (1, 0, -1))
    assert rootsize_constants(rs, (0, 1), 1, alpha) == (1, 2)
    assert rootsize_constants(rs, (1, 0), 2, alpha) == (1, 1)


def test_spectral_integral_grows_at_most_like_log_power():
    cases = [("A", 1), ("A", 2)]
    t_grid = (10.0, 1e2, 1e3)
    for type_label, rank in cases:
        rs = build_root_system(type_label, rank)
        M = extremal_subsystem(rs)
        k = log_exponent_k(rs, M)
        values = [spectral_integral(rs, M, t) for t in t_grid]
        assert all(math.isfinite(v) and v > 0 for v in values), rs.label
        # Θ(tH0, ·) increases with t
        assert values[0] <= values[1] * 1.001 and values[1] <= values[2] * 1.001, rs.label
        ratios = [v / math.log(t) ** k for v, t in zip(values, t_grid)]
        assert max(ratios[1:]) <= 3 * ratios[0], rs.label


def test_spectral_integral_rank_cap():
    rs = build_root_system("A", 3)
    with pytest.raises(RootshellError) as info:
        spectral_integral(rs, extremal_subsystem(rs), 10.0)
    assert info.value.code is ErrorCode.INVALID_INVOCATION
