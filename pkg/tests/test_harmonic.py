import math

import numpy as np
import pytest
from scipy import special

from rootshell.abc import ErrorCode, RankOneGroup, RootshellError
from rootshell.services.harmonic import (
    MajorantParams, SpectralParam, ball_transform, c_rank_one, disk_choice, hc_expansion_rank1, hc_transform_shell,
    khat_decay_check, majorant_equivalence, spherical_mc, spherical_rank_one, spherical_sl2c, spherical_sl2r,
    theta_majorant, time_average_lower_bound, verify_cx_bound, verify_gv_decay, verify_sph_bound,
)
from rootshell.services.root_core import build_root_system


def test_sl2c_closed_form():
    assert spherical_sl2c(1, 1) == pytest.approx(math.sin(1) / math.sinh(1), rel=1e-12)
    assert spherical_sl2c(1, 1).real == pytest.approx(0.7160229, rel=1e-6)
    assert spherical_sl2c(0, 2) == pytest.approx(2 / math.sinh(2), rel=1e-12)
    assert spherical_sl2c(3, 0) == 1


def test_sl2r_matches_legendre():
    # φ_{iy}(e^t) = ₂F₁(½ − y, ½ + y; 1; −sinh²(t/2)) for real y
    cases = [(0.25, 1.0), (0.0, 0.5), (0.0, 1.5), (0.4, 1.2)]
    for y, t in cases:
        expected = special.hyp2f1(0.5 - y, 0.5 + y, 1, -math.sinh(t / 2) ** 2)
        assert spherical_sl2r(1j * y, t) == pytest.approx(expected, rel=1e-8)
    assert spherical_sl2r(2.0, 1.0) == pytest.approx(spherical_sl2r(-2.0, 1.0), rel=1e-10)
    assert abs(spherical_sl2r(2.0, 1.0)) <= spherical_sl2r(0, 1.0).real


def test_sl2r_rejects_wide_strip():
    with pytest.raises(RootshellError):
        spherical_sl2r(0.6j, 1.0)


def test_rank_one_c_functions():
    assert c_rank_one(RankOneGroup.SL2C, 2) == pytest.approx(-0.5j)
    assert abs(c_rank_one("sl2r", 1)) ** 2 == pytest.approx(1 / (math.pi * math.tanh(math.pi)), rel=1e-10)
    # c(−iρ) = 1
    assert c_rank_one(RankOneGroup.SL2R, -0.5j) == pytest.approx(1)


def test_theta_at_zero():
    rs = build_root_system("A", 2)
    assert theta_majorant(rs, (0, 0, 0), (1, 0, -1)) == pytest.approx(6)
    assert theta_majorant(rs, (0, 0, 0), (0, 0, 0)) == pytest.approx(6)


def test_ball_transform():
    assert ball_transform(0, 0.1) == pytest.approx(0.2)
    assert ball_transform(2, 0.1) == pytest.approx(math.sin(0.2))


def test_grid_bounds():
    grid = verify_sph_bound("sl2r", [0, 1, 5], [0, 1, 5, 10], params=MajorantParams(a=1, kappa=0.2, C=10))
    assert grid.passed
    assert len(grid.values) == 12
    grid = verify_cx_bound([0, 0.5, 1, 2], [0.5, 1, 2, 5])
    assert grid.passed
    assert grid.inf_ratio >= 0.3


def test_majorant_equivalence():
    grid = majorant_equivalence(build_root_system("A", 2), R=5.0, samples=50)
    assert grid.passed
    assert grid.inf_ratio >= 1 - 1e-12


def test_disk_choice_at_origin():
    rs = build_root_system("A", 1)
    choice = disk_choice(rs, SpectralParam((0.0,)), 1e-3, 0.2, 0.1)
    assert choice.k == 0
    assert choice.certificate
    assert choice.min_pairing >= 1e-3
    with pytest.raises(RootshellError) as info:
        disk_choice(rs, SpectralParam((0.0,)), 1e-3, 0.1, 0.2)
    assert info.value.code is ErrorCode.INVALID_INVOCATION


def test_spherical_mc_agrees_with_quadrature():
    lam, H = (0.6, -0.6), (0.75, -0.75)
    mean, stderr = spherical_mc(2, lam, H, samples=20_000, seed=3)
    exact = complex(spherical_rank_one(RankOneGroup.SL2R, (lam[0] - lam[1]) / 2, H[0] - H[1])[0])
    assert abs(mean - exact) <= 5 * stderr + 1e-3
    assert stderr < 0.05


def test_spherical_mc_needs_dominant_H():
    with pytest.raises(RootshellError) as info:
        spherical_mc(2, (0, 0), (-1, 1), samples=100)
    assert info.value.code is ErrorCode.NOT_DOMINANT
    assert np.isfinite(spherical_mc(3, (0, 0, 0), (1, 0, -1), samples=100)[1])


def test_sl2r_settles_at_large_t():
    cases = [(20.0, 40.0), (40.0, 40.0), (2.25, 80.0), (1.0, 80.1), (0.0, 60.0)]
    for lam, t in cases:
        value = spherical_sl2r(lam, t)
        assert np.isfinite(value.real) and np.isfinite(value.imag), (lam, t)
        assert abs(value) <= spherical_sl2r(0, t).real * (1 + 1e-8), (lam, t)


def test_sl2r_matches_main_term_at_large_t():
    # e^{−2t} corrections are below double precision once t ≥ 20
    cases = [(0.5, 20.0), (0.5, 80.0), (2.25, 40.0), (2.25, 80.0), (40.0, 20.0), (40.0, 40.0)]
    for lam, t in cases:
        main = math.exp(-t / 2) * 2 * (c_rank_one("sl2r", lam) * np.exp(1j * lam * t)).real
        assert abs(spherical_sl2r(lam, t) - main) * math.exp(t / 2) <= 1e-7, (lam, t)


def test_shell_transform_of_constant_profile():
    # φ_{−λ} = 1 at λ = iρ, leaving ∫ sinh(H)² dH on SL2(ℂ)
    t, eps0 = 3.0, 0.1
    expected = (math.sinh(2 * (t + eps0)) - math.sinh(2 * (t - eps0))) / 4 - eps0
    assert hc_transform_shell("sl2c", 1j, t, eps0) == pytest.approx(expected, rel=1e-10)
    with pytest.raises(RootshellError) as info:
        hc_transform_shell("sl2r", 1.0, 0.05, 0.1)
    assert info.value.code is ErrorCode.INVALID_INVOCATION


def test_hc_expansion_residual_within_bound():
    cases = [("sl2r", 2.0, 5.0), ("sl2r", 1.0, 20.0), ("sl2c", 3.0, 10.0), ("sl2c", 0.5, 30.0)]
    for group, lam, t in cases:
        out = hc_expansion_rank1(group, lam, t, 0.1)
        assert out["residual"] <= out["bound"], (group, lam, t)
    with pytest.raises(RootshellError) as info:
        hc_expansion_rank1("sl2r", 1e-4, 5.0, 0.1)
    assert info.value.code is ErrorCode.POLE_PROXIMITY


def test_time_average_lower_bound_on_compact_set():
    out = time_average_lower_bound("sl2r", [1.0, 2.0, 3.0], [20.0, 40.0], 0.1)
    assert out["passed"]
    assert len(out["rows"]) == 6
    for row in out["rows"]:
        assert row.time_average > 0
        assert abs(row.off_diagonal) <= row.diagonal
    with pytest.raises(RootshellError):
        time_average_lower_bound("sl2r", [0.0, 1.0], [20.0], 0.1)


def test_main_term_residual_decays():
    for group in ("sl2r", "sl2c"):
        grid = verify_gv_decay(group, [1.0, 2.0, 4.0], [5.0, 10.0, 20.0, 30.0], margin=0.05)
        assert grid.passed, group


def test_khat_decay():
    grid = khat_decay_check("sl2r", [0.0, 10.0, 20.0, 40.0], [1.0, 5.0, 10.0], 0.1)
    assert grid.passed
    assert len(grid.values) == 12
    with pytest.raises(RootshellError):
        khat_decay_check("sl2r", [1.0], [0.15], 0.1)
