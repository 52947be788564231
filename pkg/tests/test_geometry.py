from fractions import Fraction

import numpy as np
import pytest

from rootshell.abc import ErrorCode, RootshellError
from rootshell.services.geometry import (
    ShellSpec, anker_upper_check, brion_consequence_check, cartan_projection, inverse_symmetry_check,
    mc_intersection_ratio, mc_intersection_sweep, random_group_point, rho_maximized_at_dominant, support_check,
    support_polytope, triangle_check,
)
from rootshell.services.rng import stream
from rootshell.services.root_core import build_root_system, vec

H0 = (Fraction(1, 2), Fraction(-1, 2))


def test_shell_spec_errors():
    cases = [
        (((Fraction(-1, 2), Fraction(1, 2)), 0.1, 6.0), ErrorCode.NOT_DOMINANT),
        ((H0, 0.1, 0.1), ErrorCode.SHELL_OUTSIDE_CHAMBER),
        (((0, 0), 0.1, 6.0), ErrorCode.INVALID_INVOCATION),
    ]
    for (h0, eps0, t), code in cases:
        with pytest.raises(RootshellError) as info:
            ShellSpec(2, h0, eps0, t)
        assert info.value.code is code


def test_zero_shift_keeps_everything():
    spec = ShellSpec(2, H0, 0.1, 6.0)
    estimate = mc_intersection_ratio(spec, (0, 0), samples=2000, seed=1)
    assert estimate.ratio == pytest.approx(1.0, abs=1e-3)
    assert estimate.k == 1
    assert estimate.semidense


def test_far_shift_misses():
    spec = ShellSpec(2, H0, 0.1, 6.0)
    estimate = mc_intersection_ratio(spec, (10, -10), samples=2000, seed=1)
    assert estimate.hits == 0
    assert estimate.polytopal_norm > spec.t + 1


def test_mc_is_independent_of_threads():
    spec = ShellSpec(3, (1, 0, -1), 0.1, 4.0)
    H = (1.0, 0.0, -1.0)
    one = mc_intersection_ratio(spec, H, samples=6000, seed=7, threads=1)
    three = mc_intersection_ratio(spec, H, samples=6000, seed=7, threads=3)
    assert one.hits == three.hits


def test_cartan_projection_is_dominant():
    rng = stream(5)
    for _ in range(50):
        kappa = cartan_projection(random_group_point(rng, 3))
        assert np.all(np.diff(kappa) <= 1e-12)
        assert abs(kappa.sum()) < 1e-9
        assert rho_maximized_at_dominant(kappa)


def test_triangle_and_inverse_symmetry():
    report = triangle_check(3, 200, seed=2)
    assert report.violations == 0
    assert inverse_symmetry_check(3, 200, seed=2)["passed"]
    with pytest.raises(RootshellError):
        triangle_check(4, 10)


def test_support_polytope_a1():
    P = support_polytope(build_root_system("A", 1), H0)
    assert set(P.vertices) == {vec(0, 0), vec(1, -1)}
    assert P.norm((1, -1)) == pytest.approx(1.0)
    assert P.norm((-2, 2)) == pytest.approx(2.0)
    assert P.contains((0.5, -0.5))
    assert not P.contains((-0.5, 0.5))


def test_support_polytope_a2_is_bounded_by_v():
    rs = build_root_system("A", 2)
    P = support_polytope(rs, (1, 0, -1))
    assert P.v == vec(2, 0, -2)
    assert P.norm((2, 0, -2)) == pytest.approx(1.0)
    assert vec(0, 0, 0) in P.vertices


def test_brion_linear_in_tau():
    out = brion_consequence_check(build_root_system("A", 1), H0, tau_grid=(4, 8, 16))
    assert out["spread"] < 1.01
    assert out["passed"]
    with pytest.raises(RootshellError):
        brion_consequence_check(build_root_system("A", 1), H0, theta=0.75)


def test_sweep_rows_follow_the_grid():
    rows = mc_intersection_sweep(2, H0, 0.1, t_grid=(6.0, 8.0), fractions=(0.0, 0.5, 1.0), samples=2000, seed=3)
    assert [(row.t, row.H) for row in rows[:3]] == [(6.0, [0.0, 0.0]), (6.0, [1.5, -1.5]), (6.0, [3.0, -3.0])]
    assert len(rows) == 6
    for start in (0, 3):
        assert rows[start].ratio == pytest.approx(1.0, abs=1e-3)
        assert rows[start].ratio > rows[start + 2].ratio


def test_anker_upper_bound_a1():
    spec = ShellSpec(2, H0, 0.1, 6.0)
    out = anker_upper_check(spec, [(0, 0), (1, -1), (3, -3)], samples=2000, seed=2)
    assert out["passed"]
    assert len(out["rows"]) == 3
    assert out["rows"][0]["quotient"] == pytest.approx(1.0, abs=1e-3)
    assert out["sup_quotient"] <= out["C"]


def test_support_outside_polytope_is_empty():
    spec = ShellSpec(2, H0, 0.1, 6.0)
    out = support_check(spec, scales=(1.05, 2.0), samples=2000, seed=4)
    assert out["passed"]
    assert out["hits"] == 0
    assert out["rows"]
    assert all(row["polytopal_norm"] > spec.t + 1 for row in out["rows"])
