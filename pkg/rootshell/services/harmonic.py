"""Spherical-function numerics.

Rank-one conventions: a scalar spectral parameter λ stands for λ·α with α the root of A1,
and t is the value α(H). Then ρ(H) = (m/2)·t, J(H) = sinh(t)^m and
φ_λ(e^t) ≈ e^{−ρt}(c(λ)e^{iλt} + c(−λ)e^{−iλt}) for large t.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special

from rootshell.abc import ErrorCode, GroupForm, RankOneGroup
from rootshell.schemas import GridReport, TimeAverageRow
from rootshell.services.rng import haar_orthogonal, run_blocks, stream
from rootshell.services.root_core import RootSystem, build_root_system, rho, weyl_enumerate
from rootshell.services.subsystems import parabolic_elements, standard_subsystem
from rootshell.utils import settings

logger = logging.getLogger(__name__)

POLE_TOL = 1e-8
LOG2 = math.log(2.0)
MAX_MEHLER_ORDER = 8192


@dataclass(frozen=True)
class SpectralParam:
    """λ = Σ (re_k + i·im_k) ϖ_k in the basis of fundamental weights."""

    re: tuple[float, ...]
    im: tuple[float, ...] = ()

    def vector(self, rs: RootSystem) -> np.ndarray:
        im = self.im or (0.0,) * len(self.re)
        if len(self.re) != rs.rank or len(im) != rs.rank:
            raise ErrorCode.INVALID_INVOCATION.of(f"spectral parameter needs {rs.rank} coordinates")
        weights = np.array([[float(a) for a in w] for w in rs.fundamental_weights])
        return (np.array(self.re) + 1j * np.array(im)) @ weights

    def pairing(self, rs: RootSystem, alpha: int) -> complex:
        return complex(rs.root_array[alpha] @ self.vector(rs))


@dataclass(frozen=True)
class MajorantParams:
    a: float
    kappa: float
    C: float

    def __post_init__(self):
        if min(self.a, self.kappa, self.C) <= 0:
            raise ErrorCode.INVALID_CONFIG.of("majorant parameters a, kappa, C must be positive")

    @classmethod
    def from_settings(cls) -> "MajorantParams":
        m = settings["majorant"]
        return cls(a=float(m["a"]), kappa=float(m["kappa"]), C=float(m["C"]))


def _as_lambda(rs: RootSystem, lam) -> np.ndarray:
    if isinstance(lam, SpectralParam):
        return lam.vector(rs)
    out = np.array([complex(x) for x in lam])
    if out.shape != (rs.ambient_dim,):
        raise ErrorCode.INVALID_INVOCATION.of(f"λ must have {rs.ambient_dim} ambient coordinates")
    return out


def _as_real(v) -> np.ndarray:
    return np.array([float(x) for x in v])


def _pole_distance(z: complex) -> float:
    """Distance from z to the nearest pole of Γ."""
    if z.real > 0.5:
        return math.inf
    return abs(z - min(0, round(z.real)))


# ---- c 関数 ----

def c_alpha(s: complex, m: int, m2: int = 0) -> complex:
    s = complex(s)
    if _pole_distance(s) < POLE_TOL:
        raise ErrorCode.POLE_PROXIMITY.of(f"s = {s} lies within {POLE_TOL} of a pole of Γ")
    a = (m / 2 + 1 + s) / 2
    b = (m / 2 + m2 + s) / 2
    if _pole_distance(a) < 1e-14 or _pole_distance(b) < 1e-14:
        return 0j
    return complex(np.exp(-s * LOG2 + special.loggamma(s) - special.loggamma(a) - special.loggamma(b)))


def inverse_c_alpha(s: complex, m: int, m2: int = 0) -> complex:
    """1/c_α(s) = 2^s·s·Γ(a)Γ(b)/Γ(1+s); regular at s = 0."""
    s = complex(s)
    if s == 0:
        return 0j
    if _pole_distance(1 + s) < 1e-14:
        return 0j
    a = (m / 2 + 1 + s) / 2
    b = (m / 2 + m2 + s) / 2
    if _pole_distance(a) < POLE_TOL or _pole_distance(b) < POLE_TOL:
        raise ErrorCode.POLE_PROXIMITY.of(f"s = {s} lies at a zero of c_α")
    return complex(np.exp(s * LOG2 + cmath.log(s) + special.loggamma(a) + special.loggamma(b) - special.loggamma(1 + s)))


def _arguments(rs: RootSystem, lam: np.ndarray) -> list[tuple[complex, int, int]]:
    norms = (rs.root_array ** 2).sum(axis=1)
    pairings = rs.root_array @ lam
    return [
        (1j * pairings[k] / norms[k], rs.multiplicities[k], rs.double_multiplicities[k])
        for k in rs.positive_list
    ]


def _rho_constant(rs: RootSystem) -> complex:
    return c_fn(rs, -1j * _as_real(rho(rs)), normalization="unit")


def c_fn(rs: RootSystem, lam, normalization: str = "unit") -> complex:
    lam = _as_lambda(rs, lam)
    value = 1 + 0j
    for s, m, m2 in _arguments(rs, lam):
        value *= c_alpha(s, m, m2)
    if normalization == "rho":
        return value / _rho_constant(rs)
    if normalization != "unit":
        raise ErrorCode.INVALID_INVOCATION.of(f"unknown c-function normalization {normalization!r}")
    return value


def plancherel_density(rs: RootSystem, lam, limit_at_walls: bool = False, normalization: str = "unit") -> float:
    lam = _as_lambda(rs, lam)
    value = 1.0
    for s, m, m2 in _arguments(rs, lam):
        if not limit_at_walls and abs(s) < POLE_TOL:
            raise ErrorCode.POLE_PROXIMITY.of("λ lies on a root hyperplane where c(λ) has a pole")
        value *= abs(inverse_c_alpha(s, m, m2)) ** 2
    if normalization == "rho":
        value *= abs(_rho_constant(rs)) ** 2
    return value


def c_rank_one(group: RankOneGroup | str, lam: complex) -> complex:
    """c(λ) with c(−iρ) = 1; Γ(iλ)/(√π Γ(½+iλ)) for SL2(ℝ) and 1/(iλ) for SL2(ℂ)."""
    rs, alpha = _rank_one_system(RankOneGroup(group))
    return c_fn(rs, complex(lam) * alpha, normalization="rho")


@lru_cache(maxsize=None)
def _rank_one_system(group: RankOneGroup) -> tuple[RootSystem, np.ndarray]:
    form = GroupForm.COMPLEX if group is RankOneGroup.SL2C else GroupForm.SPLIT
    rs = build_root_system("A", 1, form=form)
    return rs, rs.root_array[rs.simple_roots[0]]


# ---- Θ 優関数 ----

def f_alpha(alpha_H: float, pairing: complex) -> float:
    if pairing == 0:
        return abs(alpha_H) + 1
    return min(abs(alpha_H) + 1, 1 / abs(pairing) + 1)


class ThetaEvaluator:
    """Θ(H, λ) = Σ_w ∏_{α>0} f_α(H, wλ), with ⟨wλ, α⟩ read off as ⟨λ, w⁻¹α⟩."""

    def __init__(self, rs: RootSystem, nodes: Sequence[int] | None = None):
        if rs.rank > 4:
            raise ErrorCode.ENUMERATION_CAP_EXCEEDED.of(f"Θ sums over W; rank {rs.rank} exceeds 4")
        if nodes is None:
            elements = weyl_enumerate(rs)
            positive = list(rs.positive_list)
        else:
            elements = list(parabolic_elements(rs, nodes).values())
            positive = sorted(standard_subsystem(rs, nodes).positive)
        self.rs = rs
        self._positive = np.array(positive, dtype=int)
        self._inverse = np.array([w.inverse().root_perm for w in elements], dtype=int)[:, self._positive]

    def __call__(self, H, lam) -> float:
        roots = self.rs.root_array
        if self._positive.size == 0:
            return float(len(self._inverse))
        alpha_H = np.abs(roots[self._positive] @ np.asarray(H, dtype=float)) + 1
        pairings = np.abs(roots @ np.asarray(lam))
        with np.errstate(divide="ignore"):
            inv = 1 / pairings[self._inverse] + 1
        return float(np.minimum(alpha_H, inv).prod(axis=1).sum())


def theta_majorant(rs: RootSystem, H, lam) -> float:
    return ThetaEvaluator(rs)(_as_real(H), _as_lambda(rs, lam))


def theta_majorant_L(rs: RootSystem, nodes: Sequence[int], H, lam) -> float:
    return ThetaEvaluator(rs, nodes)(_as_real(H), _as_lambda(rs, lam))


def theta_rank_one(t, lam: complex) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if lam == 0:
        return 2 * (t + 1)
    return 2 * np.minimum(t + 1, 1 / abs(lam) + 1)


# ---- 階数 1 の球関数 ----

def spherical_sl2c(lam: complex, t: float) -> complex:
    return complex(_sl2c(complex(lam), np.array([float(t)]))[0])


def _sl2c(lam: complex, t: np.ndarray) -> np.ndarray:
    if np.any(t < 0):
        raise ErrorCode.INVALID_INVOCATION.of("t must be non-negative")
    out = np.ones(t.shape, dtype=complex)
    mask = t > 0
    tt = t[mask]
    if abs(lam) < 1e-8:
        out[mask] = tt / np.sinh(tt)
    else:
        out[mask] = np.sin(lam * tt) / (lam * np.sinh(tt))
    return out


@lru_cache(maxsize=16)
def _legendre_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    return special.roots_legendre(order)


def _mehler(lam: complex, t: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """φ_λ(e^t) = (√2/π)∫_0^t cos(λs)/√(cosh t − cosh s) ds with t − s = t·v², v = (1+x)/2.

    Returns the values and the quadrature mass Σ w|integrand| for the same nodes.
    """
    x, w = _legendre_nodes(order)
    v = (1 + x) / 2
    s = t[:, None] * (1 - v ** 2)
    # 2; the v² substitution removes the endpoint singularity at s = t/2; the v² substitution removes the endpoint singularity at s = t
    d = t[:, None] * v ** 2 / 2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(d < 1e-8, 1.0, d / np.sinh(d))
    g = np.sqrt(ratio / np.sinh((t[:, None] + s) / 2))
    front = math.sqrt(2) / np.pi * np.sqrt(t)
    integrand = np.cos(lam * s) * g
    return front * (integrand @ w), front * (np.abs(integrand) @ w)


def _sl2r(lam: complex, t: np.ndarray) -> np.ndarray:
    if np.any(t < 0):
        raise ErrorCode.INVALID_INVOCATION.of("t must be non-negative")
    if abs(lam.imag) >= 0.5:
        raise ErrorCode.INVALID_INVOCATION.of("spherical_sl2r needs |Im λ| < 1/2")
    out = np.ones(t.shape, dtype=complex)
    mask = t > 0
    if not mask.any():
        return out
    tt = t[mask]
    tol = settings["quadrature"]["sph_tol"]
    # 比較は e^{−t/2}（φ_0 の大きさ）単位、被積分関数の質量で割り引く
    scale = np.exp(tt / 2)
    order = 16
    prev, _ = _mehler(lam, tt, order)
    while order < MAX_MEHLER_ORDER:
        order *= 2
        cur, mass = _mehler(lam, tt, order)
        allowed = tol * np.maximum(1.0, mass * scale)
        if np.all(np.abs(cur - prev) * scale <= allowed):
            out[mask] = cur
            return out
        prev = cur
    raise ErrorCode.QUADRATURE_FAILED.of(f"Mehler quadrature did not settle by order {MAX_MEHLER_ORDER} (λ = {lam})")


def spherical_sl2r(lam: complex, t: float) -> complex:
    return complex(_sl2r(complex(lam), np.array([float(t)]))[0])


def spherical_rank_one(group: RankOneGroup | str, lam: complex, t) -> np.ndarray:
    group = RankOneGroup(group)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if group is RankOneGroup.SL2C:
        return _sl2c(complex(lam), t)
    return _sl2r(complex(lam), t)


def spherical_mc(n: int, lam, H, samples: int, seed: int = 0, threads: int = 1) -> tuple[complex, float]:
    """Monte Carlo φ_λ(e^H) = ∫_K e^{(iλ−ρ)(A(e^H k))} dk on SL_n(ℝ), with e^H k = k' e^{A} n."""
    if n not in (2, 3):
        raise ErrorCode.INVALID_INVOCATION.of("spherical_mc supports n = 2 or 3")
    lam = np.array([complex(x) for x in lam])
    H = _as_real(H)
    if lam.shape != (n,) or H.shape != (n,):
        raise ErrorCode.INVALID_INVOCATION.of(f"λ and H need {n} diagonal coordinates")
    if abs(H.sum()) > 1e-9:
        raise ErrorCode.INVALID_INVOCATION.of("H must have trace zero")
    if np.any(np.diff(H) > 0):
        raise ErrorCode.NOT_DOMINANT.of(f"H = {H.tolist()} is not dominant")
    rho_vec = np.array([(n - 2 * i - 1) / 2 for i in range(n)])
    exponent = 1j * lam - rho_vec
    scale = np.exp(H)

    def block(rng, count):
        k = haar_orthogonal(rng, n, count)
        _, r = np.linalg.qr(scale[None, :, None] * k)
        A = np.log(np.abs(np.diagonal(r, axis1=1, axis2=2)))
        f = np.exp(A @ exponent)
        return np.array([f.sum(), (np.abs(f) ** 2).sum()])

    total = run_blocks(block, samples, seed, threads)
    mean = complex(total[0]) / samples
    var = max(float(total[1].real) / samples - abs(mean) ** 2, 0.0) * samples / max(samples - 1, 1)
    return mean, math.sqrt(var / samples)


# ---- 格子上の検証 ----

def _grid_report(
    name: str,
    axes: dict[str, Sequence[float]],
    ratios: np.ndarray,
    threshold: float,
    *,
    lower: float | None = None,
    lower_mask: np.ndarray | None = None,
    extra: dict[str, float] | None = None,
) -> GridReport:
    keys = list(axes)
    index = np.unravel_index(int(np.nanargmax(ratios)), ratios.shape)
    sup = float(ratios[index])
    argmax = {k: float(axes[k][i]) for k, i in zip(keys, index)}
    inf, argmin = None, None
    passed = sup <= threshold
    if lower is not None:
        masked = np.where(lower_mask if lower_mask is not None else True, ratios, np.inf)
        j = np.unravel_index(int(np.argmin(masked)), ratios.shape)
        inf = float(masked[j])
        argmin = {k: float(axes[k][i]) for k, i in zip(keys, j)}
        passed = passed and inf >= lower
    logger.info("%s: sup ratio %.6g at %s", name, sup, argmax)
    values = [
        {**{k: float(axes[k][i]) for k, i in zip(keys, point)}, "ratio": float(ratios[point])}
        for point in np.ndindex(ratios.shape)
    ]
    return GridReport(
        name=name,
        grid={k: [float(v) for v in axes[k]] for k in keys},
        sup_ratio=sup,
        argmax_point=argmax,
        inf_ratio=inf,
        argmin_point=argmin,
        threshold=threshold,
        passed=bool(passed),
        settings=extra or {},
        values=values,
    )


def verify_sph_bound(
    group: RankOneGroup | str,
    lam_grid: Sequence[float],
    t_grid: Sequence[float],
    im_grid: Sequence[float] = (0.0,),
    params: MajorantParams | None = None,
) -> GridReport:
    """|φ_λ(e^t)| against (1+|λ|)^a Θ(t,λ) e^{−ρt+|Im λ|t}."""
    group = RankOneGroup(group)
    params = params or MajorantParams.from_settings()
    if any(abs(y) > params.kappa for y in im_grid):
        raise ErrorCode.INVALID_INVOCATION.of(f"imaginary parts must stay within κ = {params.kappa}")
    t = np.asarray(t_grid, dtype=float)
    ratios = np.empty((len(im_grid), len(lam_grid), len(t)))
    for i, y in enumerate(im_grid):
        for j, x in enumerate(lam_grid):
            lam = complex(x, y)
            phi = spherical_rank_one(group, lam, t)
            majorant = (1 + abs(lam)) ** params.a * theta_rank_one(t, lam) * np.exp(-group.rho * t + abs(y) * t)
            ratios[i, j] = np.abs(phi) / majorant
    return _grid_report(
        f"sph-bound-{group.value}",
        {"im": im_grid, "lambda": lam_grid, "t": t_grid},
        ratios,
        params.C,
        extra={"a": params.a, "kappa": params.kappa, "C": params.C},
    )


def verify_cx_bound(lam_grid: Sequence[float], t_grid: Sequence[float], C: float | None = None, lower: float = 0.3) -> GridReport:
    """SL2(ℂ): φ against e^{−t}(t+1)·Σ_± (1+t|λ|)^{−1}, two-sided where tλ ≤ 1."""
    C = C or settings["majorant"]["C"]
    t = np.asarray(t_grid, dtype=float)
    lam = np.asarray(lam_grid, dtype=float)
    if np.any(lam < 0):
        raise ErrorCode.INVALID_INVOCATION.of("verify_cx_bound takes real λ ≥ 0")
    ratios = np.empty((len(lam), len(t)))
    for j, x in enumerate(lam):
        bound = np.exp(-t) * (t + 1) * 2 / (1 + t * x)
        ratios[j] = np.abs(_sl2c(complex(x), t)) / bound
    stationary = lam[:, None] * t[None, :] <= 1
    return _grid_report(
        "cx-bound-sl2c", {"lambda": lam_grid, "t": t_grid}, ratios, C,
        lower=lower, lower_mask=stationary, extra={"C": C, "lower": lower},
    )


def majorant_equivalence(rs: RootSystem, R: float, samples: int = 200, seed: int = 0, H_max: float = 20.0) -> GridReport:
    """Sampled ratio f_α(H,λ)/g_α(H,λ), g_α = (|α(H)|+1)/(|α(H)⟨λ,α⟩|+1), over all roots."""
    rng = stream(seed)
    coweights = np.array([[float(a) for a in w] for w in rs.fundamental_coweights])
    weights = np.array([[float(a) for a in w] for w in rs.fundamental_weights])
    roots = rs.root_array
    lo, hi = math.inf, 0.0
    worst: dict[str, float] = {}
    for k in range(samples):
        H = rng.uniform(0, H_max, rs.rank) @ coweights
        if k == 0:
            lam = np.zeros(rs.ambient_dim)
        else:
            direction = rng.standard_normal(rs.rank) @ weights
            lam = direction / np.linalg.norm(direction) * R * rng.uniform(0, 1) ** (1 / rs.rank)
        a = np.abs(roots @ H)
        b = np.abs(roots @ lam)
        with np.errstate(divide="ignore"):
            f = np.minimum(a + 1, 1 / b + 1)
        g = (a + 1) / (a * b + 1)
        ratio = f / g
        lo = min(lo, float(ratio.min()))
        if ratio.max() > hi:
            hi = float(ratio.max())
            i = int(ratio.argmax())
            worst = {"alpha_H": float(a[i]), "pairing": float(b[i])}
    lower, upper = 1 / (1 + R), 2 * (1 + R)
    return GridReport(
        name=f"majorant-equivalence-{rs.label}",
        grid={"R": [float(R)], "samples": [float(samples)]},
        sup_ratio=hi,
        argmax_point=worst,
        inf_ratio=lo,
        threshold=upper,
        passed=lo >= lower and hi <= upper,
        settings={"lower": lower, "upper": upper},
    )


def hc_transform_shell(group: RankOneGroup | str, lam: complex, t: float, eps0: float, nodes: int = 64) -> complex:
    """∫_{t−ε0}^{t+ε0} φ_{−λ}(e^H) J(H) dH with J = sinh(H)^m."""
    group = RankOneGroup(group)
    if not t > eps0 > 0:
        raise ErrorCode.INVALID_INVOCATION.of(f"need t > eps0 > 0, got t = {t}, eps0 = {eps0}")
    x, w = special.roots_legendre(nodes)
    H = t + eps0 * x
    phi = spherical_rank_one(group, -complex(lam), H)
    return complex(eps0 * np.sum(w * phi * np.sinh(H) ** group.multiplicity))


def ball_transform(lam: complex, eps0: float) -> complex:
    """Fourier transform of the indicator of [−ε0, ε0]."""
    lam = complex(lam)
    if abs(lam) < 1e-12:
        return complex(2 * eps0)
    return 2 * cmath.sin(lam * eps0) / lam


def hc_expansion_rank1(group: RankOneGroup | str, lam: complex, t: float, eps0: float) -> dict[str, complex | float]:
    """e^{−ρt}·k̂(λ) against 2^{−m}Σ_± c(∓λ) B̂(λ) e^{∓iλt}."""
    group = RankOneGroup(group)
    lam = complex(lam)
    if abs(lam) < 1e-3:
        raise ErrorCode.POLE_PROXIMITY.of("the expansion needs λ away from 0")
    exact = cmath.exp(-group.rho * t) * hc_transform_shell(group, lam, t, eps0)
    cp, cm = c_rank_one(group, lam), c_rank_one(group, -lam)
    B = ball_transform(lam, eps0)
    main = 2.0 ** (-group.multiplicity) * B * (cm * cmath.exp(-1j * lam * t) + cp * cmath.exp(1j * lam * t))
    return {
        "exact": exact,
        "main": main,
        "residual": abs(exact - main),
        "bound": 2 * max(abs(cp), abs(cm)) * eps0 ** 2,
    }


def time_average_lower_bound(
    group: RankOneGroup | str,
    lam_grid: Sequence[float],
    tau_grid: Sequence[float],
    eps0: float,
    c0: float | None = None,
) -> dict:
    """(1/τ)∫_τ^{2τ} e^{−2ρt}|k̂_t(λ)|² dt on a compact Ω ⊂ (0, ∞)."""
    group = RankOneGroup(group)
    if min(lam_grid) <= 0:
        raise ErrorCode.INVALID_INVOCATION.of("Ω must avoid λ = 0")
    m = group.multiplicity
    rows: list[TimeAverageRow] = []
    diagonals = {}
    for x in lam_grid:
        cp, cm = c_rank_one(group, x), c_rank_one(group, -x)
        B = ball_transform(x, eps0).real
        diagonals[x] = 4.0 ** (-m) * B ** 2 * (abs(cp) ** 2 + abs(cm) ** 2)
        for tau in tau_grid:
            # 振動 e^{2iλt} を解像できるだけの節点数
            count = int(x * tau) + 48
            nodes, weights = special.roots_legendre(count)
            ts = tau * (1.5 + nodes / 2)
            values = np.array([abs(hc_transform_shell(group, x, t, eps0)) ** 2 * math.exp(-2 * group.rho * t) for t in ts])
            average = 0.5 * float(weights @ values)
            oscillation = (cmath.exp(-4j * x * tau) - cmath.exp(-2j * x * tau)) / (-2j * x * tau)
            E = 2 * (4.0 ** (-m) * cm * cp.conjugate() * B ** 2 * oscillation).real
            rows.append(TimeAverageRow(
                lam=x, tau=tau, time_average=average, diagonal=diagonals[x],
                off_diagonal=E, off_diagonal_times_tau=E * tau,
            ))
    # c0 の既定値は対角項の最小値の半分
    c0 = c0 if c0 is not None else 0.5 * min(diagonals.values())
    min_average = min(row.time_average for row in rows)
    ball_min = min(ball_transform(x, eps0).real / (2 * eps0) for x in lam_grid)
    logger.info("time average over %d grid points: min %.6g (c0 %.6g)", len(rows), min_average, c0)
    return {
        "rows": rows,
        "c0": c0,
        "min_time_average": min_average,
        "sup_off_diagonal_times_tau": max(abs(row.off_diagonal_times_tau) for row in rows),
        "ball_transform_min": ball_min,
        "passed": min_average >= c0 > 0 and ball_min > 0.5,
    }


def gv_main_term_rank1(group: RankOneGroup | str, lam: complex, t: float) -> tuple[complex, complex, float]:
    group = RankOneGroup(group)
    lam = complex(lam)
    if abs(lam) < 1e-3:
        raise ErrorCode.POLE_PROXIMITY.of("θ(t, λ) needs |λ| ≥ 1e-3")
    exact = complex(spherical_rank_one(group, lam, t)[0])
    theta = c_rank_one(group, lam) * cmath.exp(1j * lam * t) + c_rank_one(group, -lam) * cmath.exp(-1j * lam * t)
    main = cmath.exp(-group.rho * t) * theta
    return exact, main, abs(exact - main)


def verify_gv_decay(group: RankOneGroup | str, lam_grid: Sequence[float], t_grid: Sequence[float], margin: float = 0.1, C: float | None = None) -> GridReport:
    """residual·e^{(ρ+margin)t} over the grid."""
    group = RankOneGroup(group)
    C = C or settings["majorant"]["C"]
    ratios = np.empty((len(lam_grid), len(t_grid)))
    for j, x in enumerate(lam_grid):
        for i, t in enumerate(t_grid):
            ratios[j, i] = gv_main_term_rank1(group, x, t)[2] * math.exp((group.rho + margin) * t)
    return _grid_report(f"gv-{group.value}", {"lambda": lam_grid, "t": t_grid}, ratios, C, extra={"margin": margin})


def _bump(x: np.ndarray, eps0: float) -> np.ndarray:
    u = x / (2 * eps0)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(1 - 1 / (1 - u[inside] ** 2))
    return out


def khat_decay_check(
    group: RankOneGroup | str,
    lam_grid: Sequence[float],
    t_grid: Sequence[float],
    eps0: float,
    N: int = 2,
    C: float | None = None,
) -> GridReport:
    """|k̂_t(λ)|(1+|λ|)^N / (e^{ρt}Θ(t,λ)) for k_t(e^H) = ψ(H − t), ψ a bump of radius 2ε0."""
    group = RankOneGroup(group)
    C = C or settings["majorant"]["C"]
    x, w = special.roots_legendre(96)
    ratios = np.empty((len(lam_grid), len(t_grid)))
    for i, t in enumerate(t_grid):
        if t <= 2 * eps0:
            raise ErrorCode.INVALID_INVOCATION.of("t must exceed the bump radius 2·eps0")
        H = t + 2 * eps0 * x
        weight = 2 * eps0 * w * _bump(H - t, eps0) * np.sinh(H) ** group.multiplicity
        for j, lam in enumerate(lam_grid):
            khat = abs(np.sum(weight * spherical_rank_one(group, -complex(lam), H)))
            ratios[j, i] = khat * (1 + abs(lam)) ** N / (math.exp(group.rho * t) * float(theta_rank_one(t, lam)))
    return _grid_report(f"khat-decay-{group.value}", {"lambda": lam_grid, "t": t_grid}, ratios, C, extra={"N": N, "eps0": eps0})


# ---- 円板の選択 ----

@dataclass(frozen=True)
class DiskChoice:
    C: float
    k: int
    tau: float
    sigma: float
    certificate: bool
    min_pairing: float
    max_imaginary: float
    points: int = field(default=64)


def disk_choice(rs: RootSystem, lam, s: float, kappa: float, kappa_prime: float, points: int = 64) -> DiskChoice:
    """Radius C·s with C = τ^{2k+1} ∈ [1, σ] such that λ + zρ stays s away from every root hyperplane."""
    if not 0 < kappa_prime < kappa:
        raise ErrorCode.INVALID_INVOCATION.of("need 0 < kappa' < kappa")
    lam = _as_lambda(rs, lam)
    roots = rs.root_array[list(rs.positive_list)]
    rho_vec = _as_real(rho(rs))
    rho_pairings = np.abs(roots @ rho_vec)
    tau = 1.01 * max(float(np.max(2 / rho_pairings)), float(np.max(rho_pairings + 1)))
    k_max = len(rs.positive_list)
    sigma = tau ** (2 * k_max + 2)
    D = (kappa - kappa_prime) / (sigma * float(np.linalg.norm(rho_vec)))
    if np.linalg.norm(lam.imag) >= kappa_prime:
        raise ErrorCode.INVALID_INVOCATION.of(f"‖Im λ‖ must be below kappa' = {kappa_prime}")
    if not 0 < s < D:
        raise ErrorCode.INVALID_INVOCATION.of(f"s must lie in (0, {D:.6g})")

    values = np.abs(roots @ lam)
    for k in range(k_max + 1):
        lo, hi = tau ** (2 * k) * s, tau ** (2 * k + 2) * s
        if not np.any((values > lo) & (values < hi)):
            break
    else:
        raise ErrorCode.NO_EMPTY_INTERVAL.of("every interval contains a pairing")
    C = tau ** (2 * k + 1)

    z = C * s * np.exp(2j * np.pi * np.arange(points) / points)
    shifted = lam[None, :] + z[:, None] * rho_vec[None, :]
    min_pairing = float(np.min(np.abs(shifted @ roots.T)))
    max_imaginary = float(np.max(np.linalg.norm(shifted.imag, axis=1)))
    certificate = min_pairing >= s and max_imaginary < kappa
    logger.debug("disk choice k=%d C=%.6g min pairing %.6g", k, C, min_pairing)
    return DiskChoice(C, k, tau, sigma, bool(certificate), min_pairing, max_imaginary, points)
