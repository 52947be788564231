"""Monte Carlo on SL_n(ℝ) with the trace form on 𝔞.

𝔞 is the trace-zero diagonal, identified with the ambient space of the A_{n−1} model, so
roots are e_i − e_j and ρ(H) = Σ_i ((n − 2i − 1)/2)·H_i (0-based i).
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, permutations
from typing import Sequence

import numpy as np
import sympy
from scipy import integrate
from scipy.spatial import ConvexHull

from rootshell.abc import ErrorCode
from rootshell.abc.error_code import RootshellError
from rootshell.schemas import BrionRow, IntersectionEstimate, TriangleReport
from rootshell.services import exponent
from rootshell.services.rng import haar_orthogonal, run_blocks, stream
from rootshell.services.root_core import (
    RootSystem,
    Vector,
    build_root_system,
    conv_dominance,
    inner,
    is_dominant,
    longest_element,
    act,
    rho,
    sub,
    to_fraction,
)
from rootshell.services.subsystems import standard_subsystem
from rootshell.utils import settings

logger = logging.getLogger(__name__)

DET_TOL = 1e-8
MIN_ACCEPTANCE = 1e-4


@dataclass(frozen=True)
class GroupPoint:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or not np.all(np.isfinite(g)):
            raise ErrorCode.SINGULAR_MATRIX.of("group point must be a finite square matrix")
        if abs(np.linalg.det(g) - 1) > DET_TOL:
            raise ErrorCode.SINGULAR_MATRIX.of(f"determinant {np.linalg.det(g):.3g} is not 1")
        object.__setattr__(self, "entries", g)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def inverse(self) -> "GroupPoint":
        return GroupPoint(np.linalg.inv(self.entries))

    def __matmul__(self, other: "GroupPoint") -> "GroupPoint":
        return GroupPoint(self.entries @ other.entries)


def random_group_point(rng: np.random.Generator, n: int) -> GroupPoint:
    z = rng.standard_normal((n, n))
    det = np.linalg.det(z)
    if det < 0:
        z[0] *= -1
        det = -det
    return GroupPoint(z / det ** (1 / n))


def cartan_projection(g: GroupPoint) -> np.ndarray:
    sv = np.linalg.svd(g.entries, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise ErrorCode.SINGULAR_MATRIX.of("matrix is numerically singular")
    return np.log(sv)


def _kappa_batch(x: np.ndarray, x_inv: np.ndarray) -> np.ndarray:
    """κ for a stack of unimodular matrices from the top singular values of x and x⁻¹."""
    top = np.log(np.linalg.norm(x, ord=2, axis=(1, 2)))
    bottom = -np.log(np.linalg.norm(x_inv, ord=2, axis=(1, 2)))
    n = x.shape[1]
    if n == 2:
        return np.stack([top, bottom], axis=1)
    if n == 3:
        return np.stack([top, -top - bottom, bottom], axis=1)
    return np.log(np.linalg.svd(x, compute_uv=False))


def rho_vector(n: int) -> np.ndarray:
    return np.array([(n - 2 * i - 1) / 2 for i in range(n)])


def rho_maximized_at_dominant(kappa: Sequence[float], tol: float = 1e-12) -> bool:
    """Over the permutation orbit of κ, ρ peaks only at κ itself."""
    kappa = np.asarray(kappa, dtype=float)
    r = rho_vector(len(kappa))
    best = float(r @ kappa)
    for perm in permutations(range(len(kappa))):
        other = kappa[list(perm)]
        if np.allclose(other, kappa, atol=tol):
            continue
        if r @ other >= best - tol:
            return False
    return True


def radial_density(rs: RootSystem, H) -> float:
    """J(H) = ∏_{α>0} sinh(α(H))^{m_α} sinh(2α(H))^{m_{2α}}."""
    H = np.array([float(a) for a in H])
    pos = list(rs.positive_list)
    values = rs.root_array[pos] @ H
    if np.any(values < -1e-12):
        raise ErrorCode.NOT_DOMINANT.of(f"H = {H.tolist()} is not dominant")
    m = np.array([rs.multiplicities[k] for k in pos])
    m2 = np.array([rs.double_multiplicities[k] for k in pos])
    return float(np.prod(np.sinh(values) ** m * np.sinh(2 * values) ** m2))


def _log_abs_sinh(a: np.ndarray) -> np.ndarray:
    a = np.abs(a)
    with np.errstate(divide="ignore"):
        return a + np.log1p(-np.exp(-2 * a)) - math.log(2)


@dataclass(frozen=True)
class ShellSpec:
    n: int
    H0: tuple[Fraction, ...]
    eps0: float
    t: float

    def __post_init__(self):
        if not 2 <= self.n <= 4:
            raise ErrorCode.INVALID_INVOCATION.of("shells are sampled in SL_n(ℝ) for n = 2, 3, 4")
        H0 = tuple(to_fraction(a) for a in self.H0)
        object.__setattr__(self, "H0", H0)
        if len(H0) != self.n or sum(H0) != 0 or all(a == 0 for a in H0):
            raise ErrorCode.INVALID_INVOCATION.of("H0 must be a nonzero trace-zero diagonal")
        if any(H0[i] < H0[i + 1] for i in range(self.n - 1)):
            raise ErrorCode.NOT_DOMINANT.of(f"H0 = {[str(a) for a in H0]} must have decreasing entries")
        if self.eps0 <= 0 or self.t <= 0:
            raise ErrorCode.INVALID_INVOCATION.of("eps0 and t must be positive")
        if self.t < self.t_min:
            raise ErrorCode.SHELL_OUTSIDE_CHAMBER.of(
                f"B(tH0, eps0) reaches a wall not fixed by H0; need t >= {self.t_min:.6g}"
            )

    @cached_property
    def root_system(self) -> RootSystem:
        return build_root_system("A", self.n - 1)

    @property
    def center(self) -> np.ndarray:
        return self.t * np.array([float(a) for a in self.H0])

    @property
    def t_min(self) -> float:
        # the ball may cross walls of roots orthogonal to H0 since it is W_M-invariant
        gaps = [float(self.H0[i] - self.H0[j]) for i in range(self.n) for j in range(i + 1, self.n)]
        return max((math.sqrt(2) * self.eps0 / g for g in gaps if g > 0), default=0.0)

    @cached_property
    def centralizer_nodes(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n - 1) if self.H0[j] == self.H0[j + 1])

    @cached_property
    def basis(self) -> np.ndarray:
        """Orthonormal basis of the trace-zero diagonal, columns."""
        q, _ = np.linalg.qr(self.root_system.root_array[list(self.root_system.simple_roots)].T)
        return q


def _ball_points(spec: ShellSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    dim = spec.n - 1
    direction = rng.standard_normal((count, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = spec.eps0 * rng.uniform(0, 1, count) ** (1 / dim)
    return spec.center + (direction * radius[:, None]) @ spec.basis.T


def _roots_upper(spec: ShellSpec) -> tuple[np.ndarray, float]:
    rs = spec.root_system
    roots = rs.root_array[list(rs.positive_list)]
    log_max = float(np.sum(_log_abs_sinh(np.abs(roots @ spec.center) + math.sqrt(2) * spec.eps0)))
    return roots, log_max


def sample_shell_H(spec: ShellSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """H ∈ B(tH0, ε0) with density ∝ |J(H)|, by rejection."""
    roots, log_max = _roots_upper(spec)
    out = []
    accepted, proposed = 0, 0
    while accepted < count:
        batch = 4 * (count - accepted) + 16
        H = _ball_points(spec, rng, batch)
        log_J = _log_abs_sinh(H @ roots.T).sum(axis=1)
        keep = np.log(rng.uniform(0, 1, batch)) < log_J - log_max
        out.append(H[keep])
        accepted += int(keep.sum())
        proposed += batch
        if proposed > count / MIN_ACCEPTANCE and accepted < MIN_ACCEPTANCE * proposed:
            raise ErrorCode.REJECTION_RATE.of(
                f"acceptance {accepted / proposed:.2e} is below {MIN_ACCEPTANCE}; try a larger t"
            )
    return np.concatenate(out)[:count]


def _sample_batch(spec: ShellSpec, rng: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray]:
    H = sample_shell_H(spec, rng, count)
    k1 = haar_orthogonal(rng, spec.n, count)
    k2 = haar_orthogonal(rng, spec.n, count)
    a = np.exp(H)
    g = k1 * a[:, None, :] @ k2
    g_inv = np.transpose(k2, (0, 2, 1)) * (1 / a)[:, None, :] @ np.transpose(k1, (0, 2, 1))
    return g, g_inv


def sample_shell(spec: ShellSpec, rng: np.random.Generator) -> GroupPoint:
    """One Haar-distributed point k₁e^{H}k₂ of S_t."""
    g, _ = _sample_batch(spec, rng, 1)
    return GroupPoint(g[0])


@lru_cache(maxsize=None)
def _log_exponent(n: int, nodes: tuple[int, ...]) -> int | None:
    rs = build_root_system("A", n - 1)
    try:
        return exponent.log_exponent_k(rs, standard_subsystem(rs, nodes))
    except RootshellError as e:
        if e.code is not ErrorCode.NOT_SEMIDENSE:
            raise
        logger.warning("centralizer on nodes %s is not semi-dense in A%d", nodes, n - 1)
        return None


def mc_intersection_ratio(spec: ShellSpec, H, samples: int, seed: int = 0, threads: int = 1) -> IntersectionEstimate:
    """P[κ(e^{−H}g) ∈ B(tH0, ε0)] for g Haar-uniform on S_t, i.e. vol(e^H S_t ∩ S_t)/vol(S_t)."""
    H = np.array([float(a) for a in H])
    if H.shape != (spec.n,) or abs(H.sum()) > 1e-9:
        raise ErrorCode.INVALID_INVOCATION.of(f"H must be a trace-zero vector of length {spec.n}")
    if np.any(np.diff(H) > 1e-12):
        raise ErrorCode.NOT_DOMINANT.of(f"H = {H.tolist()} is not dominant")
    if samples < 1000:
        raise ErrorCode.INVALID_INVOCATION.of("mc_intersection_ratio needs at least 1000 samples")
    # 境界上の点を数えないように半径を少しだけ縮める
    radius = spec.eps0 - settings["shell"]["guard"]
    center = spec.center
    shift, shift_inv = np.exp(-H), np.exp(H)

    def block(rng, count):
        g, g_inv = _sample_batch(spec, rng, count)
        x = shift[None, :, None] * g
        x_inv = g_inv * shift_inv[None, None, :]
        kappa = _kappa_batch(x, x_inv)
        return np.array([np.sum(np.linalg.norm(kappa - center, axis=1) < radius)])

    hits = int(run_blocks(block, samples, seed, threads)[0])
    p = hits / samples
    stderr = math.sqrt(p * (1 - p) / samples)
    k = _log_exponent(spec.n, spec.centralizer_nodes)
    rho_H = float(rho_vector(spec.n) @ H)
    bound = math.log(spec.t) ** (k or 0) * math.exp(-rho_H)
    polytope = support_polytope(spec.root_system, spec.H0)
    logger.info("intersection ratio %.6g ± %.2g at t=%g, H=%s", p, stderr, spec.t, H.tolist())
    return IntersectionEstimate(
        n=spec.n, t=spec.t, H=H.tolist(), ratio=p, stderr=stderr, hits=hits, samples=samples,
        k=k, semidense=k is not None, bound_quotient=p / bound,
        polytopal_norm=polytope.norm(H),
    )


def mc_intersection_sweep(
    n: int,
    H0,
    eps0: float,
    t_grid: Sequence[float],
    fractions: Sequence[float],
    samples: int,
    seed: int = 0,
    threads: int = 1,
) -> list[IntersectionEstimate]:
    """Rows for H = s·tH0 over the (t, s) grid."""
    rows = []
    for t in t_grid:
        spec = ShellSpec(n, tuple(H0), eps0, t)
        for s in fractions:
            rows.append(mc_intersection_ratio(spec, s * spec.center, samples, seed, threads))
    return rows


def anker_upper_check(spec: ShellSpec, H_grid: Sequence[Sequence[float]], samples: int, seed: int = 0, threads: int = 1, C: float | None = None) -> dict:
    """MC ratio against e^{−ρ(H)}∏_{α>0}(1 + α(H))."""
    C = C or settings["majorant"]["C"]
    rs = spec.root_system
    roots = rs.root_array[list(rs.positive_list)]
    rows, worst = [], 0.0
    for H in H_grid:
        estimate = mc_intersection_ratio(spec, H, samples, seed, threads)
        H = np.asarray(estimate.H)
        bound = math.exp(-float(rho_vector(spec.n) @ H)) * float(np.prod(1 + roots @ H))
        quotient = estimate.ratio / bound
        worst = max(worst, quotient)
        rows.append({"H": estimate.H, "ratio": estimate.ratio, "stderr": estimate.stderr, "quotient": quotient})
    return {"rows": rows, "sup_quotient": worst, "C": C, "passed": worst <= C}


# ---- 台の多面体 ----

@dataclass(frozen=True, eq=False)
class SupportPolytope:
    """P = Conv(W.v) ∩ 𝔞̄₊ with v = H0 − w0H0, i.e. {H dominant : ⟨H, ϖ_j^∨⟩ ≤ ⟨v, ϖ_j^∨⟩}."""

    rs: RootSystem
    H0: Vector
    v: Vector
    vertices: tuple[Vector, ...]
    levels: tuple[Fraction, ...]  # ⟨v, ϖ_j^∨⟩

    @cached_property
    def _functionals(self) -> np.ndarray:
        cw = np.array([[float(a) for a in w] for w in self.rs.fundamental_coweights])
        return cw / np.array([float(c) for c in self.levels])[:, None]

    def facet_values(self, H) -> np.ndarray:
        """ℓ_j(H) for every facet not through 0."""
        return self._functionals @ np.array([float(a) for a in H])

    def norm(self, H) -> float:
        """‖H‖_P = max_j ℓ_j(H) for dominant H; other H through their dominant representative."""
        H = np.array([float(a) for a in H])
        simple = self.rs.root_array[list(self.rs.simple_roots)]
        if np.any(simple @ H < -1e-12):
            H = _float_dominant(self.rs, H)
        return float(max(0.0, np.max(self._functionals @ H)))

    def contains(self, H, scale: float = 1.0, tol: float = 1e-9) -> bool:
        H = np.array([float(a) for a in H])
        simple = self.rs.root_array[list(self.rs.simple_roots)]
        return bool(np.all(simple @ H >= -tol) and self.norm(H) <= scale + tol)


def _float_dominant(rs: RootSystem, H: np.ndarray) -> np.ndarray:
    simple = rs.root_array[list(rs.simple_roots)]
    H = H.copy()
    for _ in range(10_000):
        values = simple @ H
        i = int(np.argmin(values))
        if values[i] >= -1e-12:
            return H
        a = simple[i]
        H = H - 2 * values[i] / (a @ a) * a
    raise ErrorCode.NON_CONVERGENT.of("dominant representative did not settle")


def polytopal_norm(P: SupportPolytope, H) -> float:
    return P.norm(H)


def support_polytope(rs: RootSystem, H0) -> SupportPolytope:
    H0 = tuple(to_fraction(a) for a in H0)
    if all(a == 0 for a in H0) or not is_dominant(rs, H0):
        raise ErrorCode.NOT_DOMINANT.of("H0 must be dominant and nonzero")
    v = sub(H0, act(rs, longest_element(rs), H0))
    levels = tuple(inner(v, w) for w in rs.fundamental_coweights)
    r = rs.rank
    # coweight coordinates x: ⟨H, α_i⟩ = x_i ≥ 0 and (Gx)_j ≤ level_j with G the coweight Gram matrix
    cw = rs.fundamental_coweights
    G = sympy.Matrix(r, r, lambda i, j: sympy.Rational(str(inner(cw[i], cw[j]))))
    rows = [sympy.Matrix([[1 if k == i else 0 for k in range(r)]]) for i in range(r)] + [G.row(j) for j in range(r)]
    rhs = [0] * r + [sympy.Rational(str(c)) for c in levels]
    vertices = set()
    for active in combinations(range(2 * r), r):
        A = sympy.Matrix.vstack(*[rows[i] for i in active])
        if A.det() == 0:
            continue
        x = A.solve(sympy.Matrix([rhs[i] for i in active]))
        if any(x[i] < 0 for i in range(r)):
            continue
        Gx = G * x
        if any(Gx[j] > rhs[r + j] for j in range(r)):
            continue
        vertex = tuple(Fraction(0) for _ in range(rs.ambient_dim))
        for i in range(r):
            xi = Fraction(int(x[i].p), int(x[i].q))
            vertex = tuple(a + xi * b for a, b in zip(vertex, cw[i]))
        vertices.add(vertex)
    logger.debug("support polytope of %s: %d vertices", rs.label, len(vertices))
    return SupportPolytope(rs, H0, v, tuple(sorted(vertices)), levels)


def _span_coordinates(rs: RootSystem) -> np.ndarray:
    q, _ = np.linalg.qr(rs.root_array[list(rs.simple_roots)].T)
    return q


def polytope_cones(P: SupportPolytope) -> list[tuple[np.ndarray, ...]]:
    """Facets of P not through 0 as vertex tuples (ambient floats), one cone C_j each."""
    points = np.array([[float(a) for a in v] for v in P.vertices])
    if P.rs.rank == 1:
        far = points[np.argmax(np.linalg.norm(points, axis=1))]
        return [(far,)]
    coords = points @ _span_coordinates(P.rs)
    hull = ConvexHull(coords)
    origin = int(np.argmin(np.linalg.norm(points, axis=1)))
    return [tuple(points[i] for i in simplex) for simplex in hull.simplices if origin not in simplex]


# ---- 三角不等式 ----

def triangle_check(n: int, trials: int, seed: int = 0, tol: float = 1e-6) -> TriangleReport:
    """κ(g⁻¹h) ∈ Conv(W.(κ(g⁻¹m) + κ(m⁻¹h))) for random triples."""
    if n not in (2, 3):
        raise ErrorCode.INVALID_INVOCATION.of("triangle_check supports n = 2 or 3")
    rs = build_root_system("A", n - 1)
    rng = stream(seed)
    violations, max_defect = 0, 0.0
    coweights = np.array([[float(a) for a in w] for w in rs.fundamental_coweights])
    for _ in range(trials):
        g, h, m = (random_group_point(rng, n) for _ in range(3))
        g_inv, m_inv = g.inverse(), m.inverse()
        X = cartan_projection(g_inv @ h)
        Y = cartan_projection(g_inv @ m) + cartan_projection(m_inv @ h)
        defect = float(max(0.0, -np.min(coweights @ (Y - X))))
        max_defect = max(max_defect, defect)
        if not conv_dominance(rs, tuple(X.tolist()), tuple(Y.tolist()), tol):
            violations += 1
    logger.info("triangle check SL%d: %d violations in %d trials", n, violations, trials)
    return TriangleReport(n=n, trials=trials, violations=violations, max_defect=max_defect)


def inverse_symmetry_check(n: int, trials: int, seed: int = 0, tol: float = 1e-6) -> dict:
    """κ(g⁻¹) = −w0·κ(g); on SL_n, −w0 reverses and negates the diagonal."""
    rng = stream(seed)
    worst = 0.0
    for _ in range(trials):
        g = random_group_point(rng, n)
        defect = float(np.max(np.abs(cartan_projection(g.inverse()) + cartan_projection(g)[::-1])))
        worst = max(worst, defect)
    return {"n": n, "trials": trials, "max_defect": worst, "passed": worst <= tol}


def support_check(spec: ShellSpec, scales: Sequence[float] = (1.05, 1.5, 2.0), samples: int = 100_000,
                  seed: int = 0, threads: int = 1) -> dict:
    """Zero hits for H = s(t + 1)u with u a vertex of P and s > 1, i.e. ‖H‖_P > t + 1."""
    P = support_polytope(spec.root_system, spec.H0)
    rows = []
    for vertex in P.vertices:
        u = np.array([float(a) for a in vertex])
        if not np.any(u):
            continue
        u = u / P.norm(u)
        # ‖H‖_P = s(t + 1) > t + 1 なので当たりは 0 のはず
        for s in scales:
            estimate = mc_intersection_ratio(spec, s * (spec.t + 1) * u, samples, seed, threads)
            rows.append({"H": estimate.H, "polytopal_norm": estimate.polytopal_norm, "hits": estimate.hits})
    return {"rows": rows, "hits": sum(row["hits"] for row in rows), "passed": all(row["hits"] == 0 for row in rows)}


# ---- Brion の帰結 ----

def _rho_data(rs: RootSystem, P: SupportPolytope) -> tuple[np.ndarray, float]:
    rho_vec = np.array([float(a) for a in rho(rs)])
    rho_H0 = float(rho_vec @ np.array([float(a) for a in P.H0]))
    return rho_vec, rho_H0


def brion_integral(rs: RootSystem, H0, theta: float, tau: float, P: SupportPolytope | None = None) -> float:
    """∫_{P_{2τ}} e^{2θ(ρ(H) − 2‖H‖_P ρ(H0))} dH, cone by cone."""
    if rs.rank > 2:
        raise ErrorCode.INVALID_INVOCATION.of("brion_integral is limited to rank <= 2")
    P = P or support_polytope(rs, H0)
    rho_vec, rho_H0 = _rho_data(rs, P)
    total = 0.0
    for cone in polytope_cones(P):
        if rs.rank == 1:
            (far,) = cone
            A = 2 * tau * far
            slope = 2 * theta * (float(rho_vec @ A) - 2 * P.norm(A) * rho_H0)
            value, _ = integrate.quad(lambda s: math.exp(slope * s), 0, 1)
            total += value * float(np.linalg.norm(A))
            continue
        a, b = cone
        A, B = 2 * tau * a, 2 * tau * b
        basis = _span_coordinates(rs)
        area = abs(float(np.linalg.det(np.stack([A @ basis, (B - A) @ basis]))))
        j = int(np.argmax(P.facet_values((a + b) / 2)))
        ell = P._functionals[j]
        L_A = 2 * theta * (float(rho_vec @ A) - 2 * float(ell @ A) * rho_H0)
        L_B = 2 * theta * (float(rho_vec @ B) - 2 * float(ell @ B) * rho_H0)
        value, _ = integrate.dblquad(
            lambda w, s: s * math.exp(s * (L_A + w * (L_B - L_A))),
            0, 1, 0, 1,
        )
        total += value * area
    return total


def brion_consequence_check(rs: RootSystem, H0, theta: float = 0.25, tau_grid: Sequence[float] = (4, 8, 16, 32, 64), max_spread: float = 3.0) -> dict:
    if not 0 < theta <= 0.5:
        raise ErrorCode.INVALID_INVOCATION.of("theta must lie in (0, 1/2]")
    P = support_polytope(rs, H0)
    rows = []
    for tau in tau_grid:
        value = brion_integral(rs, H0, theta, tau, P)
        rows.append(BrionRow(tau=tau, value=value, ratio=value / tau))
    ratios = [row.ratio for row in rows]
    spread = max(ratios) / min(ratios)
    rho_vec, rho_H0 = _rho_data(rs, P)
    vertex_exponent = float(rho_vec @ np.array([float(a) for a in P.v])) - 2 * rho_H0
    return {
        "rows": rows,
        "spread": spread,
        "vertex_exponent": vertex_exponent,
        "vertices": [[float(a) for a in v] for v in P.vertices],
        "passed": spread <= max_spread,
    }
