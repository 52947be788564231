"""Barycentric exponent bookkeeping.

Indexing: i runs over 0..r with Φ_{σ,0} = Φ and Φ_{σ,r} = ∅. For 1 ≤ i ≤ r

    n(i) = |(Φ⁺∖Φ_M⁺) ∩ w(Φ_{σ,i−1}∖Φ_{σ,i})|
    s(i) = |Φ⁺_{σ,i−1}| − |Φ⁺_{σ,i}| − 2n(i)

and for 0 ≤ i ≤ r

    S(i) = |Φ⁺_{σ,i}| − 2|(Φ⁺∖Φ_M⁺) ∩ wΦ_{σ,i}|

so S(0) = 2|Φ_M⁺| − |Φ⁺| and S(r) = 0. The log count is e(l) = #{0 ≤ i < l : S(i) + r = i}:
integrating out x_{σ(i+1)} produces a logarithm exactly when that exponent is −1.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import numpy as np
from scipy import integrate

from rootshell.abc import ErrorCode
from rootshell.schemas import ExponentCsvRow, PowerKRow, Violation
from rootshell.services import harmonic
from rootshell.services.rng import stream
from rootshell.services.root_core import RootSystem, WeylElement, inner, sum_vectors, weyl_enumerate
from rootshell.services.subsystems import SubsystemMask, bitcount, orthogonal_subsystem
from rootshell.utils import settings

logger = logging.getLogger(__name__)

SPECTRAL_LOG_CAP = 14.0
SPECTRAL_LOG_DEPTH = 40.0


@dataclass(frozen=True)
class BarycentricCell:
    sigma: tuple[int, ...]
    l: int

    def contains(self, x: np.ndarray, t: float) -> bool:
        ordered = x[list(self.sigma)]
        if np.any(np.diff(ordered) >= 0):
            return False
        above = int(np.sum(ordered > 1 / t))
        return above == self.l


@dataclass(frozen=True)
class ExponentRow:
    sigma: tuple[int, ...]
    w_index: int
    n: tuple[int, ...]  # n[i-1] for i = 1..r
    s: tuple[int, ...]  # s[i-1] for i = 1..r
    S: tuple[int, ...]  # S[i] for i = 0..r
    e: tuple[int, ...]  # e[l] for l = 0..r


@dataclass(frozen=True, eq=False)
class ExponentTable:
    rs: RootSystem
    M: SubsystemMask
    elements: tuple[WeylElement, ...] = field(repr=False)
    rows: tuple[ExponentRow, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return self.rs.rank

    def csv_rows(self) -> list[ExponentCsvRow]:
        out = []
        for row in self.rows:
            sigma = "".join(str(k + 1) for k in row.sigma)
            for i in range(self.rank + 1):
                out.append(ExponentCsvRow(
                    sigma=sigma, i_or_l=i, w_index=row.w_index,
                    n=row.n[i - 1] if i else None, s=row.s[i - 1] if i else None,
                    S=row.S[i], e=row.e[i],
                ))
        return out


def phi_sigma_i(rs: RootSystem, sigma: tuple[int, ...], i: int) -> SubsystemMask:
    if not 0 <= i <= rs.rank:
        raise ErrorCode.INVALID_INVOCATION.of(f"i = {i} outside 0..{rs.rank}")
    if i == 0:
        return SubsystemMask(rs, frozenset(range(len(rs.roots))), nodes=tuple(range(rs.rank)))
    weights = [rs.fundamental_weights[k] for k in sigma[:i]]
    mask = orthogonal_subsystem(rs, weights)
    return SubsystemMask(rs, mask.members, nodes=tuple(sorted(set(range(rs.rank)) - set(sigma[:i]))))


def _image_bits(perm: tuple[int, ...], members: frozenset[int]) -> int:
    out = 0
    for k in members:
        out |= 1 << perm[k]
    return out


def _rows_for(rs, sigmas, chains, outside_bits, elements, offset) -> list[ExponentRow]:
    r = rs.rank
    rows = []
    for w_index, w in enumerate(elements, start=offset):
        image_cache: dict[frozenset, int] = {}
        for sigma in sigmas:
            masks = chains[sigma]
            images = []
            for mask in masks:
                if mask.members not in image_cache:
                    image_cache[mask.members] = _image_bits(w.root_perm, mask.members)
                images.append(image_cache[mask.members])
            pos = [len(mask.positive) for mask in masks]
            n, s = [], []
            for i in range(1, r + 1):
                ni = bitcount(outside_bits & images[i - 1] & ~images[i])
                n.append(ni)
                s.append(pos[i - 1] - pos[i] - 2 * ni)
            S = [pos[i] - 2 * bitcount(outside_bits & images[i]) for i in range(r + 1)]
            e = [sum(1 for i in range(l) if S[i] + r == i) for l in range(r + 1)]
            rows.append(ExponentRow(sigma, w_index, tuple(n), tuple(s), tuple(S), tuple(e)))
    return rows


def exponent_table(rs: RootSystem, M: SubsystemMask, cap: int | None = None, threads: int = 1) -> ExponentTable:
    if rs.rank > settings["EXPONENT_MAX_RANK"]:
        raise ErrorCode.ENUMERATION_CAP_EXCEEDED.of(
            f"exponent tables enumerate W; rank {rs.rank} exceeds {settings['EXPONENT_MAX_RANK']}"
        )
    elements = tuple(weyl_enumerate(rs, cap))
    sigmas = list(permutations(range(rs.rank)))
    chains = {sigma: [phi_sigma_i(rs, sigma, i) for i in range(rs.rank + 1)] for sigma in sigmas}
    outside_bits = 0
    for k in rs.positive_roots - M.positive:
        outside_bits |= 1 << k

    threads = max(1, threads)
    chunk = -(-len(elements) // threads)
    parts = [(elements[i:i + chunk], i) for i in range(0, len(elements), chunk)]
    if threads == 1:
        rows = _rows_for(rs, sigmas, chains, outside_bits, elements, 0)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_rows_for, rs, sigmas, chains, outside_bits, part, off) for part, off in parts]
            rows = [row for f in futures for row in f.result()]
    # 分割数に関係なく同じ順序で並べる
    rows.sort(key=lambda row: (row.w_index, row.sigma))
    logger.info("exponent table for %s: %d rows", rs.label, len(rows))
    return ExponentTable(rs, M, elements, tuple(rows))


def check_S_identities(tbl: ExponentTable) -> list[Violation]:
    rs, r = tbl.rs, tbl.rank
    M_bits = tbl.M.bits
    chains = {}
    violations = []
    for row in tbl.rows:
        if row.sigma not in chains:
            chains[row.sigma] = [phi_sigma_i(rs, row.sigma, i) for i in range(r + 1)]
        w = tbl.elements[row.w_index]
        for i in range(1, r + 1):
            if row.S[i] + row.s[i - 1] != row.S[i - 1]:
                violations.append(Violation(sigma=[k + 1 for k in row.sigma], w_index=row.w_index, i=i,
                                            detail=f"S({i}) + s({i}) = {row.S[i] + row.s[i - 1]} != S({i - 1}) = {row.S[i - 1]}"))
        for i in range(r + 1):
            mask = chains[row.sigma][i]
            image = _image_bits(w.root_perm, mask.members)
            # |Φ_M ∩ wΦ_{σ,i}| − ½|Φ_{σ,i}| in doubled form
            rhs2 = 2 * bitcount(M_bits & image) - mask.size
            if 2 * row.S[i] != rhs2:
                violations.append(Violation(sigma=[k + 1 for k in row.sigma], w_index=row.w_index, i=i,
                                            detail=f"2S({i}) = {2 * row.S[i]} != {rhs2}"))
    return violations


def check_S_lower_bound(tbl: ExponentTable) -> list[Violation]:
    r = tbl.rank
    out = []
    for row in tbl.rows:
        for i in range(r + 1):
            if row.S[i] + r < i:
                out.append(Violation(sigma=[k + 1 for k in row.sigma], w_index=row.w_index, i=i,
                                     detail=f"S({i}) + {r} = {row.S[i] + r} < {i}"))
    return out


def log_exponent_k(rs: RootSystem, M: SubsystemMask, tbl: ExponentTable | None = None) -> int:
    tbl = tbl or exponent_table(rs, M)
    violations = check_S_lower_bound(tbl)
    if violations:
        v = violations[0]
        raise ErrorCode.NOT_SEMIDENSE.of(f"Φ_M is not semi-dense: sigma={v.sigma}, w={v.w_index}, {v.detail}")
    return max(max(row.e) for row in tbl.rows)


def _prefix_growth(s: tuple[int, ...]) -> int:
    """Largest Σ_{i≤j}(s_i + 1); (1 + x_1)^{−N} must beat it at infinity."""
    total, best = 0, 0
    for v in s:
        total += v + 1
        best = max(best, total)
    return best


def default_N(rs: RootSystem, tbl: ExponentTable) -> int:
    simple = rs.rank + max((abs(s) for row in tbl.rows for s in row.s), default=0)
    return max([simple] + [_prefix_growth(row.s) for row in tbl.rows]) + 2


def I_integral(s: tuple[int, ...], t: float, N: int) -> float:
    """∫_{x_1 > … > x_l > 1/t} (1 + x_1)^{−N} ∏ x_i^{s_i} dx, computed in u = log x."""
    l = len(s)
    if l == 0:
        return 1.0
    if t <= 1:
        raise ErrorCode.NON_CONVERGENT.of(f"t must exceed 1, got {t}")
    if N <= _prefix_growth(s):
        raise ErrorCode.NON_CONVERGENT.of(f"N = {N} is too small for exponents {s}")
    lo = -math.log(t)
    exps = np.array(s, dtype=float) + 1.0
    epsabs = settings["quadrature"]["epsabs_low"] if l <= 2 else settings["quadrature"]["epsabs_high"]

    def integrand(*u):
        # nquad passes the innermost variable first: u = (u_1, u_2, ..., u_l)
        u = np.array(u)
        return math.exp(-N * np.logaddexp(0.0, u[0]) + float(exps @ u))

    ranges = []
    for k in range(l):
        if k == l - 1:
            ranges.append((lo, np.inf))
        else:
            ranges.append(lambda *outer: (outer[0], np.inf))
    value, err = integrate.nquad(integrand, ranges, opts={"epsabs": epsabs, "epsrel": 1e-8, "limit": 200})
    if not math.isfinite(value):
        raise ErrorCode.NON_CONVERGENT.of(f"quadrature diverged for exponents {s}, t = {t}")
    return value


def verify_power_k(rs: RootSystem, M: SubsystemMask, t_grid=(10.0, 1e2, 1e3, 1e4), N: int | None = None) -> dict:
    if rs.rank > 3:
        raise ErrorCode.INVALID_INVOCATION.of("verify_power_k is limited to rank <= 3")
    tbl = exponent_table(rs, M)
    log_exponent_k(rs, M, tbl)
    N = N or default_N(rs, tbl)
    r = rs.rank
    cache: dict[tuple, list[float]] = {}
    rows = []
    for row in tbl.rows:
        for l in range(r + 1):
            key = (row.s[:l], row.S[l], row.e[l])
            if key not in cache:
                ratios = []
                for t in t_grid:
                    lhs = t ** (-row.S[l] + l - r) * I_integral(row.s[:l], t, N)
                    ratios.append(lhs / math.log(t) ** row.e[l])
                cache[key] = ratios
            ratios = cache[key]
            rows.append(PowerKRow(sigma=[k + 1 for k in row.sigma], l=l, w_index=row.w_index,
                                  S=row.S[l], e=row.e[l], ratios=ratios, spread=max(ratios) / min(ratios)))
    max_by_t = [max(row.ratios[j] for row in rows) for j in range(len(t_grid))]
    logger.info("power-k check on %s: %d distinct integrals", rs.label, len(cache))
    return {
        "N": N,
        "t_grid": list(t_grid),
        "rows": rows,
        "max_ratio_by_t": max_by_t,
        "max_ratio": max(max_by_t),
        "spread": max(max_by_t) / min(max_by_t),
    }


def rootsize_constants(rs: RootSystem, sigma: tuple[int, ...], i: int, alpha: int) -> tuple[Fraction, Fraction]:
    """For α ∈ Φ⁺_{σ,i−1}∖Φ_{σ,i}: c·x_{σ(i)} ≤ ⟨λ(x), α⟩ ≤ C·x_{σ(i)} on T_σ."""
    a = rs.roots[alpha]
    pairings = [inner(rs.fundamental_weights[sigma[j]], a) for j in range(i - 1, rs.rank)]
    return pairings[0], sum(pairings, Fraction(0))


def check_rootsize_constants(rs: RootSystem, samples: int = 1000, seed: int = 0) -> list[Violation]:
    """Sample x ∈ T_σ for every σ and test c ≤ ⟨λ(x), α⟩ / x_{σ(i)} ≤ C on each layer."""
    if rs.rank > settings["EXPONENT_MAX_RANK"]:
        raise ErrorCode.ENUMERATION_CAP_EXCEEDED.of(f"rank {rs.rank} exceeds {settings['EXPONENT_MAX_RANK']}")
    r = rs.rank
    weights = np.array([[float(a) for a in w] for w in rs.fundamental_weights])
    roots = rs.root_array
    out = []
    for block, sigma in enumerate(permutations(range(r))):
        # T_σ: x_{σ(1)} > … > x_{σ(r)} > 0
        ordered = -np.sort(-stream(seed, block).exponential(size=(samples, r)), axis=1)
        x = np.empty_like(ordered)
        x[:, list(sigma)] = ordered
        lam = x @ weights
        chain = [phi_sigma_i(rs, sigma, i) for i in range(r + 1)]
        for i in range(1, r + 1):
            layer = sorted(set(chain[i - 1].positive) - chain[i].members)
            for alpha in layer:
                c, C = rootsize_constants(rs, sigma, i, alpha)
                ratio = (lam @ roots[alpha]) / x[:, sigma[i - 1]]
                lo, hi = float(ratio.min()), float(ratio.max())
                if c <= 0 or lo < float(c) - 1e-9 or hi > float(C) + 1e-9:
                    out.append(Violation(sigma=[k + 1 for k in sigma], i=i,
                                         detail=f"root {alpha}: ratio in [{lo:.6g}, {hi:.6g}], constants [{c}, {C}]"))
    logger.info("root-size constants on %s: %d violations", rs.label, len(out))
    return out


def H0_for(rs: RootSystem, M: SubsystemMask):
    nodes = set(M.nodes if M.nodes is not None else ())
    return sum_vectors([rs.fundamental_coweights[j] for j in range(rs.rank) if j not in nodes], rs.ambient_dim)


def spectral_integral(rs: RootSystem, M: SubsystemMask, t: float, H=None, N: int | None = None) -> float:
    """∫_{x>0} (1+‖x‖)^{−N} Θ(tH0,λ(x))² Θ(H,λ(x)) |c(λ(x))|^{−2} dx, cell by cell."""
    if rs.rank > 2:
        raise ErrorCode.INVALID_INVOCATION.of("spectral_integral is limited to rank <= 2")
    r = rs.rank
    N = N or (3 * len(rs.positive_roots) + r + 2)
    H0 = np.array([float(a) for a in H0_for(rs, M)])
    H = np.zeros(rs.ambient_dim) if H is None else np.asarray(H, dtype=float)
    weights = np.array([[float(a) for a in w] for w in rs.fundamental_weights])
    theta = harmonic.ThetaEvaluator(rs)

    def f(x: np.ndarray) -> float:
        lam = x @ weights
        value = (1 + np.linalg.norm(x)) ** (-N)
        value *= theta(t * H0, lam) ** 2 * theta(H, lam)
        return value * harmonic.plancherel_density(rs, lam, limit_at_walls=True)

    lo = -math.log(t)
    # e^{U} より先は (1+x)^{−N} が倍精度以下、e^{L} より下も寄与なし
    L, U = lo - SPECTRAL_LOG_DEPTH, SPECTRAL_LOG_CAP
    opts = {"epsabs": 1e-10, "epsrel": 1e-6, "limit": 200}
    total = 0.0
    if r == 1:
        for a, b in ((L, lo), (lo, U)):
            value, _ = integrate.quad(lambda u: f(np.array([math.exp(u)])) * math.exp(u), a, b, **opts)
            total += value
        return total

    for sigma in permutations(range(2)):
        first, second = sigma

        def g(u2, u1):
            x = np.zeros(2)
            x[first], x[second] = math.exp(u1), math.exp(u2)
            return f(x) * math.exp(u1 + u2)

        cells = [
            # t/t
            [lambda u1: (lo, u1), (lo, U)],
            # l = 1
            [(L, lo), (lo, U)],
            # l = 0
            [lambda u1: (L, u1), (L, lo)],
        ]
        for ranges in cells:
            value, _ = integrate.nquad(g, ranges, opts=opts)
            total += value
    return total
