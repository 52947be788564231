"""Exact root systems and Weyl group actions.

Vectors are tuples of ``fractions.Fraction``; most numeric entry points also accept
float tuples (the arithmetic is written generically) and take a ``tol`` for comparisons.
Simple roots follow Bourbaki numbering; internally nodes are 0-based, reports use 1-based.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np
import sympy

from rootshell.abc import CartanType, ErrorCode, GroupForm
from rootshell.utils import settings

logger = logging.getLogger(__name__)

Vector = tuple
F = Fraction
HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


def vec(*entries) -> Vector:
    return tuple(F(x) for x in entries)


def unit(dim: int, i: int, scale=1) -> Vector:
    return tuple(F(scale) if k == i else F(0) for k in range(dim))


def add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def inner(u: Vector, v: Vector):
    return sum((a * b for a, b in zip(u, v)), F(0))


def is_zero(v: Vector, tol: float = 0) -> bool:
    return all(abs(a) <= tol for a in v)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return F(x)
    if isinstance(x, sympy.Basic):
        x = sympy.nsimplify(x)
        return F(int(x.p), int(x.q))
    if isinstance(x, str):
        return F(x)
    # floats are taken at face value
    return F(x).limit_denominator(10**12)


def primitive_direction(v: Vector) -> Vector:
    """Canonical representative of the line through ``v``: coprime integers, first nonzero positive."""
    fr = [to_fraction(a) for a in v]
    lcm = 1
    for a in fr:
        lcm = lcm * a.denominator // math.gcd(lcm, a.denominator)
    ints = [int(a * lcm) for a in fr]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    if g == 0:
        return tuple(0 for _ in ints)
    ints = [a // g for a in ints]
    first = next(a for a in ints if a != 0)
    if first < 0:
        ints = [-a for a in ints]
    return tuple(ints)


# ---- 標準モデル ----

def _model_A(n: int):
    d = n + 1
    roots = [sub(unit(d, i), unit(d, j)) for i in range(d) for j in range(d) if i != j]
    simple = [sub(unit(d, i), unit(d, i + 1)) for i in range(n)]
    return d, roots, simple


def _pm_pairs(d: int):
    out = []
    for i, j in combinations(range(d), 2):
        for si, sj in product((1, -1), repeat=2):
            out.append(add(unit(d, i, si), unit(d, j, sj)))
    return out


def _model_B(n: int):
    roots = _pm_pairs(n) + [unit(n, i, s) for i in range(n) for s in (1, -1)]
    simple = [sub(unit(n, i), unit(n, i + 1)) for i in range(n - 1)] + [unit(n, n - 1)]
    return n, roots, simple


def _model_C(n: int):
    roots = _pm_pairs(n) + [unit(n, i, 2 * s) for i in range(n) for s in (1, -1)]
    simple = [sub(unit(n, i), unit(n, i + 1)) for i in range(n - 1)] + [unit(n, n - 1, 2)]
    return n, roots, simple


def _model_D(n: int):
    roots = _pm_pairs(n)
    simple = [sub(unit(n, i), unit(n, i + 1)) for i in range(n - 1)]
    simple.append(add(unit(n, n - 2), unit(n, n - 1)))
    return n, roots, simple


def _model_G2():
    d = 3
    short = [sub(unit(d, i), unit(d, j)) for i in range(d) for j in range(d) if i != j]
    long_ = []
    for i in range(d):
        v = tuple(F(2) if k == i else F(-1) for k in range(d))
        long_ += [v, scale(-1, v)]
    simple = [vec(1, -1, 0), vec(-2, 1, 1)]
    return d, short + long_, simple


def _model_F4():
    d = 4
    roots = _pm_pairs(d) + [unit(d, i, s) for i in range(d) for s in (1, -1)]
    roots += [tuple(F(s, 2) for s in signs) for signs in product((1, -1), repeat=4)]
    simple = [vec(0, 1, -1, 0), vec(0, 0, 1, -1), vec(0, 0, 0, 1), scale(HALF, vec(1, -1, -1, -1))]
    return d, roots, simple


def _e8_roots():
    roots = _pm_pairs(8)
    for signs in product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            roots.append(tuple(F(s, 2) for s in signs))
    return roots


def _model_E8():
    e = lambda i: unit(8, i - 1)  # noqa: E731
    simple = [
        scale(HALF, vec(1, -1, -1, -1, -1, -1, -1, 1)),
        add(e(1), e(2)),
        sub(e(2), e(1)),
        sub(e(3), e(2)),
        sub(e(4), e(3)),
        sub(e(5), e(4)),
        sub(e(6), e(5)),
        sub(e(7), e(6)),
    ]
    return 8, _e8_roots(), simple


def _model_E7():
    # sum-zero model in R^8: e_i - e_j and permutations of (1/2)(1,1,1,1,-1,-1,-1,-1)
    d = 8
    e = lambda i: unit(d, i - 1)  # noqa: E731
    roots = [sub(e(i), e(j)) for i in range(1, 9) for j in range(1, 9) if i != j]
    for plus in combinations(range(d), 4):
        roots.append(tuple(HALF if k in plus else -HALF for k in range(d)))
    half = scale(HALF, vec(1, 1, 1, 1, -1, -1, -1, -1))
    simple = [sub(e(3), e(2)), half, sub(e(4), e(3)), sub(e(5), e(4)),
              sub(e(6), e(5)), sub(e(7), e(6)), sub(e(8), e(7))]
    return d, roots, simple


def _model_E6_r9():
    d = 9
    e = lambda i: unit(d, i - 1)  # noqa: E731
    roots = []
    for block in range(3):
        for i, j in product(range(3), repeat=2):
            if i != j:
                roots.append(sub(e(3 * block + i + 1), e(3 * block + j + 1)))
    patterns = [tuple(F(2, 3) if k == p else F(-1, 3) for k in range(3)) for p in range(3)]
    for a, b, c in product(patterns, repeat=3):
        v = a + b + c
        roots += [v, scale(-1, v)]
    beta = scale(THIRD, vec(1, -2, 1, -2, 1, 1, -2, 1, 1))
    simple = [sub(e(8), e(9)), sub(e(2), e(3)), sub(e(7), e(8)), beta, sub(e(4), e(5)), sub(e(5), e(6))]
    return d, roots, simple


def _model_E6_e8():
    # roots of E8 orthogonal to e1 - e2 and e1 - e8
    d = 8
    e = lambda i: unit(d, i - 1)  # noqa: E731
    n1, n2 = sub(e(1), e(2)), sub(e(1), e(8))
    roots = [r for r in _e8_roots() if inner(r, n1) == 0 and inner(r, n2) == 0]
    gamma = scale(-HALF, vec(*[1] * 8))
    simple = [sub(e(3), e(4)), sub(e(6), e(7)), sub(e(4), e(5)), sub(e(5), e(6)), add(e(6), e(7)), gamma]
    return d, roots, simple


E6_MODELS = ("r9", "e8")


@dataclass(frozen=True)
class WeylElement:
    root_perm: tuple[int, ...]
    word: tuple[int, ...] = field(default=(), compare=False)

    @property
    def is_identity(self) -> bool:
        return all(i == k for i, k in enumerate(self.root_perm))

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        perm = tuple(self.root_perm[k] for k in other.root_perm)
        return WeylElement(perm, self.word + other.word)

    def inverse(self) -> "WeylElement":
        inv = [0] * len(self.root_perm)
        for i, k in enumerate(self.root_perm):
            inv[k] = i
        return WeylElement(tuple(inv), tuple(reversed(self.word)))

    def image(self, indices: Iterable[int]) -> frozenset[int]:
        return frozenset(self.root_perm[i] for i in indices)

    @property
    def word_length(self) -> int:
        return len(self.word)


@dataclass(frozen=True, eq=False)
class RootSystem:
    type_label: CartanType
    rank: int
    ambient_dim: int
    roots: tuple[Vector, ...]
    simple_roots: tuple[int, ...]
    positive_roots: frozenset[int]
    multiplicities: tuple[int, ...]
    double_multiplicities: tuple[int, ...]
    components: tuple[tuple[CartanType, int], ...] = ()
    model: str = "standard"

    @property
    def label(self) -> str:
        return "x".join(f"{t.value}{r}" for t, r in self.components) or f"{self.type_label.value}{self.rank}"

    @property
    def is_irreducible(self) -> bool:
        return len(self.components) == 1

    @cached_property
    def index(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.roots)}

    @cached_property
    def negation(self) -> tuple[int, ...]:
        return tuple(self.index[scale(-1, r)] for r in self.roots)

    @cached_property
    def simple_vectors(self) -> tuple[Vector, ...]:
        return tuple(self.roots[i] for i in self.simple_roots)

    @cached_property
    def gram(self) -> sympy.Matrix:
        s = self.simple_vectors
        return sympy.Matrix(len(s), len(s), lambda i, j: sympy.Rational(inner(s[i], s[j])))

    @cached_property
    def fundamental_coweights(self) -> tuple[Vector, ...]:
        """Dual basis to the simple roots inside span(Φ): ⟨α_j, ϖ_i^∨⟩ = δ_ij."""
        inv = self.gram.inv()
        s = self.simple_vectors
        out = []
        for i in range(self.rank):
            v = tuple(F(0) for _ in range(self.ambient_dim))
            for k in range(self.rank):
                v = add(v, scale(to_fraction(inv[i, k]), s[k]))
            out.append(v)
        return tuple(out)

    @cached_property
    def fundamental_weights(self) -> tuple[Vector, ...]:
        s = self.simple_vectors
        return tuple(scale(inner(a, a) / 2, w) for a, w in zip(s, self.fundamental_coweights))

    @cached_property
    def simple_coordinates(self) -> tuple[tuple[Fraction, ...], ...]:
        """Coefficients of every root in the basis of simple roots."""
        return tuple(tuple(inner(r, w) for w in self.fundamental_coweights) for r in self.roots)

    @cached_property
    def reflection_perms(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.index[reflect(self, a, r)] for r in self.roots) for a in self.simple_roots)

    @cached_property
    def denominator(self) -> int:
        d = 1
        for r in self.roots:
            for a in r:
                d = d * a.denominator // math.gcd(d, a.denominator)
        return d

    @cached_property
    def lattice(self) -> np.ndarray:
        """Roots scaled by ``denominator`` as an int64 array."""
        D = self.denominator
        return np.array([[int(a * D) for a in r] for r in self.roots], dtype=np.int64)

    @cached_property
    def root_array(self) -> np.ndarray:
        return np.array([[float(a) for a in r] for r in self.roots], dtype=float)

    @cached_property
    def positive_list(self) -> tuple[int, ...]:
        return tuple(sorted(self.positive_roots))

    def node_of(self, root_index: int) -> int | None:
        try:
            return self.simple_roots.index(root_index)
        except ValueError:
            return None


_FIELD_NAMES = frozenset(f.name for f in fields(RootSystem))


def build_root_system(
    type_label: CartanType | str,
    rank: int,
    form: GroupForm | str = GroupForm.SPLIT,
    model: str | None = None,
) -> RootSystem:
    type_label = CartanType(type_label)
    form = GroupForm(form)
    if type_label is CartanType.UNKNOWN or not type_label.valid_rank(rank):
        raise ErrorCode.INVALID_CARTAN_TYPE.of(
            f"{type_label.value}{rank} is not a valid Cartan type "
            "(B needs rank >= 2, C >= 3, D >= 4, E 6-8, F 4, G 2)"
        )

    model_name = "standard"
    match type_label:
        case CartanType.A:
            d, roots, simple = _model_A(rank)
        case CartanType.B:
            d, roots, simple = _model_B(rank)
        case CartanType.C:
            d, roots, simple = _model_C(rank)
        case CartanType.D:
            d, roots, simple = _model_D(rank)
        case CartanType.G:
            d, roots, simple = _model_G2()
        case CartanType.F:
            d, roots, simple = _model_F4()
        case CartanType.E if rank == 8:
            d, roots, simple = _model_E8()
        case CartanType.E if rank == 7:
            d, roots, simple = _model_E7()
        case _:
            model_name = model or "r9"
            if model_name not in E6_MODELS:
                raise ErrorCode.INVALID_CARTAN_TYPE.of(f"unknown E6 model {model_name!r}, expected one of {E6_MODELS}")
            d, roots, simple = _model_E6_r9() if model_name == "r9" else _model_E6_e8()

    return _assemble(type_label, rank, d, roots, simple, form.multiplicity, ((type_label, rank),), model_name)


def _assemble(type_label, rank, d, roots, simple, m, components, model_name) -> RootSystem:
    roots = list(dict.fromkeys(roots))
    index = {r: i for i, r in enumerate(roots)}
    if len(index) != len(roots):
        raise ErrorCode.INVALID_CARTAN_TYPE.of("duplicate roots in model")
    try:
        simple_idx = tuple(index[s] for s in simple)
    except KeyError:
        raise ErrorCode.INVALID_CARTAN_TYPE.of("simple root missing from root list")

    rs = RootSystem(
        type_label=type_label,
        rank=rank,
        ambient_dim=d,
        roots=tuple(roots),
        simple_roots=simple_idx,
        positive_roots=frozenset(),
        multiplicities=tuple(m for _ in roots),
        double_multiplicities=tuple(0 for _ in roots),
        components=components,
        model=model_name,
    )
    if rs.gram.det() == 0:
        raise ErrorCode.INVALID_CARTAN_TYPE.of("simple roots are linearly dependent")

    positive = set()
    for i, coords in enumerate(rs.simple_coordinates):
        if any(c.denominator != 1 for c in coords):
            raise ErrorCode.INVALID_CARTAN_TYPE.of(f"root {i} is not an integer combination of simple roots")
        if all(c >= 0 for c in coords):
            positive.add(i)
        elif not all(c <= 0 for c in coords):
            raise ErrorCode.INVALID_CARTAN_TYPE.of(f"root {i} has mixed-sign simple coordinates")

    # cached_property は __dict__ にあるので新しいインスタンスへ引き継ぐ
    out = replace(rs, positive_roots=frozenset(positive))
    out.__dict__.update({k: v for k, v in rs.__dict__.items() if k in ("gram", "fundamental_coweights")})
    logger.debug("built %s (%d roots, model %s)", out.label, len(roots), model_name)
    return out


def build_product_system(parts: Sequence[tuple[CartanType | str, int]], form=GroupForm.SPLIT) -> RootSystem:
    """Orthogonal direct sum of irreducible standard models."""
    pieces = [build_root_system(t, r, form) for t, r in parts]
    if len(pieces) == 1:
        return pieces[0]
    total = sum(p.ambient_dim for p in pieces)
    roots, simple = [], []
    offset = 0
    for p in pieces:
        pad = lambda v: tuple([F(0)] * offset) + v + tuple([F(0)] * (total - offset - p.ambient_dim))  # noqa: E731
        roots += [pad(r) for r in p.roots]
        simple += [pad(s) for s in p.simple_vectors]
        offset += p.ambient_dim
    components = tuple((p.type_label, p.rank) for p in pieces)
    rank = sum(p.rank for p in pieces)
    return _assemble(pieces[0].type_label, rank, total, roots, simple, GroupForm(form).multiplicity, components, "product")


def with_multiplicities(rs: RootSystem, m: int | Sequence[int], m2: int | Sequence[int] = 0) -> RootSystem:
    """Attach arbitrary multiplicities; no check against the real-form classification."""
    n = len(rs.roots)
    m = tuple([m] * n) if isinstance(m, int) else tuple(m)
    m2 = tuple([m2] * n) if isinstance(m2, int) else tuple(m2)
    if len(m) != n or len(m2) != n or min(m) < 1 or min(m2) < 0:
        raise ErrorCode.INVALID_CARTAN_TYPE.of("multiplicities must give one positive m and one non-negative m2 per root")
    out = replace(rs, multiplicities=m, double_multiplicities=m2)
    out.__dict__.update({k: v for k, v in rs.__dict__.items() if k not in _FIELD_NAMES})
    return out


# ---- 鏡映と軌道 ----

def reflect(rs: RootSystem, alpha: int | Vector, v: Vector) -> Vector:
    a = rs.roots[alpha] if isinstance(alpha, int) else alpha
    c = 2 * inner(v, a) / inner(a, a)
    return tuple(x - c * y for x, y in zip(v, a))


def apply_word(rs: RootSystem, word: Sequence[int], v: Vector) -> Vector:
    for node in reversed(word):
        v = reflect(rs, rs.simple_roots[node], v)
    return v


def element_from_word(rs: RootSystem, word: Sequence[int]) -> WeylElement:
    perm = tuple(range(len(rs.roots)))
    for node in reversed(word):
        s = rs.reflection_perms[node]
        perm = tuple(s[k] for k in perm)
    return WeylElement(perm, tuple(word))


def identity(rs: RootSystem) -> WeylElement:
    return WeylElement(tuple(range(len(rs.roots))), ())


def weyl_orbit(
    rs: RootSystem,
    v: Vector,
    cap: int | None = None,
    nodes: Sequence[int] | None = None,
) -> dict[Vector, tuple[int, ...]]:
    """Orbit of ``v`` under the subgroup generated by ``nodes`` (all simple reflections by default).

    Returns element -> witness word with ``apply_word(rs, word, v) == element``.
    """
    cap = cap or settings["ORBIT_CAP"]
    nodes = range(rs.rank) if nodes is None else nodes
    v = tuple(v)
    seen = {v: ()}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        word = seen[u]
        for node in nodes:
            a = rs.simple_vectors[node]
            if inner(u, a) == 0:
                continue
            x = reflect(rs, a, u)
            if x not in seen:
                seen[x] = (node,) + word
                if len(seen) > cap:
                    raise ErrorCode.ORBIT_CAP_EXCEEDED.of(f"orbit exceeds the cap of {cap} elements")
                queue.append(x)
    return seen


def weyl_order(rs: RootSystem, nodes: Sequence[int] | None = None) -> int:
    """Order of the parabolic subgroup on ``nodes`` by a stabilizer chain.

    ϖ_j^∨ is dominant for the subgroup and its stabilizer there is the parabolic subgroup
    on the remaining nodes, so |W_J| = |W_J.ϖ_j^∨| · |W_{J∖{j}}|.
    """
    nodes = sorted(range(rs.rank) if nodes is None else nodes)
    order = 1
    while nodes:
        j = nodes[-1]
        orbit = weyl_orbit(rs, rs.fundamental_coweights[j], nodes=nodes)
        order *= len(orbit)
        nodes = nodes[:-1]
    return order


def weyl_enumerate(rs: RootSystem, cap: int | None = None) -> list[WeylElement]:
    cap = cap or settings["ENUMERATION_CAP"]
    order = weyl_order(rs)
    if order > cap:
        raise ErrorCode.ENUMERATION_CAP_EXCEEDED.of(f"|W| = {order} exceeds the enumeration cap of {cap}")

    start = identity(rs)
    seen = {start.root_perm: start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for node, s in enumerate(rs.reflection_perms):
            perm = tuple(s[k] for k in w.root_perm)
            if perm not in seen:
                element = WeylElement(perm, (node,) + w.word)
                seen[perm] = element
                queue.append(element)
    logger.info("enumerated %d Weyl group elements of %s", len(seen), rs.label)
    return list(seen.values())


def act(rs: RootSystem, w: WeylElement, v: Vector) -> Vector:
    return apply_word(rs, w.word, v)


def is_dominant(rs: RootSystem, H: Vector, tol: float = 0) -> bool:
    return all(inner(a, H) >= -tol for a in rs.simple_vectors)


def dominant_representative(rs: RootSystem, H: Vector, tol: float = 0) -> tuple[Vector, WeylElement]:
    H = tuple(H)
    word: tuple[int, ...] = ()
    while True:
        for node, a in enumerate(rs.simple_vectors):
            if inner(a, H) < -tol:
                H = reflect(rs, a, H)
                word = (node,) + word
                break
        else:
            return H, element_from_word(rs, word)


def conv_dominance(rs: RootSystem, H: Vector, Y: Vector, tol: float = 0) -> bool:
    """H ∈ Conv(W.Y) for dominant Y."""
    if not is_dominant(rs, Y, tol):
        raise ErrorCode.NOT_DOMINANT.of(f"conv_dominance needs a dominant Y, got {Y}")
    Hp, _ = dominant_representative(rs, H, tol)
    diff = sub(tuple(Y), Hp)
    return all(inner(diff, w) >= -tol for w in rs.fundamental_coweights)


def rho(rs: RootSystem) -> Vector:
    total = tuple(F(0) for _ in range(rs.ambient_dim))
    for i in rs.positive_roots:
        weight = rs.multiplicities[i] + 2 * rs.double_multiplicities[i]
        total = add(total, scale(weight, rs.roots[i]))
    return scale(HALF, total)


def longest_element(rs: RootSystem) -> WeylElement:
    regular = scale(-1, sum_vectors(rs.fundamental_coweights, rs.ambient_dim))
    _, w = dominant_representative(rs, regular)
    return w


def sum_vectors(vectors: Iterable[Vector], dim: int) -> Vector:
    total = tuple(F(0) for _ in range(dim))
    for v in vectors:
        total = add(total, v)
    return total


def coroot(rs: RootSystem, i: int) -> Vector:
    a = rs.roots[i]
    return scale(2 / inner(a, a), a)


def cartan_matrix(vectors: Sequence[Vector]) -> list[list[int]]:
    out = []
    for a in vectors:
        row = []
        for b in vectors:
            value = 2 * inner(a, b) / inner(b, b)
            if value.denominator != 1:
                raise ErrorCode.NOT_FINITE_TYPE.of("non-integral Cartan entry")
            row.append(int(value))
        out.append(row)
    return out
