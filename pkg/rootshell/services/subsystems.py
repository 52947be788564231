import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import sympy

from rootshell.abc import CartanType, ErrorCode
from rootshell.services.root_core import (
    RootSystem,
    Vector,
    WeylElement,
    add,
    cartan_matrix,
    inner,
    to_fraction,
)
from rootshell.utils import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubsystemMask:
    parent: RootSystem = field(compare=False, repr=False)
    members: frozenset[int]
    nodes: tuple[int, ...] | None = field(default=None, compare=False)
    normals: tuple[Vector, ...] | None = field(default=None, compare=False, repr=False)

    @cached_property
    def bits(self) -> int:
        out = 0
        for i in self.members:
            out |= 1 << i
        return out

    @cached_property
    def rank(self) -> int:
        if not self.members:
            return 0
        rows = self.parent.lattice[sorted(self.members)].astype(float)
        return int(np.linalg.matrix_rank(rows))

    @property
    def size(self) -> int:
        return len(self.members)

    @cached_property
    def positive(self) -> frozenset[int]:
        return self.members & self.parent.positive_roots

    def __len__(self):
        return len(self.members)

    def image(self, w: WeylElement) -> "SubsystemMask":
        return SubsystemMask(self.parent, w.image(self.members))

    def describe(self) -> str:
        if not self.members:
            return "empty"
        return "x".join(f"{t.value}{r}" for t, r in classify_type(self))


def bitcount(x: int) -> int:
    return bin(x).count("1")


def linearly_dependent(generators: Sequence[Vector], v: Vector) -> bool:
    """Gram-determinant test: v lies in span(generators) iff det(M·Mᵀ) = 0 for M = [generators; v].

    ``generators`` must be linearly independent.
    """
    rows = [list(g) for g in generators] + [list(v)]
    M = sympy.Matrix([[sympy.Rational(to_fraction(a).numerator, to_fraction(a).denominator) for a in row] for row in rows])
    return (M * M.T).det() == 0


def _span_mask(rs: RootSystem, generator_rows: np.ndarray) -> np.ndarray:
    """Vectorised Gram test over every root of ``rs``.

    With G the Gram matrix of independent generators and b = (⟨g_i, v⟩), the Gram determinant
    of the generators plus v equals det(G)|v|² − bᵀ adj(G) b (Schur complement).
    """
    M = sympy.Matrix(generator_rows.tolist())
    G = M * M.T
    det = int(G.det(method="bareiss"))
    # 生成元が独立でなければ Gram 行列式は 0
    if det == 0:
        raise ErrorCode.NOT_SEMISTANDARD.of("generators are linearly dependent")
    adj = np.array([[int(x) for x in row] for row in (G.inv() * det).tolist()], dtype=object)
    L = rs.lattice.astype(object)
    B = L.dot(generator_rows.T.astype(object))
    norms = (L * L).sum(axis=1)
    quad = (B.dot(adj) * B).sum(axis=1)
    return (det * norms - quad) == 0


def standard_subsystem(rs: RootSystem, nodes: Iterable[int]) -> SubsystemMask:
    nodes = tuple(sorted(set(nodes)))
    if not nodes:
        return SubsystemMask(rs, frozenset(), nodes)
    generators = rs.lattice[[rs.simple_roots[i] for i in nodes]]
    inside = _span_mask(rs, generators)
    return SubsystemMask(rs, frozenset(int(i) for i in np.flatnonzero(inside)), nodes)


def _integral_rows(vectors: Sequence[Vector]) -> np.ndarray:
    rows = []
    for v in vectors:
        fr = [to_fraction(a) for a in v]
        lcm = 1
        for a in fr:
            lcm = lcm * a.denominator // math.gcd(lcm, a.denominator)
        rows.append([int(a * lcm) for a in fr])
    return np.array(rows, dtype=object)


def orthogonal_subsystem(rs: RootSystem, normals: Sequence[Vector]) -> SubsystemMask:
    normals = tuple(tuple(n) for n in normals)
    if not normals:
        return SubsystemMask(rs, frozenset(range(len(rs.roots))), normals=normals)
    pairings = rs.lattice.astype(object).dot(_integral_rows(normals).T)
    inside = np.all(pairings == 0, axis=1)
    return SubsystemMask(rs, frozenset(int(i) for i in np.flatnonzero(inside)), normals=normals)


def orthogonal_bits(rs: RootSystem, normal: Vector) -> int:
    return orthogonal_subsystem(rs, [normal]).bits


def complement_normals(rs: RootSystem, nodes: Iterable[int]) -> tuple[Vector, ...]:
    """Coweights ϖ_j^∨, j ∉ nodes: they cut out exactly span(nodes) ∩ Φ."""
    nodes = set(nodes)
    return tuple(rs.fundamental_coweights[j] for j in range(rs.rank) if j not in nodes)


def parabolic_elements(rs: RootSystem, nodes: Iterable[int]) -> dict[tuple[int, ...], WeylElement]:
    nodes = tuple(nodes)
    start = WeylElement(tuple(range(len(rs.roots))), ())
    seen = {start.root_perm: start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for node in nodes:
            s = rs.reflection_perms[node]
            perm = tuple(s[k] for k in w.root_perm)
            if perm not in seen:
                seen[perm] = WeylElement(perm, (node,) + w.word)
                queue.append(seen[perm])
    return seen


def levi_split(rs: RootSystem, nodes: Iterable[int]) -> tuple[frozenset[int], frozenset[int]]:
    """(Φ_I⁺, Φ⁺ ∖ Φ_I⁺) with Φ_I⁺ the positive roots some w ∈ W_I sends negative."""
    nodes = tuple(sorted(set(nodes)))
    inside = set()
    for alpha in rs.positive_roots:
        seen = {alpha}
        queue = deque([alpha])
        while queue:
            k = queue.popleft()
            if k not in rs.positive_roots:
                inside.add(alpha)
                break
            for node in nodes:
                x = rs.reflection_perms[node][k]
                if x not in seen:
                    seen.add(x)
                    queue.append(x)
    levi = frozenset(inside)
    span = standard_subsystem(rs, nodes).positive
    if levi != span:
        raise ErrorCode.NOT_SEMISTANDARD.of(f"W_I criterion and span test disagree for nodes {nodes}")
    return levi, rs.positive_roots - levi


def in_WI(rs: RootSystem, nodes: Iterable[int], w: WeylElement) -> bool:
    """w Φ⁺ ⊆ (Φ⁺ ∖ Φ_I⁺) ∪ Φ_I."""
    levi_pos, outside = levi_split(rs, nodes)
    levi = levi_pos | frozenset(rs.negation[i] for i in levi_pos)
    allowed = outside | levi
    return all(w.root_perm[a] in allowed for a in rs.positive_roots)


def subsystem_orbit(rs: RootSystem, mask: SubsystemMask, cap: int | None = None) -> dict[frozenset[int], tuple[int, ...]]:
    """W-orbit of a root subsystem as index sets, each with a witness word."""
    cap = cap or settings["ORBIT_CAP"]
    seen = {mask.members: ()}
    queue = deque([mask.members])
    while queue:
        members = queue.popleft()
        word = seen[members]
        for node, s in enumerate(rs.reflection_perms):
            image = frozenset(s[k] for k in members)
            if image not in seen:
                seen[image] = (node,) + word
                if len(seen) > cap:
                    raise ErrorCode.ORBIT_CAP_EXCEEDED.of(f"subsystem orbit exceeds the cap of {cap} elements")
                queue.append(image)
    return seen


def subsystem_base(mask: SubsystemMask) -> list[int]:
    """Indecomposable members of mask ∩ Φ⁺; they form a base of the subsystem."""
    rs = mask.parent
    pos = sorted(mask.positive)
    sums = set()
    for i, a in enumerate(pos):
        for b in pos[i + 1:]:
            sums.add(add(rs.roots[a], rs.roots[b]))
    return [a for a in pos if rs.roots[a] not in sums]


def _component_type(cartan: list[list[int]], norms: list, comp: list[int]) -> tuple[CartanType, int]:
    n = len(comp)
    if n == 1:
        return CartanType.A, 1
    bonds = {}
    degree = {i: 0 for i in comp}
    for x in comp:
        for y in comp:
            if x < y and cartan[x][y] != 0:
                bonds[(x, y)] = cartan[x][y] * cartan[y][x]
                degree[x] += 1
                degree[y] += 1
    if len(bonds) != n - 1:
        raise ErrorCode.NOT_FINITE_TYPE.of("Dynkin diagram has a cycle")
    products = set(bonds.values())
    if 3 in products:
        if n != 2:
            raise ErrorCode.NOT_FINITE_TYPE.of("triple bond outside G2")
        return CartanType.G, 2
    if 2 in products:
        (x, y), = [k for k, v in bonds.items() if v == 2]
        if n == 2:
            return CartanType.B, 2
        ends = [z for z in (x, y) if degree[z] == 1]
        if not ends:
            if n == 4:
                return CartanType.F, 4
            raise ErrorCode.NOT_FINITE_TYPE.of("double bond in the interior of a long diagram")
        end = ends[0]
        other = y if end == x else x
        # 二重結合の端の節点は B_n では短根、C_n では長根
        return (CartanType.B if norms[end] < norms[other] else CartanType.C), n
    branch = [z for z in comp if degree[z] == 3]
    if not branch:
        if max(degree.values()) > 2:
            raise ErrorCode.NOT_FINITE_TYPE.of("node of degree > 3")
        return CartanType.A, n
    if len(branch) > 1 or max(degree.values()) > 3:
        raise ErrorCode.NOT_FINITE_TYPE.of("more than one branch node")
    center = branch[0]
    arms = []
    for start in (z for z in comp if z != center and cartan[center][z] != 0):
        length, prev, cur = 1, center, start
        while True:
            nxt = [z for z in comp if z not in (prev, cur) and cartan[cur][z] != 0]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[:2] == [1, 1]:
        return CartanType.D, n
    if arms == [1, 2, 2]:
        return CartanType.E, 6
    if arms == [1, 2, 3]:
        return CartanType.E, 7
    if arms == [1, 2, 4]:
        return CartanType.E, 8
    raise ErrorCode.NOT_FINITE_TYPE.of(f"branch arms {arms} are not of finite type")


def classify_type(mask: SubsystemMask) -> list[tuple[CartanType, int]]:
    if not mask.members:
        raise ErrorCode.NOT_SEMISTANDARD.of("cannot classify the empty subsystem")
    rs = mask.parent
    base = subsystem_base(mask)
    vectors = [rs.roots[i] for i in base]
    cartan = cartan_matrix(vectors)
    norms = [inner(v, v) for v in vectors]

    components, seen = [], set()
    for start in range(len(base)):
        if start in seen:
            continue
        comp, queue = [], deque([start])
        seen.add(start)
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in range(len(base)):
                if y not in seen and cartan[x][y] != 0:
                    seen.add(y)
                    queue.append(y)
        components.append(sorted(comp))
    out = [_component_type(cartan, norms, comp) for comp in components]
    return sorted(out, key=lambda tr: (tr[0].value, tr[1]))
