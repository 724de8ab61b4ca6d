"""Exact face counting under a fixed codimension-2 orthogonal projection.

A k-face ``G`` survives the projection along ``S`` when its image is a face
of the image polytope, i.e. some functional from the orthogonal complement
of ``S`` is constant on ``G`` and strictly larger there than at every other
vertex.  This is decided by an exact rational LP; survival means the
optimal margin is strictly positive.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import linalg, lp
from .facecount import cyclic_fk, rho
from .polytope import PolytopeModel, cyclic


class GeneralPositionError(ValueError):
    pass


@dataclass(frozen=True)
class FixedSubspace:
    """Rational subspace ``S`` with an exact basis of its complement."""

    d: int
    basis: tuple
    complement: tuple = field(default=())

    def __post_init__(self):
        basis = tuple(tuple(Fraction(x) for x in v) for v in self.basis)
        if any(len(v) != self.d for v in basis):
            raise ValueError(f"basis vectors must have {self.d} coordinates")
        if linalg.rank(basis) != len(basis):
            raise ValueError("basis vectors are linearly dependent")
        comp = tuple(linalg.primitive(v) for v in linalg.nullspace(basis, self.d))
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "complement", comp)

    @property
    def m(self) -> int:
        return len(self.basis)

    @classmethod
    def coordinate(cls, d: int, axes) -> "FixedSubspace":
        """Span of coordinate axes, numbered from 1."""
        axes = list(axes)
        if any(not 1 <= a <= d for a in axes):
            raise ValueError(f"axes must lie in 1..{d}")
        return cls(d, tuple(tuple(int(j == a - 1) for j in range(d)) for a in axes))

    @classmethod
    def random(cls, d: int, m: int = 2, seed: int = 0, size: int = 9) -> "FixedSubspace":
        rng = random.Random(seed)
        while True:
            vecs = [[rng.randint(-size, size) for _ in range(d)] for _ in range(m)]
            if linalg.rank(vecs) == m:
                return cls(d, tuple(tuple(v) for v in vecs))


@dataclass(frozen=True)
class PositionCheck:
    passed: bool
    face: Optional[tuple] = None
    face_dim: Optional[int] = None
    expected: Optional[int] = None
    actual: Optional[int] = None

    def __bool__(self):
        return self.passed

    def describe(self) -> str:
        if self.passed:
            return "general position: pass"
        return (f"general position fails at {self.face_dim}-face {list(self.face)}: "
                f"expected intersection dimension {self.expected}, got {self.actual}")


def general_position_check(P: PolytopeModel, S: FixedSubspace) -> PositionCheck:
    """Check ``dim(S & dir aff G) == max(0, m + k - d)`` for every face, P included."""
    if not P.exact:
        raise ValueError("general position is certified only for exact models")
    d, m = P.d, S.m
    if S.d != d:
        raise ValueError("dimension mismatch")
    faces = [(k, g) for k, fs in enumerate(P.lattice.faces) for g in fs]
    faces.append((d, frozenset(range(P.n_vertices))))
    for k, g in faces:
        order = sorted(g)
        base = P.vertices[order[0]]
        dirs = [linalg.sub(P.vertices[i], base) for i in order[1:]]
        meet = m + k - linalg.rank(list(S.basis) + dirs)
        want = max(0, m + k - d)
        if meet != want:
            return PositionCheck(False, tuple(order), k, want, meet)
    return PositionCheck(True)


def survival_margin(vertices, G, W) -> Fraction:
    """Optimal margin of the exact survival LP.

    ``vertices`` are the candidate points, ``G`` indexes the face, ``W`` is a
    list of rational functionals spanning the allowed directions.
    """
    G = sorted(G)
    g0 = vertices[G[0]]
    gset = set(G)
    q = len(W)
    rows, rhs = [], []
    for i, v in enumerate(vertices):
        if i in gset:
            continue
        a = [linalg.dot(w, linalg.sub(g0, v)) for w in W]
        rows.append([-x for x in a] + a + [1])
        rhs.append(0)
    for i in G[1:]:
        e = [linalg.dot(w, linalg.sub(vertices[i], g0)) for w in W]
        rows.append(e + [-x for x in e] + [0])
        rows.append([-x for x in e] + e + [0])
        rhs += [0, 0]
    for j in range(2 * q):
        rows.append([int(i == j) for i in range(2 * q)] + [0])
        rhs.append(1)
    if not any(i not in gset for i in range(len(vertices))):
        raise ValueError("the whole vertex set is not a proper face")
    sol = lp.solve_exact([0] * (2 * q) + [1], rows, rhs)
    if sol.status != lp.OPTIMAL:
        raise lp.LPError(f"survival LP for {G} is {sol.status}")
    return sol.value


def survives(P: PolytopeModel, G, S: FixedSubspace) -> bool:
    return survival_margin(P.vertices, G, S.complement) > 0


def surviving_k_faces(P: PolytopeModel, S: FixedSubspace, k: int) -> list:
    return [g for g in P.lattice.faces[k] if survives(P, g, S)]


def _facet_set(P, F):
    return P.facets[F] if isinstance(F, int) else frozenset(F)


def surviving_in_facet(P: PolytopeModel, F, S: FixedSubspace, k: int) -> list:
    """k-faces of facet ``F`` whose image is a face of the image of ``F``."""
    F = _facet_set(P, F)
    if F not in P.facets:
        raise KeyError(f"{sorted(F)} is not a facet")
    order = sorted(F)
    local = {v: i for i, v in enumerate(order)}
    pts = [P.vertices[v] for v in order]
    out = []
    for g in P.lattice.faces[k]:
        if g <= F and len(g) < len(F):
            if survival_margin(pts, [local[v] for v in g], S.complement) > 0:
                out.append(g)
    return out


@dataclass
class ProjectionReport:
    k: int
    fk: int
    survivors: int
    facet_rows: list            # (facet index, f_k(F), survivors in F)
    lhs: int
    rhs: Fraction
    residual: Fraction
    lost_in_facets: dict = field(repr=False, default_factory=dict)
    survived: frozenset = field(repr=False, default=frozenset())
    facet_survivors: dict = field(repr=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual == 0


def prop43_verify(P: PolytopeModel, S: FixedSubspace, k: int,
                  check_position: bool = True) -> ProjectionReport:
    """Exact check of ``f_k(P) - f_k(pi P) = 1/2 sum_F [f_k(F) - f_k(pi F)]``."""
    d = P.d
    if d < 3:
        raise ValueError("needs d >= 3")
    if not 0 <= k <= d - 3:
        raise ValueError(f"need 0 <= k <= d-3 = {d - 3}, got {k}")
    if S.m != 2:
        raise ValueError("the identity is for two-dimensional subspaces")
    if check_position:
        pos = general_position_check(P, S)
        if not pos:
            raise GeneralPositionError(pos.describe())
    faces = P.lattice.faces[k]
    survived = frozenset(surviving_k_faces(P, S, k))
    rows, facet_survivors = [], {}
    lost = {g: 0 for g in faces if g not in survived}
    for fi, F in enumerate(P.facets):
        inside = [g for g in faces if g <= F]
        ok = frozenset(surviving_in_facet(P, F, S, k))
        facet_survivors[fi] = ok
        rows.append((fi, len(inside), len(ok)))
        for g in inside:
            if g not in ok:
                lost[g] = lost.get(g, 0) + 1
    lhs = len(faces) - len(survived)
    rhs = Fraction(sum(a - b for _, a, b in rows), 2)
    return ProjectionReport(k, len(faces), len(survived), rows, lhs, rhs, lhs - rhs,
                            lost, survived, facet_survivors)


@dataclass
class RemarkReport:
    d: int
    n: int
    k: int
    target: Fraction
    facet_rows: list            # (facet, f_k(F), survivors in F, drop, ok)
    survivors: int
    expected_survivors: int

    @property
    def passed(self) -> bool:
        return (all(r[-1] for r in self.facet_rows)
                and self.survivors == self.expected_survivors)


def remark_verify(d: int, n: int, k: int) -> RemarkReport:
    """Every facet of C(d,n) loses exactly ``2 rho(d, d-k-1)`` k-faces.

    Uses the projection along the last two coordinate axes.
    """
    if d < 3 or n <= d:
        raise ValueError(f"need n > d >= 3, got d={d}, n={n}")
    if not 0 <= k <= d - 3:
        raise ValueError(f"need 0 <= k <= d-3, got {k}")
    P = cyclic(d, n)
    S = FixedSubspace.coordinate(d, (d - 1, d))
    rep = prop43_verify(P, S, k)
    target = 2 * rho(d, d - k - 1)
    rows = [(P.facets[fi], a, b, a - b, a - b == target) for fi, a, b in rep.facet_rows]
    return RemarkReport(d, n, k, target, rows, rep.survivors, cyclic_fk(d - 2, n, k))
