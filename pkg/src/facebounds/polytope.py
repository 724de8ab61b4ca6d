"""Polytope models with exact rational coordinates and known facets.

No convex hull code lives here: every model is built from a fixture
generator or from explicit vertex/facet data, and the facet incidences are
validated against exact hyperplanes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .facecount import FVector


class DegenerateModel(ValueError):
    """Facet or incidence data inconsistent with the vertex coordinates."""


@dataclass(frozen=True)
class CyclicSpec:
    d: int
    n: int
    params: Optional[tuple] = None

    def __post_init__(self):
        if self.d < 2 or self.n <= self.d:
            raise ValueError(f"cyclic polytope needs n > d >= 2, got d={self.d}, n={self.n}")
        params = self.params
        if params is None:
            params = tuple(Fraction(i) for i in range(1, self.n + 1))
        params = tuple(Fraction(t) for t in params)
        if len(params) != self.n:
            raise ValueError(f"expected {self.n} parameters, got {len(params)}")
        if any(a >= b for a, b in zip(params, params[1:])):
            raise ValueError("moment curve parameters must be strictly increasing")
        object.__setattr__(self, "params", params)


@dataclass(frozen=True, eq=False)
class PolytopeModel:
    """A full-dimensional d-polytope given by vertices and facet incidences.

    ``normals[i] . x <= offsets[i]`` is the facet inequality of facet ``i``,
    tight exactly on the vertices in ``facets[i]``.  Exact models hold
    Fractions; float models (only produced for Monte Carlo consumers) hold
    Python floats.
    """

    d: int
    vertices: tuple
    facets: tuple
    normals: tuple
    offsets: tuple
    simplicial: bool
    exact: bool = True
    name: str = ""
    labels: Optional[tuple] = None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def lattice(self) -> "FaceLattice":
        return face_lattice(self)

    def fvector(self) -> FVector:
        return self.lattice.fvector()

    def normal_array(self) -> np.ndarray:
        return np.array([[float(x) for x in a] for a in self.normals])

    def vertex_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices])

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return (f"PolytopeModel({self.name or '?'}, d={self.d}, "
                f"n={len(self.vertices)}, facets={len(self.facets)}, {kind})")


@dataclass(frozen=True, eq=False)
class FaceLattice:
    """Proper nonempty faces of a polytope, graded by dimension.

    ``faces[k]`` is a tuple of vertex-index frozensets; ``facets_of[G]`` is
    the set of facet indices whose vertex set contains ``G``.
    """

    d: int
    faces: tuple
    facets_of: dict = field(repr=False)

    def fvector(self) -> FVector:
        return FVector(self.d, tuple(len(fs) for fs in self.faces))

    def dim(self, face) -> int:
        face = frozenset(face)
        for k, fs in enumerate(self.faces):
            if face in self._index[k]:
                return k
        raise KeyError(f"{sorted(face)} is not a face")

    def __contains__(self, face) -> bool:
        face = frozenset(face)
        return any(face in ix for ix in self._index)

    @cached_property
    def _index(self):
        return [set(fs) for fs in self.faces]


def _sort_key(face):
    return (len(face), tuple(sorted(face)))


# -- hyperplanes ------------------------------------------------------------

def _exact_hyperplane(vertices, facet, centroid):
    pts = [vertices[i] for i in sorted(facet)]
    base = pts[0]
    diffs = [linalg.sub(p, base) for p in pts[1:]]
    null = linalg.nullspace(diffs, len(base))
    if len(null) != 1:
        raise DegenerateModel(
            f"facet {sorted(facet)} does not span a hyperplane (nullity {len(null)})")
    a = linalg.primitive(null[0])
    b = linalg.dot(a, base)
    side = linalg.dot(a, centroid)
    if side == b:
        raise DegenerateModel(f"centroid lies on facet {sorted(facet)}")
    if side > b:
        a = tuple(-x for x in a)
        b = -b
    return a, b


def _float_hyperplane(vertices, facet, centroid):
    pts = np.array([vertices[i] for i in sorted(facet)], dtype=float)
    diffs = pts[1:] - pts[0]
    d = pts.shape[1]
    if diffs.shape[0] == 0:
        if d != 1:
            raise DegenerateModel(f"facet {sorted(facet)} too small")
        a = np.array([1.0])
    else:
        _, s, vt = np.linalg.svd(diffs, full_matrices=True)
        rank = int(np.sum(s > 1e-10 * max(1.0, s.max(initial=0.0))))
        if rank != d - 1:
            raise DegenerateModel(f"facet {sorted(facet)} has rank {rank}, expected {d - 1}")
        a = vt[-1]
    b = float(a @ pts[0])
    side = float(a @ np.asarray(centroid, dtype=float))
    if abs(side - b) < 1e-12:
        raise DegenerateModel(f"centroid lies on facet {sorted(facet)}")
    if side > b:
        a, b = -a, -b
    return tuple(float(x) for x in a), b


def make_model(d: int, vertices: Sequence, facets: Sequence, *, name: str = "",
               exact: bool = True, labels=None) -> PolytopeModel:
    """Build and validate a model from vertices and facet vertex-index sets."""
    if exact:
        verts = tuple(tuple(Fraction(x) for x in v) for v in vertices)
    else:
        verts = tuple(tuple(float(x) for x in v) for v in vertices)
    if any(len(v) != d for v in verts):
        raise DegenerateModel(f"all vertices must have {d} coordinates")
    if len(verts) < d + 1:
        raise DegenerateModel(f"a {d}-polytope needs at least {d + 1} vertices")
    facet_sets = tuple(frozenset(int(i) for i in f) for f in facets)
    for f in facet_sets:
        if not f or min(f) < 0 or max(f) >= len(verts):
            raise DegenerateModel(f"facet {sorted(f)} has out-of-range vertex indices")
    if len(set(facet_sets)) != len(facet_sets):
        raise DegenerateModel("duplicate facets")

    n = len(verts)
    if exact:
        centroid = tuple(sum(v[j] for v in verts) / n for j in range(d))
        planes = [_exact_hyperplane(verts, f, centroid) for f in facet_sets]
    else:
        centroid = np.mean(np.array(verts), axis=0)
        planes = [_float_hyperplane(verts, f, centroid) for f in facet_sets]

    tol = 0 if exact else 1e-9
    for f, (a, b) in zip(facet_sets, planes):
        scale = 1 if exact else max(1.0, max(abs(linalg.dot(a, v)) for v in verts))
        for i, v in enumerate(verts):
            gap = linalg.dot(a, v) - b
            if i in f and abs(gap) > tol * scale:
                raise DegenerateModel(f"vertex {i} is off the hyperplane of facet {sorted(f)}")
            if i not in f and gap >= -tol * scale:
                raise DegenerateModel(
                    f"vertex {i} is not strictly inside facet {sorted(f)}'s halfspace")
    on = [0] * n
    for f in facet_sets:
        for i in f:
            on[i] += 1
    if any(c < d for c in on):
        bad = [i for i, c in enumerate(on) if c < d]
        raise DegenerateModel(f"vertices {bad} lie on fewer than {d} facets")

    simplicial = all(len(f) == d for f in facet_sets)
    return PolytopeModel(
        d=d, vertices=verts, facets=facet_sets,
        normals=tuple(a for a, _ in planes), offsets=tuple(b for _, b in planes),
        simplicial=simplicial, exact=exact, name=name,
        labels=tuple(labels) if labels is not None else None)


# -- cyclic polytopes ---------------------------------------------------------

def gale_facets(d: int, n: int) -> list:
    """Facet index sets of C(d, n) by Gale evenness (0-based vertex indices).

    ``Y`` is a facet iff any two indices outside ``Y`` have an even number of
    members of ``Y`` strictly between them.
    """
    if d < 2 or n <= d:
        raise ValueError(f"need n > d >= 2, got d={d}, n={n}")
    out = []
    for combo in itertools.combinations(range(n), d):
        ys = set(combo)
        outside = [i for i in range(n) if i not in ys]
        if all(sum(1 for y in combo if a < y < b) % 2 == 0
               for a, b in zip(outside, outside[1:])):
            out.append(combo)
    return out


def moment_curve(t, d: int) -> tuple:
    t = Fraction(t)
    return tuple(t ** j for j in range(1, d + 1))


def build_cyclic(spec) -> PolytopeModel:
    if not isinstance(spec, CyclicSpec):
        spec = CyclicSpec(*spec)
    verts = [moment_curve(t, spec.d) for t in spec.params]
    model = make_model(spec.d, verts, gale_facets(spec.d, spec.n),
                       name=f"cyclic({spec.d},{spec.n})")
    assert model.simplicial
    return model


def cyclic(d: int, n: int) -> PolytopeModel:
    return build_cyclic(CyclicSpec(d, n))


# -- fixtures ---------------------------------------------------------------

def cube(d: int) -> PolytopeModel:
    """The 0/1 cube in dimension d."""
    if d < 1:
        raise ValueError("cube needs d >= 1")
    verts = list(itertools.product((0, 1), repeat=d))
    facets = []
    for axis in range(d):
        for val in (0, 1):
            facets.append([i for i, v in enumerate(verts) if v[axis] == val])
    return make_model(d, verts, facets, name=f"cube({d})")


def simplex(d: int) -> PolytopeModel:
    """The standard simplex conv(0, e_1, ..., e_d)."""
    if d < 1:
        raise ValueError("simplex needs d >= 1")
    verts = [tuple(0 for _ in range(d))]
    verts += [tuple(int(i == j) for j in range(d)) for i in range(d)]
    facets = [[j for j in range(d + 1) if j != i] for i in range(d + 1)]
    return make_model(d, verts, facets, name=f"simplex({d})")


def regular_simplex(d: int) -> PolytopeModel:
    """A regular d-simplex.

    Exact for d = 1 and d = 3 (alternate vertices of the cube [-1, 1]^3);
    other dimensions have irrational coordinates and produce a float model,
    usable only by the Monte Carlo estimators.
    """
    if d < 1:
        raise ValueError("simplex needs d >= 1")
    facets = [[j for j in range(d + 1) if j != i] for i in range(d + 1)]
    if d == 1:
        return make_model(1, [(0,), (1,)], facets, name="regular_simplex(1)")
    if d == 3:
        verts = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
        return make_model(3, verts, facets, name="regular_simplex(3)")
    # e_0..e_d in R^(d+1), expressed in an orthonormal basis of sum(x) = 0
    pts = np.eye(d + 1) - 1.0 / (d + 1)
    q, _ = np.linalg.qr(pts.T[:, :d])
    coords = pts @ q
    return make_model(d, coords.tolist(), facets, name=f"regular_simplex({d})", exact=False)


def crosspolytope(d: int) -> PolytopeModel:
    """conv(+-e_i); vertex 2i is +e_i and vertex 2i+1 is -e_i."""
    if d < 1:
        raise ValueError("crosspolytope needs d >= 1")
    verts = []
    for i in range(d):
        for s in (1, -1):
            verts.append(tuple(s * int(i == j) for j in range(d)))
    facets = [[2 * i + (0 if s > 0 else 1) for i, s in enumerate(signs)]
              for signs in itertools.product((1, -1), repeat=d)]
    return make_model(d, verts, facets, name=f"crosspolytope({d})")


# -- face lattice -----------------------------------------------------------

def _rank_of(P: PolytopeModel, face) -> int:
    pts = [P.vertices[i] for i in sorted(face)]
    if P.exact:
        return linalg.affine_rank(pts)
    arr = np.array(pts, dtype=float)
    if len(arr) == 1:
        return 0
    return int(np.linalg.matrix_rank(arr[1:] - arr[0], tol=1e-9))


def face_lattice(P: PolytopeModel, method: Optional[str] = None,
                 check_ranks: bool = True) -> FaceLattice:
    """Enumerate all proper nonempty faces of ``P``.

    ``method`` is "simplicial" (subsets of simplex facets), "closure"
    (intersection closure of facet vertex sets, graded by affine rank) or
    None to pick by ``P.simplicial``.
    """
    d = P.d
    if method is None:
        method = "simplicial" if P.simplicial else "closure"
    buckets = [set() for _ in range(d)]
    if method == "simplicial":
        if not P.simplicial:
            raise ValueError("simplicial enumeration on a non-simplicial model")
        for f in P.facets:
            for k in range(d):
                buckets[k].update(frozenset(c) for c in itertools.combinations(sorted(f), k + 1))
        if check_ranks:
            for k, fs in enumerate(buckets):
                for g in fs:
                    r = _rank_of(P, g)
                    if r != k:
                        raise DegenerateModel(f"claimed {k}-face {sorted(g)} has rank {r}")
    elif method == "closure":
        seen = set(P.facets)
        frontier = set(P.facets)
        while frontier:
            new = set()
            for g in frontier:
                for f in P.facets:
                    h = g & f
                    if h and h not in seen:
                        new.add(h)
            seen |= new
            frontier = new
        for g in seen:
            r = _rank_of(P, g)
            if not 0 <= r <= d - 1:
                raise DegenerateModel(f"face {sorted(g)} has rank {r}")
            buckets[r].add(g)
    else:
        raise ValueError(f"unknown method {method!r}")

    facets_of = {}
    for fs in buckets:
        for g in fs:
            facets_of[g] = frozenset(i for i, f in enumerate(P.facets) if g <= f)
    for g, inc in facets_of.items():
        meet = frozenset.intersection(*(P.facets[i] for i in inc)) if inc else frozenset()
        if meet != g:
            raise DegenerateModel(f"face {sorted(g)} is not the meet of its facets")
    faces = tuple(tuple(sorted(fs, key=_sort_key)) for fs in buckets)
    lat = FaceLattice(d, faces, facets_of)
    if not lat.fvector().satisfies_euler():
        raise DegenerateModel(f"f-vector {lat.fvector().counts} violates the Euler relation")
    return lat


def tangent_cone(P: PolytopeModel, G) -> list:
    """Outward normals of the facets containing face ``G``.

    A direction u points into P from relint(G) iff ``a . u <= 0`` for each.
    """
    G = frozenset(G)
    inc = P.lattice.facets_of.get(G)
    if inc is None:
        raise KeyError(f"{sorted(G)} is not a face of {P!r}")
    return [P.normals[i] for i in sorted(inc)]


def facet_intrinsic(P: PolytopeModel, F) -> PolytopeModel:
    """Facet ``F`` as a (d-1)-polytope in an orthonormal frame of its hull.

    ``F`` is a facet index or vertex set.  The result is a float model whose
    ``labels`` map local vertex indices back to vertices of ``P``; its facets
    are the ridges of ``P`` lying in ``F``.
    """
    if isinstance(F, int):
        F = P.facets[F]
    F = frozenset(F)
    if F not in P.facets:
        raise KeyError(f"{sorted(F)} is not a facet")
    d = P.d
    if d < 2:
        raise ValueError("facets of a 1-polytope are points")
    order = sorted(F)
    pts = np.array([[float(x) for x in P.vertices[i]] for i in order])
    origin = pts.mean(axis=0)
    diffs = pts - origin
    _, s, vt = np.linalg.svd(diffs, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s.max()))
    if rank != d - 1:
        raise DegenerateModel(f"facet {order} has rank {rank}, expected {d - 1}")
    coords = diffs @ vt[: d - 1].T
    local = {g: i for i, g in enumerate(order)}
    ridges = [g for g in P.lattice.faces[d - 2] if g <= F]
    sub_facets = [[local[i] for i in sorted(g)] for g in ridges]
    return make_model(d - 1, coords.tolist(), sub_facets, exact=False,
                      name=f"facet{order} of {P.name}", labels=order)


def dual_fvector(fv: FVector) -> FVector:
    return fv.reversed()


# -- file format --------------------------------------------------------------

class PolytopeFormatError(ValueError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _parse_number(tok, line, col):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise PolytopeFormatError(f"not a rational number: {tok!r}", line, col) from None


def _tokens(raw):
    col = 0
    for tok in raw.split():
        col = raw.index(tok, col)
        yield tok, col + 1
        col += len(tok)


def parse_polytope(text: str):
    """Parse the polytope text format.

    Returns ``(d, vertices, facets)`` where ``facets`` is None when the
    document has no facet section.  Format::

        # comments start with '#'
        dimension 3
        vertices
        0 0 0
        1/2 0 0
        ...
        facets          (optional; 0-based vertex indices)
        0 1 2
        ...
    """
    d = None
    vertices, facets = [], None
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = list(_tokens(line))
        if not toks:
            continue
        head, hcol = toks[0]
        key = head.lower()
        if key == "dimension":
            if len(toks) != 2:
                raise PolytopeFormatError("expected 'dimension <int>'", lineno, hcol)
            try:
                d = int(toks[1][0])
            except ValueError:
                raise PolytopeFormatError("dimension must be an integer", lineno, toks[1][1]) from None
            if d < 1:
                raise PolytopeFormatError("dimension must be positive", lineno, toks[1][1])
            section = None
            continue
        if key in ("vertices", "facets"):
            if len(toks) != 1:
                raise PolytopeFormatError(f"unexpected text after '{head}'", lineno, toks[1][1])
            section = key
            if key == "facets":
                facets = []
            continue
        if section is None:
            raise PolytopeFormatError(f"unexpected token {head!r}", lineno, hcol)
        if d is None:
            raise PolytopeFormatError("'dimension' must come first", lineno, hcol)
        if section == "vertices":
            if len(toks) != d:
                raise PolytopeFormatError(f"expected {d} coordinates, got {len(toks)}", lineno, hcol)
            vertices.append(tuple(_parse_number(t, lineno, c) for t, c in toks))
        else:
            row = []
            for t, c in toks:
                try:
                    row.append(int(t))
                except ValueError:
                    raise PolytopeFormatError(f"not a vertex index: {t!r}", lineno, c) from None
            facets.append(row)
    if d is None:
        raise PolytopeFormatError("missing 'dimension'", 1)
    if not vertices:
        raise PolytopeFormatError("no vertices", 1)
    return d, vertices, facets


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_polytope(P: PolytopeModel) -> str:
    if not P.exact:
        raise ValueError("only exact models can be written")
    lines = [f"# {P.name}" if P.name else "# polytope", f"dimension {P.d}", "vertices"]
    lines += [" ".join(_fmt(x) for x in v) for v in P.vertices]
    lines.append("facets")
    lines += [" ".join(str(i) for i in sorted(f)) for f in P.facets]
    return "\n".join(lines) + "\n"


def load_polytope(text: str, name: str = "") -> PolytopeModel:
    d, vertices, facets = parse_polytope(text)
    if facets is None:
        raise PolytopeFormatError(
            "no facets given; facet enumeration from points is not supported", 1)
    return make_model(d, vertices, facets, name=name)
