import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from facebounds import linalg
from facebounds.facecount import cyclic_facets, cyclic_fvector
from facebounds.polytope import (
    CyclicSpec, DegenerateModel, PolytopeFormatError, build_cyclic, crosspolytope, cube,
    cyclic, dual_fvector, face_lattice, facet_intrinsic, format_polytope, gale_facets,
    load_polytope, make_model, parse_polytope, regular_simplex, simplex, tangent_cone,
)
from facebounds.facecount import FVector


def brute_force_facets(P):
    """Facets as d-subsets whose hyperplane has every other vertex on one side."""
    verts, d = P.vertices, P.d
    found = set()
    for combo in itertools.combinations(range(len(verts)), d):
        base = verts[combo[0]]
        null = linalg.nullspace([linalg.sub(verts[i], base) for i in combo[1:]], d)
        if len(null) != 1:
            continue
        a = null[0]
        sides = {(linalg.dot(a, v) > linalg.dot(a, base)) - (linalg.dot(a, v) < linalg.dot(a, base))
                 for i, v in enumerate(verts) if i not in combo}
        if len(sides) == 1 and 0 not in sides:
            found.add(frozenset(combo))
    return found


def test_gale_examples():
    assert [set(f) for f in gale_facets(3, 4)] == [set(c) for c in itertools.combinations(range(4), 3)]
    assert len(gale_facets(4, 6)) == 9
    assert {frozenset(f) for f in gale_facets(2, 5)} == {
        frozenset(p) for p in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]}


@pytest.mark.parametrize("d,n", [(2, 6), (3, 6), (4, 7), (4, 8), (5, 8), (5, 9)])
def test_gale_matches_brute_force_hull(d, n):
    P = cyclic(d, n)
    assert brute_force_facets(P) == {frozenset(f) for f in gale_facets(d, n)}


def test_gale_count_matches_formula():
    for d in range(2, 8):
        for n in range(d + 1, 13):
            assert len(gale_facets(d, n)) == cyclic_facets(d, n)


def test_gale_independent_of_parameters():
    spec = CyclicSpec(4, 7, (Fraction(-3), Fraction(-1, 2), 0, Fraction(1, 3), 2, 5, 11))
    P = build_cyclic(spec)
    assert brute_force_facets(P) == set(P.facets)


def test_cyclic_spec_validation():
    assert CyclicSpec(3, 5).params == tuple(Fraction(i) for i in range(1, 6))
    with pytest.raises(ValueError):
        CyclicSpec(3, 3)
    with pytest.raises(ValueError):
        CyclicSpec(2, 3, (1, 1, 2))


def test_build_cyclic_examples():
    tet = build_cyclic(CyclicSpec(3, 4))
    assert len(tet.facets) == 4 and tet.simplicial
    P = build_cyclic((4, 6))
    assert len(P.facets) == 9 and P.fvector().counts == (6, 15, 18, 9)
    pent = cyclic(2, 5)
    assert pent.fvector().counts == (5, 5)
    assert pent.vertices[2] == (3, 9)


def test_hyperplanes_separate_strictly():
    for P in [cube(3), cube(4), simplex(4), crosspolytope(4), cyclic(4, 8), cyclic(5, 9)]:
        for F, a, b in zip(P.facets, P.normals, P.offsets):
            for i, v in enumerate(P.vertices):
                s = linalg.dot(a, v)
                assert (s == b) if i in F else (s < b)


def test_fixture_fvectors():
    assert cube(3).fvector().counts == (8, 12, 6)
    assert crosspolytope(3).fvector().counts == (6, 12, 8)
    assert len(simplex(4).facets) == 5
    assert not cube(3).simplicial and crosspolytope(3).simplicial
    for d in range(1, 7):
        assert simplex(d).fvector().counts == tuple(math.comb(d + 1, k + 1) for k in range(d))
        assert cube(d).fvector().counts == tuple(2 ** (d - k) * math.comb(d, k) for k in range(d))
        assert crosspolytope(d).fvector().counts == tuple(2 ** (k + 1) * math.comb(d, k + 1)
                                                           for k in range(d))


def test_cyclic_lattice_matches_formula():
    for d in range(2, 8):
        for n in range(d + 1, 13):
            assert cyclic(d, n).fvector() == cyclic_fvector(d, n)


def test_lattice_paths_agree_on_simplicial_models():
    for d in range(2, 6):
        for n in range(d + 1, 10):
            P = cyclic(d, n)
            assert face_lattice(P, "closure").faces == face_lattice(P, "simplicial").faces
    P = crosspolytope(4)
    assert face_lattice(P, "closure").faces == face_lattice(P, "simplicial").faces


def test_neighborliness():
    for d in range(2, 8):
        for n in range(d + 1, 11):
            lat = cyclic(d, n).lattice
            h = d // 2
            if h == 0:
                continue
            subsets = {frozenset(c) for c in itertools.combinations(range(n), h)}
            assert subsets <= set(lat.faces[h - 1])


def test_faces_are_meets_of_facets():
    for P in [cube(4), crosspolytope(3), cyclic(4, 7)]:
        lat = P.lattice
        for fs in lat.faces:
            for g in fs:
                inc = lat.facets_of[g]
                assert frozenset.intersection(*(P.facets[i] for i in inc)) == g


def test_tangent_cone():
    C = cube(3)
    assert len(tangent_cone(C, C.facets[0])) == 1
    normals = tangent_cone(C, [0])
    assert len(normals) == 3
    for a, b in itertools.combinations(normals, 2):
        assert linalg.dot(a, b) == 0
    P = cyclic(4, 6)
    counts = {len(P.lattice.facets_of[e]) for e in P.lattice.faces[1]}
    edge = next(e for e in P.lattice.faces[1] if len(P.lattice.facets_of[e]) == 3)
    assert len(tangent_cone(P, edge)) == 3
    assert 3 in counts
    with pytest.raises(KeyError):
        tangent_cone(C, [0, 7])


def test_facet_intrinsic():
    sq = facet_intrinsic(cube(3), 0)
    assert sq.d == 2 and sq.fvector().counts == (4, 4)
    pts = np.array(sq.vertices)
    dists = sorted(np.linalg.norm(pts[i] - pts[j]) for i, j in itertools.combinations(range(4), 2))
    assert np.allclose(dists, [1, 1, 1, 1, math.sqrt(2), math.sqrt(2)])

    tri = facet_intrinsic(regular_simplex(3), 1)
    p = np.array(tri.vertices)
    for i in range(3):
        u, v = p[(i + 1) % 3] - p[i], p[(i + 2) % 3] - p[i]
        angle = math.acos(u @ v / np.linalg.norm(u) / np.linalg.norm(v))
        assert angle == pytest.approx(math.pi / 3)

    P = cyclic(4, 6)
    for fi in range(len(P.facets)):
        T = facet_intrinsic(P, fi)
        assert T.d == 3 and T.n_vertices == 4 and len(T.facets) == 4
        assert set(T.labels) == P.facets[fi]


def test_regular_simplex():
    R = regular_simplex(3)
    assert R.exact
    dists = {linalg.dot(linalg.sub(u, v), linalg.sub(u, v))
             for u, v in itertools.combinations(R.vertices, 2)}
    assert dists == {8}
    R4 = regular_simplex(4)
    assert not R4.exact and R4.fvector().counts == (5, 10, 10, 5)
    V = np.array(R4.vertices)
    d = [np.linalg.norm(V[i] - V[j]) for i, j in itertools.combinations(range(5), 2)]
    assert np.ptp(d) < 1e-12


def test_dual_fvector():
    assert dual_fvector(FVector(3, (8, 12, 6))).counts == (6, 12, 8)
    assert dual_fvector(FVector(4, (6, 15, 18, 9))).counts == (9, 18, 15, 6)
    assert dual_fvector(FVector(3, (4, 6, 4))).counts == (4, 6, 4)


def test_invalid_incidence_rejected():
    verts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    with pytest.raises(DegenerateModel):
        make_model(2, verts, [[0, 2], [1, 2], [2, 3], [3, 0]])   # diagonal is not a facet
    with pytest.raises(DegenerateModel):
        make_model(2, verts, [[0, 1], [1, 2], [2, 3]])           # vertex 0 on one facet


def test_file_round_trip():
    for P in [cube(3), cyclic(4, 6), simplex(2)]:
        text = format_polytope(P)
        Q = load_polytope(text)
        assert Q.vertices == P.vertices and Q.facets == P.facets
        assert format_polytope(Q).splitlines()[1:] == text.splitlines()[1:]


def test_file_rationals_and_errors():
    d, verts, facets = parse_polytope("dimension 2\nvertices\n0 0\n1/2 0\n0 3/4\n")
    assert verts[1] == (Fraction(1, 2), 0) and facets is None
    with pytest.raises(PolytopeFormatError) as err:
        parse_polytope("dimension 2\nvertices\n0 0\n1 x/2\n")
    assert (err.value.line, err.value.column) == (4, 3)
    with pytest.raises(PolytopeFormatError) as err:
        parse_polytope("vertices\n0 0\n")
    assert err.value.line == 2
    with pytest.raises(PolytopeFormatError):
        load_polytope("dimension 2\nvertices\n0 0\n1 0\n0 1\n")
