import math

import numpy as np
import pytest

from facebounds import angles
from facebounds.angles import (
    deficiency_check, face_survives, feldman_check, gamma_k_m, grassmann_angle, phi_k,
    prop41_check, solid_angle, thm24_check, cor42_check,
)
from facebounds.facecount import rho
from facebounds.polytope import (
    crosspolytope, cube, cyclic, facet_intrinsic, regular_simplex, simplex,
)

N = 20_000


def within(est, target, sigmas=3.0):
    return abs(est.mean - target) <= sigmas * est.stderr + 1e-12


def test_solid_angle_examples():
    C = cube(3)
    for G, target in [(C.facets[0], 0.5), ([0], 1 / 8)]:
        est = solid_angle(C, G, N, seed=1)
        assert within(est, target)
        assert est.stderr == pytest.approx(math.sqrt(est.mean * (1 - est.mean) / N))
    assert within(solid_angle(cube(2), [0], N, seed=2), 0.25)
    with pytest.raises(ValueError):
        solid_angle(C, range(8), 10, seed=0)


def test_solid_angle_bounds_and_health():
    for P in [cube(3), simplex(3), crosspolytope(3), cyclic(4, 6)]:
        for k in range(P.d):
            for G in P.lattice.faces[k][:3]:
                est = solid_angle(P, G, 2000, seed=5)
                assert 0 <= est.mean <= 1
                assert est.resampled / est.samples < 1e-3


def test_phi_k_examples():
    est = phi_k(cube(2), 0, N, seed=3)
    assert est.mean == 1.0          # each direction lies in exactly one right-angle cone
    assert within(phi_k(simplex(2), 0, N, seed=3), 0.5)
    for P in [cube(3), simplex(4), crosspolytope(3), cyclic(4, 7)]:
        est = phi_k(P, P.d - 1, 5000, seed=4)
        assert within(est, len(P.facets) / 2)
        for k in range(P.d):
            e = phi_k(P, k, 2000, seed=4)
            assert 0 <= e.mean <= len(P.lattice.faces[k])


def test_per_face_symmetry():
    # independent stream per face so the pairwise differences have known variance
    for P, k in [(cube(3), 0), (crosspolytope(3), 0), (regular_simplex(3), 1), (cube(3), 1)]:
        ests = [solid_angle(P, g, N, seed=6, stream=100 + i)
                for i, g in enumerate(P.lattice.faces[k])]
        for i, a in enumerate(ests):
            for b in ests[i + 1:]:
                assert abs(a.mean - b.mean) <= 3 * math.hypot(a.stderr, b.stderr) + 1e-12


def test_phi_per_face_sums_to_total():
    est = phi_k(cyclic(4, 6), 1, N, seed=6)
    assert sum(est.per_face) == pytest.approx(est.mean)


def test_face_survives_examples():
    sq = cube(2)
    w = np.array([1.0, 0.37])
    out = [face_survives(sq, [v], w) for v in range(4)]
    assert out.count("yes") == 2 and out.count("no") == 2
    C = cube(3)
    W = np.array([[1.0, 0.2], [0.3, -1.1], [0.71, 0.45]])
    assert sum(face_survives(C, [v], W) == "yes" for v in range(8)) == 6
    for F in C.facets:
        assert face_survives(C, F, np.eye(3)) == "yes"


def test_grassmann_vanishes_above_dimension():
    C = cube(3)
    est = grassmann_angle(C, C.facets[0], 1, 2000, seed=7)
    assert est.mean == 0 and est.disagreements == 0
    edge = C.lattice.faces[1][0]
    assert grassmann_angle(C, edge, 2, 2000, seed=7).mean == 0
    # gamma^1 = 1 - 2 phi on a vertex
    g1 = grassmann_angle(C, [0], 1, N, seed=8)
    assert within(g1, 1 - 2 / 8)


def test_grassmann_cube_vertex():
    est = grassmann_angle(cube(3), [0], 2, N, seed=9)
    assert within(est, 0.25)
    assert est.agreement == 1.0


def test_gamma_sums():
    est = gamma_k_m(cube(3), 0, 2, 5000, seed=10, cross_check=True)
    assert est.mean == 2.0 and est.agreement >= 0.999
    for P in [simplex(3), cyclic(4, 6)]:
        for k in range(P.d):
            e = gamma_k_m(P, k, 2, 1000, seed=11)
            assert 0 <= e.mean <= len(P.lattice.faces[k])
            if k > P.d - 3:
                assert e.mean == 0


@pytest.mark.parametrize("d,m", [(3, 1), (4, 2)])
def test_gamma_regular_simplex_symmetry(d, m):
    R = regular_simplex(d)
    k = d - m - 1
    total = gamma_k_m(R, k, m, N, seed=12)
    single = grassmann_angle(R, R.lattice.faces[k][0], m, N, seed=13)
    nf = len(R.lattice.faces[k])
    assert nf == math.comb(d + 1, d - m)
    diff = total.mean / nf - single.mean
    assert abs(diff) <= 3 * math.hypot(total.stderr / nf, single.stderr)


def test_feldman_examples():
    rep = feldman_check(cube(2), 0, N, seed=14)
    assert rep.lhs == 2 and rep.rhs == 2 and rep.passed
    rep = feldman_check(cube(3), 0, N, seed=14)
    assert rep.lhs == 6 and rep.rhs == 6 and rep.passed
    for d in (3, 4):
        rep = feldman_check(simplex(d), d - 1, 4000, seed=15)
        assert rep.rhs == 0 and abs(rep.lhs) <= 3 * rep.lhs_stderr + 1e-12 and rep.passed
    rep = feldman_check(simplex(3), 0, N, seed=16)
    assert rep.passed


def test_deficiency_examples():
    assert deficiency_check(cube(3), [0], N, seed=17).passed
    rep = deficiency_check(regular_simplex(3), [0], N, seed=18)
    assert rep.passed and abs(rep.rhs - 0.5) < 0.02
    rep = deficiency_check(crosspolytope(3), [0], N, seed=19)
    assert rep.passed and abs(rep.lhs - 1 / 3) <= 3 * rep.lhs_stderr
    with pytest.raises(ValueError):
        deficiency_check(cube(3), cube(3).lattice.faces[1][0], 10, seed=0)


def test_prop41_examples():
    rep = prop41_check(cube(3), 0, 5000, seed=20)
    assert rep.details["gap"] == 3.0 and rep.passed
    for k in range(4):
        assert prop41_check(simplex(4), k, 3000, seed=21).passed
    rep = prop41_check(cyclic(4, 6), 3, 1000, seed=22)
    assert rep.details["gap"] == 0 and rep.passed


def test_cor42_and_thm24_on_fixtures():
    for P in [cube(3), simplex(3), crosspolytope(3), simplex(4)]:
        for k in range(P.d):
            rep = cor42_check(P, k, 3000, seed=23)
            assert rep.passed
            assert rep.rhs == (math.comb(P.d - 1, k + 1) if k <= P.d - 3 else 0)
    for Q in [simplex(2), cube(2), simplex(3), regular_simplex(3)]:
        for k in range(Q.d):
            assert thm24_check(Q, k, N, seed=24).passed
    P = cyclic(4, 6)
    for fi in range(len(P.facets)):
        Q = facet_intrinsic(P, fi)
        for k in range(3):
            rep = thm24_check(Q, k, 4000, seed=25)
            assert rep.passed and rep.rhs == float(rho(4, 3 - k))


def test_determinism_across_workers():
    P = cyclic(4, 6)
    a = gamma_k_m(P, 0, 2, 5000, seed=26, workers=1, cross_check=True)
    b = gamma_k_m(P, 0, 2, 5000, seed=26, workers=3, cross_check=True)
    assert a == b
    assert phi_k(P, 1, 5000, seed=1, workers=1) == phi_k(P, 1, 5000, seed=1, workers=4)


def test_resampling_counts_and_replays(monkeypatch):
    # a huge ambiguity band forces redraws; replays must still agree
    monkeypatch.setattr(angles, "TAU", 0.05)
    a = solid_angle(cube(3), [0], 3000, seed=27)
    b = solid_angle(cube(3), [0], 3000, seed=27, workers=2)
    assert a.resampled > 0 and a == b
    assert within(a, 1 / 8)
