"""Monte Carlo estimators for solid angles and Grassmann angles.

Solid angles are estimated as the fraction of uniform unit directions
falling in the tangent cone of a face.  Grassmann angles are estimated by
drawing uniform random subspaces and testing whether each face survives the
orthogonal projection along them, with a small LP per face (and,
optionally, an independent LP on the tangent cone as a cross-check).

Every estimator is driven by a :class:`~facebounds.sampling.SampleStream`
so results depend only on ``(seed, N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import lp
from .facecount import rho, simplex_shadow_term
from .polytope import PolytopeModel, facet_intrinsic, tangent_cone
from .sampling import SampleStream, box_muller, chunked, normal_words

TAU = 1e-9          # direction/LP margin: below this a sample is ambiguous
LP_ZERO = 1e-12     # LP optima at or below this count as exactly zero
MAX_ATTEMPTS = 64

# stream tags keep the estimators of one check statistically independent
STREAM_SOLID = 1
STREAM_PHI = 2
STREAM_GRASSMANN = 3
STREAM_FACET = 1000


class AmbiguityError(RuntimeError):
    pass


@dataclass(frozen=True)
class AngleEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    resampled: int = 0
    per_face: tuple = ()
    comparisons: int = 0
    disagreements: int = 0

    @property
    def agreement(self) -> Optional[float]:
        if not self.comparisons:
            return None
        return 1.0 - self.disagreements / self.comparisons

    def zscore(self, target: float) -> float:
        return _z(self.mean - target, self.stderr)

    def as_dict(self) -> dict:
        out = {"mean": self.mean, "stderr": self.stderr, "samples": self.samples,
               "seed": self.seed, "resampled": self.resampled}
        if self.comparisons:
            out["agreement"] = self.agreement
        return out


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a statistical identity or inequality check."""

    name: str
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float
    zscore: float
    passed: bool
    details: dict = field(default_factory=dict)

    @property
    def difference(self) -> float:
        return self.lhs - self.rhs


def _z(diff: float, se: float) -> float:
    if se > 0:
        return diff / se
    if diff == 0:
        return 0.0
    return math.copysign(math.inf, diff)


def _bernoulli(hits: np.ndarray, seed, resampled) -> AngleEstimate:
    n = hits.size
    p = int(hits.sum()) / n
    return AngleEstimate(p, math.sqrt(p * (1 - p) / n), n, seed, resampled)


def _sum_estimate(ind: np.ndarray, seed, resampled, **kw) -> AngleEstimate:
    """Estimate from a (N, faces) indicator matrix: mean of row counts."""
    counts = ind.sum(axis=1)
    n = counts.size
    mean = int(counts.sum()) / n
    se = float(np.std(counts, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    per_face = tuple(int(c) / n for c in ind.sum(axis=0))
    return AngleEstimate(mean, se, n, seed, resampled, per_face, **kw)


def _drive(stream: SampleStream, N: int, words: int, evaluate, workers: int):
    """Run ``evaluate`` over all samples, redrawing ambiguous ones.

    ``evaluate(raw)`` returns ``(values, ambiguous)`` with one row per
    sample.  Returns the stacked values and the total redraw count.
    """
    if N < 1:
        raise ValueError("need at least one sample")

    def run(a, b):
        vals, amb = evaluate(stream.raw(a, b - a, words, 0))
        vals = np.array(vals)
        redraws, attempt = 0, 0
        while amb.any():
            attempt += 1
            if attempt >= MAX_ATTEMPTS:
                raise AmbiguityError(f"sample {a + int(np.argmax(amb))} stayed ambiguous")
            idx = np.nonzero(amb)[0]
            redraws += idx.size
            v2, a2 = evaluate(stream.raw_at(a + idx, words, attempt))
            vals[idx] = v2
            amb = np.zeros_like(amb)
            amb[idx] = a2
        return vals, redraws

    parts = chunked(N, run, workers)
    return np.concatenate([p[0] for p in parts]), sum(p[1] for p in parts)


def _unit_normals(normals) -> np.ndarray:
    A = np.array([[float(x) for x in a] for a in normals], dtype=float).reshape(len(normals), -1)
    return A / np.linalg.norm(A, axis=1, keepdims=True)


def _directions(raw, d):
    u = box_muller(raw, d)
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _check_face(P: PolytopeModel, G) -> frozenset:
    G = frozenset(G)
    if len(G) == P.n_vertices:
        raise ValueError("the angle at the whole polytope is not defined here")
    if G not in P.lattice:
        raise KeyError(f"{sorted(G)} is not a face of {P!r}")
    return G


# -- solid angles -----------------------------------------------------------

def solid_angle(P: PolytopeModel, G, N: int, seed: int, *, stream: int = STREAM_SOLID,
                workers: int = 1) -> AngleEstimate:
    """Fraction of uniform unit directions lying in the tangent cone at G."""
    G = _check_face(P, G)
    A = _unit_normals(tangent_cone(P, G))
    d = P.d

    def evaluate(raw):
        dots = _directions(raw, d) @ A.T
        return (dots <= -TAU).all(axis=1), (np.abs(dots) < TAU).any(axis=1)

    hits, redraws = _drive(SampleStream(seed, stream), N, normal_words(d), evaluate, workers)
    return _bernoulli(hits, seed, redraws)


def phi_k(P: PolytopeModel, k: int, N: int, seed: int, *, stream: int = STREAM_PHI,
          workers: int = 1) -> AngleEstimate:
    """Shared-sample estimate of the solid-angle sum over all k-faces."""
    if not 0 <= k <= P.d - 1:
        raise ValueError(f"need 0 <= k <= d-1, got k={k}")
    A = _unit_normals(P.normals)
    lat = P.lattice
    faces = lat.faces[k]
    masks = np.zeros((len(faces), len(P.facets)), dtype=bool)
    for i, g in enumerate(faces):
        masks[i, sorted(lat.facets_of[g])] = True
    d = P.d

    def evaluate(raw):
        dots = _directions(raw, d) @ A.T
        inside = dots <= -TAU
        # face g hit iff every facet containing g has the direction inside
        ind = ~((~inside)[:, None, :] & masks[None, :, :]).any(axis=2)
        return ind, (np.abs(dots) < TAU).any(axis=1)

    ind, redraws = _drive(SampleStream(seed, stream), N, normal_words(d), evaluate, workers)
    return _sum_estimate(ind, seed, redraws)


# -- projections along random subspaces --------------------------------------

def _normalized_vertices(P: PolytopeModel) -> np.ndarray:
    V = P.vertex_array()
    V = V - V.mean(axis=0)
    return V / np.linalg.norm(V, axis=1).max()


def _random_frames(raw, d):
    """Orthonormal d x d frames from Gaussian matrices (batched QR)."""
    Z = box_muller(raw, d * d).reshape(-1, d, d)
    Q, _ = np.linalg.qr(Z)
    return Q


def survival_lp(V: np.ndarray, G, W: np.ndarray) -> np.ndarray:
    """Optimal margins of the face-survival LP for a batch of frames.

    ``V`` is (n, d) vertices, ``W`` is (B, d, q) with orthonormal columns
    spanning the functional space.  Solves ``max delta`` over
    ``w = W c, |c|_inf <= 1`` with ``w`` constant on ``G`` and
    ``w.(v_g - v_x) >= delta`` for every vertex ``x`` outside ``G``.
    """
    G = sorted(G)
    g0 = G[0]
    out = [i for i in range(V.shape[0]) if i not in set(G)]
    B, _, q = W.shape
    ax = np.einsum("rd,bdq->brq", V[g0] - V[out], W)
    eg = np.einsum("rd,bdq->brq", V[G[1:]] - V[g0], W)
    r, e = len(out), len(G) - 1
    nrow = r + 2 * e + 2 * q
    A = np.zeros((B, nrow, 2 * q + 1))
    A[:, :r, :q] = -ax
    A[:, :r, q:2 * q] = ax
    A[:, :r, -1] = 1.0
    A[:, r:r + e, :q] = eg
    A[:, r:r + e, q:2 * q] = -eg
    A[:, r + e:r + 2 * e, :q] = -eg
    A[:, r + e:r + 2 * e, q:2 * q] = eg
    A[:, r + 2 * e:, :2 * q] = np.eye(2 * q)
    b = np.zeros((B, nrow))
    b[:, r + 2 * e:] = 1.0
    c = np.zeros((B, 2 * q + 1))
    c[:, -1] = 1.0
    values, _ = lp.solve_batch(c, A, b)
    return values


def cone_lp(Ag: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Largest ``max_i |c_i|`` over ``{c : Ag S c <= 0, |c|_inf <= 1}``.

    Zero iff the subspace spanned by ``S`` (B, d, m) meets the tangent cone
    ``{u : Ag u <= 0}`` only at the origin.  Solves 2m LPs per frame.
    """
    B, _, m = S.shape
    R = np.einsum("td,bdm->btm", Ag, S)
    t = R.shape[1]
    A = np.zeros((B, t + 2 * m, 2 * m))
    A[:, :t, :m] = R
    A[:, :t, m:] = -R
    A[:, t:, :] = np.eye(2 * m)
    b = np.zeros((B, t + 2 * m))
    b[:, t:] = 1.0
    objs = np.zeros((2 * m, 2 * m))
    for i in range(m):
        objs[2 * i, i], objs[2 * i, m + i] = 1.0, -1.0
        objs[2 * i + 1, i], objs[2 * i + 1, m + i] = -1.0, 1.0
    A2 = np.repeat(A, 2 * m, axis=0)
    b2 = np.repeat(b, 2 * m, axis=0)
    c2 = np.tile(objs, (B, 1))
    values, _ = lp.solve_batch(c2, A2, b2)
    return values.reshape(B, 2 * m).max(axis=1)


def _classify(values):
    """Map LP optima to (survives, ambiguous)."""
    return values > TAU, (values > LP_ZERO) & (values <= TAU)


def face_survives(P: PolytopeModel, G, W) -> str:
    """Float survival test for one face and one functional space.

    ``W`` is a (d, q) matrix whose columns span the functional space.
    Returns "yes", "no" or "ambiguous".
    """
    G = frozenset(G)
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W[:, None]
    Wq, _ = np.linalg.qr(W)
    # survival is invariant under translation and scaling of P
    val = survival_lp(_normalized_vertices(P), G, Wq[None])[0]
    if val > TAU:
        return "yes"
    if val <= LP_ZERO:
        return "no"
    return "ambiguous"


def _grassmann_indicators(P, faces, m, N, seed, stream, workers, cross_check):
    d = P.d
    if not 1 <= m <= d - 1:
        raise ValueError(f"need 1 <= m <= d-1, got m={m}")
    V = _normalized_vertices(P)
    cones = [_unit_normals(tangent_cone(P, g)) for g in faces]
    nf = len(faces)

    def evaluate(raw):
        Q = _random_frames(raw, d)
        S, W = Q[:, :, :m], Q[:, :, m:]
        B = Q.shape[0]
        ind = np.zeros((B, nf), dtype=bool)
        amb = np.zeros(B, dtype=bool)
        dis = np.zeros(B, dtype=np.int64)
        for j, g in enumerate(faces):
            yes, a = _classify(survival_lp(V, g, W))
            ind[:, j] = yes
            amb |= a
            if cross_check:
                cv = cone_lp(cones[j], S)
                empty = cv <= LP_ZERO
                amb |= (cv > LP_ZERO) & (cv <= TAU)
                dis += (empty != yes) & ~a
        return np.column_stack([ind, dis]), amb

    vals, redraws = _drive(SampleStream(seed, stream), N, normal_words(d * d), evaluate, workers)
    return vals[:, :nf].astype(bool), vals[:, nf].astype(np.int64), redraws


def grassmann_angle(P: PolytopeModel, G, m: int, N: int, seed: int, *,
                    stream: int = STREAM_GRASSMANN, workers: int = 1) -> AngleEstimate:
    """Probability that a random m-subspace through relint(G) meets P only there.

    Each sample is decided by the survival LP and, independently, by the
    tangent-cone LPs; the disagreement count is reported.
    """
    G = _check_face(P, G)
    ind, dis, redraws = _grassmann_indicators(P, [G], m, N, seed, stream, workers, True)
    est = _bernoulli(ind[:, 0], seed, redraws)
    return AngleEstimate(est.mean, est.stderr, est.samples, seed, redraws,
                         comparisons=N, disagreements=int(dis.sum()))


def gamma_k_m(P: PolytopeModel, k: int, m: int, N: int, seed: int, *,
              stream: int = STREAM_GRASSMANN, workers: int = 1,
              cross_check: bool = False) -> AngleEstimate:
    """Shared-sample estimate of the Grassmann angle sum over k-faces.

    The per-sample survivor count also estimates the expected number of
    k-faces of the projection of P along a random m-subspace.
    """
    if not 0 <= k <= P.d - 1:
        raise ValueError(f"need 0 <= k <= d-1, got k={k}")
    faces = list(P.lattice.faces[k])
    ind, dis, redraws = _grassmann_indicators(P, faces, m, N, seed, stream, workers, cross_check)
    kw = {"comparisons": N * len(faces), "disagreements": int(dis.sum())} if cross_check else {}
    return _sum_estimate(ind, seed, redraws, **kw)


# -- identity checks ----------------------------------------------------------

def feldman_check(P: PolytopeModel, k: int, N: int, seed: int, *, workers: int = 1,
                  sigmas: float = 3.0) -> CheckReport:
    """Compare ``f_k - 2 phi_k`` with the mean k-face count of a random shadow."""
    fk = len(P.lattice.faces[k])
    phi = phi_k(P, k, N, seed, workers=workers)
    shadow = gamma_k_m(P, k, 1, N, seed, workers=workers)
    lhs, lse = fk - 2 * phi.mean, 2 * phi.stderr
    se = math.hypot(lse, shadow.stderr)
    z = _z(lhs - shadow.mean, se)
    return CheckReport("feldman", lhs, lse, shadow.mean, shadow.stderr, z, abs(z) <= sigmas,
                       {"fk": fk, "phi": phi.as_dict(), "shadow": shadow.as_dict()})


def deficiency_check(P: PolytopeModel, G, N: int, seed: int, *, workers: int = 1,
                     sigmas: float = 3.0) -> CheckReport:
    """Compare the 2-dimensional Grassmann angle at G with its angle deficiency."""
    G = _check_face(P, G)
    d = P.d
    if d < 3:
        raise ValueError("needs d >= 3")
    if len(G) == 0 or P.lattice.dim(G) > d - 3:
        raise ValueError(f"face dimension must be at most d-3 = {d - 3}")
    gamma = grassmann_angle(P, G, 2, N, seed, workers=workers)
    total, var, parts = 0.0, 0.0, []
    for fi in sorted(P.lattice.facets_of[G]):
        Fm = facet_intrinsic(P, fi)
        local = frozenset(Fm.labels.index(v) for v in G)
        est = solid_angle(Fm, local, N, seed, stream=STREAM_FACET + fi, workers=workers)
        total += est.mean
        var += est.stderr ** 2
        parts.append({"facet": fi, **est.as_dict()})
    rhs, rse = 1.0 - total, math.sqrt(var)
    z = _z(gamma.mean - rhs, math.hypot(gamma.stderr, rse))
    return CheckReport("deficiency", gamma.mean, gamma.stderr, rhs, rse, z, abs(z) <= sigmas,
                       {"gamma": gamma.as_dict(), "facet_angles": parts})


def prop41_check(P: PolytopeModel, k: int, N: int, seed: int, *, workers: int = 1,
                 sigmas: float = 3.0) -> CheckReport:
    """Gap ``f_k - rho(d, d-k-1) f_{d-1} - gamma_k^2`` must be >= -3 sigma."""
    d = P.d
    if d < 3:
        raise ValueError("needs d >= 3")
    fv = P.fvector()
    gamma = gamma_k_m(P, k, 2, N, seed, workers=workers)
    linear = float(rho(d, d - k - 1) * fv[d - 1])
    gap = fv[k] - linear - gamma.mean
    z = _z(gap, gamma.stderr)
    return CheckReport("prop41", fv[k] - linear, 0.0, gamma.mean, gamma.stderr, z,
                       gap >= -sigmas * gamma.stderr,
                       {"gap": gap, "fk": fv[k], "fd1": fv[d - 1], "gamma": gamma.as_dict()})


def cor42_check(P: PolytopeModel, k: int, N: int, seed: int, *, workers: int = 1,
                sigmas: float = 3.0) -> CheckReport:
    """``gamma_k^2(P) >= f_k(simplex of dim d-2)`` within ``sigmas`` standard errors."""
    gamma = gamma_k_m(P, k, 2, N, seed, workers=workers)
    bound = simplex_shadow_term(P.d, k)
    z = gamma.zscore(bound)
    return CheckReport("cor42", gamma.mean, gamma.stderr, float(bound), 0.0, z,
                       gamma.mean >= bound - sigmas * gamma.stderr, {"gamma": gamma.as_dict()})


def thm24_check(Q: PolytopeModel, k: int, N: int, seed: int, *, workers: int = 1,
                sigmas: float = 3.0) -> CheckReport:
    """Angle sum of a (d-1)-polytope against ``rho(d, d-k-1)``, d = dim Q + 1."""
    d = Q.d + 1
    if not 0 <= k <= d - 2:
        raise ValueError(f"need 0 <= k <= {d - 2}")
    est = phi_k(Q, k, N, seed, workers=workers)
    bound = float(rho(d, d - k - 1))
    z = est.zscore(bound)
    return CheckReport("thm24", est.mean, est.stderr, bound, 0.0, z,
                       est.mean >= bound - sigmas * est.stderr, {"phi": est.as_dict()})
