"""Dense primal simplex with Bland's rule.

Only problems of the form ``max c.x  s.t.  A x <= b, x >= 0`` with
``b >= 0`` are handled; the slack basis is then feasible and no phase one
is needed.  Every LP in this package is posed in that form.

:func:`solve_exact` works over Fractions.  :func:`solve_batch` runs many
same-shaped float problems at once, pivoting each independently, so a
problem's result does not depend on which batch it was solved in.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"


class LPError(RuntimeError):
    pass


@dataclass
class ExactSolution:
    status: str
    value: Fraction | None
    x: tuple | None
    pivots: int


def solve_exact(c, A, b, max_pivots: int = 100_000) -> ExactSolution:
    m, n = len(A), len(c)
    if any(Fraction(bi) < 0 for bi in b):
        raise LPError("right-hand side must be nonnegative")
    # rows: [A | I | b]; objective row holds reduced costs and -z
    T = [[Fraction(x) for x in A[i]] + [Fraction(int(i == j)) for j in range(m)] + [Fraction(b[i])]
         for i in range(m)]
    obj = [Fraction(x) for x in c] + [Fraction(0)] * m + [Fraction(0)]
    basis = list(range(n, n + m))
    ncol = n + m
    pivots = 0
    while True:
        enter = next((j for j in range(ncol) if obj[j] > 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                key = (T[i][-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return ExactSolution(UNBOUNDED, None, None, pivots)
        r = best[1]
        piv = T[r][enter]
        if piv != 1:
            T[r] = [x / piv for x in T[r]]
        row = T[r]
        for i in range(m):
            f = T[i][enter]
            if i != r and f != 0:
                T[i] = [x - f * y for x, y in zip(T[i], row)]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, row)]
        basis[r] = enter
        pivots += 1
        if pivots > max_pivots:
            raise LPError("pivot limit exceeded")
    x = [Fraction(0)] * n
    for i, v in enumerate(basis):
        if v < n:
            x[v] = T[i][-1]
    return ExactSolution(OPTIMAL, -obj[-1], tuple(x), pivots)


def solve_batch(c, A, b, eps: float = 1e-11, max_pivots: int = 1000):
    """Solve ``B`` float LPs ``max c[k].x, A[k] x <= b[k], x >= 0``.

    ``c`` is (B, n), ``A`` is (B, m, n), ``b`` is (B, m) with b >= 0.
    Returns ``(values, x)``; raises LPError if any problem is unbounded.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    B, m, n = A.shape
    if (b < 0).any():
        raise LPError("right-hand side must be nonnegative")
    ncol = n + m
    T = np.zeros((B, m + 1, ncol + 1))
    T[:, :m, :n] = A
    T[:, :m, n:ncol] = np.eye(m)
    T[:, :m, -1] = b
    T[:, m, :n] = c
    basis = np.broadcast_to(np.arange(n, n + m), (B, m)).copy()
    active = np.arange(B)
    for _ in range(max_pivots):
        if active.size == 0:
            break
        sub = T[active]
        red = sub[:, m, :ncol]
        can = red > eps
        has = can.any(axis=1)
        active = active[has]
        if active.size == 0:
            break
        sub = sub[has]
        enter = can[has].argmax(axis=1)  # Bland: lowest eligible index
        k = np.arange(active.size)
        col = sub[k, :m, enter]
        rhs = sub[:, :m, -1]
        ok = col > eps
        if not ok.any(axis=1).all():
            raise LPError("unbounded problem in batch")
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(ok, rhs / np.where(ok, col, 1.0), np.inf)
        rmin = ratio.min(axis=1, keepdims=True)
        tie = ratio <= rmin + eps * np.maximum(1.0, np.abs(rmin))
        bkey = np.where(tie, basis[active], np.iinfo(np.int64).max)
        leave = bkey.argmin(axis=1)
        prow = sub[k, leave, :] / sub[k, leave, enter][:, None]
        factor = sub[k, :, enter]
        sub = sub - factor[:, :, None] * prow[:, None, :]
        sub[k, leave, :] = prow
        T[active] = sub
        basis[active, leave] = enter
    else:
        raise LPError("pivot limit exceeded")
    values = -T[:, m, -1]
    x = np.zeros((B, n))
    bidx, ridx = np.nonzero(basis < n)
    x[bidx, basis[bidx, ridx]] = T[bidx, ridx, -1]
    return values, x
