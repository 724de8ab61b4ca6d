from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from facebounds import lp


def random_bounded(rng, B, m, n):
    A = rng.normal(size=(B, m, n))
    b = rng.uniform(0, 2, size=(B, m))
    A = np.concatenate([A, np.broadcast_to(np.eye(n), (B, n, n))], axis=1)
    b = np.concatenate([b, np.ones((B, n))], axis=1)
    return rng.normal(size=(B, n)), A, b


def test_exact_small_problem():
    # max x + y  s.t.  x + 2y <= 4, 3x + y <= 6
    sol = lp.solve_exact([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert sol.status == lp.OPTIMAL
    assert sol.value == Fraction(14, 5)
    assert sol.x == (Fraction(8, 5), Fraction(6, 5))


def test_exact_unbounded_and_bad_rhs():
    assert lp.solve_exact([1, 0], [[0, 1]], [1]).status == lp.UNBOUNDED
    with pytest.raises(lp.LPError):
        lp.solve_exact([1], [[1]], [-1])


def test_exact_degenerate_terminates():
    # highly degenerate: many zero right-hand sides (Bland's rule must not cycle)
    A = [[1, -1, 1], [-1, 1, 1], [1, 1, 1], [-1, -1, 1], [1, 0, 0], [0, 1, 0]]
    sol = lp.solve_exact([0, 0, 1], A, [0, 0, 0, 0, 1, 1])
    assert sol.value == 0


def test_batch_matches_highs():
    rng = np.random.default_rng(0)
    c, A, b = random_bounded(rng, 100, 6, 4)
    values, x = lp.solve_batch(c, A, b)
    for i in range(100):
        ref = linprog(-c[i], A_ub=A[i], b_ub=b[i], method="highs")
        assert values[i] == pytest.approx(-ref.fun, abs=1e-9)
        assert (A[i] @ x[i] <= b[i] + 1e-9).all()


def test_exact_matches_highs():
    rng = np.random.default_rng(1)
    c, A, b = random_bounded(rng, 15, 5, 3)
    for i in range(15):
        sol = lp.solve_exact([Fraction(v) for v in c[i]],
                             [[Fraction(v) for v in row] for row in A[i]],
                             [Fraction(v) for v in b[i]])
        ref = linprog(-c[i], A_ub=A[i], b_ub=b[i], method="highs")
        assert float(sol.value) == pytest.approx(-ref.fun, abs=1e-9)


def test_batch_is_independent_of_batch_composition():
    rng = np.random.default_rng(2)
    c, A, b = random_bounded(rng, 64, 7, 4)
    whole, _ = lp.solve_batch(c, A, b)
    parts = np.concatenate([lp.solve_batch(c[i:i + 5], A[i:i + 5], b[i:i + 5])[0]
                            for i in range(0, 64, 5)])
    assert np.array_equal(whole, parts)
