"""Exact face-number formulas and lower bounds.

Everything here is exact: Python ints and :class:`fractions.Fraction`.
No floating point is used anywhere in this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

BOUND_NAMES = ("barnette", "hinman-linear", "hinman-improved", "gubc")


@dataclass(frozen=True)
class FVector:
    """Face counts ``(f_0, ..., f_{d-1})`` of a d-polytope."""

    d: int
    counts: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != self.d:
            raise ValueError(f"expected {self.d} counts, got {len(counts)}")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative face count in {counts}")
        object.__setattr__(self, "counts", counts)

    def __getitem__(self, k):
        return self.counts[k]

    def __iter__(self):
        return iter(self.counts)

    def __len__(self):
        return self.d

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * f for k, f in enumerate(self.counts))

    def satisfies_euler(self) -> bool:
        """Check ``sum (-1)^k f_k == 1 + (-1)^(d-1)``."""
        return self.euler_characteristic() == 1 + (-1) ** (self.d - 1)

    def reversed(self) -> "FVector":
        return FVector(self.d, self.counts[::-1])


@dataclass(frozen=True)
class BoundReport:
    d: int
    k: int
    input_name: str  # "f0" or "fd1"
    input_value: int
    bound: str
    value: Fraction
    actual: Optional[int] = None
    cyclic_n: Optional[int] = None
    conjectural: bool = False

    @property
    def satisfied(self) -> Optional[bool]:
        if self.actual is None:
            return None
        return self.actual >= self.value

    @property
    def tight(self) -> Optional[bool]:
        if self.actual is None:
            return None
        return self.actual == self.value


def binom(a: int, b: int) -> int:
    """Binomial coefficient with C(a, b) = 0 for b < 0 or b > a.

    Negative ``a`` raises ValueError; generalized binomials are never used.
    """
    if a < 0:
        raise ValueError(f"binom: negative upper index {a}")
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


def rho(d: int, k: int) -> Fraction:
    """``(C(ceil(d/2), k) + C(floor(d/2), k)) / 2`` for ``0 <= k < d``."""
    if d < 1:
        raise ValueError(f"rho: dimension must be positive, got {d}")
    if not 0 <= k < d:
        raise ValueError(f"rho: need 0 <= k < d, got d={d}, k={k}")
    return Fraction(binom((d + 1) // 2, k) + binom(d // 2, k), 2)


def _cyclic_fk_exact(d: int, n: int, k: int) -> Fraction:
    if n < 1 or d < 0 or k < 0:
        raise ValueError(f"cyclic_fk: need n >= 1, d >= 0, k >= 0 (d={d}, n={n}, k={k})")
    if n - k - 1 == 0:
        raise ZeroDivisionError(
            f"cyclic_fk: prefactor undefined at n - k - 1 = 0 (d={d}, n={n}, k={k})")
    parity = (d + 1) // 2 - d // 2
    total = 0
    for j in range(d // 2 + 1):
        total += binom(n - 1 - j, k + 1 - j) * binom(n - k - 1, 2 * j - k - 1 + parity)
    return Fraction(n - parity * (n - k - 2), n - k - 1) * total


def cyclic_fk(d: int, n: int, k: int) -> int:
    """Number of k-faces of the cyclic polytope C(d, n).

    Evaluated from the closed-form sum for any d >= 0 and k >= 0, so values
    outside ``2 <= d, k <= d - 1`` follow the extended convention (for
    instance ``cyclic_fk(1, n, 0) == 2`` and ``cyclic_fk(0, n, k) == 0``).
    Raises ZeroDivisionError when ``n - k - 1 == 0``.
    """
    value = _cyclic_fk_exact(d, n, k)
    if value.denominator != 1:
        raise ArithmeticError(f"cyclic_fk({d}, {n}, {k}) is not an integer: {value}")
    return value.numerator


def _check_cyclic(d: int, n: int) -> None:
    if d < 2 or n <= d:
        raise ValueError(f"cyclic polytope needs n > d >= 2, got d={d}, n={n}")


def cyclic_facets(d: int, n: int) -> int:
    _check_cyclic(d, n)
    return binom(n - (d + 1) // 2, n - d) + binom(n - (d + 2) // 2, n - d)


def cyclic_fvector(d: int, n: int) -> FVector:
    _check_cyclic(d, n)
    fv = FVector(d, tuple(cyclic_fk(d, n, k) for k in range(d)))
    assert fv.satisfies_euler(), fv
    return fv


def lemma31_residual(d: int, n: int, k: int) -> Fraction:
    """``f_k(C(d,n)) - rho(d, d-k-1) f_{d-1}(C(d,n)) - f_k(C(d-2,n))``, exactly.

    This is identically zero for n > d >= 2 and 0 <= k <= d - 1.
    """
    _check_cyclic(d, n)
    if not 0 <= k <= d - 1:
        raise ValueError(f"need 0 <= k <= d-1, got d={d}, k={k}")
    return (cyclic_fk(d, n, k)
            - rho(d, d - k - 1) * cyclic_facets(d, n)
            - _cyclic_fk_exact(d - 2, n, k))


def tightness_table(d: int, k: int, ns: Iterable[int]) -> list:
    """Rows ``(n, f_k/f_{d-1} - rho(d, d-k-1))`` for C(d, n)."""
    if not 0 <= k <= d - 1:
        raise ValueError(f"need 0 <= k <= d-1, got d={d}, k={k}")
    target = rho(d, d - k - 1)
    rows = []
    for n in ns:
        _check_cyclic(d, n)
        rows.append((n, Fraction(cyclic_fk(d, n, k), cyclic_facets(d, n)) - target))
    return rows


def barnette_bound(d: int, m: int, k: int) -> int:
    """Lower bound on f_k of a simple d-polytope with m facets."""
    if d < 2 or m < d + 1:
        raise ValueError(f"need d >= 2 and m >= d+1, got d={d}, m={m}")
    if not 0 <= k <= d - 2:
        raise ValueError(f"need 0 <= k <= d-2, got k={k}")
    if k == 0:
        return (d - 1) * m - (d + 1) * (d - 2)
    return binom(d, k + 1) * m - binom(d + 1, k + 1) * (d - k - 1)


def simplex_shadow_term(d: int, k: int) -> int:
    """Number of k-faces of a (d-2)-simplex: ``C(d-1, k+1)`` for k <= d-3, else 0.

    This is the least possible f_k of a codimension-2 shadow of a d-polytope.
    At k = d-2 the binomial would give 1 although a (d-2)-polytope has no
    proper (d-2)-faces; using 1 there would make the improved bound fail for
    every simplicial polytope (and, dually, every simple one at k = 1).
    """
    if not 0 <= k <= d - 1:
        raise ValueError(f"need 0 <= k <= d-1, got d={d}, k={k}")
    return binom(d - 1, k + 1) if k <= d - 3 else 0


def hinman_bounds(d: int, k: int, f0: Optional[int] = None, fd1: Optional[int] = None,
                  improved: bool = False, fk: Optional[int] = None) -> list:
    """Linear lower bounds on f_k from f_0 and/or f_{d-1}.

    With ``improved`` an additive term is included: ``f_k`` of a
    (d-2)-simplex in the facet form and its dual counterpart in the vertex
    form (see :func:`simplex_shadow_term`).  One report is returned per
    supplied input, vertex form first.
    """
    if f0 is None and fd1 is None:
        raise ValueError("hinman_bounds needs f0 or fd1")
    if not 0 <= k <= d - 1:
        raise ValueError(f"need 0 <= k <= d-1, got d={d}, k={k}")
    name = "hinman-improved" if improved else "hinman-linear"
    reports = []
    if f0 is not None:
        value = rho(d, k) * f0 + (simplex_shadow_term(d, d - 1 - k) if improved else 0)
        reports.append(BoundReport(d, k, "f0", f0, name, value, fk))
    if fd1 is not None:
        value = rho(d, d - k - 1) * fd1 + (simplex_shadow_term(d, k) if improved else 0)
        reports.append(BoundReport(d, k, "fd1", fd1, name, value, fk))
    return reports


def gubc_values(d: int, m: int, k: int, fk: Optional[int] = None) -> Optional[BoundReport]:
    """CONJECTURAL lower bound on f_k for d-polytopes with m facets.

    Picks the largest n with ``cyclic_facets(d, n) <= m`` and returns
    ``cyclic_fk(d, n, k)`` as the conjectured bound.
    """
    if d < 2 or m < d + 1:
        raise ValueError(f"need d >= 2 and m >= d+1, got d={d}, m={m}")
    if not 0 <= k <= d - 1:
        raise ValueError(f"need 0 <= k <= d-1, got k={k}")
    if cyclic_facets(d, d + 1) > m:
        return None
    # facet counts grow with n: gallop, then bisect
    lo, step = d + 1, 1
    while cyclic_facets(d, lo + step) <= m:
        lo += step
        step *= 2
    hi = lo + step  # cyclic_facets(d, hi) > m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cyclic_facets(d, mid) <= m:
            lo = mid
        else:
            hi = mid
    return BoundReport(d, k, "fd1", m, "gubc", Fraction(cyclic_fk(d, lo, k)), fk,
                       cyclic_n=lo, conjectural=True)


def fvector_from_counts(counts: Sequence[int]) -> FVector:
    return FVector(len(counts), tuple(counts))
