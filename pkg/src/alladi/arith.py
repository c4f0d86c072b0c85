"""Integer primitives: segmented sieves, Moebius values, Kronecker symbols,
the offset logarithmic integral and compensated summation.

The sieve kernel is compiled with numba and releases the GIL, so disjoint
segments can be processed from a thread pool.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import isqrt

import mpmath
import numpy as np
from numba import njit
from scipy.special import expi

from .errors import DomainError, ResourceError

DEFAULT_SEGMENT = 1 << 22
# entries per materialised SpfTable (three int64 arrays + one int8)
MAX_TABLE_ENTRIES = 1 << 27

_EPS = 2.0 ** -53


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (plain Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    if n > MAX_TABLE_ENTRIES:
        raise ResourceError(f"prime table to {n} exceeds the {MAX_TABLE_ENTRIES} entry budget")
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for p in range(3, isqrt(n) + 1, 2):
        if is_p[p]:
            is_p[p * p :: 2 * p] = False
    return np.flatnonzero(is_p).astype(np.int64)


@njit(cache=True, nogil=True)
def _factor_segment(lo, hi, base):
    """mu, smallest and largest prime factor for every n in [lo, hi).

    `base` must hold every prime <= isqrt(hi - 1) in increasing order.
    Entries for n = 1 come out as (mu=1, spf=0, gpf=1).
    """
    m = hi - lo
    rem = np.empty(m, dtype=np.int64)
    for i in range(m):
        rem[i] = lo + i
    mu = np.ones(m, dtype=np.int8)
    spf = np.zeros(m, dtype=np.int64)
    gpf = np.ones(m, dtype=np.int64)
    for k in range(base.shape[0]):
        p = base[k]
        if p * p >= hi:
            break
        start = ((lo + p - 1) // p) * p
        for n in range(start, hi, p):
            i = n - lo
            if spf[i] == 0:
                spf[i] = p
            gpf[i] = p
            r = rem[i] // p
            if r % p == 0:
                mu[i] = 0
                while r % p == 0:
                    r //= p
            else:
                mu[i] = -mu[i]
            rem[i] = r
    for i in range(m):
        r = rem[i]
        if r > 1:
            # cofactor left after removing all primes <= sqrt(n) is prime
            mu[i] = -mu[i]
            gpf[i] = r
            if spf[i] == 0:
                spf[i] = r
    return mu, spf, gpf


def factor_segment(lo: int, hi: int, base: np.ndarray | None = None):
    """Return (mu, spf, gpf) arrays for n in [lo, hi), lo >= 1."""
    if lo < 1 or hi <= lo:
        raise DomainError(f"bad segment [{lo}, {hi})")
    if base is None:
        base = primes_upto(isqrt(hi - 1))
    return _factor_segment(lo, hi, base)


@dataclass(frozen=True, eq=False)
class SpfTable:
    """Smallest-prime-factor table over [lo, hi).

    `mu` and `gpf` (largest prime factor) fall out of the same pass and are
    kept alongside.
    """

    lo: int
    hi: int
    spf: np.ndarray
    mu: np.ndarray
    gpf: np.ndarray
    segment_size: int = DEFAULT_SEGMENT

    def __contains__(self, n) -> bool:
        return self.lo <= n < self.hi

    def _index(self, n: int) -> int:
        if not self.lo <= n < self.hi:
            raise IndexError(f"{n} outside table range [{self.lo}, {self.hi})")
        return n - self.lo

    def smallest_factor(self, n: int) -> int:
        return int(self.spf[self._index(n)])

    def largest_factor(self, n: int) -> int:
        return int(self.gpf[self._index(n)])

    def primes(self) -> np.ndarray:
        n = np.arange(self.lo, self.hi, dtype=np.int64)
        return n[(self.spf == n) & (n >= 2)]


def sieve_spf(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT,
              max_entries: int = MAX_TABLE_ENTRIES) -> SpfTable:
    if lo < 1 or hi <= lo:
        raise DomainError(f"need 1 <= lo < hi, got [{lo}, {hi})")
    if hi - lo > max_entries:
        raise ResourceError(
            f"range of {hi - lo} entries exceeds the budget of {max_entries}")
    base = primes_upto(isqrt(hi - 1))
    mus, spfs, gpfs = [], [], []
    for a in range(lo, hi, segment_size):
        b = min(a + segment_size, hi)
        mu, spf, gpf = _factor_segment(a, b, base)
        mus.append(mu)
        spfs.append(spf)
        gpfs.append(gpf)
    return SpfTable(lo, hi, np.concatenate(spfs), np.concatenate(mus),
                    np.concatenate(gpfs), segment_size)


def mobius(n: int, table: SpfTable | None = None) -> int:
    if n < 1:
        raise DomainError("mobius needs n >= 1")
    if n == 1:
        return 1
    if table is None:
        raise IndexError(f"{n} requires a sieve table")
    return int(table.mu[table._index(n)])


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for n >= 1."""
    if n < 1:
        raise DomainError("kronecker needs n >= 1")
    result = 1
    # factor out powers of two from n
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def li(x: float, as_mpf: bool = False):
    """Offset logarithmic integral, the integral of 1/log t from 2 to x.

    A float cannot hold 1e-9 absolute accuracy past x ~ 1e7; pass
    ``as_mpf=True`` for a 30-digit mpmath value.
    """
    if x < 2:
        raise DomainError("li is only defined here for x >= 2")
    with mpmath.workdps(30):
        v = mpmath.li(x, offset=True) if x != 2 else mpmath.mpf(0)
        return +v if as_mpf else float(v)


_EI_LOG2 = float(expi(math.log(2.0)))


def li_array(x) -> np.ndarray:
    """Vectorised li; double precision, for diagnostics grids."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 2):
        raise DomainError("li is only defined here for x >= 2")
    return expi(np.log(x)) - _EI_LOG2


_MAX_PARTIALS = 128


@njit(cache=True, nogil=True)
def _grow_expansion(partials, used, xs):
    """Add xs into a non-overlapping expansion held in partials[:used]."""
    for j in range(xs.shape[0]):
        x = xs[j]
        i = 0
        for k in range(used):
            y = partials[k]
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo != 0.0:
                partials[i] = lo
                i += 1
            x = hi
        partials[i] = x
        used = i + 1
    return used


class CompensatedSum:
    """Exact running sum of doubles (Shewchuk expansion).

    `total` is the correctly rounded value of the exact sum of every term
    added so far, so it does not depend on how terms were grouped.
    """

    def __init__(self):
        self._partials = np.zeros(_MAX_PARTIALS, dtype=np.float64)
        self._used = 0
        self.term_count = 0
        self.abs_total = 0.0

    def add(self, x: float) -> None:
        self.add_array(np.array([x], dtype=np.float64))

    def add_array(self, xs) -> None:
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        if xs.size == 0:
            return
        if not np.isfinite(xs).all():
            raise DomainError("non-finite term")
        self._used = _grow_expansion(self._partials, self._used, xs)
        self.term_count += int(xs.size)
        self.abs_total += float(np.abs(xs).sum())

    @property
    def total(self) -> float:
        return math.fsum(self._partials[:self._used].tolist())

    @property
    def error_bound(self) -> float:
        """Bound on |total - exact sum of the real terms|, assuming each term
        was itself a correctly rounded double."""
        return _EPS * abs(self.total) + _EPS * self.abs_total

    def copy(self) -> "CompensatedSum":
        c = CompensatedSum()
        c._partials[:] = self._partials
        c._used = self._used
        c.term_count = self.term_count
        c.abs_total = self.abs_total
        return c
