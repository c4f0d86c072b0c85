"""Moebius sums over ideals whose minimal prime lies in S, and companions.

Over Q every sum streams the segmented sieve: mu(n) and the smallest prime
factor come out of one pass per segment and nothing is stored beyond the
current segment. Over other fields the sums walk `enumerate_ideals`.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import isqrt
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .arith import (DEFAULT_SEGMENT, MAX_TABLE_ENTRIES, CompensatedSum,
                    _factor_segment, li, li_array, primes_upto)
from .errors import ConfigError, DomainError, ResourceError
from .numfield import (IdealFactorization, NumberField, enumerate_ideals,
                       ideal_stats, prime_ideal_table, smooth_count)
from .primesets import PrimeSet, density

CSV_HEADER = ("X", "value", "error_bound")


class Checkpoint(NamedTuple):
    x: int
    value: float
    error_bound: float = 0.0


@dataclass
class SumTrace:
    """Partial sums at increasing cut-offs X_i (norm <= X_i)."""

    checkpoints: list
    prime_set: PrimeSet
    field: NumberField
    label: str = "alladi"

    @property
    def error_bound(self) -> float:
        return max((c.error_bound for c in self.checkpoints), default=0.0)

    def value_at(self, x: int):
        for c in self.checkpoints:
            if c.x == x:
                return c.value
        raise KeyError(x)

    def ratios(self) -> list[float]:
        return [c.value / c.x for c in self.checkpoints]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in self.checkpoints:
            w.writerow((c.x, repr(c.value), f"{c.error_bound:.3e}"))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, prime_set=None, field=None) -> "SumTrace":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != CSV_HEADER:
            raise ConfigError(f"CSV header must be {','.join(CSV_HEADER)}")
        cps = [Checkpoint(int(x), float(v), float(e)) for x, v, e in rows[1:]]
        return cls(cps, prime_set, field)


def _checkpoints(X: int, checkpoints) -> list[int]:
    if X < 1:
        raise DomainError("X must be >= 1")
    cps = sorted({int(c) for c in (checkpoints or ())} | {X})
    if cps[0] < 1 or cps[-1] > X:
        raise ConfigError(f"checkpoints must lie in [1, {X}]")
    return cps


# ------------------------------------------------------------- Q: sieve path

def _membership_lookup(S: PrimeSet, n: int) -> np.ndarray:
    """Boolean table over 0..n with True exactly at primes in S."""
    out = np.zeros(n + 1, dtype=bool)
    ps = primes_upto(n)
    out[ps] = S.mask(ps)
    return out


def _segment_selection(lo, hi, base, small_in, S):
    """(n, mu) for squarefree n in [lo, hi), n >= 2, with p_min(n) in S."""
    mu, spf, _ = _factor_segment(lo, hi, base)
    n = np.arange(lo, hi, dtype=np.int64)
    in_s = np.zeros(hi - lo, dtype=bool)
    is_prime = (spf == n) & (n >= 2)
    comp = ~is_prime & (n >= 2)
    # a composite's smallest factor is at most sqrt(n)
    in_s[comp] = small_in[spf[comp]]
    in_s[is_prime] = S.mask(n[is_prime])
    # every n >= 2 is distinguishable over Q: its smallest prime is unique
    keep = (mu != 0) & in_s
    return n[keep], mu[keep].astype(np.int64)


def _segments(X: int, segment_size: int):
    lo = 1
    while lo <= X:
        hi = min(lo + segment_size, X + 1)
        yield lo, hi
        lo = hi


def _rational_selection(S: PrimeSet, X: int, workers: int = 1,
                        segment_size: int = DEFAULT_SEGMENT
                        ) -> Iterator[tuple[int, int, np.ndarray, np.ndarray]]:
    base = primes_upto(isqrt(X))
    small_in = np.zeros(isqrt(X) + 1, dtype=bool)
    small_in[base] = S.mask(base)
    segs = list(_segments(X, segment_size))

    def job(bounds):
        lo, hi = bounds
        return (lo, hi) + _segment_selection(lo, hi, base, small_in, S)

    if workers <= 1:
        yield from map(job, segs)
        return
    with ThreadPoolExecutor(workers) as pool:
        # results come back in segment order
        yield from pool.map(job, segs)


def _fold_checkpoints(pieces, cps, make_term, acc_factory):
    """Feed ordered (norms, payload, upper) pieces into an accumulator and
    record its state at every checkpoint.

    Each piece covers norms up to `upper`; later pieces only hold larger norms.
    """
    out = []
    k = 0
    acc = acc_factory()
    for norms, payload, upper in pieces:
        start = 0
        while k < len(cps) and cps[k] <= upper:
            stop = int(np.searchsorted(norms, cps[k], side="right"))
            acc.add(make_term(norms[start:stop], payload[start:stop]))
            out.append((cps[k], acc.snapshot()))
            start = stop
            k += 1
        acc.add(make_term(norms[start:], payload[start:]))
    while k < len(cps):
        out.append((cps[k], acc.snapshot()))
        k += 1
    return out


class _FloatAcc:
    def __init__(self):
        self.s = CompensatedSum()

    def add(self, terms):
        self.s.add_array(terms)

    def snapshot(self):
        return self.s.total, self.s.error_bound


class _IntAcc:
    def __init__(self):
        self.s = 0

    def add(self, terms):
        self.s += int(np.sum(terms))

    def snapshot(self):
        return self.s, 0.0


def _rational_pieces(S, X, workers, segment_size):
    for lo, hi, n, mu in _rational_selection(S, X, workers, segment_size):
        yield n, mu, hi - 1


def partial_sum(K: NumberField, S: PrimeSet, X: int, checkpoints=None, *,
                workers: int = 1, segment_size: int = DEFAULT_SEGMENT) -> SumTrace:
    """-sum of mu(a)/N(a) over 2 <= N(a) <= X_i with a in D(K, S)."""
    cps = _checkpoints(X, checkpoints)
    if K.degree == 1:
        pieces = _rational_pieces(S, X, workers, segment_size)
    else:
        pieces = [_ideal_selection(K, S, X) + (X,)]

    def terms(norms, mu):
        return -mu / norms.astype(np.float64)

    rows = _fold_checkpoints(pieces, cps, terms, _FloatAcc)
    return SumTrace([Checkpoint(x, v, e) for x, (v, e) in rows], S, K)


def mu_indicator_sum(K: NumberField, S: PrimeSet, X: int, checkpoints=None, *,
                     workers: int = 1,
                     segment_size: int = DEFAULT_SEGMENT) -> SumTrace:
    """sum of mu(a) 1_D(a) over N(a) <= X_i; exact integers."""
    cps = _checkpoints(X, checkpoints)
    if K.degree == 1:
        pieces = _rational_pieces(S, X, workers, segment_size)
    else:
        pieces = [_ideal_selection(K, S, X) + (X,)]
    rows = _fold_checkpoints(pieces, cps, lambda n, mu: mu, _IntAcc)
    return SumTrace([Checkpoint(x, v, 0.0) for x, (v, _) in rows], S, K,
                    label="mu_indicator")


# ------------------------------------------------------- general K: enumeration

def _ideal_selection(K, S, X):
    norms, mus = [], []
    for a in enumerate_ideals(K, X, squarefree=True):
        if a.distinguishable and a.p_min in S:
            norms.append(a.norm)
            mus.append(a.mu)
    order = np.argsort(np.asarray(norms, dtype=np.int64), kind="stable")
    n = np.asarray(norms, dtype=np.int64)[order]
    mu = np.asarray(mus, dtype=np.int64)[order]
    return n, mu


# ----------------------------------------------------------------- Q_S sums

def q_sum(K: NumberField, S: PrimeSet, X: int, method: str = "auto", *,
          segment_size: int = DEFAULT_SEGMENT) -> int:
    """sum of Q_S(a) over 2 <= N(a) <= X, as an exact integer.

    method: "sieve" (Q only; largest prime factor from the sieve),
    "enumerate" (ideal_stats over every ideal) or "smooth" (one smooth-ideal
    count per prime of S).
    """
    if method == "auto":
        method = "sieve" if K.degree == 1 else "enumerate"
    if method == "sieve":
        if K.degree != 1:
            raise ConfigError("the sieve path only exists over Q")
        return _q_sum_sieve(S, X, segment_size)
    if method == "enumerate":
        return sum(ideal_stats(a, S).q_s for a in enumerate_ideals(K, X))
    if method == "smooth":
        return q_sum_by_smooth_counts(K, S, X)
    raise ValueError(f"unknown method {method!r}")


def _q_sum_sieve(S, X, segment_size):
    if X + 1 > MAX_TABLE_ENTRIES:
        raise ResourceError(f"membership table to {X} exceeds the budget")
    member = _membership_lookup(S, X)
    base = primes_upto(isqrt(X))
    total = 0
    for lo, hi in _segments(X, segment_size):
        _, _, gpf = _factor_segment(lo, hi, base)
        # Q over Z is 1 exactly when the largest prime factor lies in S
        total += int(np.count_nonzero(member[gpf]))
    return total


def q_sum_by_smooth_counts(K: NumberField, S: PrimeSet, X: int) -> int:
    """sum over primes P in S, N(P) <= X, of Psi(X / N(P), N(P))."""
    tbl = prime_ideal_table(K, X)
    return sum(smooth_count(K, X // P.norm, P.norm, tbl)
               for P in tbl.ideals if P in S)


# ------------------------------------------------------------------ duality

class DualityCheck(NamedTuple):
    lhs: int
    rhs: int
    equal: bool


def verify_duality(K: NumberField, a: IdealFactorization, S: PrimeSet,
                   mu: Callable | None = None) -> DualityCheck:
    """Compare sum over b | a of mu(b) 1_D(b) with -Q_S(a).

    `mu` replaces the Moebius function (negative controls only).
    """
    mu = mu or (lambda b: b.mu)
    lhs = 0
    for b in a.divisors():
        if b.distinguishable and b.p_min in S:
            lhs += mu(b)
    rhs = -ideal_stats(a, S).q_s
    return DualityCheck(lhs, rhs, lhs == rhs)


def duality_sweep(K: NumberField, S: PrimeSet, X: int,
                  mu: Callable | None = None) -> list[IdealFactorization]:
    """Every ideal of norm <= X violating the duality identity."""
    return [a for a in enumerate_ideals(K, X)
            if not verify_duality(K, a, S, mu).equal]


# --------------------------------------------------------- density diagnostics

class DiagnosticRow(NamedTuple):
    x: int
    pi_s: int
    pi_k: int
    delta_li: float
    e_s: float
    v_s_proxy: float


@dataclass
class DensityDiagnostics:
    """pi_S, delta*Li, e_S and a range-restricted proxy for v_S on a grid.

    e_S(Y) is exact: the running supremum is evaluated at every jump of
    pi_S below Y. v_S(Y) is a supremum over an infinite tail; `v_s_proxy`
    restricts it to the grid points Z >= Y.
    """

    rows: list
    density: float
    prime_set: PrimeSet
    field: NumberField
    notes: str = "v_s_proxy = max over grid Z >= X of e_S(Z)/Z"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(DiagnosticRow._fields)
        for r in self.rows:
            w.writerow((r.x, r.pi_s, r.pi_k, repr(r.delta_li), repr(r.e_s),
                        repr(r.v_s_proxy)))
        return buf.getvalue()


def _prime_norms(K, S, X):
    if K.degree == 1:
        ps = primes_upto(X)
        return ps, ps[S.mask(ps)]
    tbl = prime_ideal_table(K, X)
    norms = np.asarray(tbl.norms[:tbl.upto(X)], dtype=np.int64)
    ins = np.fromiter((P in S for P in tbl.ideals[:len(norms)]), dtype=bool,
                      count=len(norms))
    return norms, norms[ins]


def density_diagnostics(K: NumberField, S: PrimeSet, X: int, grid=None
                        ) -> DensityDiagnostics:
    delta = density(S, K)
    if delta is None:
        raise ConfigError(f"density of {S.tag} over {K} is unknown; declare it with @")
    grid = sorted({int(g) for g in (grid or ())} | {X})
    if grid[0] < 2 or grid[-1] > X:
        raise ConfigError(f"grid must lie in [2, {X}]")
    all_norms, s_norms = _prime_norms(K, S, X)
    jumps, counts = np.unique(s_norms, return_counts=True)
    cum = np.cumsum(counts)
    if jumps.size:
        dli = delta * li_array(jumps)
        left = np.abs((cum - counts) - dli)
        right = np.abs(cum - dli)
        run = np.maximum.accumulate(np.maximum(left, right))
    else:
        run = np.zeros(0)
    rows = []
    for y in grid:
        k = int(np.searchsorted(jumps, y, side="right"))
        pi_s = int(cum[k - 1]) if k else 0
        dly = delta * li(y)
        e = max(abs(pi_s - dly), float(run[k - 1]) if k else 0.0)
        pi_k = int(np.searchsorted(all_norms, y, side="right"))
        rows.append([y, pi_s, pi_k, dly, e, 0.0])
    tail = 0.0
    for r in reversed(rows):
        tail = max(tail, r[4] / r[0])
        r[5] = tail
    return DensityDiagnostics([DiagnosticRow(*r) for r in rows], delta, S, K)
