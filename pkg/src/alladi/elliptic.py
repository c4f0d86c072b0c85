"""Traces of Frobenius and Sato-Tate angles for y^2 = x^3 + Ax + B over Q.

Below `NAIVE_LIMIT` the trace is the negated Legendre-symbol sum over F_p.
Above it the group order is pinned inside the Hasse interval by
baby-step/giant-step on random points. A random x with r = f(x) != 0 yields
the point (x*r, r^2) on y^2 = X^3 + A r^2 X + B r^3, which is E itself when
r is a square and the quadratic twist otherwise. Orders found on the twist
constrain #E through #E + #E' = 2p + 2, so no square roots are needed.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np
from numba import njit

from .arith import primes_upto
from .errors import DomainError, ExcludedPrimeError

NAIVE_LIMIT = 1 << 16
_BAD = np.iinfo(np.int64).min
_FAILED = np.iinfo(np.int64).max


@dataclass(frozen=True)
class Curve:
    A: int
    B: int
    cm: bool = False

    def __post_init__(self):
        if self.discriminant == 0:
            raise DomainError(f"y^2 = x^3 + {self.A}x + {self.B} is singular")

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.A ** 3 + 27 * self.B ** 2)

    def is_good(self, p: int) -> bool:
        return self.discriminant % p != 0

    def __str__(self):
        return f"y^2 = x^3 {self.A:+d}x {self.B:+d}"


class TraceRecord(NamedTuple):
    p: int
    a_p: int
    theta: float


@njit(cache=True, nogil=True)
def _powmod(b, e, m):
    r = 1
    b %= m
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


@njit(cache=True, nogil=True)
def _inv(a, m):
    a %= m
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % m


@njit(cache=True, nogil=True)
def ec_add(x1, y1, o1, x2, y2, o2, a, p):
    """Affine addition; (x, y, is_infinity) triples."""
    if o1:
        return x2, y2, o2
    if o2:
        return x1, y1, o1
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return 0, 0, True
        lam = (3 * x1 % p * x1 + a) % p * _inv(2 * y1, p) % p
    else:
        lam = (y2 - y1) % p * _inv(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return x3, y3, False


@njit(cache=True, nogil=True)
def ec_mul(k, x, y, a, p):
    rx, ry, ro = 0, 0, True
    bx, by, bo = x, y, False
    while k > 0:
        if k & 1:
            rx, ry, ro = ec_add(rx, ry, ro, bx, by, bo, a, p)
        k >>= 1
        if k > 0:
            bx, by, bo = ec_add(bx, by, bo, bx, by, bo, a, p)
    return rx, ry, ro


@njit(cache=True, nogil=True)
def _naive_trace(A, B, p):
    chi = np.full(p, -1, dtype=np.int8)
    chi[0] = 0
    for y in range(1, (p + 1) // 2):
        chi[y * y % p] = 1
    A %= p
    B %= p
    s = 0
    for x in range(p):
        s += chi[(x * x % p * x + A * x + B) % p]
    return -s


@njit(cache=True, nogil=True)
def _isqrt(n):
    r = np.int64(math.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True, nogil=True)
def _some_multiple(x, y, a, p, lo, hi):
    """A positive k with kP = O, searched over the window [lo, hi]."""
    m = _isqrt(hi - lo) + 1
    bx = np.empty(m + 1, dtype=np.int64)
    by = np.empty(m + 1, dtype=np.int64)
    cx, cy, co = 0, 0, True
    n = 0
    for j in range(1, m + 1):
        cx, cy, co = ec_add(cx, cy, co, x, y, False, a, p)
        if co:
            return j
        bx[n] = cx
        by[n] = cy
        n += 1
    order = np.argsort(bx[:n])
    sx = bx[:n][order]
    sy = by[:n][order]
    sj = order + 1
    gx, gy, go = ec_mul(m, x, y, a, p)
    rx, ry, ro = ec_mul(lo, x, y, a, p)
    for i in range(m + 2):
        base = lo + i * m
        if ro:
            return base
        t = np.searchsorted(sx, rx)
        if t < n and sx[t] == rx:
            j = sj[t]
            if sy[t] == ry:
                return base - j
            return base + j
        rx, ry, ro = ec_add(rx, ry, ro, gx, gy, go, a, p)
    return -1


@njit(cache=True, nogil=True)
def _exact_order(k, x, y, a, p):
    o = k
    rest = k
    q = 2
    while q * q <= rest:
        if rest % q == 0:
            while rest % q == 0:
                rest //= q
            while o % q == 0:
                if ec_mul(o // q, x, y, a, p)[2]:
                    o //= q
                else:
                    break
        q += 1
    if rest > 1 and o % rest == 0:
        if ec_mul(o // rest, x, y, a, p)[2]:
            o //= rest
    return o


@njit(cache=True, nogil=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True, nogil=True)
def _bsgs_trace(A, B, p, seed, max_points):
    np.random.seed(seed)
    A %= p
    B %= p
    r = _isqrt(4 * p)
    lo = p + 1 - r
    hi = p + 1 + r
    le = 1  # lcm of orders found on E
    lt = 1  # lcm of orders found on the twist
    for _ in range(max_points):
        x = np.random.randint(0, p)
        f = (x * x % p * x + A * x + B) % p
        if f == 0:
            continue
        a_f = A * f % p * f % p
        px = x * f % p
        py = f * f % p
        k = _some_multiple(px, py, a_f, p, lo, hi)
        if k <= 0:
            continue
        o = _exact_order(k, px, py, a_f, p)
        if _powmod(f, (p - 1) // 2, p) == 1:
            le = le // _gcd(le, o) * o
        else:
            lt = lt // _gcd(lt, o) * o
        count = 0
        last = 0
        n = ((lo + le - 1) // le) * le
        while n <= hi:
            if (2 * p + 2 - n) % lt == 0:
                count += 1
                last = n
                if count > 1:
                    break
            n += le
        if count == 1:
            return p + 1 - last
    return _FAILED


@njit(cache=True, nogil=True)
def _trace_kernel(A, B, primes, naive_limit, max_points, count_bad):
    out = np.empty(primes.shape[0], dtype=np.int64)
    for i in range(primes.shape[0]):
        p = primes[i]
        if p == 2 or (4 * _powmod(A, 3, p) + 27 * _powmod(B, 2, p)) % p == 0:
            if not count_bad:
                out[i] = _BAD
            elif p == 2:
                # y^2 = c has exactly one root in F_2 for every x
                out[i] = 0
            else:
                out[i] = _naive_trace(A, B, p)
        elif p < naive_limit:
            out[i] = _naive_trace(A, B, p)
        else:
            t = _bsgs_trace(A, B, p, p, max_points)
            out[i] = _naive_trace(A, B, p) if t == _FAILED else t
    return out


def _check_coeff(E: Curve):
    # kernels reduce A, B mod p in int64
    if max(abs(E.A), abs(E.B)) >= 1 << 62:
        raise DomainError("curve coefficients must fit in 63 bits")


def trace_of_frobenius(E: Curve, p: int, method: str = "auto",
                       naive_limit: int = NAIVE_LIMIT,
                       bad_primes: str = "exclude") -> int:
    """a_p = p + 1 - #E(F_p) at a good prime p.

    With ``bad_primes="count"`` a bad prime gets p + 1 minus the number of
    points of the (singular) reduced cubic, counted directly.
    """
    if not E.is_good(p) or p == 2:
        if bad_primes != "count":
            raise ExcludedPrimeError(p)
        return int(_trace_kernel(E.A, E.B, np.array([p], dtype=np.int64),
                                 naive_limit, 400, True)[0])
    if p >= 1 << 31:
        raise DomainError("p must stay below 2^31 for the int64 kernels")
    _check_coeff(E)
    if method == "naive" or (method == "auto" and p < naive_limit):
        return int(_naive_trace(E.A, E.B, p))
    if method not in ("auto", "bsgs"):
        raise ValueError(f"unknown method {method!r}")
    t = _bsgs_trace(E.A, E.B, p, p, 400)
    if t == _FAILED:
        raise ArithmeticError(f"order search did not converge at p={p}")
    return int(t)


def theta_angle(a_p: int, p: int) -> float:
    """The angle in [0, pi] whose cosine is a_p / (2 sqrt p)."""
    if a_p * a_p > 4 * p:
        raise DomainError(f"|a_p| = {abs(a_p)} violates the Hasse bound at p = {p}")
    return math.acos(max(-1.0, min(1.0, a_p / (2.0 * math.sqrt(p)))))


def trace_array(E: Curve, primes, workers: int = 1,
                naive_limit: int = NAIVE_LIMIT,
                bad_primes: str = "exclude") -> np.ndarray:
    """Traces for an array of primes.

    Bad primes come back as `BAD_TRACE` unless ``bad_primes="count"``.
    """
    if bad_primes not in ("exclude", "count"):
        raise ValueError(f"bad_primes must be 'exclude' or 'count', not {bad_primes!r}")
    count_bad = bad_primes == "count"
    _check_coeff(E)
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    if primes.size and primes.max() >= 1 << 31:
        raise DomainError("p must stay below 2^31 for the int64 kernels")
    if workers <= 1 or primes.size < 4096:
        return _trace_kernel(E.A, E.B, primes, naive_limit, 400, count_bad)
    # interleave so chunks carry similar work; order restored below
    chunks = [primes[i::workers] for i in range(workers)]
    with ThreadPoolExecutor(workers) as pool:
        parts = list(pool.map(
            lambda c: _trace_kernel(E.A, E.B, c, naive_limit, 400, count_bad),
            chunks))
    out = np.empty_like(primes)
    for i, part in enumerate(parts):
        out[i::workers] = part
    return out


BAD_TRACE = int(_BAD)


def theta_array(traces: np.ndarray, primes: np.ndarray) -> np.ndarray:
    c = traces / (2.0 * np.sqrt(primes.astype(np.float64)))
    return np.arccos(np.clip(c, -1.0, 1.0))


def batch_traces(E: Curve, X: int, workers: int = 1,
                 bad_primes: str = "exclude") -> Iterator[TraceRecord]:
    """TraceRecords for every prime p <= X in increasing order; bad primes
    are skipped unless ``bad_primes="count"``."""
    if X < 2:
        raise DomainError("X must be at least 2")
    ps = primes_upto(X)
    ts = trace_array(E, ps, workers, bad_primes=bad_primes)
    good = ts != _BAD
    ps, ts = ps[good], ts[good]
    thetas = theta_array(ts, ps)
    for p, t, th in zip(ps.tolist(), ts.tolist(), thetas.tolist()):
        if t * t > 4 * p:
            raise ArithmeticError(f"Hasse bound violated at p = {p}: a_p = {t}")
        yield TraceRecord(p, t, th)
