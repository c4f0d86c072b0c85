"""Prime sets S with membership predicates and theoretical densities.

A set is queried with a rational prime or a `PrimeIdeal`; most variants are
defined on rational primes and lift to prime ideals through the prime lying
below. `contains` raises `ExcludedPrimeError` for bad-reduction primes of the
elliptic variants, while `p in S` treats those as non-members.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

import numpy as np
import sympy

from . import polymodp
from .arith import kronecker
from .elliptic import BAD_TRACE, Curve, theta_array, trace_array
from .errors import ConfigError, DomainError, ExcludedPrimeError, PrecisionError
from .numfield import NumberField, PrimeIdeal

FIXED_BITS = 256

# truncated to 80 fractional digits, i.e. about 265 bits
NAMED_CONSTANTS = {
    "pi": "3.14159265358979323846264338327950288419716939937510"
          "582097494459230781640628620899",
    "e": "2.71828182845904523536028747135266249775724709369995"
         "957496696762772407663035354759",
    "sqrt2": "1.41421356237309504880168872420969807856967187537694"
             "807317667973799073247846210703",
    "phi": "1.61803398874989484820458683436563811772030917980576"
           "286213544862270526046281890244",
}


def _phi(q: int) -> int:
    return sum(1 for r in range(1, q + 1) if gcd(r, q) == 1)


@dataclass(frozen=True)
class FixedReal:
    """A real alpha known to lie in [lo, hi] / 2**bits (integers lo <= hi)."""

    lo: int
    hi: int
    bits: int = FIXED_BITS
    label: str = ""

    @classmethod
    def from_decimal(cls, text: str, bits: int = FIXED_BITS, label: str = ""):
        """Decimal literal accurate to one unit in its last digit."""
        text = text.strip()
        if not re.fullmatch(r"\d+(\.\d+)?", text):
            raise ConfigError(f"not a decimal literal: {text!r}")
        digits = len(text.split(".")[1]) if "." in text else 0
        v = Fraction(text)
        err = Fraction(1, 10 ** digits)
        scale = 1 << bits
        lo = math.floor((v - err) * scale)
        hi = math.ceil((v + err) * scale)
        return cls(lo, hi, bits, label or text)

    @classmethod
    def named(cls, name: str, bits: int = FIXED_BITS):
        try:
            return cls.from_decimal(NAMED_CONSTANTS[name], bits, name)
        except KeyError:
            raise ConfigError(f"unknown constant {name!r}; "
                              f"known: {', '.join(NAMED_CONSTANTS)}") from None

    def __float__(self):
        return float(Fraction(self.lo + self.hi, 2 << self.bits))

    @property
    def width(self) -> Fraction:
        return Fraction(self.hi - self.lo, 1 << self.bits)


def beatty_contains(alpha: FixedReal, m: int) -> bool:
    """Is m = floor(alpha * n) for some n >= 1?  alpha > 1 irrational.

    n = ceil(m / alpha) is the only candidate; both the candidate and the test
    alpha * n < m + 1 are decided on the enclosing interval of alpha, and an
    undecidable case raises rather than guessing.
    """
    if m < 1:
        return False
    if alpha.lo <= 1 << alpha.bits:
        raise DomainError("Beatty sequences here need alpha > 1")
    shift = m << alpha.bits
    n_lo = -(-shift // alpha.hi)
    n_hi = -(-shift // alpha.lo)
    if n_lo != n_hi:
        raise PrecisionError(
            f"alpha={alpha.label} too imprecise to place {m}; retry with more digits")
    n = n_lo
    top = (m + 1) << alpha.bits
    if n * alpha.hi < top:
        return True
    if n * alpha.lo >= top:
        return False
    raise PrecisionError(
        f"alpha={alpha.label} too imprecise to decide {m}; retry with more digits")


def sato_tate_measure(a1: float, a2: float) -> float:
    """(2/pi) times the integral of sin^2 over [a1, a2]."""
    if not 0 <= a1 <= a2 <= math.pi:
        raise DomainError(f"need 0 <= a1 <= a2 <= pi, got [{a1}, {a2}]")
    return (a2 - a1 - (math.sin(2 * a2) - math.sin(2 * a1)) / 2) / math.pi


def _rational(p) -> int:
    return p.p if isinstance(p, PrimeIdeal) else int(p)


class PrimeSet:
    """Base class. Subclasses define `_member(p)` on rational primes."""

    density: float | None = None
    tag: str = "?"

    def contains(self, p) -> bool:
        return self._member(_rational(p))

    def __contains__(self, p) -> bool:
        try:
            return self.contains(p)
        except ExcludedPrimeError:
            return False

    def _member(self, p: int) -> bool:
        raise NotImplementedError

    def mask(self, primes) -> np.ndarray:
        """Vectorised membership over an array of rational primes."""
        primes = np.asarray(primes, dtype=np.int64)
        return np.fromiter((p in self for p in primes.tolist()), dtype=bool,
                           count=primes.size)

    def __and__(self, other):
        return Intersection((self, other))


@dataclass(frozen=True)
class AllPrimes(PrimeSet):
    density = 1.0
    tag = "all"

    def _member(self, p):
        return True

    def mask(self, primes):
        return np.ones(np.shape(primes), dtype=bool)


@dataclass(frozen=True)
class FinitePrimes(PrimeSet):
    primes: frozenset = frozenset()
    density = 0.0
    tag = "finite"

    def _member(self, p):
        return p in self.primes

    def mask(self, primes):
        return np.isin(primes, np.fromiter(self.primes, dtype=np.int64))


@dataclass(frozen=True)
class CofinitePrimes(PrimeSet):
    excluded: frozenset = frozenset()
    density = 1.0
    tag = "cofinite"

    def _member(self, p):
        return p not in self.excluded

    def mask(self, primes):
        return ~np.isin(primes, np.fromiter(self.excluded, dtype=np.int64))


@dataclass(frozen=True)
class ArithmeticProgression(PrimeSet):
    q: int
    a: int
    tag = "ap"

    def __post_init__(self):
        if self.q < 1 or gcd(self.a, self.q) != 1:
            raise ConfigError(f"AP needs q >= 1 and gcd(a, q) = 1, got a={self.a}, q={self.q}")

    @property
    def density(self):
        return 1 / _phi(self.q)

    def _member(self, p):
        return p % self.q == self.a % self.q

    def mask(self, primes):
        return np.asarray(primes) % self.q == self.a % self.q


@dataclass(frozen=True)
class Beatty(PrimeSet):
    """Primes of the form floor(alpha * n); alpha > 1 of finite type (declared)."""

    alpha: FixedReal
    tag = "beatty"

    def __post_init__(self):
        if self.alpha.lo <= 1 << self.alpha.bits:
            raise ConfigError("Beatty needs alpha > 1")

    @property
    def density(self):
        return 1 / float(self.alpha)

    def _member(self, p):
        return beatty_contains(self.alpha, p)

    def mask(self, primes):
        m = np.asarray(primes, dtype=np.int64)
        if m.size == 0:
            return np.zeros(0, dtype=bool)
        beta = float(Fraction(2 << self.alpha.bits, self.alpha.lo + self.alpha.hi))
        mf = m.astype(np.float64)
        u = mf * beta
        v = (mf + 1.0) * beta
        out = (np.floor(v) - np.floor(u)) == 1
        # float products are good to ~1e-16 relative; recheck near-integers exactly
        tol = 1e-12 * (float(m.max()) + 1.0)
        near = ((np.abs(u - np.rint(u)) < tol) | (np.abs(v - np.rint(v)) < tol))
        for i in np.flatnonzero(near).tolist():
            out[i] = beatty_contains(self.alpha, int(m[i]))
        return out


@dataclass(frozen=True)
class CyclotomicChebotarev(PrimeSet):
    """Unramified primes whose Frobenius in Q(zeta_m) lies in `residues`."""

    m: int
    residues: frozenset
    tag = "cyclotomic"

    @property
    def density(self):
        good = {r % self.m for r in self.residues if gcd(r, self.m) == 1}
        return len(good) / _phi(self.m)

    def _member(self, p):
        return self.m % p != 0 and p % self.m in self.residues

    def mask(self, primes):
        primes = np.asarray(primes, dtype=np.int64)
        res = np.fromiter((r % self.m for r in self.residues), dtype=np.int64)
        return np.isin(primes % self.m, res) & (self.m % primes != 0)


@dataclass(frozen=True)
class QuadraticChebotarev(PrimeSet):
    """Unramified primes p with Kronecker symbol (disc | p) = value."""

    disc: int
    value: int
    tag = "quadratic"

    def __post_init__(self):
        if self.value not in (1, -1):
            raise ConfigError("quadratic Chebotarev value must be 1 or -1")
        if self.disc % 4 not in (0, 1) or math.isqrt(abs(self.disc)) ** 2 == self.disc:
            raise ConfigError(f"{self.disc} is not a non-square discriminant")

    density = 0.5

    def _member(self, p):
        return self.disc % p != 0 and kronecker(self.disc, p) == self.value


@dataclass(frozen=True)
class CycleType(PrimeSet):
    """Unramified primes where f mod p factors with the given degree pattern.

    The pattern names a conjugacy class only when cycle type determines the
    class (e.g. Galois group S_n); the density is then user-declared.
    """

    coeffs: tuple
    pattern: tuple
    declared: float | None = None
    tag = "cycletype"

    @property
    def density(self):
        return self.declared

    @cached_property
    def _disc(self):
        x = sympy.Symbol("x")
        return int(sympy.discriminant(sympy.Poly(list(reversed(self.coeffs)), x)))

    def _member(self, p):
        if self._disc % p == 0:
            return False
        degs = sorted(d for d, _ in polymodp.factor_degrees(list(self.coeffs), p))
        return tuple(degs) == tuple(sorted(self.pattern))


class _CurveSet(PrimeSet):
    """Sets cut out by the trace of Frobenius of a curve.

    bad_primes="exclude" drops primes dividing the discriminant (and 2);
    "count" keeps them with a_p from the point count of the singular cubic.
    """

    curve: Curve

    def _trace(self, p):
        if self.bad_primes == "exclude" and (p == 2 or not self.curve.is_good(p)):
            raise ExcludedPrimeError(p)
        cache = self._cache
        if p not in cache:
            cache[p] = int(self.traces(np.array([p]))[0])
        return cache[p]

    def traces(self, primes):
        primes = np.asarray(primes, dtype=np.int64)
        return trace_array(self.curve, primes, self.workers,
                           bad_primes=self.bad_primes)


@dataclass(frozen=True)
class LangTrotter(_CurveSet):
    curve: Curve
    a: int
    workers: int = 1
    bad_primes: str = "exclude"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)
    tag = "lang-trotter"

    @property
    def density(self):
        return 0.5 if (self.curve.cm and self.a == 0) else 0.0

    def _member(self, p):
        return self._trace(p) == self.a

    def mask(self, primes):
        t = self.traces(primes)
        return (t != BAD_TRACE) & (t == self.a)


@dataclass(frozen=True)
class SatoTate(_CurveSet):
    """Good primes with theta_p in [lo, hi), closed at hi when hi = pi."""

    curve: Curve
    lo: float
    hi: float
    workers: int = 1
    bad_primes: str = "exclude"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)
    tag = "sato-tate"

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi <= math.pi:
            raise ConfigError(f"Sato-Tate interval [{self.lo}, {self.hi}] not inside [0, pi]")

    @property
    def density(self):
        if self.curve.cm:
            return None
        return sato_tate_measure(self.lo, self.hi)

    def _in_interval(self, theta):
        if self.hi >= math.pi:
            return (theta >= self.lo) & (theta <= self.hi)
        return (theta >= self.lo) & (theta < self.hi)

    def _member(self, p):
        a = self._trace(p)
        th = math.acos(max(-1.0, min(1.0, a / (2 * math.sqrt(p)))))
        return bool(self._in_interval(th))

    def mask(self, primes):
        primes = np.asarray(primes, dtype=np.int64)
        t = self.traces(primes)
        good = t != BAD_TRACE
        out = np.zeros(primes.shape, dtype=bool)
        out[good] = self._in_interval(theta_array(t[good], primes[good]))
        return out


@dataclass(frozen=True)
class Split(PrimeSet):
    """Unramified prime ideals of residue degree 1 lying over primes of `inner`."""

    inner: PrimeSet
    tag = "split"

    @property
    def density(self):
        return self.inner.density

    def contains(self, p):
        if isinstance(p, PrimeIdeal) and (p.f != 1 or p.ramified):
            return False
        return self.inner.contains(p)

    def _member(self, p):
        return self.inner._member(p)

    def mask(self, primes):
        return self.inner.mask(primes)


_CHEBOTAREV = (CyclotomicChebotarev, QuadraticChebotarev, CycleType)


@dataclass(frozen=True)
class Intersection(PrimeSet):
    parts: tuple
    declared: float | None = None
    tag = "and"

    @property
    def density(self):
        if self.declared is not None:
            return self.declared
        # Beatty intersected with Chebotarev conditions: product of densities
        kinds = [type(s) for s in self.parts]
        if kinds.count(Beatty) == 1 and all(
                k is Beatty or k in _CHEBOTAREV for k in kinds):
            d = 1.0
            for s in self.parts:
                if s.density is None:
                    return None
                d *= s.density
            return d
        return None

    def contains(self, p):
        return all(s.contains(p) for s in self.parts)

    def mask(self, primes):
        out = np.ones(np.shape(primes), dtype=bool)
        for s in self.parts:
            out &= s.mask(primes)
        return out


@dataclass(frozen=True)
class Declared(PrimeSet):
    """Wraps a set with a user-declared density."""

    inner: PrimeSet
    declared: float
    tag = "declared"

    @property
    def density(self):
        return self.declared

    def contains(self, p):
        return self.inner.contains(p)

    def mask(self, primes):
        return self.inner.mask(primes)


def density(S: PrimeSet, K: NumberField | None = None) -> float | None:
    """Theoretical natural density of S among the prime ideals of K.

    Over Q this is the tabulated value. Over a quadratic field it is derived
    for sets determined by congruences (AP, cyclotomic, all primes, and
    their split restrictions); otherwise only a declared density is known.
    """
    if K is None or K.degree == 1:
        return S.density
    if isinstance(S, Declared):
        return S.declared
    if K.degree == 2:
        inner = S.inner if isinstance(S, Split) else S
        if isinstance(inner, AllPrimes):
            return 1.0
        if isinstance(inner, (ArithmeticProgression, CyclotomicChebotarev)):
            return _quadratic_split_density(K, inner)
    return None


def _quadratic_split_density(K: NumberField, S) -> float:
    # degree-1 primes carry all the density; each split p contributes two
    c, b, _ = K.coeffs
    D = b * b - 4 * c
    if isinstance(S, ArithmeticProgression):
        q, allowed = S.q, {S.a % S.q}
    else:
        q, allowed = S.m, {r % S.m for r in S.residues}
    L = q * abs(D) // gcd(q, abs(D))
    hits = sum(1 for r in range(1, L + 1)
               if gcd(r, L) == 1 and r % q in allowed and kronecker(D, r) == 1)
    return 2 * hits / _phi(L)


# ---------------------------------------------------------------- grammar

_ANGLE_NS = {"pi": sympy.pi}


def _angle(text: str) -> float:
    try:
        return float(sympy.sympify(text, locals=_ANGLE_NS))
    except (sympy.SympifyError, TypeError) as exc:
        raise ConfigError(f"bad angle {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def parse_alpha(text: str) -> FixedReal:
    if text in NAMED_CONSTANTS:
        return FixedReal.named(text)
    return FixedReal.from_decimal(text)


def parse_set(text: str, curve: Curve | None = None,
              interval: tuple[float, float] | None = None,
              workers: int = 1, bad_primes: str = "exclude") -> PrimeSet:
    """Parse a prime-set expression; see README for the grammar."""
    text = text.strip()
    declared = None
    if "@" in text:
        text, d = text.rsplit("@", 1)
        try:
            declared = float(d)
        except ValueError as exc:
            raise ConfigError(f"bad declared density {d!r}") from exc
        if not 0 <= declared <= 1:
            raise ConfigError("declared density must lie in [0, 1]")
    try:
        parts = [_parse_atom(t.strip(), curve, interval, workers, bad_primes)
                 for t in text.split("&")]
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad prime set {text!r}: {exc}") from exc
    if len(parts) > 1:
        return Intersection(tuple(parts), declared)
    if declared is not None:
        return Declared(parts[0], declared)
    return parts[0]


def _need_curve(curve, tag):
    if curve is None:
        raise ConfigError(f"set {tag!r} needs a curve (--curve A,B)")
    return curve


def _parse_atom(text, curve, interval, workers, bad_primes) -> PrimeSet:
    m = re.fullmatch(r"(-?\d+)mod(\d+)", text)
    if m:
        return ArithmeticProgression(int(m.group(2)), int(m.group(1)))
    head, _, rest = text.partition(":")
    if head == "all":
        return AllPrimes()
    if head == "finite":
        return FinitePrimes(frozenset(_ints(rest)))
    if head == "cofinite":
        return CofinitePrimes(frozenset(_ints(rest)))
    if head == "ap":
        q, a = _ints(rest.replace(":", ","))
        return ArithmeticProgression(q, a)
    if head == "beatty":
        if not rest:
            raise ConfigError("beatty needs an alpha, e.g. beatty:pi")
        return Beatty(parse_alpha(rest))
    if head == "cyclotomic":
        mod, _, res = rest.partition(":")
        return CyclotomicChebotarev(int(mod), frozenset(_ints(res)))
    if head == "quadratic":
        d, v = _ints(rest.replace(":", ","))
        return QuadraticChebotarev(d, v)
    if head == "cycletype":
        poly, _, pattern = rest.partition(":")
        coeffs = tuple(reversed(_ints(poly)))
        return CycleType(coeffs, tuple(_ints(pattern)))
    if head == "lang-trotter":
        return LangTrotter(_need_curve(curve, head), int(rest), workers, bad_primes)
    if head == "sato-tate":
        c = _need_curve(curve, head)
        if rest:
            lo, hi = (_angle(t) for t in rest.split(","))
        elif interval is not None:
            lo, hi = interval
        else:
            lo, hi = 0.0, math.pi
        return SatoTate(c, lo, hi, workers, bad_primes)
    if head == "split":
        return Split(_parse_atom(rest, curve, interval, workers, bad_primes))
    raise ConfigError(f"unknown prime set {text!r}")


def parse_interval(text: str) -> tuple[float, float]:
    lo, hi = (_angle(t) for t in text.split(","))
    return lo, hi
