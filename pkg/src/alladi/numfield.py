"""Monogenic number fields: prime splitting, ideal enumeration by norm,
smooth-ideal counts and the residue of the Dedekind zeta function.

Ideals are represented only through their prime factorisation. Splitting of
a rational prime p is read off the factorisation of the defining polynomial
modulo p, which is only correct when Z[theta] is the full ring of integers
(or at least p does not divide the index). That is a caller assertion.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from math import isqrt
from pathlib import Path
from typing import Iterator, NamedTuple

import sympy

from . import polymodp
from .arith import kronecker, primes_upto
from .errors import ConfigError, ResourceError

MAX_TABLE_NORM = 10 ** 8


@dataclass(frozen=True)
class NumberField:
    """K = Q[x]/(f) for a monic irreducible integer polynomial f.

    `coeffs` lists the coefficients of f lowest degree first. The invariants
    feeding the class number formula are declared by the user, never
    computed.
    """

    coeffs: tuple
    name: str = ""
    r1: int | None = None
    r2: int | None = None
    class_number: int | None = None
    roots_of_unity: int | None = None
    regulator: float | None = None
    abs_disc: int | None = None

    def __post_init__(self):
        c = tuple(int(v) for v in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) < 2 or c[-1] != 1:
            raise ConfigError(f"defining polynomial must be monic of degree >= 1: {c}")
        if self.r1 is not None and self.r2 is not None:
            if self.r1 + 2 * self.r2 != self.degree:
                raise ConfigError(
                    f"r1 + 2*r2 = {self.r1 + 2 * self.r2} != degree {self.degree}")
        if self.degree > 1:
            f = sympy.Poly(list(reversed(c)), sympy.Symbol("x"))
            if not f.is_irreducible:
                raise ConfigError(f"polynomial {c} is reducible over Q")
            if self.r1 is not None and self.r1 != f.count_roots():
                raise ConfigError(f"declared r1 = {self.r1} but f has "
                                  f"{f.count_roots()} real roots")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @cached_property
    def poly_discriminant(self) -> int:
        if self.degree == 1:
            return 1
        x = sympy.Symbol("x")
        return int(sympy.discriminant(sympy.Poly(list(reversed(self.coeffs)), x)))

    def __str__(self):
        return self.name or f"Q[x]/({_poly_str(self.coeffs)})"

    @classmethod
    def rationals(cls) -> "NumberField":
        return cls((0, 1), "Q", 1, 0, 1, 2, 1.0, 1)

    @classmethod
    def gaussian(cls) -> "NumberField":
        return cls((1, 0, 1), "Q(i)", 0, 1, 1, 4, 1.0, 4)

    @classmethod
    def quadratic(cls, d: int, **invariants) -> "NumberField":
        """Q(sqrt d) via x^2 - d, or x^2 - x + (1-d)/4 when d = 1 mod 4."""
        if d % 4 == 1:
            coeffs = ((1 - d) // 4, -1, 1)
        else:
            coeffs = (-d, 0, 1)
        return cls(coeffs, invariants.pop("name", f"Q(sqrt({d}))"), **invariants)


def _poly_str(c) -> str:
    terms = []
    for i in range(len(c) - 1, -1, -1):
        if c[i]:
            mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = "" if (abs(c[i]) == 1 and i) else str(abs(c[i]))
            sign = "-" if c[i] < 0 else "+"
            terms.append(f"{sign} {coef}{mon}")
    s = " ".join(terms)
    return s[2:] if s.startswith("+ ") else s


_FIELD_KEYS = {
    "name": ("name", str),
    "poly": ("coeffs", None),
    "r1": ("r1", int),
    "r2": ("r2", int),
    "h": ("class_number", int),
    "w": ("roots_of_unity", int),
    "reg": ("regulator", None),
    "disc": ("abs_disc", int),
}


def parse_field(text: str) -> NumberField:
    """Parse a field description.

    One ``key = value`` pair per line, ``#`` starts a comment. ``poly`` lists
    integer coefficients highest degree first (``poly = 1 0 1`` is x^2 + 1).
    ``reg`` accepts a closed form such as ``log(1 + sqrt(2))``.
    """
    kw = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, conv = _FIELD_KEYS[key]
        try:
            if key == "poly":
                coeffs = [int(t) for t in val.replace(",", " ").split()]
                kw[attr] = tuple(reversed(coeffs))
            elif key == "reg":
                kw[attr] = float(sympy.sympify(val))
            else:
                kw[attr] = conv(val)
        except (ValueError, TypeError, sympy.SympifyError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    if "coeffs" not in kw:
        raise ConfigError("field description needs a 'poly' line")
    return NumberField(**kw)


def load_field(path) -> NumberField:
    return parse_field(Path(path).read_text())


@dataclass(frozen=True, slots=True)
class PrimeIdeal:
    p: int
    f: int = 1
    index: int = 0
    ramified: bool = False
    e: int = 1

    @property
    def norm(self) -> int:
        return self.p ** self.f

    def __str__(self):
        return f"P({self.p},f={self.f},#{self.index})"


def factor_poly_mod_p(coeffs, p: int) -> list[tuple[int, int]]:
    """[(degree, multiplicity)] of the irreducible factors of f mod p."""
    return [(len(g) - 1, m) for g, m in polymodp.factor_mod_p(list(coeffs), p)]


def _splitting(K: NumberField, p: int) -> list[tuple[int, int]]:
    n = K.degree
    if n == 1:
        return [(1, 1)]
    if n == 2 and p != 2:
        c, b, _ = K.coeffs
        k = kronecker(b * b - 4 * c, p)
        if k == 1:
            return [(1, 1), (1, 1)]
        if k == -1:
            return [(2, 1)]
    return polymodp.factor_degrees(list(K.coeffs), p)


def primes_above(K: NumberField, p: int) -> list[PrimeIdeal]:
    out = []
    for i, (f, e) in enumerate(sorted(_splitting(K, p))):
        out.append(PrimeIdeal(p, f, i, e > 1, e))
    return out


def _degree_one_primes(K: NumberField, p: int) -> list[PrimeIdeal]:
    # only degree-1 primes can have norm <= X once p > sqrt(X)
    if K.degree <= 2 or K.poly_discriminant % p == 0:
        return [P for P in primes_above(K, p) if P.f == 1]
    f = list(K.coeffs)
    h = polymodp.sub(polymodp.powmod([0, 1], p, f, p), [0, 1], p)
    r = len(polymodp.gcd(f, h, p)) - 1
    return [PrimeIdeal(p, 1, i, False, 1) for i in range(r)]


class PrimeIdealTable:
    """All prime ideals of norm <= X, sorted by (norm, p, index)."""

    def __init__(self, K: NumberField, X: int, max_norm: int = MAX_TABLE_NORM):
        if X > max_norm:
            raise ResourceError(
                f"prime ideal table up to {X} exceeds the budget {max_norm}")
        self.field = K
        self.limit = X
        ideals = []
        r = isqrt(X)
        for p in primes_upto(X).tolist():
            above = primes_above(K, p) if p <= r else _degree_one_primes(K, p)
            ideals.extend(P for P in above if P.norm <= X)
        ideals.sort(key=lambda P: (P.norm, P.p, P.index))
        self.ideals = ideals
        self.norms = [P.norm for P in ideals]

    def __len__(self):
        return len(self.ideals)

    def upto(self, y: int) -> int:
        """Number of prime ideals of norm <= y."""
        return bisect_right(self.norms, y)


_TABLES: dict = {}


def prime_ideal_table(K: NumberField, X: int) -> PrimeIdealTable:
    for (k, lim), t in _TABLES.items():
        if k == K and lim >= X:
            return t
    t = PrimeIdealTable(K, X)
    if len(_TABLES) > 8:
        _TABLES.clear()
    _TABLES[(K, X)] = t
    return t


@dataclass(frozen=True, slots=True)
class IdealFactorization:
    """An integral ideal as a sorted tuple of (PrimeIdeal, exponent).

    The empty tuple is the unit ideal O_K.
    """

    factors: tuple = ()

    @property
    def norm(self) -> int:
        n = 1
        for P, e in self.factors:
            n *= P.norm ** e
        return n

    @property
    def mu(self) -> int:
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if len(self.factors) % 2 else 1

    @property
    def distinguishable(self) -> bool:
        fs = self.factors
        if not fs:
            return False
        return len(fs) == 1 or fs[1][0].norm > fs[0][0].norm

    @property
    def p_min(self) -> PrimeIdeal | None:
        return self.factors[0][0] if self.distinguishable else None

    @property
    def max_norm(self) -> int:
        return self.factors[-1][0].norm if self.factors else 0

    def top_primes(self) -> list[PrimeIdeal]:
        """Prime divisors attaining the maximal norm."""
        m = self.max_norm
        return [P for P, _ in self.factors if P.norm == m]

    def divisors(self) -> Iterator["IdealFactorization"]:
        def rec(i, acc):
            if i == len(self.factors):
                yield IdealFactorization(tuple(acc))
                return
            P, e = self.factors[i]
            yield from rec(i + 1, acc)
            for k in range(1, e + 1):
                yield from rec(i + 1, acc + [(P, k)])
        yield from rec(0, [])

    @classmethod
    def of(cls, *pairs) -> "IdealFactorization":
        merged = {}
        for P, e in pairs:
            merged[P] = merged.get(P, 0) + e
        fs = sorted(merged.items(), key=lambda t: (t[0].norm, t[0].p, t[0].index))
        return cls(tuple(fs))

    def __str__(self):
        if not self.factors:
            return "O_K"
        return "*".join(f"{P}" + (f"^{e}" if e > 1 else "") for P, e in self.factors)


def rational_ideal(n: int) -> IdealFactorization:
    """The ideal (n) of Z, factored by trial division."""
    pairs = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            pairs.append((PrimeIdeal(d), e))
        d += 1
    if n > 1:
        pairs.append((PrimeIdeal(n), 1))
    return IdealFactorization(tuple(pairs))


class IdealStats(NamedTuple):
    mu: int
    distinguishable: bool
    p_min: PrimeIdeal | None
    max_norm: int
    q_s: int


def ideal_stats(a: IdealFactorization, S) -> IdealStats:
    """mu, distinguishability, minimal prime, M(a) and Q_S(a).

    `S` is any container of prime ideals; M(O_K) = Q_S(O_K) = 0.
    """
    q = sum(1 for P in a.top_primes() if P in S)
    return IdealStats(a.mu, a.distinguishable, a.p_min, a.max_norm, q)


def enumerate_ideals(K: NumberField, X: int, *, squarefree: bool = False,
                     table: PrimeIdealTable | None = None
                     ) -> Iterator[IdealFactorization]:
    """Every integral ideal of norm <= X exactly once, O_K first."""
    if X < 1:
        return
    tbl = table or prime_ideal_table(K, X)
    ideals, norms = tbl.ideals, tbl.norms
    n = tbl.upto(X)

    def rec(start, norm, acc):
        yield IdealFactorization(acc)
        for j in range(start, n):
            q = norms[j]
            nn = norm * q
            if nn > X:
                break
            e = 1
            while nn <= X:
                yield from rec(j + 1, nn, acc + ((ideals[j], e),))
                if squarefree:
                    break
                nn *= q
                e += 1

    yield from rec(0, 1, ())


def smooth_count(K: NumberField, X: int, Y: int,
                 table: PrimeIdealTable | None = None) -> int:
    """Psi(X, Y): ideals of norm <= X with every prime factor of norm <= Y."""
    if X < 1:
        return 0
    tbl = table or prime_ideal_table(K, X)
    norms = tbl.norms
    hi = tbl.upto(min(X, max(Y, 0)))

    def rec(start, budget):
        total = 1
        for j in range(start, hi):
            q = norms[j]
            if q > budget:
                break
            if q * q > budget:
                # nothing past here can take a second prime factor
                total += bisect_right(norms, budget, j, hi) - j
                break
            b = budget // q
            while b >= 1:
                total += rec(j + 1, b)
                b //= q
        return total

    return rec(0, X)


def ideal_count(K: NumberField, X: int) -> int:
    """[X]_K, the number of integral ideals of norm <= X."""
    return smooth_count(K, X, X)


def residue_cK(K: NumberField) -> float:
    """Residue at s = 1 of the Dedekind zeta function."""
    if K.degree == 1:
        return 1.0
    names = ("r1", "r2", "class_number", "roots_of_unity", "regulator", "abs_disc")
    missing = [n for n in names if getattr(K, n) is None]
    if missing:
        raise ConfigError(f"field {K} lacks declared invariants: {', '.join(missing)}")
    return (2 ** K.r1 * (2 * math.pi) ** K.r2 * K.regulator * K.class_number
            / (K.roots_of_unity * math.sqrt(K.abs_disc)))
