import math
from collections import Counter

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from alladi.errors import ConfigError, ResourceError
from alladi.numfield import (IdealFactorization, NumberField, PrimeIdeal,
                             PrimeIdealTable, enumerate_ideals, ideal_count,
                             ideal_stats, parse_field, primes_above,
                             rational_ideal, residue_cK, smooth_count)
from alladi.primesets import AllPrimes, ArithmeticProgression

from conftest import gaussian_ideals_upto

SQRT2 = """
# real quadratic field
name = Q(sqrt2)
poly = 1 0 -2
r1 = 2
r2 = 0
h = 1
w = 2
reg = log(1 + sqrt(2))
disc = 8
"""

CUBIC = "name = cubic23\npoly = 1 0 -1 -1\nr1 = 1\nr2 = 1\n"


def dirichlet_ideal_count(D: int, X: int) -> int:
    """Ideals of norm <= X in the maximal order of discriminant D."""
    return sum(_kron(D, d) * (X // d) for d in range(1, X + 1))


def _kron(D, n):
    # Kronecker symbol via sympy's Jacobi symbol plus the rule at 2
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    r = sympy.jacobi_symbol(D % n, n) if n > 1 else 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            r = -r
    return r


def test_parse_field_file():
    K = parse_field(SQRT2)
    assert K.coeffs == (-2, 0, 1) and K.degree == 2
    assert K.regulator == pytest.approx(math.log(1 + math.sqrt(2)))
    # 2 * log(1 + sqrt 2) / sqrt 8
    assert residue_cK(K) == pytest.approx(0.62323, abs=1e-5)
    assert abs(ideal_count(K, 10 ** 6) / 10 ** 6 - residue_cK(K)) < 1e-3


@pytest.mark.parametrize("text", [
    "poly = 2 0 1\nr1 = 0\nr2 = 1",        # not monic
    "poly = 1 0 -1\nr1 = 2\nr2 = 0",       # reducible
    "poly = 1 0 1\nr1 = 2\nr2 = 0",        # signature mismatch
    "r1 = 1",                              # no polynomial
    "poly = 1 0 1\nfoo = 3",               # unknown key
    "poly = 1 x 1",                        # bad integer
])
def test_parse_field_rejects(text):
    with pytest.raises(ConfigError):
        parse_field(text)


def test_residue():
    assert residue_cK(NumberField.rationals()) == 1
    assert residue_cK(NumberField.gaussian()) == pytest.approx(math.pi / 4, rel=1e-15)
    with pytest.raises(ConfigError):
        residue_cK(parse_field(CUBIC))


@pytest.mark.parametrize("K", [NumberField.gaussian(), parse_field(SQRT2),
                               parse_field(CUBIC), NumberField.quadratic(-5, r1=0, r2=1)])
def test_sum_ef_equals_degree(K):
    for p in sympy.primerange(2, 10 ** 4):
        assert sum(P.e * P.f for P in primes_above(K, p)) == K.degree


def test_cubic_splitting_against_sympy():
    K = parse_field(CUBIC)
    x = sympy.Symbol("x")
    for p in sympy.primerange(2, 600):
        _, facs = sympy.factor_list(x ** 3 - x - 1, modulus=p)
        want = sorted((sympy.degree(g, x), e) for g, e in facs)
        got = sorted((P.f, P.e) for P in primes_above(K, p))
        assert got == want, p


def test_gaussian_splitting():
    K = NumberField.gaussian()
    assert [(P.f, P.e, P.ramified) for P in primes_above(K, 2)] == [(1, 2, True)]
    assert len(primes_above(K, 13)) == 2
    assert [P.f for P in primes_above(K, 7)] == [2]


def test_enumeration_over_Q_is_every_integer():
    norms = sorted(a.norm for a in enumerate_ideals(NumberField.rationals(), 10 ** 5))
    assert norms == list(range(1, 10 ** 5 + 1))


def test_gaussian_ideals_by_norm():
    X = 3000
    got = Counter(a.norm for a in enumerate_ideals(NumberField.gaussian(), X))
    want = Counter(a * a + b * b for a, b in gaussian_ideals_upto(X))
    want[1] = 1
    assert got == want


@pytest.mark.parametrize("K,D", [(NumberField.gaussian(), -4),
                                 (NumberField.quadratic(-5, r1=0, r2=1), -20),
                                 (parse_field(SQRT2), 8)])
def test_ideal_count_dirichlet(K, D):
    X = 5000
    assert ideal_count(K, X) == dirichlet_ideal_count(D, X)
    assert sum(1 for _ in enumerate_ideals(K, X)) == ideal_count(K, X)


def test_enumeration_unique_and_squarefree():
    K = NumberField.gaussian()
    seen = set()
    for a in enumerate_ideals(K, 2000):
        assert a.factors not in seen
        seen.add(a.factors)
    sf = [a for a in enumerate_ideals(K, 2000, squarefree=True)]
    assert all(a.mu != 0 for a in sf)
    assert len(sf) == sum(1 for a in enumerate_ideals(K, 2000) if a.mu != 0)


def test_gaussian_density_of_ideals():
    K = NumberField.gaussian()
    assert abs(ideal_count(K, 10 ** 6) / 10 ** 6 - math.pi / 4) < 0.02


def test_harmonic_sum_minus_log_is_bounded():
    K = NumberField.gaussian()
    c = residue_cK(K)
    diffs = []
    for X in (10 ** 3, 10 ** 4, 10 ** 5):
        h = math.fsum(1 / a.norm for a in enumerate_ideals(K, X))
        diffs.append(h - c * math.log(X))
    assert max(diffs) - min(diffs) < 1.0


def test_smooth_count_oracle():
    K = NumberField.gaussian()
    X = 3000
    ideals = list(enumerate_ideals(K, X))
    for Y in (1, 2, 5, 13, 50, 400, 3000):
        want = sum(1 for a in ideals if a.max_norm <= Y)
        assert smooth_count(K, X, Y) == want


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4000), st.integers(1, 4000), st.integers(0, 500), st.integers(0, 500))
def test_smooth_count_monotone(X, Y, dx, dy):
    K = NumberField.gaussian()
    a = smooth_count(K, X, Y)
    assert smooth_count(K, X + dx, Y) >= a
    assert smooth_count(K, X, Y + dy) >= a


def test_ideal_stats():
    P2, P3, P5 = PrimeIdeal(2), PrimeIdeal(3), PrimeIdeal(5)
    a = IdealFactorization.of((P2, 1), (P5, 1), (P3, 1))
    st_ = ideal_stats(a, ArithmeticProgression(4, 1))
    assert (st_.mu, st_.distinguishable, st_.p_min, st_.max_norm, st_.q_s) == (-1, True, P2, 5, 1)
    unit = ideal_stats(IdealFactorization(), AllPrimes())
    assert (unit.mu, unit.distinguishable, unit.max_norm, unit.q_s) == (1, False, 0, 0)
    # two primes of equal minimal norm
    A, B = PrimeIdeal(5, 1, 0), PrimeIdeal(5, 1, 1)
    b = IdealFactorization.of((A, 1), (B, 1))
    assert not b.distinguishable and b.p_min is None
    assert ideal_stats(b, AllPrimes()).q_s == 2
    assert rational_ideal(360).norm == 360
    assert len(list(rational_ideal(360).divisors())) == 24


def test_table_budget():
    with pytest.raises(ResourceError):
        PrimeIdealTable(NumberField.gaussian(), 10 ** 9, max_norm=10 ** 6)
