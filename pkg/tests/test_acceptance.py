"""Acceptance criteria, one test per criterion.

Run with `pytest tests/test_acceptance.py`; a PASS/FAIL line per criterion is
printed in the terminal summary. ALLADI_SLOW=1 adds the 10^8 Beatty value.
"""
import functools
import math
import os
import random
import time

import mpmath
import numpy as np
import pytest

from alladi.arith import primes_upto
from alladi.elliptic import Curve, batch_traces
from alladi.numfield import (NumberField, enumerate_ideals, ideal_count,
                             ideal_stats, residue_cK, smooth_count)
from alladi.primesets import Beatty, FixedReal, beatty_contains, parse_set
from alladi.sums import (density_diagnostics, duality_sweep, partial_sum,
                         q_sum, q_sum_by_smooth_counts)

from conftest import ACCEPTANCE, rational_running_sums
from test_sums import VARIANTS

Q = NumberField.rationals()
QI = NumberField.gaussian()


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                ACCEPTANCE[number] = (False, title, f"{type(exc).__name__}: {exc}".splitlines()[0])
                raise
            ACCEPTANCE[number] = (True, title,
                                  f"{detail or ''} [{time.perf_counter() - t0:.1f}s]".strip())
        return run
    return wrap


BEATTY_TABLE = {10: 0.33333, 100: 0.23915, 1000: 0.31849, 10 ** 4: 0.34409,
                10 ** 5: 0.34209, 10 ** 6: 0.33181, 10 ** 7: 0.32456}


@criterion("1", "Beatty-pi partial sums through 10^7 within 2e-5, <= 60 s")
def test_c1_beatty_table():
    t0 = time.perf_counter()
    tr = partial_sum(Q, parse_set("beatty:pi"), 10 ** 7, list(BEATTY_TABLE))
    elapsed = time.perf_counter() - t0
    worst = 0.0
    for c in tr.checkpoints:
        err = abs(c.value - BEATTY_TABLE[c.x])
        worst = max(worst, err)
        assert err <= 2e-5, f"S({c.x}) = {c.value:.7f}, expected {BEATTY_TABLE[c.x]}"
    assert elapsed <= 60, f"took {elapsed:.1f}s"
    return f"max deviation {worst:.1e}, S(10^7) = {tr.value_at(10 ** 7):.7f}"


@pytest.mark.skipif(not os.environ.get("ALLADI_SLOW"), reason="set ALLADI_SLOW=1")
@criterion("1b", "extended: Beatty-pi S(10^8) within 2e-5 of 0.32117 (non-gating)")
def test_c1b_beatty_1e8():
    v = partial_sum(Q, parse_set("beatty:pi"), 10 ** 8).value_at(10 ** 8)
    assert abs(v - 0.32117) <= 2e-5, f"S(10^8) = {v:.7f}"
    return f"S(10^8) = {v:.7f}"


@criterion("2", "Sato-Tate sum at 10^6 within 1e-4 of 0.60805; measure within 1e-5 of 0.60900")
def test_c2_sato_tate():
    t0 = time.perf_counter()
    E = Curve(-1, 1)
    # bad primes 2 and 23 kept with point-count traces, as the CLI default
    S = parse_set("sato-tate:pi/3,2*pi/3", curve=E, bad_primes="count")
    v = partial_sum(Q, S, 10 ** 6).value_at(10 ** 6)
    assert abs(v - 0.60805) <= 1e-4, f"sum = {v:.7f}"
    assert abs(S.density - 0.60900) <= 1e-5, f"measure = {S.density:.7f}"
    assert time.perf_counter() - t0 <= 300
    return f"sum {v:.6f}, measure {S.density:.6f}"


@criterion("3", "duality identity exact: Q to 10^4, Q(i) to norm 2000, three sets")
def test_c3_duality():
    n = 0
    for text in ("all", "ap:4:1", "finite:2,5"):
        S = parse_set(text)
        assert duality_sweep(Q, S, 10 ** 4) == [], text
        assert duality_sweep(QI, S, 2000) == [], text
        n += 1
    return f"{n} sets, 0 violations"


@criterion("4", "q_sum(Q, AP(4,1), 10^6)/(0.5e6) in [0.95, 1.05]; two paths agree at 10^4")
def test_c4_q_sum():
    r = q_sum(Q, parse_set("ap:4:1"), 10 ** 6) / (0.5 * 10 ** 6)
    assert 0.95 <= r <= 1.05, f"ratio {r}"
    for K in (Q, QI):
        for text in ("all", "ap:4:1"):
            S = parse_set(text)
            direct = sum(ideal_stats(a, S).q_s for a in enumerate_ideals(K, 10 ** 4))
            assert direct == q_sum_by_smooth_counts(K, S, 10 ** 4), (K, text)
    return f"ratio {r:.5f}"


@criterion("5", "|[10^6]_Q(i)/10^6 - pi/4| < 0.02; residue_cK(Q) = 1")
def test_c5_class_number_formula():
    slope = ideal_count(QI, 10 ** 6) / 10 ** 6
    assert abs(slope - math.pi / 4) < 0.02
    assert residue_cK(Q) == 1
    assert residue_cK(QI) == pytest.approx(math.pi / 4)
    return f"slope {slope:.6f}"


@criterion("6", "-sum mu(n)/n, 2 <= n <= 10^7, within 0.05 of 1 with shrinking error")
def test_c6_prime_number_theorem_form():
    tr = partial_sum(Q, parse_set("all"), 10 ** 7, [10 ** 5, 10 ** 6])
    errs = [abs(c.value - 1) for c in tr.checkpoints]
    assert errs[-1] < 0.05
    assert errs == sorted(errs, reverse=True) or max(errs) < 0.05
    return "errors " + ", ".join(f"{e:.1e}" for e in errs)


@criterion("7", "sieve-path sums equal the divisor oracle for X <= 10^4 to 1e-12, every variant")
def test_c7_oracle_equivalence():
    E = Curve(-1, 1)
    grid = list(range(2, 10 ** 4 + 1, 7)) + [10 ** 4]
    worst = 0.0
    for text, member in VARIANTS.items():
        ref = rational_running_sums(10 ** 4, member)
        tr = partial_sum(Q, parse_set(text, curve=E), 10 ** 4, grid)
        for c in tr.checkpoints:
            err = abs(c.value - float(ref[c.x]))
            worst = max(worst, err)
            assert err <= 1e-12, (text, c.x, err)
    return f"{len(VARIANTS)} variants, max deviation {worst:.1e}"


@criterion("8", "property suites: Hasse, Beatty scan, Psi monotone, e_S/v_S on grids")
def test_c8_properties():
    E = Curve(-1, 1)
    assert all(r.a_p ** 2 <= 4 * r.p for r in batch_traces(E, 10 ** 4))
    # Beatty membership against a direct scan of floor(pi n)
    with mpmath.workdps(60):
        pi = +mpmath.pi
        scan = {int(mpmath.floor(pi * n)) for n in range(1, int(10 ** 5 / pi) + 2)}
    a = FixedReal.named("pi")
    assert all(beatty_contains(a, m) == (m in scan) for m in range(1, 10 ** 5 + 1))
    mask = Beatty(a).mask(np.arange(1, 10 ** 5 + 1))
    assert all(bool(mask[m - 1]) == (m in scan) for m in range(1, 10 ** 5 + 1))
    rng = random.Random(11)
    for _ in range(60):
        X, Y = rng.randint(1, 5000), rng.randint(1, 5000)
        base = smooth_count(QI, X, Y)
        assert smooth_count(QI, X + rng.randint(0, 300), Y) >= base
        assert smooth_count(QI, X, Y + rng.randint(0, 300)) >= base
    for text in ("all", "ap:4:1", "beatty:pi"):
        d = density_diagnostics(Q, parse_set(text), 10 ** 6,
                                [10, 100, 10 ** 3, 10 ** 4, 10 ** 5])
        es = [r.e_s for r in d.rows]
        vs = [r.v_s_proxy for r in d.rows]
        assert es == sorted(es) and vs == sorted(vs, reverse=True), text
    assert primes_upto(10 ** 6).size == 78498
    return "all suites green"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
