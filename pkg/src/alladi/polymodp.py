"""Dense polynomials over F_p and their factorisation.

Polynomials are lists of ints, lowest degree first, with no trailing zeros;
the zero polynomial is the empty list.
"""
from __future__ import annotations

import random

SEED = 0x5EED


def trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def reduce(f, p):
    return trim([c % p for c in f])


def degree(f) -> int:
    return len(f) - 1


def sub(f, g, p):
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p
           for i in range(n)]
    return trim(out)


def mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim([c % p for c in out])


def divmod_(f, g, p):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    if len(f) <= dg:
        return [], f
    q = [0] * (len(f) - dg)
    for k in range(len(f) - 1, dg - 1, -1):
        c = f[k] * inv % p
        if c:
            q[k - dg] = c
            for j in range(dg + 1):
                f[k - dg + j] = (f[k - dg + j] - c * g[j]) % p
    return trim(q), trim(f[:dg])


def rem(f, g, p):
    return divmod_(f, g, p)[1]


def quo(f, g, p):
    return divmod_(f, g, p)[0]


def monic(f, p):
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return [c * inv % p for c in f]


def gcd(f, g, p):
    while g:
        f, g = g, rem(f, g, p)
    return monic(f, p)


def deriv(f, p):
    return trim([i * f[i] % p for i in range(1, len(f))])


def powmod(f, e, g, p):
    result = [1]
    base = rem(f, g, p)
    while e:
        if e & 1:
            result = rem(mul(result, base, p), g, p)
        e >>= 1
        if e:
            base = rem(mul(base, base, p), g, p)
    return result


def _pth_root(f, p):
    return [f[i] for i in range(0, len(f), p)]


def squarefree_decomposition(f, p):
    """[(g, m)] with f = prod g^m, each g squarefree, monic, pairwise coprime."""
    f = monic(reduce(list(f), p), p)
    out = []
    if len(f) <= 1:
        return out
    df = deriv(f, p)
    if not df:
        return [(g, m * p) for g, m in squarefree_decomposition(_pth_root(f, p), p)]
    c = gcd(f, df, p)
    w = quo(f, c, p)
    i = 1
    while len(w) > 1:
        y = gcd(w, c, p)
        z = quo(w, y, p)
        if len(z) > 1:
            out.append((z, i))
        i += 1
        w = y
        c = quo(c, y, p)
    if len(c) > 1:
        out.extend((g, m * p) for g, m in
                   squarefree_decomposition(_pth_root(c, p), p))
    return out


def distinct_degree(f, p):
    """Split a monic squarefree f into [(product of degree-d factors, d)]."""
    out = []
    x = [0, 1]
    h = x
    g = f
    d = 1
    while len(g) - 1 >= 2 * d:
        h = powmod(h, p, g, p)
        t = gcd(g, sub(h, x, p), p)
        if len(t) > 1:
            out.append((t, d))
            g = quo(g, t, p)
            h = rem(h, g, p)
        d += 1
    if len(g) > 1:
        out.append((g, len(g) - 1))
    return out


def equal_degree(f, d, p, rng):
    """Cantor-Zassenhaus splitting of f, a product of degree-d irreducibles."""
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = trim([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        if p == 2:
            # trace map a + a^2 + ... + a^(2^(d-1))
            t, b = list(a), list(a)
            for _ in range(d - 1):
                b = rem(mul(b, b, p), f, p)
                t = sub(t, [(-c) % p for c in b], p)
        else:
            t = sub(powmod(a, (p ** d - 1) // 2, f, p), [1], p)
        g = gcd(f, t, p)
        if 1 < len(g) < len(f):
            return (equal_degree(g, d, p, rng)
                    + equal_degree(quo(f, g, p), d, p, rng))


def factor_mod_p(f, p, seed=SEED):
    """Full factorisation of a monic integer polynomial modulo p.

    Returns [(irreducible monic factor, multiplicity)] sorted by
    (degree, multiplicity, coefficients).
    """
    rng = random.Random(seed)
    out = []
    for g, m in squarefree_decomposition(f, p):
        for h, d in distinct_degree(g, p):
            out.extend((k, m) for k in equal_degree(h, d, p, rng))
    out.sort(key=lambda t: (len(t[0]), t[1], t[0]))
    return out


def factor_degrees(f, p):
    """[(degree, multiplicity)] of the irreducible factors of f mod p.

    Degrees follow from the distinct-degree split alone, so this skips the
    randomised equal-degree step.
    """
    out = []
    for g, m in squarefree_decomposition(f, p):
        for h, d in distinct_degree(g, p):
            out.extend([(d, m)] * ((len(h) - 1) // d))
    out.sort()
    return out
