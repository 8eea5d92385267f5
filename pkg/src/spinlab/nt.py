"""Elementary number theory: primality, primitive roots, sieving, polynomials mod p and over GF(2).

Polynomials mod p are lists of ints, constant term first.  Polynomials over
GF(2) are Python ints used as bit vectors (bit i = coefficient of x^i).
"""

from __future__ import annotations

import random

import numpy as np

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors by trial division (n is a conductor-sized integer)."""
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(p: int) -> int:
    """Smallest positive primitive root modulo the odd prime p."""
    qs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise ValueError(f"no primitive root mod {p}")


def primes_up_to(bound: int) -> np.ndarray:
    """All primes p <= bound, ascending."""
    if bound < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for q in range(3, int(bound**0.5) + 1, 2):
        if sieve[q]:
            sieve[q * q :: 2 * q] = False
    return np.flatnonzero(sieve).astype(np.int64)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for odd prime p, as -1, 0 or 1."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# ---------------------------------------------------------------- polys mod p


def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mod_p(f, p: int) -> list[int]:
    return _trim([c % p for c in f])


def _divmod(f: list[int], g: list[int], p: int) -> tuple[list[int], list[int]]:
    f = list(f)
    q = [0] * max(len(f) - len(g) + 1, 0)
    inv = pow(g[-1], -1, p)
    dg = len(g) - 1
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] * inv % p
        if c:
            q[i - dg] = c
            for j in range(dg + 1):
                f[i - dg + j] = (f[i - dg + j] - c * g[j]) % p
    return q, _trim(f[:dg] if dg else [])


def _mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _divmod([c % p for c in out], m, p)[1]


def _powmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _divmod(base, m, p)[1]
    while e:
        if e & 1:
            result = _mulmod(result, base, m, p)
        base = _mulmod(base, base, m, p)
        e >>= 1
    return result


def _gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def roots_mod_p(f, p: int, rng: random.Random | None = None) -> list[int]:
    """Distinct roots in F_p of the integer polynomial f, ascending.

    Uses gcd(f, x^p - x) followed by Cantor-Zassenhaus splitting; the random
    splitting elements come from ``rng`` (seeded from p when omitted) so the
    result, which is sorted anyway, is reproducible.
    """
    f = poly_mod_p(f, p)
    if len(f) <= 1:
        return []
    if p == 2:
        return [r for r in (0, 1) if sum(c * r**i for i, c in enumerate(f)) % 2 == 0]
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]
    xp = _powmod([0, 1], p, f, p)
    g = _gcd(f, _sub(xp, [0, 1], p), p)
    rng = rng or random.Random(p)
    roots: list[int] = []
    stack = [g]
    while stack:
        h = stack.pop()
        d = len(h) - 1
        if d <= 0:
            continue
        if d == 1:
            roots.append((-h[0]) * pow(h[1], -1, p) % p)
            continue
        while True:
            a = rng.randrange(p)
            w = _powmod([a, 1], (p - 1) // 2, h, p)
            k = _gcd(h, _sub(w, [1], p), p)
            if 0 < len(k) - 1 < d:
                stack.append(k)
                stack.append(_divmod(h, k, p)[0])
                break
    return sorted(roots)


def hensel_lift_root(f, r: int, p: int, k: int) -> int:
    """Lift a simple root r of f mod p to a root mod p^k."""
    mod = p
    df = [i * c for i, c in enumerate(f)][1:]
    while mod < p**k:
        mod = min(mod * mod, p**k)
        fv = sum(c * pow(r, i, mod) for i, c in enumerate(f)) % mod
        dv = sum(c * pow(r, i, mod) for i, c in enumerate(df)) % mod
        r = (r - fv * pow(dv, -1, mod)) % mod
    return r


# ---------------------------------------------------------------- GF(2)[x]


def gf2_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2_mod(a, b)
    return a


def gf2_is_irreducible(m: int) -> bool:
    """Rabin-style test: m of degree d is irreducible iff gcd(x^(2^k) - x, m) = 1 for k <= d/2."""
    d = m.bit_length() - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    x = 0b10
    t = x
    for _ in range(d // 2):
        t = gf2_mod(gf2_mul(t, t), m)
        if gf2_gcd(m, t ^ x) != 1:
            return False
    return True
