"""Exact lattice reduction and short-vector enumeration under an integral quadratic form.

Lattices are given by integer basis rows together with a positive definite
integer form ``q`` (for ideals of K this is the trace form Tr(xy)).  No
floating point decides anything: LLL is Cohen's all-integer variant, and the
Fincke-Pohst enumeration uses floats only to widen candidate ranges, which
are then filtered with exact rational arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Sequence

Vector = list[int]
Matrix = list[list[int]]


def form(q: Sequence[Sequence[int]], x: Sequence[int], y: Sequence[int]) -> int:
    n = len(x)
    total = 0
    for i in range(n):
        xi = x[i]
        if xi:
            row = q[i]
            total += xi * sum(row[j] * y[j] for j in range(n) if y[j])
    return total


def gram(basis: Sequence[Sequence[int]], q: Sequence[Sequence[int]]) -> Matrix:
    m = len(basis)
    out = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            out[i][j] = out[j][i] = form(q, basis[i], basis[j])
    return out


def lll(basis: Sequence[Sequence[int]], q: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> Matrix:
    """Integral LLL (Cohen, Alg. 2.6.7) of the rows of ``basis`` w.r.t. the form q.

    All Gram-Schmidt data are kept as integers d_i and lambda_{k,j}; the
    Lovasz test 4 d_k d_{k-2} < 3 d_{k-1}^2 - 4 lambda^2 is exact (delta = 3/4).
    """
    b = [list(v) for v in basis]
    m = len(b)
    if m <= 1:
        return b
    num, den = delta.numerator, delta.denominator
    d = [0] * (m + 1)  # d[0] = 1, d[i] for i = 1..m (1-based)
    lam = [[0] * m for _ in range(m)]
    d[0] = 1
    d[1] = form(q, b[0], b[0])
    k, kmax = 1, 0  # 0-based k

    def red(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l + 1]:
            qq = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - qq * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= qq * d[l + 1]
            for i in range(l):
                lam[k][i] -= qq * lam[l][i]

    def swap(k: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        bb = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (bb * t + lm * lam[i][k]) // d[k + 1]
        d[k] = bb

    while k < m:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = form(q, b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ValueError("basis vectors are linearly dependent")
                    d[k + 1] = u
        red(k, k - 1)
        # Lovasz: d_k d_{k-2} * den < num * d_{k-1}^2 - den * lambda^2   (1-based indices)
        if den * d[k + 1] * d[k - 1] < num * d[k] * d[k] - den * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


def is_lll_reduced(basis: Sequence[Sequence[int]], q: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> bool:
    """Exact rational check of size reduction and the Lovasz condition."""
    g = gram(basis, q)
    m = len(g)
    mu = [[Fraction(0)] * m for _ in range(m)]
    bstar = [Fraction(0)] * m
    for i in range(m):
        for j in range(i):
            mu[i][j] = (Fraction(g[i][j]) - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))) / bstar[j]
        bstar[i] = Fraction(g[i][i]) - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
    for i in range(m):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    return all(bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1] for k in range(1, m))


def _completion(g: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Quadratic completion: Q(x) = sum_i a_ii (x_i + sum_{j>i} a_ij x_j)^2."""
    m = len(g)
    a = [[Fraction(v) for v in row] for row in g]
    for i in range(m):
        for j in range(i + 1, m):
            a[j][i] = a[i][j]
            a[i][j] = a[i][j] / a[i][i]
        for k in range(i + 1, m):
            for l in range(k, m):
                a[k][l] -= a[k][i] * a[i][l]
    return a


def enumerate_short(g: Sequence[Sequence[int]], radius: int, min_norm: int = 1) -> Iterator[tuple[int, Vector]]:
    """Yield (Q(x), x) for every nonzero x with min_norm <= Q(x) <= radius, one of each +-x pair.

    ``g`` is the (integer, positive definite) Gram matrix; x are coefficient
    vectors on the corresponding basis.  Order of output is unspecified.
    """
    m = len(g)
    a = _completion(g)
    diag = [a[i][i] for i in range(m)]
    x = [0] * m
    bound = Fraction(radius)

    def rec(i: int, remaining: Fraction) -> Iterator[tuple[int, Vector]]:
        c = -sum((a[i][j] * x[j] for j in range(i + 1, m)), Fraction(0))
        span = math.sqrt(float(remaining / diag[i])) if remaining > 0 else 0.0
        cf = float(c)
        lo, hi = math.floor(cf - span) - 1, math.ceil(cf + span) + 1
        for xi in range(lo, hi + 1):
            t = diag[i] * (xi - c) ** 2
            if t > remaining:
                continue
            x[i] = xi
            rem = remaining - t
            if i == 0:
                if any(x):
                    # canonical sign: last nonzero coordinate positive
                    last = next(v for v in reversed(x) if v)
                    if last > 0:
                        val = bound - rem
                        if val >= min_norm:
                            yield int(val), list(x)
            else:
                yield from rec(i - 1, rem)
        x[i] = 0

    yield from rec(m - 1, bound)


def combine(coeffs: Sequence[int], basis: Sequence[Sequence[int]]) -> Vector:
    n = len(basis[0])
    out = [0] * n
    for c, row in zip(coeffs, basis):
        if c:
            for k in range(n):
                out[k] += c * row[k]
    return out
