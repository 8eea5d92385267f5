"""Cyclic fields K(n, ell) of odd prime degree n and prime conductor ell.

K is realised inside Q(zeta_ell) through its Gaussian periods

    eta_i = sum(zeta^(g^i h) for h in H),   H = n-th power residues mod ell,

which form an integral basis.  Elements are plain tuples of Python ints
(coordinates in the period basis), and the generator of Gal(K/Q) acts by the
cyclic index shift eta_i -> eta_{i+1}.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from spinlab import nt
from spinlab.errors import ParamError, PrecisionExhausted, ZeroElement

FieldElement = tuple[int, ...]

DEFAULT_MAX_PRECISION = 4096


@dataclass(frozen=True)
class FieldParams:
    n: int
    ell: int
    h: int = 1

    def validate(self) -> None:
        """Raise :class:`ParamError` naming the first standing hypothesis that fails."""
        n, ell, h = self.n, self.ell, self.h
        if n < 3 or not nt.is_prime(n):
            raise ParamError("degree_prime", f"n = {n} is not an odd prime")
        if not nt.is_prime(ell) or ell == 2:
            raise ParamError("conductor_prime", f"ell = {ell} is not an odd prime")
        if (ell - 1) % n:
            raise ParamError("divisibility", f"n does not divide ell-1 ({n} does not divide {ell - 1})")
        if pow(2, (ell - 1) // n, ell) == 1:
            raise ParamError("two_inert", f"2 is not inert: 2^((ell-1)/n) = 1 mod {ell}")
        if h < 1 or h % 2 == 0:
            raise ParamError("odd_class_number", f"h = {h} must be a positive odd integer")


def char_poly_of_matrix(a: list[list[int]]) -> list[int]:
    n = len(a)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    m = [[int(i == j) for j in range(n)] for i in range(n)]  # M_1 = I
    for k in range(1, n + 1):
        if k > 1:
            m = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
            c = coeffs[n - k + 1]
            for i in range(n):
                m[i][i] += c
        tr = sum(a[i][t] * m[t][i] for i in range(n) for t in range(n))
        q, r = divmod(-tr, k)
        if r:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        coeffs[n - k] = q
    return coeffs


def _invert_rational(cols: list[list[int]]) -> list[list[Fraction]]:
    """Inverse of the square matrix whose j-th column is cols[j]; Gauss-Jordan over Q."""
    n = len(cols)
    a = [[Fraction(cols[j][i]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [v - f * w for v, w in zip(a[r], a[c])]
    return [row[n:] for row in a]


@dataclass(frozen=True, eq=False)
class CyclicField:
    params: FieldParams
    g: int
    subgroup: tuple[int, ...]
    coset_table: tuple[int, ...]
    mult_table: tuple[tuple[tuple[int, ...], ...], ...]
    unity: FieldElement
    period_minpoly: tuple[int, ...]
    interp_polys: tuple[tuple[Fraction, ...], ...]
    trace_form: tuple[tuple[int, ...], ...]
    _sparse: tuple = field(repr=False, default=())
    _float_periods: tuple[float, ...] = field(repr=False, default=())

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def ell(self) -> int:
        return self.params.ell

    # -- elements ---------------------------------------------------------

    def eta(self, i: int) -> FieldElement:
        return tuple(int(k == i % self.n) for k in range(self.n))

    def from_int(self, c: int) -> FieldElement:
        return tuple(-c for _ in range(self.n))

    def add(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x: FieldElement) -> FieldElement:
        return tuple(-a for a in x)

    def scale(self, c: int, x: FieldElement) -> FieldElement:
        return tuple(c * a for a in x)

    def mul(self, x: FieldElement, y: FieldElement) -> FieldElement:
        out = [0] * self.n
        sparse = self._sparse
        for i, xi in enumerate(x):
            if not xi:
                continue
            row = sparse[i]
            for j, yj in enumerate(y):
                if yj:
                    c = xi * yj
                    for k, m in row[j]:
                        out[k] += c * m
        return tuple(out)

    def power(self, x: FieldElement, e: int) -> FieldElement:
        result = self.unity
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def galois_apply(self, x: FieldElement, j: int) -> FieldElement:
        """sigma^j, where sigma sends eta_i to eta_{i+1}."""
        n = self.n
        j %= n
        return tuple(x[(k - j) % n] for k in range(n))

    def mult_matrix(self, x: FieldElement) -> list[list[int]]:
        """Matrix of y -> x*y; column j holds the coordinates of x*eta_j."""
        n = self.n
        cols = [self.mul(x, self.eta(j)) for j in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def char_poly(self, x: FieldElement) -> list[int]:
        """Characteristic polynomial of multiplication by x, constant term first."""
        return char_poly_of_matrix(self.mult_matrix(x))

    def norm(self, x: FieldElement) -> int:
        c0 = self.char_poly(x)[0]
        return -c0 if self.n % 2 else c0

    def trace(self, x: FieldElement) -> int:
        # Tr(eta_i) = -1 for every period
        return -sum(x)

    def trace_pairing(self, x: FieldElement, y: FieldElement) -> int:
        tf = self.trace_form
        return sum(x[i] * tf[i][j] * y[j] for i in range(self.n) if x[i] for j in range(self.n) if y[j])

    def is_totally_positive(self, x: FieldElement) -> bool:
        """Exact test: all roots of the char poly are real, so Descartes decides positivity."""
        if not any(x):
            raise ZeroElement("total positivity of 0 is undefined")
        cp = self.char_poly(x)
        n = self.n
        return all(cp[k] != 0 and (cp[k] > 0) == ((n - k) % 2 == 0) for k in range(n + 1))

    # -- real embeddings --------------------------------------------------

    def _interval_periods(self, prec: int):
        ctx = mpmath.iv
        old = ctx.prec
        ctx.prec = prec
        try:
            two_pi = 2 * ctx.pi
            vals = []
            for i in range(self.n):
                gi = pow(self.g, i, self.ell)
                vals.append(sum((ctx.cos(two_pi * ((gi * h) % self.ell) / self.ell) for h in self.subgroup), ctx.mpf(0)))
            return vals
        finally:
            ctx.prec = old

    def embeddings(self, x: FieldElement) -> list[float]:
        """Approximate real embeddings (floats, uncertified), in embedding order t = 0..n-1."""
        e = self._float_periods
        n = self.n
        return [math.fsum(x[i] * e[(i + t) % n] for i in range(n)) for t in range(n)]

    def signature(self, x: FieldElement, max_precision: int | None = None) -> tuple[int, ...]:
        """Certified signs (+1/-1) of x under the n embeddings.

        Embedding t sends eta_i to the base-embedding value of eta_{i+t}.  A
        double-precision pass is accepted when every value clears its error
        bound; otherwise interval arithmetic is retried from 64 bits, doubling
        up to ``max_precision`` (env ``SPINLAB_MAX_PRECISION``, default 4096).
        """
        if not any(x):
            raise ZeroElement("signature of 0 is undefined")
        n = self.n
        e = self._float_periods
        signs = []
        for t in range(n):
            terms = [x[i] * e[(i + t) % n] for i in range(n)]
            val = math.fsum(terms)
            bound = (n + 4) * 2.0**-50 * sum(abs(v) for v in terms)
            if abs(val) <= bound:
                break
            signs.append(1 if val > 0 else -1)
        else:
            return tuple(signs)

        if max_precision is None:
            max_precision = int(os.environ.get("SPINLAB_MAX_PRECISION", DEFAULT_MAX_PRECISION))
        prec = 64
        while prec <= max_precision:
            vals = self._interval_periods(prec)
            old = mpmath.iv.prec
            mpmath.iv.prec = prec
            try:
                signs = []
                for t in range(n):
                    v = sum((x[i] * vals[(i + t) % n] for i in range(n)), mpmath.iv.mpf(0))
                    if v.a > 0:
                        signs.append(1)
                    elif v.b < 0:
                        signs.append(-1)
                    else:
                        break
                else:
                    return tuple(signs)
            finally:
                mpmath.iv.prec = old
            prec *= 2
        raise PrecisionExhausted(f"could not certify embedding signs within {max_precision} bits")


def build_field(params: FieldParams) -> CyclicField:
    """Construct K(n, ell) with its exact period multiplication table."""
    params.validate()
    n, ell = params.n, params.ell
    g = nt.primitive_root(ell)
    f = (ell - 1) // n
    coset = [-1] * ell
    x = 1
    for e in range(ell - 1):
        coset[x] = e % n
        x = x * g % ell
    subgroup = tuple(sorted(pow(g, n * k, ell) for k in range(f)))

    table = []
    for i in range(n):
        gi = pow(g, i, ell)
        row = []
        for j in range(n):
            gj = pow(g, j, ell)
            v = [0] * n
            for h in subgroup:
                s = (gi + gj * h) % ell
                if s == 0:
                    # constant |H| = |H| * (-sum eta)
                    for k in range(n):
                        v[k] -= f
                else:
                    v[coset[s]] += 1
            row.append(tuple(v))
        table.append(tuple(row))
    mult_table = tuple(table)
    sparse = tuple(tuple(tuple((k, m) for k, m in enumerate(mult_table[i][j]) if m) for j in range(n)) for i in range(n))
    unity = tuple(-1 for _ in range(n))

    # double-precision periods for the uncertified fast path of signature()
    with mpmath.workprec(80):
        float_periods = tuple(
            float(sum(mpmath.cos(2 * mpmath.pi * ((pow(g, i, ell) * h) % ell) / ell) for h in subgroup))
            for i in range(n)
        )

    # provisional object so element arithmetic is available for the derived data
    proto = CyclicField(
        params=params, g=g, subgroup=subgroup, coset_table=tuple(coset), mult_table=mult_table, unity=unity,
        period_minpoly=(), interp_polys=(), trace_form=(), _sparse=sparse, _float_periods=float_periods,
    )
    eta0 = proto.eta(0)
    minpoly = tuple(proto.char_poly(eta0))
    powers = [unity]
    for _ in range(1, n):
        powers.append(proto.mul(powers[-1], eta0))
    inv = _invert_rational([list(p) for p in powers])
    # eta_i = sum_k inv[k][i] eta0^k
    interp = tuple(tuple(inv[k][i] for k in range(n)) for i in range(n))
    trace_form = tuple(tuple(-sum(mult_table[i][j]) for j in range(n)) for i in range(n))
    return CyclicField(
        params=params, g=g, subgroup=subgroup, coset_table=tuple(coset), mult_table=mult_table, unity=unity,
        period_minpoly=minpoly, interp_polys=interp, trace_form=trace_form, _sparse=sparse,
        _float_periods=float_periods,
    )
