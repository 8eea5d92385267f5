"""Arithmetic in O/8 for an unramified dyadic ring of degree n.

Two flavours share one class:

* :func:`field_ring` reduces the period basis of a :class:`CyclicField`;
  Galois acts by coordinate shift.
* :func:`synthetic_ring` is Z[x]/(8, f) for an irreducible f over GF(2);
  Galois is generated by the Hensel-lifted Frobenius x -> x^2 + O(2).

Elements are tuples of n ints in 0..7 (``Ring8Element``).  O/4 and O/2 are
handled by reducing those tuples further, which is all the package needs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from spinlab import nt
from spinlab.errors import NotAUnit, ReduciblePolynomial
from spinlab.field_core import CyclicField, FieldElement

Ring8Element = tuple[int, ...]

# Conway-style defaults; any irreducible of the right degree works.
DEFAULT_MODULI = {
    1: 0b11,  # x + 1
    3: 0b1011,  # x^3 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    7: 0b10000011,  # x^7 + x + 1
    11: 0b100000000101,  # x^11 + x^2 + 1
    13: 0b10000000011011,  # x^13 + x^4 + x^3 + x + 1
}


@dataclass(frozen=True, eq=False)
class Ring8:
    n: int
    mult_table_mod8: tuple[tuple[tuple[int, ...], ...], ...]
    one: Ring8Element
    galois_matrices: tuple[tuple[tuple[int, ...], ...], ...]
    field: CyclicField | None = None
    modulus_poly: int | None = None
    _sparse: tuple = dataclasses.field(repr=False, default=())
    _cache: dict = dataclasses.field(repr=False, default_factory=dict, compare=False)

    @property
    def unit_count(self) -> int:
        return (2**self.n - 1) * 4**self.n

    def basis(self, i: int) -> Ring8Element:
        return tuple(int(k == i) for k in range(self.n))

    @property
    def zero(self) -> Ring8Element:
        return (0,) * self.n

    def scalar(self, c: int) -> Ring8Element:
        return tuple(c * a % 8 for a in self.one)

    def reduce(self, x: FieldElement) -> Ring8Element:
        return tuple(a % 8 for a in x)

    def add(self, x: Ring8Element, y: Ring8Element) -> Ring8Element:
        return tuple((a + b) % 8 for a, b in zip(x, y))

    def sub(self, x: Ring8Element, y: Ring8Element) -> Ring8Element:
        return tuple((a - b) % 8 for a, b in zip(x, y))

    def neg(self, x: Ring8Element) -> Ring8Element:
        return tuple(-a % 8 for a in x)

    def mul(self, x: Ring8Element, y: Ring8Element) -> Ring8Element:
        if self.n > 8:
            flat = self._cache.get("flat")
            if flat is None:
                flat = self.table_array.reshape(self.n * self.n, self.n)
                self._cache["flat"] = flat
            v = np.outer(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)).ravel() @ flat
            return tuple((v % 8).tolist())
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
        return tuple(a % 8 for a in out)

    def power(self, x: Ring8Element, e: int) -> Ring8Element:
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def mod2(self, x: Ring8Element) -> Ring8Element:
        return tuple(a & 1 for a in x)

    def is_unit(self, x: Ring8Element) -> bool:
        """O/2 is a field, so x is a unit iff it is nonzero mod 2."""
        return any(a & 1 for a in x)

    def inverse(self, u: Ring8Element) -> Ring8Element:
        """Inverse mod 8: residue-field inverse u^(2^n-2), then two Newton steps."""
        if not self.is_unit(u):
            raise NotAUnit(f"{u} is not a unit mod 2")
        y = self.power(u, 2**self.n - 2)
        two = self.scalar(2)
        for _ in range(2):
            y = self.mul(y, self.sub(two, self.mul(u, y)))
        return y

    def galois(self, x: Ring8Element, j: int) -> Ring8Element:
        j %= self.n
        if self.field is not None:
            n = self.n
            return tuple(x[(k - j) % n] for k in range(n))
        m = self.galois_matrices[j]
        return tuple(sum(m[k][i] * x[i] for i in range(self.n)) % 8 for k in range(self.n))

    def residue_trace(self, xbar: Ring8Element) -> int:
        """Absolute trace O/2 -> F_2 as xbar + xbar^2 + ... + xbar^(2^(n-1))."""
        x = self.mod2(xbar)
        s = x
        t = x
        for _ in range(self.n - 1):
            t = self.mod2(self.mul(t, t))
            s = tuple((a + b) & 1 for a, b in zip(s, t))
        if not any(s):
            return 0
        if s == self.mod2(self.one):
            return 1
        raise AssertionError(f"trace {s} not in the prime field")

    def teichmuller_normalize(self, u: Ring8Element) -> Ring8Element:
        """u^(2^n - 1): congruent to 1 mod 2 and in the square class of u (odd exponent)."""
        if not self.is_unit(u):
            raise NotAUnit(f"{u} is not a unit mod 2")
        return self.power(u, 2**self.n - 1)

    def lift01(self, bits) -> Ring8Element:
        return tuple(int(b) & 1 for b in bits)

    def units(self):
        """Every unit of O/8 (exhaustive; only sensible for small n)."""
        for code in range(8**self.n):
            x = tuple((code >> (3 * i)) & 7 for i in range(self.n))
            if self.is_unit(x):
                yield x

    # -- numpy views for batched kernels -----------------------------------

    @property
    def table_array(self) -> np.ndarray:
        arr = self._cache.get("table")
        if arr is None:
            arr = np.array(self.mult_table_mod8, dtype=np.int64)
            self._cache["table"] = arr
        return arr

    def mult_by_matrix(self, u: Ring8Element) -> np.ndarray:
        """Matrix M with (x*u)_k = sum_j M[k, j] x_j mod 8."""
        t = self.table_array
        return np.einsum("i,ijk->kj", np.asarray(u, dtype=np.int64), t) % 8


def _sparse(table) -> tuple:
    n = len(table)
    return tuple(tuple(tuple((k, m) for k, m in enumerate(table[i][j]) if m) for j in range(n)) for i in range(n))


def field_ring(f: CyclicField) -> Ring8:
    n = f.n
    table = tuple(tuple(tuple(m % 8 for m in f.mult_table[i][j]) for j in range(n)) for i in range(n))
    shifts = tuple(tuple(tuple(int(k == (i + j) % n) for i in range(n)) for k in range(n)) for j in range(n))
    return Ring8(
        n=n, mult_table_mod8=table, one=tuple(7 for _ in range(n)), galois_matrices=shifts, field=f,
        _sparse=_sparse(table),
    )


def _poly_bits(modulus_poly) -> int:
    if isinstance(modulus_poly, int):
        return modulus_poly
    return sum((int(c) & 1) << i for i, c in enumerate(modulus_poly))


def synthetic_ring(n: int, modulus_poly=None) -> Ring8:
    """Z[x]/(8, lift of modulus_poly), the unramified dyadic ring of degree n mod 8.

    ``modulus_poly`` is a GF(2) polynomial as an int bitmask (bit i is the
    coefficient of x^i) or a 0/1 coefficient sequence, constant term first.
    """
    m = _poly_bits(modulus_poly if modulus_poly is not None else DEFAULT_MODULI[n])
    if m.bit_length() - 1 != n:
        raise ReduciblePolynomial(f"modulus has degree {m.bit_length() - 1}, expected {n}")
    if not nt.gf2_is_irreducible(m):
        raise ReduciblePolynomial(f"{bin(m)} is reducible over GF(2)")
    low = [(m >> i) & 1 for i in range(n)]  # x^n = -sum low_i x^i

    def reduce_power(e: int) -> tuple[int, ...]:
        v = [0] * (2 * n)
        v[e] = 1
        for d in range(len(v) - 1, n - 1, -1):
            c = v[d]
            if c:
                v[d] = 0
                for i in range(n):
                    v[d - n + i] -= c * low[i]
        return tuple(a % 8 for a in v[:n])

    table = tuple(tuple(reduce_power(i + j) for j in range(n)) for i in range(n))
    one = tuple(int(k == 0) for k in range(n))
    ring = Ring8(n=n, mult_table_mod8=table, one=one, galois_matrices=(), modulus_poly=m, _sparse=_sparse(table))

    # Frobenius lift: the root y of f with y = x^2 mod 2, by Newton iteration in O/8
    fcoef = low + [1]

    def ev(coefs, y):
        acc = ring.zero
        for c in reversed(coefs):
            acc = ring.add(ring.mul(acc, y), ring.scalar(c))
        return acc

    dcoef = [i * c for i, c in enumerate(fcoef)][1:]
    x = ring.basis(1) if n > 1 else ring.scalar(-low[0])
    y = ring.mul(x, x)
    for _ in range(3):
        y = ring.sub(y, ring.mul(ev(fcoef, y), ring.inverse(ev(dcoef, y))))
    assert not any(ev(fcoef, y)), "Frobenius lift failed"
    cols = [ring.one]
    for _ in range(1, n):
        cols.append(ring.mul(cols[-1], y))
    phi = np.array([[cols[i][k] for i in range(n)] for k in range(n)], dtype=np.int64)
    mats = []
    cur = np.eye(n, dtype=np.int64)
    for _ in range(n):
        mats.append(tuple(tuple(int(v) for v in row) for row in cur))
        cur = (phi @ cur) % 8
    return Ring8(
        n=n, mult_table_mod8=table, one=one, galois_matrices=tuple(mats), modulus_poly=m, _sparse=ring._sparse,
    )
