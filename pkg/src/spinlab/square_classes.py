"""The group M_4 = (O/4)^x / squares, its F_2^n coordinates and its Galois orbits.

A unit u has coordinate vector a in F_2^n defined by

    u^(2^n - 1) = 1 + 2a  (mod 4),

which is a group isomorphism onto the residue field viewed additively.  Orbit
enumeration works on integer codes of these bit vectors, never on ring
elements, so n = 19 (2^19 classes) stays cheap.

Codes put a_0 in the most significant bit, so integer order is the
lexicographic order of bit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spinlab.errors import NotAUnit, OrbitInvariantViolation
from spinlab.residue_rings import Ring8, Ring8Element


@dataclass(frozen=True, order=True)
class SquareClassM4:
    bits: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def code(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    @classmethod
    def from_code(cls, code: int, n: int) -> SquareClassM4:
        return cls(tuple((code >> (n - 1 - i)) & 1 for i in range(n)))

    def __add__(self, other: SquareClassM4) -> SquareClassM4:
        return SquareClassM4(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def is_zero(self) -> bool:
        return not any(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def class_of(ring: Ring8, u: Ring8Element) -> SquareClassM4:
    if not ring.is_unit(u):
        raise NotAUnit(f"{u} is not a unit")
    d = ring.sub(ring.teichmuller_normalize(u), ring.one)
    assert all(x % 2 == 0 for x in d), "normalized unit is not 1 mod 2"
    return SquareClassM4(tuple((x >> 1) & 1 for x in d))


def canonical_lift(ring: Ring8, c: SquareClassM4) -> Ring8Element:
    """The unit 1 + 2*(0/1 lift of c) mod 8."""
    return tuple((o + 2 * b) % 8 for o, b in zip(ring.one, c.bits))


def galois_on_class(ring: Ring8, c: SquareClassM4, j: int) -> SquareClassM4:
    return class_of(ring, ring.galois(canonical_lift(ring, c), j))


def minus_one_class(ring: Ring8) -> SquareClassM4:
    return class_of(ring, ring.scalar(-1))


def galois_class_matrix(ring: Ring8, j: int = 1) -> np.ndarray:
    """F_2 matrix S with class(sigma^j u) = S @ class(u); columns are images of basis classes."""
    n = ring.n
    cols = []
    for i in range(n):
        e = SquareClassM4(tuple(int(k == i) for k in range(n)))
        cols.append(galois_on_class(ring, e, j).bits)
    return np.array(cols, dtype=np.uint8).T


def _codes_to_bits(codes: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.uint8)


def _bits_to_codes(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[1]
    weights = (1 << np.arange(n - 1, -1, -1, dtype=np.int64))
    return bits.astype(np.int64) @ weights


@dataclass(frozen=True, eq=False)
class OrbitTable:
    n: int
    reps: np.ndarray  # canonical (lexicographically least) code of each orbit, ascending
    sizes: np.ndarray
    lookup: np.ndarray  # class code -> orbit index
    galois_perm: np.ndarray  # class code -> code of its image under the generator
    one_code: int
    minus_one_code: int

    @property
    def orbit_count(self) -> int:
        return len(self.reps)

    def orbit_of(self, c: SquareClassM4) -> int:
        return int(self.lookup[c.code])

    def representative(self, idx: int) -> SquareClassM4:
        return SquareClassM4.from_code(int(self.reps[idx]), self.n)

    def members(self, idx: int) -> list[SquareClassM4]:
        out = []
        code = int(self.reps[idx])
        for _ in range(int(self.sizes[idx])):
            out.append(SquareClassM4.from_code(code, self.n))
            code = int(self.galois_perm[code])
        return out


def orbit_table(ring: Ring8) -> OrbitTable:
    """Partition all 2^n classes into Galois orbits.

    Raises :class:`OrbitInvariantViolation` if the fixed classes are not
    exactly {class(1), class(-1)}, which would mean the Galois action is broken.
    """
    n = ring.n
    if (2**n - 2) % n:
        raise OrbitInvariantViolation(f"(2^{n} - 2)/{n} is not an integer")
    s = galois_class_matrix(ring, 1)
    codes = np.arange(2**n, dtype=np.int64)
    bits = _codes_to_bits(codes, n)
    perm = _bits_to_codes((bits @ s.T) % 2)
    del bits

    canon = codes.copy()
    cur = codes
    for _ in range(n - 1):
        cur = perm[cur]
        np.minimum(canon, cur, out=canon)
    if not np.array_equal(perm[cur], codes):
        raise OrbitInvariantViolation("generator does not have order dividing n on M_4")

    fixed = np.flatnonzero(perm == codes)
    m1 = minus_one_class(ring).code
    if sorted(fixed.tolist()) != sorted({0, m1}) or m1 == 0:
        raise OrbitInvariantViolation(f"fixed classes {fixed.tolist()} differ from {{class(1), class(-1)}}")

    reps, lookup = np.unique(canon, return_inverse=True)
    sizes = np.where(perm[reps] == reps, 1, n)
    if int(sizes.sum()) != 2**n:
        raise OrbitInvariantViolation("orbit sizes do not sum to 2^n")
    return OrbitTable(
        n=n, reps=reps, sizes=sizes, lookup=lookup.reshape(-1), galois_perm=perm, one_code=0, minus_one_code=m1,
    )
