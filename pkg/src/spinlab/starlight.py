"""The star map on Galois orbits of M_4, the Starlight invariant m_K, and the density formulas.

star(alpha) = +1 iff (alpha, sigma^j alpha)_2 = +1 for every nontrivial sigma^j.
Symmetry and Galois invariance of the symbol give
(alpha, sigma^-j alpha) = (sigma^j alpha, alpha) = (alpha, sigma^j alpha),
so only j = 1..(n-1)/2 need evaluating.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from spinlab.errors import BoundViolation, StarInconsistency, WellDefinednessFailure
from spinlab.hilbert import GramMatrix, coords8, random_unit, symbol_from_coords
from spinlab.residue_rings import Ring8, Ring8Element
from spinlab.square_classes import (
    OrbitTable,
    SquareClassM4,
    _codes_to_bits,
    canonical_lift,
    class_of,
    galois_class_matrix,
    orbit_table,
)


def star_of_unit(ring: Ring8, u: Ring8Element, gram: GramMatrix) -> int:
    """star evaluated on an arbitrary unit mod 8 through the full symbol pipeline."""
    cu = coords8(ring, u)
    for j in range(1, (ring.n - 1) // 2 + 1):
        if symbol_from_coords(cu, coords8(ring, ring.galois(u, j)), gram) == -1:
            return -1
    return 1


def star_of_class(ring: Ring8, c: SquareClassM4, gram: GramMatrix) -> int:
    return star_of_unit(ring, canonical_lift(ring, c), gram)


def star_vector(ring: Ring8, gram: GramMatrix) -> np.ndarray:
    """star on every class code at once, as a bool array (True = +1).

    The canonical lift 1 + 2a has coordinates (a, eps), its conjugate has
    (S^j a, eps'), and the Delta row of the Gram matrix is zero, so each symbol
    is the F_2 form a^T B S^j a with B the unit block.
    """
    if not gram.delta_row_zero():
        raise StarInconsistency("Gram matrix has a nonzero Delta row; bit-level star evaluation is invalid")
    n = ring.n
    b = gram.unit_block.astype(np.int64)
    s = galois_class_matrix(ring, 1).astype(np.int64)
    bits = _codes_to_bits(np.arange(2**n, dtype=np.int64), n).astype(np.int64)
    ab = (bits @ b) % 2
    out = np.ones(2**n, dtype=bool)
    conj = bits
    for _ in range(1, (n - 1) // 2 + 1):
        conj = (conj @ s.T) % 2
        out &= ((ab * conj).sum(axis=1) % 2) == 0
    return out


@dataclass(frozen=True, eq=False)
class StarTable:
    n: int
    orbits: OrbitTable
    orbit_star: np.ndarray  # +1/-1 per orbit
    class_star: np.ndarray  # bool per class code
    m_K: int
    kernel_size: int
    provenance: str

    @property
    def star_count(self) -> int:
        """#{c in M_4 : star(c) = 1}."""
        return int(self.class_star.sum())

    def star(self, c: SquareClassM4) -> int:
        return 1 if self.class_star[c.code] else -1

    def star_code(self, code: int) -> int:
        return 1 if self.class_star[code] else -1


def starlight_invariant(ring: Ring8, gram: GramMatrix, orbits: OrbitTable | None = None) -> StarTable:
    """Evaluate star on every orbit and compute m_K two ways.

    Raises :class:`StarInconsistency` if star is not constant on orbits,
    violates star(1) = 1 or star(-1) = -1, or the two m_K definitions disagree.
    """
    n = ring.n
    orbits = orbits or orbit_table(ring)
    cs = star_vector(ring, gram)
    if not np.array_equal(cs, cs[orbits.galois_perm]):
        raise StarInconsistency("star is not constant on a Galois orbit")
    orbit_star = np.where(cs[orbits.reps], 1, -1)
    if cs[orbits.one_code] != True:  # noqa: E712
        raise StarInconsistency("star(1) != 1")
    if cs[orbits.minus_one_code]:
        raise StarInconsistency("star(-1) != -1")
    m_k = int(((orbits.sizes == n) & (orbit_star == 1)).sum())
    kernel = int((orbit_star == 1).sum())
    if m_k != kernel - 1:
        raise StarInconsistency(f"orbit count m_K = {m_k} but #ker(star) - 1 = {kernel - 1}")
    if int(cs.sum()) != m_k * n + 1:
        raise StarInconsistency(f"#{{star = 1}} = {int(cs.sum())} != m_K n + 1 = {m_k * n + 1}")
    if m_k > (2 ** (n - 1) - 1) // n:
        raise StarInconsistency(f"m_K = {m_k} exceeds (2^(n-1) - 1)/n")
    return StarTable(
        n=n, orbits=orbits, orbit_star=orbit_star, class_star=cs, m_K=m_k, kernel_size=kernel,
        provenance=gram.provenance,
    )


def halfstar_violations(table: StarTable) -> list[int]:
    """Codes c with star(c) = 1 and star(-c) = 1 (should be empty)."""
    m1 = table.orbits.minus_one_code
    codes = np.flatnonzero(table.class_star)
    return [int(c) for c in codes if table.class_star[c ^ m1]]


# ---------------------------------------------------------------- densities


@dataclass(frozen=True)
class DensityReport:
    n: int
    m_K: int
    D_K: Fraction
    d_RS: Fraction
    C_K: Fraction
    C_KS: Fraction
    D_K_lower: Fraction
    D_K_upper: Fraction
    d_RS_lower: Fraction
    d_RS_upper: Fraction

    def bounds_hold(self) -> bool:
        return (self.D_K_lower <= self.D_K <= self.D_K_upper) and (self.d_RS_lower <= self.d_RS <= self.d_RS_upper)

    def decomposition_holds(self) -> bool:
        return self.D_K == Fraction(self.n - 1, 2 * self.n) + self.d_RS / self.n

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m_K": self.m_K,
            **{k: f"{v.numerator}/{v.denominator}" for k, v in (
                ("D_K", self.D_K), ("d_RS", self.d_RS), ("C_K", self.C_K), ("C_KS", self.C_KS),
                ("D_K_lower", self.D_K_lower), ("D_K_upper", self.D_K_upper),
                ("d_RS_lower", self.d_RS_lower), ("d_RS_upper", self.d_RS_upper),
            )},
        }


def density_report(n: int, m_k: int) -> DensityReport:
    if m_k < 0 or m_k > (2 ** (n - 1) - 1) // n:
        raise BoundViolation(f"m_K = {m_k} outside [0, (2^(n-1) - 1)/n] for n = {n}")
    top = 2 ** (n - 1) * (n - 1) + m_k * n + 1
    root2_pow = 2 ** ((3 * n - 1) // 2)  # (sqrt 2)^(3n-1), n odd
    return DensityReport(
        n=n,
        m_K=m_k,
        D_K=Fraction(top, 2**n * n),
        d_RS=Fraction(1 + m_k * n, 2**n),
        C_K=Fraction(top, root2_pow * n),
        C_KS=Fraction(m_k * n + 1, root2_pow),
        D_K_lower=Fraction(2 ** (n - 1) * (n - 1) + 1, 2**n * n),
        D_K_upper=Fraction(1, 2),
        d_RS_lower=Fraction(1, 2**n),
        d_RS_upper=Fraction(1, 2),
    )


# ---------------------------------------------------------------- soundness checks


@dataclass
class WellDefinednessReport:
    trials: int
    lift_checks: int = 0
    orbit_checks: int = 0
    twist_checks: int = 0


def random_lift(ring: Ring8, c: SquareClassM4, rng: random.Random) -> Ring8Element:
    """A random unit mod 8 whose M_4 class is c: canonical lift * w^2 * (1 + 4r)."""
    w = random_unit(ring, rng)
    r = tuple(rng.randrange(2) for _ in range(ring.n))
    four = tuple((o + 4 * b) % 8 for o, b in zip(ring.one, r))
    return ring.mul(ring.mul(canonical_lift(ring, c), ring.mul(w, w)), four)


def star_welldefined_check(ring: Ring8, gram: GramMatrix, table: StarTable, trials: int = 1000,
                           seed: int = 0) -> WellDefinednessReport:
    """Random lifts, Galois conjugates and 5-twists of random classes all give the tabulated star.

    Raises :class:`WellDefinednessFailure` with the offending unit as witness.
    """
    rng = random.Random(seed)
    n = ring.n
    report = WellDefinednessReport(trials=trials)
    five = ring.scalar(5)
    for _ in range(trials):
        c = SquareClassM4.from_code(rng.randrange(2**n), n)
        expected = table.star(c)
        u = random_lift(ring, c, rng)
        if class_of(ring, u) != c:
            raise WellDefinednessFailure("random lift left its class", witness=u)
        if star_of_unit(ring, u, gram) != expected:
            raise WellDefinednessFailure(f"lift of class {c} changes star", witness=u)
        report.lift_checks += 1
        j = rng.randrange(1, n)
        if star_of_unit(ring, ring.galois(u, j), gram) != expected:
            raise WellDefinednessFailure(f"conjugate sigma^{j} of class {c} changes star", witness=u)
        report.orbit_checks += 1
        if star_of_unit(ring, ring.mul(five, u), gram) != expected:
            raise WellDefinednessFailure(f"5-twist of class {c} changes star", witness=u)
        report.twist_checks += 1
    return report
