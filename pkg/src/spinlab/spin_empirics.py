"""Actual spins of sampled primes and their statistics.

For a split prime p of K the pipeline is:

1. a root r of the period minimal polynomial mod p (the smallest one) fixes a
   prime P above p; eta_i reduces to P_i(r), lifted to p^h when h > 1;
2. P^h is the kernel of O -> Z/p^h, an explicit integer lattice; LLL under
   the trace form plus Fincke-Pohst enumeration find a generator alpha;
3. alpha is multiplied by a unit with the same sign pattern, making it
   totally positive;
4. its class in M_4 gives star(p), and Legendre symbols of its reductions at
   the conjugates sigma^j(P) give the spins.

Every split prime also checks spin(j) spin(n-j) = (alpha, sigma^j alpha)_2.
"""

from __future__ import annotations

import logging
import math
import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from spinlab import lattice, nt
from spinlab.errors import (
    BadPrime,
    DenominatorClash,
    EnumerationExhausted,
    NonUnitResidue,
    SampleFailure,
    SignatureSpanFailure,
    UnreachableSignature,
)
from spinlab.field_core import CyclicField, FieldElement, FieldParams, build_field
from spinlab.hilbert import GramMatrix, gram_for_ring, symbol
from spinlab.residue_rings import Ring8, field_ring
from spinlab.square_classes import SquareClassM4, class_of
from spinlab.starlight import StarTable, density_report, starlight_invariant

log = logging.getLogger(__name__)

EXCLUSION_CAP = Fraction(1, 1000)
RADIUS_DOUBLINGS = 6
RADIUS_INITIAL_FACTOR = 64
UNIT_RADIUS_DOUBLINGS = 12


def frobenius_degree(params: FieldParams, p: int) -> int:
    """1 if p splits completely in K, else n (K has prime degree)."""
    if p % 2 == 0 or p % params.ell == 0 or not nt.is_prime(p):
        raise BadPrime(f"p = {p} must be an odd prime different from ell = {params.ell}")
    return 1 if pow(p, (params.ell - 1) // params.n, params.ell) == 1 else params.n


# ---------------------------------------------------------------- primes above p


@dataclass(frozen=True)
class PrimeIdeal:
    """The prime P_t above p with eta_0 = r_t mod P_t, together with reductions mod P_t^h."""

    p: int
    h: int
    t: int
    root: int
    rho: tuple[int, ...]  # eta_i mod P^h, in Z/p^h

    @property
    def modulus(self) -> int:
        return self.p**self.h

    def reduce(self, x: FieldElement, j: int = 0) -> int:
        """x mod sigma^j(P), as an integer mod p."""
        n = len(self.rho)
        return sum(a * self.rho[(i - j) % n] for i, a in enumerate(x) if a) % self.p


def _interp_value(f: CyclicField, i: int, r: int, mod: int, p: int) -> int:
    acc = 0
    for k, c in enumerate(f.interp_polys[i]):
        if c:
            if c.denominator % p == 0:
                raise DenominatorClash(f"p = {p} divides an interpolation denominator {c.denominator}")
            acc += c.numerator * pow(c.denominator, -1, mod) * pow(r, k, mod)
    return acc % mod


def primes_above(f: CyclicField, p: int, h: int = 1) -> list[PrimeIdeal]:
    if frobenius_degree(f.params, p) != 1:
        raise BadPrime(f"p = {p} is inert in K")
    roots = nt.roots_mod_p(list(f.period_minpoly), p)
    if len(roots) != f.n:
        raise DenominatorClash(f"minimal polynomial has {len(roots)} distinct roots mod {p}; p divides the index")
    mod = p**h
    out = []
    for t, r in enumerate(roots):
        rr = nt.hensel_lift_root(list(f.period_minpoly), r, p, h) if h > 1 else r
        rho = tuple(_interp_value(f, i, rr, mod, p) for i in range(f.n))
        out.append(PrimeIdeal(p=p, h=h, t=t, root=r, rho=rho))
    return out


# ---------------------------------------------------------------- generators


def ideal_basis(f: CyclicField, prime: PrimeIdeal) -> list[list[int]]:
    """Integer basis (period coordinates) of P^h as the kernel of eta_i -> rho_i mod p^h."""
    n, mod = f.n, prime.modulus
    k = next(i for i in range(n) if prime.rho[i] % prime.p)
    inv = pow(prime.rho[k], -1, mod)
    rows = []
    for i in range(n):
        v = [0] * n
        if i == k:
            v[k] = mod
        else:
            v[i] = 1
            v[k] = -prime.rho[i] * inv % mod
        rows.append(v)
    return rows


def ideal_generator(f: CyclicField, prime: PrimeIdeal) -> FieldElement:
    """An element of P^h with |Norm| = p^h, smallest Trace(x^2) first.

    The search radius grows geometrically from n p^(2h/n) (the AM-GM lower
    bound on Trace(x^2) for such an element) up to the cap
    64 n p^(2h/n) 2^6; exhausting the cap raises :class:`EnumerationExhausted`.
    """
    n, target = f.n, prime.modulus
    basis = lattice.lll(ideal_basis(f, prime), f.trace_form)
    g = lattice.gram(basis, f.trace_form)
    floor = n * target ** (2 / n)
    cap = math.ceil(RADIUS_INITIAL_FACTOR * floor) * 2**RADIUS_DOUBLINGS
    radius = max(math.ceil(2 * floor), min(row[i] for i, row in enumerate(g)))
    done = 0
    while True:
        radius = min(radius, cap)
        cands = sorted(lattice.enumerate_short(g, radius, min_norm=done + 1))
        for _, x in cands:
            alpha = tuple(lattice.combine(x, basis))
            if abs(f.norm(alpha)) == target:
                return alpha
        if radius >= cap:
            raise EnumerationExhausted(f"no element of norm {target} with Trace(x^2) <= {cap} (p = {prime.p})")
        done = radius
        radius *= 2


# ---------------------------------------------------------------- units and signs


def _sign_bits(sig: Sequence[int]) -> int:
    return sum(1 << t for t, s in enumerate(sig) if s < 0)


@dataclass(frozen=True, eq=False)
class UnitBasis:
    units: tuple[FieldElement, ...]
    signature_matrix: tuple[tuple[int, ...], ...]  # rows: embeddings, columns: units; 1 = negative
    by_pattern: dict = field(repr=False, default_factory=dict)  # sign bitmask -> unit with that pattern

    def unit_for(self, pattern: int) -> FieldElement:
        try:
            return self.by_pattern[pattern]
        except KeyError:
            raise UnreachableSignature(f"sign pattern {pattern:b} is not represented by the unit basis") from None


def unit_basis(f: CyclicField, search_radius: int | None = None) -> UnitBasis:
    """Units of K whose signs span F_2^n, found by short-vector search under the trace form.

    -1 always comes first.  The radius doubles up to 2^12 times the start;
    failing to span raises :class:`SignatureSpanFailure`.
    """
    n = f.n
    minus_one = f.from_int(-1)
    units = [minus_one]
    sigs = [f.signature(minus_one)]
    echelon: dict[int, int] = {}  # pivot bit -> reduced vector

    def insert(v: int) -> bool:
        for piv in sorted(echelon, reverse=True):
            if v >> piv & 1:
                v ^= echelon[piv]
        if not v:
            return False
        echelon[v.bit_length() - 1] = v
        return True

    insert(_sign_bits(sigs[0]))
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    basis = lattice.lll(ident, f.trace_form)
    g = lattice.gram(basis, f.trace_form)
    radius = search_radius or 2 * max(f.trace_form[i][i] for i in range(n))
    cap = radius * 2**UNIT_RADIUS_DOUBLINGS
    done = 0
    while len(echelon) < n:
        if radius > cap:
            raise SignatureSpanFailure(f"unit signatures span only rank {len(echelon)} < {n} up to radius {cap}")
        for _, x in sorted(lattice.enumerate_short(g, radius, min_norm=done + 1)):
            u = tuple(lattice.combine(x, basis))
            if abs(f.norm(u)) != 1:
                continue
            s = f.signature(u)
            if insert(_sign_bits(s)):
                units.append(u)
                sigs.append(s)
                if len(echelon) == n:
                    break
        done = radius
        radius *= 2
    matrix = tuple(tuple(int(s[t] < 0) for s in sigs) for t in range(n))

    by_pattern: dict[int, FieldElement] = {0: f.unity}
    for u, s in zip(units, sigs):
        b = _sign_bits(s)
        for pat, w in list(by_pattern.items()):
            if pat ^ b not in by_pattern:
                by_pattern[pat ^ b] = f.mul(w, u)
    if len(by_pattern) != 2**n:
        raise SignatureSpanFailure("unit products do not realise every sign pattern")
    return UnitBasis(units=tuple(units), signature_matrix=matrix, by_pattern=by_pattern)


def make_totally_positive(f: CyclicField, alpha: FieldElement, ub: UnitBasis) -> FieldElement:
    pattern = _sign_bits(f.signature(alpha))
    out = alpha if pattern == 0 else f.mul(alpha, ub.unit_for(pattern))
    if not f.is_totally_positive(out):
        raise UnreachableSignature(f"{out} is not totally positive after sign correction")
    return out


# ---------------------------------------------------------------- spins


def spin(f: CyclicField, alpha: FieldElement, prime: PrimeIdeal, j: int) -> int:
    """Legendre symbol of alpha modulo sigma^j(P)."""
    r = prime.reduce(alpha, j)
    if r == 0:
        raise NonUnitResidue(f"alpha lies in sigma^{j}(P) above p = {prime.p}")
    return nt.legendre(r, prime.p)


@dataclass(frozen=True)
class PrimeRecord:
    p: int
    f: int
    square_class: SquareClassM4
    star: int
    spins: tuple[int, ...]  # j = 1..n-1, empty for inert primes
    generator: FieldElement
    flagship_ok: bool = True
    star_matches_spins: bool = True

    def csv_row(self) -> list[str]:
        return [
            str(self.p), str(self.f), str(self.square_class), str(self.star),
            ";".join(str(s) for s in self.spins), " ".join(str(a) for a in self.generator),
        ]


CSV_HEADER = ["p", "f", "class_bits", "star", "spins", "generator"]


@dataclass
class SampleStats:
    n: int
    split: int = 0
    inert: int = 0
    class_counts: list[int] = field(default_factory=list)  # split primes, by class code
    star_split: int = 0
    star_inert: int = 0
    inert_plus_class: int = 0  # inert primes with p^h in class(1)
    all_spins_plus: int = 0
    flagship_violations: int = 0
    star_spin_mismatches: int = 0
    excluded: list[tuple[int, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.class_counts:
            self.class_counts = [0] * 2**self.n

    @property
    def total(self) -> int:
        return self.split + self.inert

    @property
    def star_all(self) -> int:
        return self.star_split + self.star_inert

    def add(self, rec: PrimeRecord) -> None:
        if rec.f == 1:
            self.split += 1
            self.class_counts[rec.square_class.code] += 1
            self.star_split += rec.star == 1
            self.all_spins_plus += all(s == 1 for s in rec.spins)
        else:
            self.inert += 1
            self.star_inert += rec.star == 1
            self.inert_plus_class += rec.square_class.is_zero()
        self.flagship_violations += not rec.flagship_ok
        self.star_spin_mismatches += not rec.star_matches_spins

    def merge(self, other: SampleStats) -> SampleStats:
        out = SampleStats(n=self.n)
        for name in ("split", "inert", "star_split", "star_inert", "inert_plus_class", "all_spins_plus",
                     "flagship_violations", "star_spin_mismatches"):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        out.class_counts = [a + b for a, b in zip(self.class_counts, other.class_counts)]
        out.excluded = sorted(self.excluded + other.excluded)
        return out

    def consistent(self) -> bool:
        return (
            sum(self.class_counts) == self.split
            and all(0 <= c <= self.split for c in self.class_counts)
            and self.star_split <= self.split
            and self.star_inert <= self.inert
            and self.inert_plus_class <= self.inert
            and self.all_spins_plus <= self.split
        )

    def exclusion_rate(self) -> Fraction:
        attempted = self.total + len(self.excluded)
        return Fraction(len(self.excluded), attempted) if attempted else Fraction(0)

    def as_dict(self) -> dict:
        return {
            "n": self.n, "split": self.split, "inert": self.inert, "total": self.total,
            "class_counts": list(self.class_counts), "star_split": self.star_split,
            "star_inert": self.star_inert, "star_all": self.star_all, "inert_plus_class": self.inert_plus_class,
            "all_spins_plus": self.all_spins_plus, "flagship_violations": self.flagship_violations,
            "star_spin_mismatches": self.star_spin_mismatches,
            "excluded": [[p, why] for p, why in self.excluded],
        }


# ---------------------------------------------------------------- per-prime pipeline


@dataclass(frozen=True, eq=False)
class SamplingContext:
    field: CyclicField
    ring: Ring8
    gram: GramMatrix
    table: StarTable
    units: UnitBasis
    h: int = 1

    @classmethod
    def build(cls, params: FieldParams, h: int | None = None) -> SamplingContext:
        f = build_field(params)
        ring = field_ring(f)
        gram = gram_for_ring(ring)
        return cls(
            field=f, ring=ring, gram=gram, table=starlight_invariant(ring, gram), units=unit_basis(f),
            h=params.h if h is None else h,
        )


def process_prime(ctx: SamplingContext, p: int) -> PrimeRecord:
    f, ring, h = ctx.field, ctx.ring, ctx.h
    n = f.n
    if frobenius_degree(f.params, p) == n:
        q = p**h
        c = class_of(ring, ring.scalar(q))
        star = ctx.table.star(c)
        return PrimeRecord(p=p, f=n, square_class=c, star=star, spins=(), generator=f.from_int(q),
                           star_matches_spins=(star == 1) == (q % 4 == 1))
    prime = primes_above(f, p, h)[0]
    alpha = make_totally_positive(f, ideal_generator(f, prime), ctx.units)
    a8 = ring.reduce(alpha)
    c = class_of(ring, a8)
    star = ctx.table.star(c)
    spins = tuple(spin(f, alpha, prime, j) for j in range(1, n))
    flagship = all(
        spins[j - 1] * spins[n - j - 1] == symbol(ring, a8, ring.galois(a8, j), ctx.gram) for j in range(1, n)
    )
    relation = all(spins[j - 1] == spins[n - j - 1] for j in range(1, n))
    return PrimeRecord(p=p, f=1, square_class=c, star=star, spins=spins, generator=alpha,
                       flagship_ok=flagship, star_matches_spins=(star == 1) == relation)


def _run_chunk(ctx: SamplingContext, primes: Iterable[int]) -> tuple[list[PrimeRecord], list[tuple[int, str]]]:
    records, excluded = [], []
    for p in primes:
        try:
            records.append(process_prime(ctx, int(p)))
        except (DenominatorClash, EnumerationExhausted, NonUnitResidue, UnreachableSignature) as exc:
            log.warning("excluding p = %d: %s", p, exc)
            excluded.append((int(p), f"{type(exc).__name__}: {exc}"))
    return records, excluded


_WORKER_CTX: SamplingContext | None = None


def _worker_init(n: int, ell: int, h: int) -> None:
    global _WORKER_CTX
    _WORKER_CTX = SamplingContext.build(FieldParams(n, ell, h))


def _worker_chunk(primes: list[int]):
    assert _WORKER_CTX is not None
    return _run_chunk(_WORKER_CTX, primes)


def sample_primes(ell: int, bound: int) -> list[int]:
    return [int(p) for p in nt.primes_up_to(bound) if p != 2 and p != ell]


@dataclass
class SampleResult:
    stats: SampleStats
    records: list[PrimeRecord]
    table: StarTable

    def check(self) -> None:
        s = self.stats
        if s.exclusion_rate() > EXCLUSION_CAP:
            raise SampleFailure(f"{len(s.excluded)} exclusions exceed the {EXCLUSION_CAP} cap")
        if s.flagship_violations:
            raise SampleFailure(f"{s.flagship_violations} primes violate spin(j) spin(n-j) = (alpha, sigma^j alpha)")
        if s.star_spin_mismatches:
            raise SampleFailure(f"{s.star_spin_mismatches} primes have star inconsistent with their spins")
        if not s.consistent():
            raise SampleFailure("sample totals are inconsistent")


def iter_records(ctx: SamplingContext, bound: int, workers: int = 1,
                 chunk: int = 2000) -> Iterator[tuple[list[PrimeRecord], list[tuple[int, str]]]]:
    """Per-chunk results in increasing p, whatever the worker count."""
    primes = sample_primes(ctx.field.ell, bound)
    chunks = [primes[i:i + chunk] for i in range(0, len(primes), chunk)]
    if workers <= 1:
        for c in chunks:
            yield _run_chunk(ctx, c)
        return
    params = ctx.field.params
    with multiprocessing.get_context().Pool(workers, _worker_init, (params.n, params.ell, ctx.h)) as pool:
        yield from pool.imap(_worker_chunk, chunks)


def sample(f: CyclicField | FieldParams, bound: int, h: int = 1, workers: int = 1, strict: bool = True,
           ctx: SamplingContext | None = None, on_record=None) -> SampleResult:
    """Run the pipeline over all primes p <= bound with p not dividing 2 ell.

    ``on_record`` is called for each record in order of p.  With ``strict``
    the run fails (:class:`SampleFailure`) on any flagship violation, any
    star/spin disagreement, or more than 0.1% excluded primes.
    """
    params = f.params if isinstance(f, CyclicField) else f
    if ctx is None:
        ctx = SamplingContext.build(FieldParams(params.n, params.ell, h), h=h)
    stats = SampleStats(n=params.n)
    records: list[PrimeRecord] = []
    for recs, excl in iter_records(ctx, bound, workers):
        for r in recs:
            stats.add(r)
            if on_record is not None:
                on_record(r)
        records.extend(recs)
        stats.excluded.extend(excl)
    result = SampleResult(stats=stats, records=records, table=ctx.table)
    if strict:
        result.check()
    return result


# ---------------------------------------------------------------- statistics


@dataclass(frozen=True)
class Comparison:
    name: str
    observed: int
    trials: int
    target: Fraction
    band: float  # allowed |z|
    soft: bool = False

    @property
    def frequency(self) -> float:
        return self.observed / self.trials if self.trials else float("nan")

    @property
    def sigma(self) -> float:
        t = float(self.target)
        return math.sqrt(t * (1 - t) / self.trials) if self.trials else float("nan")

    @property
    def z(self) -> float:
        return (self.frequency - float(self.target)) / self.sigma

    @property
    def within(self) -> bool:
        return abs(self.z) <= self.band

    def as_dict(self) -> dict:
        return {
            "name": self.name, "observed": self.observed, "trials": self.trials,
            "target": f"{self.target.numerator}/{self.target.denominator}",
            "frequency_decimal": round(self.frequency, 6), "z_decimal": round(self.z, 3),
            "band_sigma": self.band, "within": self.within, "soft": self.soft,
        }


def comparisons(stats: SampleStats, m_k: int, band: float = 3.0, soft_band: float = 4.0) -> list[Comparison]:
    """Binomial z-tests of the sample against the theoretical densities."""
    n = stats.n
    rep = density_report(n, m_k)
    out = [Comparison(f"class {SquareClassM4.from_code(c, n)} among split", k, stats.split, Fraction(1, 2**n), band)
           for c, k in enumerate(stats.class_counts)]
    out += [
        Comparison("star = 1 among split", stats.star_split, stats.split, rep.d_RS, band),
        Comparison("star = 1 among inert", stats.star_inert, stats.inert, Fraction(1, 2), band),
        Comparison("inert class(1)", stats.inert_plus_class, stats.inert, Fraction(1, 2), band),
        Comparison("star = 1 among all", stats.star_all, stats.total, rep.D_K, band),
        Comparison("all spins +1 among split", stats.all_spins_plus, stats.split, rep.C_KS, soft_band, soft=True),
    ]
    return out


def summary(result: SampleResult, bound: int, h: int = 1) -> dict:
    stats = result.stats
    table = result.table
    rep = density_report(table.n, table.m_K)
    return {
        "bound": bound,
        "h": h,
        "stats": stats.as_dict(),
        "targets": rep.as_dict(),
        "gram_provenance": table.provenance,
        "comparisons": [c.as_dict() for c in comparisons(stats, table.m_K)],
    }


__all__ = [
    "PrimeIdeal", "PrimeRecord", "SampleResult", "SampleStats", "SamplingContext", "UnitBasis", "comparisons",
    "frobenius_degree", "ideal_basis", "ideal_generator", "make_totally_positive", "primes_above",
    "process_prime", "sample", "spin", "summary", "unit_basis",
]
