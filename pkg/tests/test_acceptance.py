"""Acceptance gate: each criterion at its stated tolerance, one PASS/FAIL line per criterion."""

import os
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from spinlab.field_core import FieldParams, build_field
from spinlab.hilbert import (
    check_symbol_properties_exhaustive,
    check_symbol_properties_sampled,
    gram_for_ring,
    gram_from_oracle,
    random_unit,
    validate_gram,
)
from spinlab.residue_rings import field_ring, synthetic_ring
from spinlab.spin_empirics import SamplingContext, comparisons, sample
from spinlab.square_classes import class_of, minus_one_class, orbit_table
from spinlab.starlight import density_report, halfstar_violations, star_welldefined_check, starlight_invariant

from conftest import REFERENCE_FIELDS, gram, record_acceptance, ring, star_table

REFERENCE_M = (1, 1, 3, 3, 5, 17, 27)
REFERENCE_D = (
    Fraction(1, 2), Fraction(7, 16), Fraction(29, 64), Fraction(467, 1024),
    Fraction(1893, 4096), Fraction(30849, 65536), Fraction(124187, 262144),
)
WORKERS = min(8, os.cpu_count() or 1)


@pytest.fixture(scope="session")
def sample37():
    t0 = time.perf_counter()
    ctx = SamplingContext.build(FieldParams(3, 7))
    result = sample(ctx.field, 2_000_000, ctx=ctx, workers=WORKERS, strict=False)
    return result, time.perf_counter() - t0


@pytest.fixture(scope="session")
def sample511():
    ctx = SamplingContext.build(FieldParams(5, 11))
    return sample(ctx.field, 100_000, ctx=ctx, workers=WORKERS, strict=False)


def _by_name(stats, m_k):
    return {c.name: c for c in comparisons(stats, m_k)}


def test_table_reproduction():
    t0 = time.perf_counter()
    got, provs = [], []
    for n, ell in REFERENCE_FIELDS:
        r = field_ring(build_field(FieldParams(n, ell)))
        t = starlight_invariant(r, gram_for_ring(r))
        got.append((t.m_K, density_report(n, t.m_K).D_K))
        provs.append(t.provenance)
    elapsed = time.perf_counter() - t0
    ok_values = got == list(zip(REFERENCE_M, REFERENCE_D))
    ok_prov = provs == ["oracle"] * 3 + ["formula"] * 4
    ok = ok_values and ok_prov and elapsed <= 600
    record_acceptance("table reproduction", ok,
                      f"m_K={[m for m, _ in got]} D_K={[str(d) for _, d in got]} provenance={provs} {elapsed:.1f}s")
    assert ok


def test_density_formula_consistency():
    rows = []
    for (n, _), m, d in zip(REFERENCE_FIELDS, REFERENCE_M, REFERENCE_D):
        unreduced = Fraction(2 ** (n - 1) * (n - 1) + m * n + 1, 2**n * n)
        rep = density_report(n, m)
        rows.append(unreduced == d == rep.D_K and rep.decomposition_holds())
    special = Fraction(10240 + 34, 22528) == Fraction(467, 1024)
    ok = all(rows) and special
    record_acceptance("density formula consistency", ok, f"rows={rows} n=11 reduction={special}")
    assert ok


def test_gram_validation():
    times, ok = {}, True
    for n in (1, 3, 5, 7):
        rep = validate_gram(n)
        times[n] = round(rep.seconds, 2)
        ok &= rep.passed and rep.oracle.entries == rep.formula.entries
    ok &= times[7] <= 300
    record_acceptance("gram validation", ok, f"oracle = formula at n=1,3,5,7; seconds {times}")
    assert ok


def test_symbol_properties():
    reports = [check_symbol_properties_exhaustive(synthetic_ring(3), gram_from_oracle(synthetic_ring(3))),
               check_symbol_properties_exhaustive(ring(3, 7), gram(3, 7))]
    for n, oracle_samples in ((5, 10_000), (7, 300)):
        r = synthetic_ring(n)
        reports.append(check_symbol_properties_sampled(r, gram_from_oracle(r), samples=10_000,
                                                       oracle_samples=oracle_samples, seed=n))
    ok = all(rep.passed for rep in reports)
    detail = "; ".join(
        f"n={rep.n} {'exhaustive ' + str(rep.units) + ' units' if rep.exhaustive else str(rep.triples) + ' triples'}"
        f" oracle pairs {rep.oracle_pairs}" for rep in reports
    )
    record_acceptance("symbol properties", ok, detail + ("" if ok else f" failures={reports}"))
    assert ok


def test_mod4_structure():
    ok, notes = True, []
    rng = random.Random(5)
    for n, ell in REFERENCE_FIELDS:
        r = ring(n, ell)
        if n == 3:
            hit = {class_of(r, u).code for u in r.units()}
            surjective = len(hit) == 2**n
        else:
            # random unit classes span F_2^n, so the homomorphism class_of is onto
            rows = np.array([class_of(r, random_unit(r, rng)).bits for _ in range(4 * n)], dtype=np.uint8)
            rank, m = 0, rows.copy()
            for c in range(n):
                piv = next((i for i in range(rank, len(m)) if m[i, c]), None)
                if piv is None:
                    continue
                m[[rank, piv]] = m[[piv, rank]]
                for i in range(len(m)):
                    if i != rank and m[i, c]:
                        m[i] ^= m[rank]
                rank += 1
            surjective = rank == n
        t = orbit_table(r)
        fixed = sorted(int(c) for c in np.flatnonzero(t.galois_perm == np.arange(2**n)))
        good = surjective and fixed == sorted([0, minus_one_class(r).code]) and int(t.sizes.sum()) == 2**n
        notes.append(f"n={n}:{'ok' if good else 'BAD'}")
        ok &= good
    record_acceptance("mod-4 square classes and fixed points", ok, " ".join(notes))
    assert ok


def test_equidistribution(sample37):
    result, elapsed = sample37
    s = result.stats
    cs = [c for c in comparisons(s, 1) if c.name.startswith("class")]
    ok = all(c.within for c in cs) and s.exclusion_rate() <= Fraction(1, 1000)
    freqs = " ".join(f"{c.frequency:.4f}({c.z:+.1f})" for c in cs)
    record_acceptance("equidistribution (3,7) p<2e6", ok,
                      f"{s.split} split primes; freq(z) {freqs}; {elapsed:.0f}s with {WORKERS} worker(s)")
    assert ok


def test_density_statistics(sample37, sample511):
    s37 = _by_name(sample37[0].stats, 1)
    s511 = _by_name(sample511.stats, 1)
    picked = [s37["star = 1 among split"], s37["star = 1 among inert"], s37["star = 1 among all"],
              s511["star = 1 among split"]]
    ok = all(c.within for c in picked)
    detail = "; ".join(f"{c.name} {c.frequency:.4f} vs {c.target} z={c.z:+.2f}" for c in picked)
    record_acceptance("density statistics", ok, detail)
    assert ok


def test_all_spins_positive_comparison(sample37):
    c = _by_name(sample37[0].stats, 1)["all spins +1 among split"]
    flag = "" if c.within else " FLAGGED beyond 4 sigma"
    record_acceptance("all-spins-positive comparison (soft)", True,
                      f"{c.frequency:.4f} vs {c.target} z={c.z:+.2f}{flag}")


def test_flagship_identity(sample37, sample511):
    counts = []
    ok = True
    for result in (sample37[0], sample511):
        s = result.stats
        ok &= s.flagship_violations == 0 and s.star_spin_mismatches == 0 and s.split > 0
        counts.append(f"{s.split} split, {s.flagship_violations} violations")
    record_acceptance("spin product equals Hilbert symbol", ok, "; ".join(counts))
    assert ok


def test_star_soundness():
    ok, notes = True, []
    for n, ell in REFERENCE_FIELDS:
        r, g, t = ring(n, ell), gram(n, ell), star_table(n, ell)
        rep = star_welldefined_check(r, g, t, trials=1000, seed=n)
        dens = density_report(n, t.m_K)
        good = (
            rep.lift_checks == rep.orbit_checks == rep.twist_checks == 1000
            and not halfstar_violations(t)
            and t.m_K == t.kernel_size - 1
            and t.star_count == t.m_K * n + 1
            and dens.bounds_hold()
            and t.m_K <= (2 ** (n - 1) - 1) // n
        )
        notes.append(f"n={n}:{'ok' if good else 'BAD'}")
        ok &= good
    record_acceptance("star map soundness", ok, " ".join(notes))
    assert ok
