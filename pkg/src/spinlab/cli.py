"""``spinlab`` command line.

Exit codes: 0 ok, 1 internal error, 2 invalid parameters, 3 mismatch or
failed check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from spinlab import cache
from spinlab.errors import CacheError, ParamError, SampleFailure, SpinlabError, ValidationFailed
from spinlab.field_core import CyclicField, FieldParams, build_field
from spinlab.hilbert import (
    VALIDATION_DEGREES,
    check_symbol_properties_exhaustive,
    check_symbol_properties_sampled,
    gram_for_ring,
    gram_from_oracle,
    validate_gram,
)
from spinlab.residue_rings import field_ring, synthetic_ring
from spinlab.spin_empirics import CSV_HEADER, SamplingContext, sample, summary
from spinlab.starlight import density_report, starlight_invariant

EXIT_OK, EXIT_INTERNAL, EXIT_PARAMS, EXIT_MISMATCH = 0, 1, 2, 3

TABLE1 = (
    # n, ell, m_K, D_K
    (3, 7, 1, Fraction(1, 2)),
    (5, 11, 1, Fraction(7, 16)),
    (7, 43, 3, Fraction(29, 64)),
    (11, 23, 3, Fraction(467, 1024)),
    (13, 53, 5, Fraction(1893, 4096)),
    (17, 103, 17, Fraction(30849, 65536)),
    (19, 191, 27, Fraction(124187, 262144)),
)

log = logging.getLogger("spinlab")


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _poly_str(coeffs) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if not c:
            continue
        mag = "" if abs(c) == 1 and k else str(abs(c))
        var = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        terms.append(("-" if c < 0 else "+", mag + var))
    s = "".join(f" {sign} {t}" for sign, t in terms).strip()
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _emit(args, doc: dict, text: str) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)


@dataclass(frozen=True)
class StarSummary:
    field: CyclicField
    m_K: int
    provenance: str
    cached: bool


def field_star_table(params: FieldParams, use_cache: bool = True) -> StarSummary:
    """m_K and Gram provenance, read from the on-disk cache when a valid entry exists."""
    f = build_field(params)
    if use_cache:
        try:
            entry = cache.load(params)
        except CacheError as exc:
            log.warning("ignoring cache entry for %s: %s", params, exc)
            entry = None
        if entry is not None and entry.mult_table == f.mult_table and entry.minpoly == tuple(f.period_minpoly):
            return StarSummary(f, entry.m_K, entry.gram_provenance, cached=True)
    ring = field_ring(f)
    gram = gram_for_ring(ring)
    table = starlight_invariant(ring, gram)
    if use_cache:
        try:
            cache.save(cache.CacheEntry.from_objects(f, gram, table))
        except OSError as exc:
            log.warning("could not write cache: %s", exc)
    return StarSummary(f, table.m_K, table.provenance, cached=False)


# ---------------------------------------------------------------- commands


def cmd_field_info(args) -> int:
    params = FieldParams(args.n, args.ell, args.h)
    f = build_field(params)
    doc = {
        "n": str(f.n), "ell": str(f.ell), "h": str(params.h), "primitive_root": str(f.g),
        "subgroup_H": [str(x) for x in f.subgroup],
        "coset_sizes": [str(f.coset_table.count(i)) for i in range(f.n)],
        "minpoly": [str(c) for c in f.period_minpoly],
        "checks": ["degree_prime", "conductor_prime", "divisibility", "two_inert", "odd_class_number"],
    }
    text = "\n".join([
        f"K(n={f.n}, ell={f.ell})  h={params.h}",
        f"primitive root g = {f.g}",
        f"H = {{{', '.join(map(str, f.subgroup))}}}",
        f"coset sizes = {doc['coset_sizes']}",
        f"minpoly of eta_0: {_poly_str(f.period_minpoly)}",
        "parameter checks: all passed",
    ])
    _emit(args, doc, text)
    return EXIT_OK


def _star_doc(st: StarSummary) -> dict:
    rep = density_report(st.field.n, st.m_K)
    doc = {k: v for k, v in rep.as_dict().items() if k not in ("n", "m_K")}
    return {"n": str(st.field.n), "ell": str(st.field.ell), "m_K": str(st.m_K), "provenance": st.provenance, **doc}


def cmd_starlight(args) -> int:
    doc = _star_doc(field_star_table(FieldParams(args.n, args.ell), use_cache=not args.no_cache))
    text = "  ".join(f"{k}={doc[k]}" for k in ("n", "ell", "m_K", "D_K", "d_RS", "C_K", "C_KS", "provenance"))
    _emit(args, doc, text)
    return EXIT_OK


def cmd_table1(args) -> int:
    rows, ok = [], True
    for n, ell, m_k, d_k in TABLE1:
        t0 = time.perf_counter()
        table = field_star_table(FieldParams(n, ell), use_cache=not args.no_cache)
        rep = density_report(n, table.m_K)
        expected_prov = "oracle" if n <= 7 else "formula"
        cells = {
            "m_K": table.m_K == m_k,
            "D_K": rep.D_K == d_k,
            "provenance": table.provenance == expected_prov,
        }
        ok &= all(cells.values())
        rows.append({
            "n": str(n), "ell": str(ell), "m_K": str(table.m_K), "expected_m_K": str(m_k),
            "D_K": _q(rep.D_K), "expected_D_K": _q(d_k), "provenance": table.provenance,
            "cells": {k: "PASS" if v else "FAIL" for k, v in cells.items()},
            "seconds_decimal": round(time.perf_counter() - t0, 3),
        })
    lines = [f"{'n':>3} {'ell':>4} {'m_K':>4} {'D_K':>14} {'prov':>8}  result"]
    for r in rows:
        verdict = "PASS" if all(v == "PASS" for v in r["cells"].values()) else "FAIL"
        lines.append(f"{r['n']:>3} {r['ell']:>4} {r['m_K']:>4} {r['D_K']:>14} {r['provenance']:>8}  {verdict}")
    _emit(args, {"rows": rows, "passed": ok}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_validate_hilbert(args) -> int:
    degrees = [args.n] if args.n is not None else list(VALIDATION_DEGREES)
    docs, ok = [], True
    for n in degrees:
        try:
            rep = validate_gram(n, galois_pairs=args.galois_pairs)
            entry = {"n": str(n), "gram": "PASS", "seconds_decimal": round(rep.seconds, 3)}
        except ValidationFailed as exc:
            ok = False
            docs.append({"n": str(n), "gram": "FAIL", "pair": str(exc.pair), "message": str(exc)})
            continue
        ring = synthetic_ring(n)
        gram = gram_from_oracle(ring)
        if args.exhaustive and n <= 3:
            props = check_symbol_properties_exhaustive(ring, gram)
        else:
            props = check_symbol_properties_sampled(ring, gram, samples=args.samples,
                                                    oracle_samples=min(args.samples, 300) if n >= 7 else None)
        entry["laws"] = "PASS" if props.passed else "FAIL"
        entry["law_failures"] = [str(x) for x in props.failures[:5]]
        ok &= props.passed
        docs.append(entry)
    text = "\n".join(f"n={d['n']}: gram {d['gram']}" + (f", laws {d['laws']}" if "laws" in d else "") for d in docs)
    _emit(args, {"results": docs, "passed": ok}, text)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_sample(args) -> int:
    params = FieldParams(args.n, args.ell, args.h)
    params.validate()
    ctx = SamplingContext.build(params, h=args.h)
    csv_path = Path(args.csv)
    summary_path = Path(args.summary) if args.summary else csv_path.with_suffix(".summary.json")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    try:
        result = sample(ctx.field, args.bound, h=args.h, workers=args.jobs, strict=False, ctx=ctx,
                        on_record=lambda r: writer.writerow(r.csv_row()))
    except BaseException:
        buf.close()
        raise
    doc = summary(result, args.bound, args.h)
    try:
        result.check()
        doc["passed"] = True
        code = EXIT_OK
    except SampleFailure as exc:
        doc["passed"] = False
        doc["failure"] = str(exc)
        code = EXIT_MISMATCH
    cache.atomic_write(csv_path, buf.getvalue())
    cache.atomic_write(summary_path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    s = result.stats
    lines = [f"primes: {s.total} (split {s.split}, inert {s.inert}, excluded {len(s.excluded)})"]
    for c in doc["comparisons"]:
        tag = "ok" if c["within"] else ("FLAG" if c["soft"] else "OUT")
        lines.append(f"  {c['name']:<28} {c['frequency_decimal']:.5f} vs {c['target']:<6} z={c['z_decimal']:+.2f} {tag}")
    lines.append(f"flagship violations: {s.flagship_violations}")
    lines.append(f"wrote {csv_path} and {summary_path}")
    _emit(args, doc, "\n".join(lines))
    return code


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinlab", description="Starlight invariants and spins of cyclic fields.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=func)
        return sp

    sp = add("field-info", cmd_field_info, "parameters and period minimal polynomial of K(n, ell)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--h", type=int, default=1)

    sp = add("starlight", cmd_starlight, "m_K and exact densities")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--no-cache", action="store_true")

    sp = add("table1", cmd_table1, "reproduce the reference table of seven fields")
    sp.add_argument("--no-cache", action="store_true")

    sp = add("validate-hilbert", cmd_validate_hilbert, "oracle versus closed-form Gram, plus symbol laws")
    sp.add_argument("--n", type=int, choices=VALIDATION_DEGREES)
    sp.add_argument("--exhaustive", action="store_true", help="all units mod 8 for n <= 3 (sampled above)")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--galois-pairs", type=int, default=100)

    sp = add("sample", cmd_sample, "sample primes and write CSV + JSON summary")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--csv", required=True)
    sp.add_argument("--summary")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARAMS if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except SpinlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if os.environ.get("SPINLAB_DEBUG"):
            raise
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
