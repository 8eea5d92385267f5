"""On-disk cache of per-field artifacts.

Entries are JSON with every integer and rational written as a string, plus a
sha256 checksum over the canonical serialization of the payload.  Writes go
to a temporary file in the same directory and are renamed into place.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from spinlab.errors import CacheError
from spinlab.field_core import CyclicField, FieldParams
from spinlab.hilbert import GramMatrix
from spinlab.starlight import StarTable

SCHEMA_VERSION = 1
DEFAULT_DIR = ".spinlab-cache"


def cache_dir() -> Path:
    return Path(os.environ.get("SPINLAB_CACHE", DEFAULT_DIR))


def _int_rows(rows) -> list:
    return [_int_rows(r) if isinstance(r, (list, tuple)) else str(int(r)) for r in rows]


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_ints(rows) -> tuple:
    return tuple(_parse_ints(r) if isinstance(r, list) else int(r) for r in rows)


@dataclass(frozen=True)
class CacheEntry:
    n: int
    ell: int
    h: int
    mult_table: tuple
    minpoly: tuple[int, ...]
    interp_polys: tuple[tuple[Fraction, ...], ...]
    gram: tuple[tuple[int, ...], ...]
    gram_provenance: str
    star_codes: tuple[int, ...]  # class codes with star = +1
    m_K: int
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_objects(cls, f: CyclicField, gram: GramMatrix, table: StarTable) -> CacheEntry:
        return cls(
            n=f.n, ell=f.ell, h=f.params.h, mult_table=f.mult_table, minpoly=tuple(f.period_minpoly),
            interp_polys=f.interp_polys, gram=gram.entries, gram_provenance=gram.provenance,
            star_codes=tuple(int(c) for c in np.flatnonzero(table.class_star)), m_K=table.m_K,
        )

    @property
    def params(self) -> FieldParams:
        return FieldParams(self.n, self.ell, self.h)

    def payload(self) -> dict:
        return {
            "schema_version": str(self.schema_version),
            "params": {"n": str(self.n), "ell": str(self.ell), "h": str(self.h)},
            "mult_table": _int_rows(self.mult_table),
            "minpoly": _int_rows(self.minpoly),
            "interp_polys": [[_frac(c) for c in row] for row in self.interp_polys],
            "gram": {"entries": _int_rows(self.gram), "provenance": self.gram_provenance},
            "star_table": {"plus_codes": _int_rows(self.star_codes)},
            "m_K": str(self.m_K),
        }

    def checksum(self) -> str:
        canon = json.dumps(self.payload(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def to_json(self) -> str:
        return json.dumps({"payload": self.payload(), "sha256": self.checksum()}, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> CacheEntry:
        try:
            doc = json.loads(text)
            p = doc["payload"]
            entry = cls(
                n=int(p["params"]["n"]), ell=int(p["params"]["ell"]), h=int(p["params"]["h"]),
                mult_table=_parse_ints(p["mult_table"]), minpoly=_parse_ints(p["minpoly"]),
                interp_polys=tuple(tuple(Fraction(c) for c in row) for row in p["interp_polys"]),
                gram=_parse_ints(p["gram"]["entries"]), gram_provenance=p["gram"]["provenance"],
                star_codes=_parse_ints(p["star_table"]["plus_codes"]), m_K=int(p["m_K"]),
                schema_version=int(p["schema_version"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CacheError(f"malformed cache entry: {exc}") from exc
        if entry.schema_version != SCHEMA_VERSION:
            raise CacheError(f"schema version {entry.schema_version} != {SCHEMA_VERSION}")
        if entry.checksum() != doc.get("sha256"):
            raise CacheError("checksum mismatch")
        return entry


def entry_path(params: FieldParams, root: Path | None = None) -> Path:
    return (root or cache_dir()) / f"field-n{params.n}-ell{params.ell}-h{params.h}.json"


def save(entry: CacheEntry, root: Path | None = None) -> Path:
    path = entry_path(entry.params, root)
    atomic_write(path, entry.to_json())
    return path


def load(params: FieldParams, root: Path | None = None) -> CacheEntry | None:
    path = entry_path(params, root)
    if not path.exists():
        return None
    return CacheEntry.from_json(path.read_text())


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
