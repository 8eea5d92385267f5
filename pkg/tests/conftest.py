from __future__ import annotations

import functools

import pytest
from hypothesis import HealthCheck, settings

from spinlab.field_core import FieldParams, build_field
from spinlab.hilbert import gram_for_ring
from spinlab.residue_rings import field_ring, synthetic_ring
from spinlab.starlight import starlight_invariant

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

REFERENCE_FIELDS = ((3, 7), (5, 11), (7, 43), (11, 23), (13, 53), (17, 103), (19, 191))


@functools.lru_cache(maxsize=None)
def field(n: int, ell: int):
    return build_field(FieldParams(n, ell))


@functools.lru_cache(maxsize=None)
def ring(n: int, ell: int):
    return field_ring(field(n, ell))


@functools.lru_cache(maxsize=None)
def synth(n: int):
    return synthetic_ring(n)


@functools.lru_cache(maxsize=None)
def gram(n: int, ell: int):
    return gram_for_ring(ring(n, ell))


@functools.lru_cache(maxsize=None)
def star_table(n: int, ell: int):
    return starlight_invariant(ring(n, ell), gram(n, ell))


@pytest.fixture(scope="session")
def k37():
    return field(3, 7)


@pytest.fixture(scope="session")
def r37():
    return ring(3, 7)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("SPINLAB_CACHE", str(tmp_path / "cache"))


ACCEPTANCE_LINES: dict[str, str] = {}


def record_acceptance(name: str, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES[name] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES.values():
            terminalreporter.write_line(line)
