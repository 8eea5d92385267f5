import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinlab.errors import DegreeTooLarge, NotAUnit
from spinlab.hilbert import (
    UnitSquareClass8,
    basis_unit,
    check_symbol_properties_exhaustive,
    conic_oracle,
    coords8,
    delta_unit,
    gram_for_ring,
    gram_from_formula,
    gram_from_oracle,
    random_unit,
    symbol,
    validate_gram,
)

from conftest import ring, synth


def brute_conic(r, u, v):
    """Primitive solvability of u x^2 + v y^2 = z^2 over all of (O/8)^3, by direct squaring."""
    n = r.n
    elems = np.array(list(product(range(8), repeat=n)), dtype=np.int64)
    t = np.array(r.mult_table_mod8, dtype=np.int64)
    sq = np.einsum("ai,aj,ijk->ak", elems, elems, t) % 8
    unit = (elems % 2).any(axis=1)
    w = 8 ** np.arange(n)
    sq_any = np.zeros(8**n, bool)
    sq_any[sq @ w] = True
    sq_unit = np.zeros(8**n, bool)
    sq_unit[sq[unit] @ w] = True
    mu = np.einsum("i,ijk->kj", np.array(u), t) % 8
    mv = np.einsum("i,ijk->kj", np.array(v), t) % 8
    ux = (sq @ mu.T) % 8
    vy = (sq @ mv.T) % 8
    val = ((ux[:, None, :] + vy[None, :, :]) % 8) @ w
    xy_unit = unit[:, None] | unit[None, :]
    ok = (xy_unit & sq_any[val]) | sq_unit[val]
    return 1 if ok.any() else -1


def classical_q2(a, b):
    eps = lambda x: ((x - 1) // 2) % 2  # noqa: E731
    return -1 if eps(a) and eps(b) else 1


# ---------------------------------------------------------------- n = 1 (Z/8)


def test_coords8_on_z8():
    r = synth(1)
    assert coords8(r, (3,)) == UnitSquareClass8((1,), 0)
    assert coords8(r, (5,)) == UnitSquareClass8((0,), 1)
    assert coords8(r, (7,)) == UnitSquareClass8((1,), 1)
    assert coords8(r, (1,)) == UnitSquareClass8((0,), 0)


def test_oracle_matches_classical_dyadic_symbol():
    r = synth(1)
    for a, b in product((1, 3, 5, 7), repeat=2):
        assert conic_oracle(r, (a,), (b,)) == classical_q2(a, b)


def test_gram_n1():
    r = synth(1)
    assert gram_from_oracle(r).entries == ((1, 0), (0, 0))
    assert gram_from_formula(r).entries == ((1, 0), (0, 0))
    assert symbol(r, (7,), (7,), gram_from_oracle(r)) == -1


# ---------------------------------------------------------------- n = 3


def test_oracle_against_brute_force_n3(r37):
    r = r37
    special = [basis_unit(r, i) for i in range(3)] + [delta_unit(r), r.scalar(-1), r.scalar(5), r.one]
    rng = random.Random(1)
    special += [random_unit(r, rng) for _ in range(5)]
    for u, v in product(special, repeat=2):
        assert conic_oracle(r, u, v) == brute_conic(r, u, v), (u, v)


@pytest.mark.parametrize("n,ell", [(3, 7), (5, 11)])
def test_oracle_known_values(n, ell):
    r = ring(n, ell)
    assert conic_oracle(r, r.one, r.one) == 1
    assert conic_oracle(r, r.scalar(-1), r.scalar(-1)) == -1
    assert conic_oracle(r, r.scalar(5), r.scalar(5)) == 1


def test_symbol_u_minus_u(r37):
    rng = random.Random(7)
    g = gram_from_oracle(r37)
    for _ in range(100):
        u = random_unit(r37, rng)
        assert symbol(r37, u, r37.neg(u), g) == 1
        assert conic_oracle(r37, u, r37.neg(u)) == 1


def test_coords8_zero_iff_square_n3(r37):
    squares = {r37.mul(w, w) for w in r37.units()}
    for u in r37.units():
        c = coords8(r37, u)
        assert (not any(c.vector)) == (u in squares)


def test_exhaustive_laws_n3_field_ring(r37):
    rep = check_symbol_properties_exhaustive(r37, gram_from_oracle(r37))
    assert rep.passed, rep.failures
    assert rep.units == 448


# ---------------------------------------------------------------- Gram matrices


@pytest.mark.parametrize("n", [1, 3, 5])
def test_validate_gram_synthetic(n):
    rep = validate_gram(n, galois_pairs=30)
    assert rep.passed
    assert rep.oracle.provenance == "oracle" and rep.formula.provenance == "formula"
    assert rep.entry_timings


@pytest.mark.parametrize("n,ell", [(3, 7), (5, 11), (7, 43)])
def test_formula_equals_oracle_on_field_rings(n, ell):
    r = ring(n, ell)
    go, gf = gram_from_oracle(r), gram_from_formula(r)
    assert go.entries == gf.entries
    assert go.is_symmetric() and go.delta_row_zero()


def test_period_basis_gram_is_identity(r37):
    # the trace form is 1 on the diagonal and even off it, so the period basis is self-dual mod 2
    g = gram_from_formula(r37).array
    assert np.array_equal(g[:3, :3], np.eye(3, dtype=g.dtype))


def test_oracle_degree_guard():
    with pytest.raises(DegreeTooLarge):
        gram_from_oracle(ring(11, 23))


def test_gram_provenance_by_degree():
    assert gram_for_ring(ring(7, 43)).provenance == "oracle"
    assert gram_for_ring(ring(11, 23)).provenance == "formula"


def test_non_unit_rejected(r37):
    with pytest.raises(NotAUnit):
        conic_oracle(r37, (2, 0, 0), r37.one)
    with pytest.raises(NotAUnit):
        coords8(r37, (0, 4, 2))


# ---------------------------------------------------------------- properties


R5, S5 = ring(5, 11), synth(5)
G5R, G5S = gram_from_oracle(R5), gram_from_oracle(S5)
UNIT5 = st.lists(st.integers(0, 7), min_size=5, max_size=5).map(tuple).filter(lambda x: any(a & 1 for a in x))


@given(UNIT5, UNIT5)
def test_coords8_biadditive(u, v):
    for r in (R5, S5):
        assert coords8(r, r.mul(u, v)) == coords8(r, u) + coords8(r, v)


@given(UNIT5, UNIT5, UNIT5)
def test_symbol_mod8_well_defined(u, gamma, v):
    for r, g in ((R5, G5R), (S5, G5S)):
        assert symbol(r, r.mul(u, r.mul(gamma, gamma)), v, g) == symbol(r, u, v, g)


@given(UNIT5, UNIT5)
def test_oracle_agrees_with_gram_symbol_n5(u, v):
    for r, g in ((R5, G5R), (S5, G5S)):
        assert conic_oracle(r, u, v) == symbol(r, u, v, g)


@given(UNIT5)
def test_five_pairs_trivially(v):
    assert symbol(R5, R5.scalar(5), v, G5R) == 1
    assert conic_oracle(R5, R5.scalar(5), v) == 1
