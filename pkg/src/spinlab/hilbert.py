"""Dyadic Hilbert symbols (u, v)_2 for units of an unramified extension of Q_2.

Three routes, each checking the others:

* :func:`conic_oracle` decides solvability of u x^2 + v y^2 = z^2 directly,
  by searching for a primitive solution mod 8 (enough by quadratic Hensel
  lifting, since the derivative 2w of the unit variable w has valuation 1).
* :func:`gram_from_oracle` tabulates the oracle on a basis of U/U^2 and
  :func:`symbol` evaluates the resulting F_2 bilinear form.
* :func:`gram_from_formula` is the closed-form candidate
  (1 + 2a, 1 + 2b)_2 = (-1)^Tr(ab); it is only trusted after
  :func:`validate_gram` has matched it against the oracle.

U/U^2 has basis {1 + 2e_1, ..., 1 + 2e_n, Delta} where e_i is the ring basis
mod 2 and Delta = 1 + 4c with Tr(c) = 1.  Delta generates the unramified
quadratic extension, so its row of the Gram matrix vanishes.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np

from spinlab.errors import DegreeTooLarge, NotAUnit, ValidationFailed
from spinlab.residue_rings import Ring8, Ring8Element, synthetic_ring

ORACLE_MAX_DEGREE = 7
VALIDATION_DEGREES = (1, 3, 5, 7)


@dataclass(frozen=True)
class UnitSquareClass8:
    a: tuple[int, ...]
    eps: int

    @property
    def vector(self) -> tuple[int, ...]:
        return self.a + (self.eps,)

    def __add__(self, other: UnitSquareClass8) -> UnitSquareClass8:
        return UnitSquareClass8(tuple(x ^ y for x, y in zip(self.a, other.a)), self.eps ^ other.eps)


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple[tuple[int, ...], ...]
    provenance: str  # "oracle" or "formula"

    @property
    def n(self) -> int:
        return len(self.entries) - 1

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.uint8)

    @property
    def unit_block(self) -> np.ndarray:
        """The n x n block on the 1 + 2e_i part (the Delta row is zero)."""
        return self.array[: self.n, : self.n]

    def is_symmetric(self) -> bool:
        a = self.array
        return bool((a == a.T).all())

    def delta_row_zero(self) -> bool:
        a = self.array
        return not a[self.n].any() and not a[:, self.n].any()

    def pair(self, x: UnitSquareClass8, y: UnitSquareClass8) -> int:
        xv, yv = x.vector, y.vector
        s = 0
        for i, xi in enumerate(xv):
            if xi:
                row = self.entries[i]
                for j, yj in enumerate(yv):
                    if yj:
                        s ^= row[j]
        return s


# ---------------------------------------------------------------- coordinates


def delta_index(ring: Ring8) -> int:
    """Smallest i with Tr(e_i) = 1; Delta = 1 + 4 e_i."""
    key = "delta_index"
    if key not in ring._cache:
        ring._cache[key] = next(i for i in range(ring.n) if ring.residue_trace(ring.basis(i)) == 1)
    return ring._cache[key]


def delta_unit(ring: Ring8) -> Ring8Element:
    k = delta_index(ring)
    return tuple((o + 4 * int(i == k)) % 8 for i, o in enumerate(ring.one))


def basis_unit(ring: Ring8, i: int) -> Ring8Element:
    """1 + 2 e_i."""
    return tuple((o + 2 * int(k == i)) % 8 for k, o in enumerate(ring.one))


def _product_rep(ring: Ring8, bits) -> Ring8Element:
    out = ring.one
    for i, b in enumerate(bits):
        if b:
            out = ring.mul(out, basis_unit(ring, i))
    return out


def coords8(ring: Ring8, u: Ring8Element) -> UnitSquareClass8:
    """Coordinates of u in U/U^2 (mod 8) on the basis {1 + 2e_i} + {Delta}.

    The a-part is the M_4 class.  Dividing the normalized unit by the product
    of the basis units named by a leaves 1 + 4c, and eps = Tr(c).
    """
    if not ring.is_unit(u):
        raise NotAUnit(f"{u} is not a unit")
    t = ring.teichmuller_normalize(u)
    a = tuple((x >> 1) & 1 for x in ring.sub(t, ring.one))
    q = ring.mul(t, ring.inverse(_product_rep(ring, a)))
    d = ring.sub(q, ring.one)
    assert all(x % 4 == 0 for x in d), "quotient is not 1 mod 4"
    c = tuple((x >> 2) & 1 for x in d)
    return UnitSquareClass8(a, ring.residue_trace(c))


# ---------------------------------------------------------------- conic oracle


@dataclass
class _OracleData:
    squares: np.ndarray  # distinct squares mod 8, shape (S, n)
    member: np.ndarray  # bool table over packed codes: is a square mod 8
    weights: np.ndarray
    one: np.ndarray


def _oracle_data(ring: Ring8) -> _OracleData:
    data = ring._cache.get("oracle")
    if data is not None:
        return data
    n = ring.n
    if n > ORACLE_MAX_DEGREE:
        raise DegreeTooLarge(f"conic oracle supports n <= {ORACLE_MAX_DEGREE}, got {n}")
    # w^2 mod 8 depends only on w mod 4 = l + 2m with l, m 0/1 vectors
    grid = np.indices((4,) * n).reshape(n, -1).T.astype(np.int64)
    t = ring.table_array
    sq = np.einsum("ni,nj,ijk->nk", grid, grid, t) % 8
    weights = 8 ** np.arange(n, dtype=np.int64)
    codes = np.unique(sq @ weights)
    member = np.zeros(8**n, dtype=bool)
    member[codes] = True
    squares = ((codes[:, None] // weights) % 8).astype(np.int64)
    data = _OracleData(squares=squares, member=member, weights=weights, one=np.array(ring.one, dtype=np.int64))
    ring._cache["oracle"] = data
    return data


def conic_oracle(ring: Ring8, u: Ring8Element, v: Ring8Element) -> int:
    """+1 iff u x^2 + v y^2 = z^2 has a primitive solution mod 8, else -1.

    A primitive solution has a unit among x, y, z.  Dividing by the square of
    that unit reduces each case to a single scan over the squares mod 8:

    * z unit:  u X + v Y = 1   (X, Y squares)
    * x unit:  u + v Y = Z
    * y unit:  u X + v = Z
    """
    if not (ring.is_unit(u) and ring.is_unit(v)):
        raise NotAUnit("conic oracle needs unit arguments")
    d = _oracle_data(ring)
    sq, member, w = d.squares, d.member, d.weights
    mu = ring.mult_by_matrix(u)
    mv = ring.mult_by_matrix(v)
    ux = (sq @ mu.T) % 8
    vy = (sq @ mv.T) % 8
    ua = np.asarray(u, dtype=np.int64)
    va = np.asarray(v, dtype=np.int64)
    # x unit / y unit
    if member[((ua + vy) % 8) @ w].any() or member[((ux + va) % 8) @ w].any():
        return 1
    # z unit: Y = v^-1 (1 - uX)
    mvinv = ring.mult_by_matrix(ring.inverse(v))
    target = (((d.one - ux) % 8) @ mvinv.T) % 8
    return 1 if member[target @ w].any() else -1


def oracle_table(ring: Ring8, us, vs) -> np.ndarray:
    """Matrix of conic_oracle(u, v) for all u in us, v in vs (batched over v)."""
    d = _oracle_data(ring)
    sq, member, w = d.squares, d.member, d.weights
    vs_arr = np.asarray(vs, dtype=np.int64)
    t = ring.table_array
    mvs = np.einsum("vi,ijk->vkj", vs_arr, t) % 8  # per-v multiplication matrices
    vy = np.einsum("sj,vkj->vsk", sq, mvs) % 8  # (V, S, n)
    invs = np.asarray([ring.inverse(tuple(v)) for v in vs_arr.tolist()], dtype=np.int64)
    minv = np.einsum("vi,ijk->vkj", invs, t) % 8
    out = np.empty((len(us), len(vs_arr)), dtype=np.int8)
    for r, u in enumerate(us):
        ua = np.asarray(u, dtype=np.int64)
        ux = (sq @ ring.mult_by_matrix(u).T) % 8
        ok = member[((ua[None, None, :] + vy) % 8) @ w].any(axis=1)
        ok |= member[((ux[None, :, :] + vs_arr[:, None, :]) % 8) @ w].any(axis=1)
        rest = ~ok
        if rest.any():
            diff = (d.one - ux) % 8
            tgt = np.einsum("sj,vkj->vsk", diff, minv[rest]) % 8
            ok[rest] = member[tgt @ w].any(axis=1)
        out[r] = np.where(ok, 1, -1)
    return out


# ---------------------------------------------------------------- Gram matrices


def _gram_basis(ring: Ring8) -> list[Ring8Element]:
    return [basis_unit(ring, i) for i in range(ring.n)] + [delta_unit(ring)]


def gram_from_oracle(ring: Ring8, timings: dict | None = None) -> GramMatrix:
    if ring.n > ORACLE_MAX_DEGREE:
        raise DegreeTooLarge(f"oracle Gram needs n <= {ORACLE_MAX_DEGREE}, got {ring.n}")
    basis = _gram_basis(ring)
    m = len(basis)
    g = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            t0 = time.perf_counter()
            bit = int(conic_oracle(ring, basis[i], basis[j]) == -1)
            if timings is not None:
                timings[(i, j)] = time.perf_counter() - t0
            g[i][j] = g[j][i] = bit
    return GramMatrix(tuple(map(tuple, g)), "oracle")


def gram_from_formula(ring: Ring8) -> GramMatrix:
    """Closed-form candidate: entry (i, j) = Tr(e_i e_j), Delta row and column zero."""
    n = ring.n
    g = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = ring.residue_trace(ring.mul(ring.basis(i), ring.basis(j)))
    return GramMatrix(tuple(map(tuple, g)), "formula")


def symbol(ring: Ring8, u: Ring8Element, v: Ring8Element, gram: GramMatrix) -> int:
    """(u, v)_2 = (-1)^(coords8(u)^T G coords8(v))."""
    return -1 if gram.pair(coords8(ring, u), coords8(ring, v)) else 1


def symbol_from_coords(x: UnitSquareClass8, y: UnitSquareClass8, gram: GramMatrix) -> int:
    return -1 if gram.pair(x, y) else 1


# ---------------------------------------------------------------- validation


@dataclass
class GramValidationReport:
    n: int
    modulus_poly: int | None
    oracle: GramMatrix
    formula: GramMatrix
    galois_pairs_checked: int
    entry_timings: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.oracle.entries == self.formula.entries


_VALIDATED: dict[int, GramValidationReport] = {}


def random_unit(ring: Ring8, rng: random.Random) -> Ring8Element:
    while True:
        x = tuple(rng.randrange(8) for _ in range(ring.n))
        if ring.is_unit(x):
            return x


def validate_gram(n: int, modulus_poly=None, galois_pairs: int = 100, seed: int = 0,
                  ring: Ring8 | None = None) -> GramValidationReport:
    """Compare oracle and formula Grams on a synthetic ring, and test Galois invariance.

    Raises :class:`ValidationFailed` carrying the first mismatching basis pair.
    """
    t_start = time.perf_counter()
    if ring is None:
        ring = synthetic_ring(n, modulus_poly)
    if ring.n > ORACLE_MAX_DEGREE:
        raise DegreeTooLarge(f"validation needs n <= {ORACLE_MAX_DEGREE}")
    timings: dict = {}
    go = gram_from_oracle(ring, timings)
    gf = gram_from_formula(ring)
    m = ring.n + 1
    for i in range(m):
        for j in range(m):
            if go.entries[i][j] != gf.entries[i][j]:
                raise ValidationFailed(
                    f"n={ring.n}: oracle and formula disagree at basis pair ({i}, {j})", pair=(i, j)
                )
    rng = random.Random(seed)
    for _ in range(galois_pairs):
        u, v = random_unit(ring, rng), random_unit(ring, rng)
        j = rng.randrange(1, ring.n) if ring.n > 1 else 0
        s = conic_oracle(ring, u, v)
        if conic_oracle(ring, ring.galois(u, j), ring.galois(v, j)) != s:
            raise ValidationFailed(f"n={ring.n}: oracle symbol not Galois invariant at {u}, {v}", pair=(u, v))
    report = GramValidationReport(
        n=ring.n, modulus_poly=ring.modulus_poly, oracle=go, formula=gf, galois_pairs_checked=galois_pairs,
        entry_timings=timings, seconds=time.perf_counter() - t_start,
    )
    if ring.field is None:
        _VALIDATED[ring.n] = report
    return report


def formula_validated() -> bool:
    return all(d in _VALIDATED for d in VALIDATION_DEGREES)


def ensure_formula_validated(galois_pairs: int = 100) -> dict[int, GramValidationReport]:
    """Run synthetic-ring validation at every degree in VALIDATION_DEGREES (once per process)."""
    for d in VALIDATION_DEGREES:
        if d not in _VALIDATED:
            validate_gram(d, galois_pairs=galois_pairs)
    return {d: _VALIDATED[d] for d in VALIDATION_DEGREES}


def gram_for_ring(ring: Ring8) -> GramMatrix:
    """Oracle Gram when the oracle reaches n, else the validated closed form."""
    if ring.n <= ORACLE_MAX_DEGREE:
        return gram_from_oracle(ring)
    ensure_formula_validated()
    return gram_from_formula(ring)


# ---------------------------------------------------------------- symbol laws


@dataclass
class SymbolPropertyReport:
    n: int
    exhaustive: bool
    units: int = 0
    pairs: int = 0
    triples: int = 0
    oracle_pairs: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _unit_index(ring: Ring8, units: list[Ring8Element]) -> dict:
    return {u: k for k, u in enumerate(units)}


def check_symbol_properties_exhaustive(ring: Ring8, gram: GramMatrix) -> SymbolPropertyReport:
    """Every law over all units mod 8, on the oracle table and on the Gram symbol.

    Bimultiplicativity is checked on every triple (u, w, v) of the oracle
    table; the Gram symbol must equal the oracle entrywise.  Only sensible
    for n <= 3 (448 units give 9e7 triples).
    """
    units = list(ring.units())
    idx = _unit_index(ring, units)
    m = len(units)
    rep = SymbolPropertyReport(n=ring.n, exhaustive=True, units=m, pairs=m * m, triples=m**3, oracle_pairs=m * m)
    oracle = oracle_table(ring, units, units)
    coords = np.array([coords8(ring, u).vector for u in units], dtype=np.int64)
    sym = np.where((coords @ gram.array.astype(np.int64) @ coords.T) % 2 == 1, -1, 1).astype(np.int8)
    if not np.array_equal(sym, oracle):
        i, j = map(int, np.argwhere(sym != oracle)[0])
        rep.failures.append(("oracle agreement", units[i], units[j]))
    if not np.array_equal(oracle, oracle.T):
        rep.failures.append(("symmetry",))
    for j in range(1, ring.n):
        perm = np.array([idx[ring.galois(u, j)] for u in units])
        if not np.array_equal(oracle[np.ix_(perm, perm)], oracle):
            rep.failures.append(("galois invariance", j))
    prod = np.array([[idx[ring.mul(u, w)] for w in units] for u in units])
    for v in range(m):
        col = oracle[:, v]
        if not np.array_equal(col[prod], np.multiply.outer(col, col)):
            rep.failures.append(("bimultiplicativity", units[v]))
            break
    m1 = idx[ring.scalar(-1)]
    if oracle[m1, m1] != -1:
        rep.failures.append(("(-1,-1) = -1",))
    if not (oracle[idx[ring.scalar(5)]] == 1).all():
        rep.failures.append(("(5,v) = +1",))
    return rep


def check_symbol_properties_sampled(ring: Ring8, gram: GramMatrix, samples: int = 10_000,
                                    oracle_samples: int | None = None, seed: int = 0) -> SymbolPropertyReport:
    """Random triples for the Gram symbol; a (possibly smaller) random set of oracle cross-checks."""
    rng = random.Random(seed)
    n = ring.n
    oracle_samples = samples if oracle_samples is None else oracle_samples
    use_oracle = n <= ORACLE_MAX_DEGREE
    rep = SymbolPropertyReport(n=n, exhaustive=False, triples=samples)
    minus1, five = ring.scalar(-1), ring.scalar(5)
    for k in range(samples):
        u, w, v = (random_unit(ring, rng) for _ in range(3))
        cu, cw, cv = coords8(ring, u), coords8(ring, w), coords8(ring, v)
        s_uv = symbol_from_coords(cu, cv, gram)
        if symbol(ring, ring.mul(u, w), v, gram) != s_uv * symbol_from_coords(cw, cv, gram):
            rep.failures.append(("bimultiplicativity", u, w, v))
        if symbol_from_coords(cv, cu, gram) != s_uv:
            rep.failures.append(("symmetry", u, v))
        j = rng.randrange(1, n) if n > 1 else 0
        if symbol(ring, ring.galois(u, j), ring.galois(v, j), gram) != s_uv:
            rep.failures.append(("galois invariance", u, v, j))
        if symbol(ring, five, v, gram) != 1:
            rep.failures.append(("(5,v) = +1", v))
        rep.pairs += 1
        if use_oracle and k < oracle_samples:
            if conic_oracle(ring, u, v) != s_uv:
                rep.failures.append(("oracle agreement", u, v))
            if conic_oracle(ring, five, v) != 1:
                rep.failures.append(("oracle (5,v) = +1", v))
            rep.oracle_pairs += 1
        if len(rep.failures) > 20:
            break
    if symbol(ring, minus1, minus1, gram) != -1:
        rep.failures.append(("(-1,-1) = -1",))
    if use_oracle and conic_oracle(ring, minus1, minus1) != -1:
        rep.failures.append(("oracle (-1,-1) = -1",))
    return rep
