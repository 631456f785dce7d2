"""Affine spaces of matrices: enumeration, sampling, actions, and searches.

An affine space is a base matrix plus the span of an independent translation
basis.  Enumeration is ordered lexicographically by coordinate tuple, and
sampled draws depend only on (seed, stream index), so both can be
partitioned across workers without changing any member.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from . import _engine
from .errors import BudgetExceededError
from .fields import Element, FieldCtx
from .matrices import (
    Matrix,
    Vector,
    alternating_from_upper,
    rows_matrix,
    upper_pairs,
)
from .rand import DEFAULT_RATIONAL_BOX, uniform_below


class Span:
    """Row span with a frozen echelon form for exact membership and reduction."""

    def __init__(self, ctx: FieldCtx, vecs: Sequence[Vector], width: int | None = None):
        self.ctx = ctx
        if vecs:
            self.width = len(vecs[0])
            R, pivots = rows_matrix(ctx, vecs).rref()
            self.rows = [R.row(i) for i in range(len(pivots))]
            self.pivots = list(pivots)
        else:
            if width is None:
                raise ValueError("empty span needs an explicit width")
            self.width = width
            self.rows = []
            self.pivots = []

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def basis(self) -> list[Vector]:
        return [tuple(r) for r in self.rows]

    def reduce(self, v: Vector) -> Vector:
        """Residual of v after elimination against the echelon rows (linear in v)."""
        if len(v) != self.width:
            raise ValueError("length mismatch")
        ctx = self.ctx
        out = list(v)
        for row, pc in zip(self.rows, self.pivots):
            c = out[pc]
            if c != 0:
                out = [ctx.sub(x, ctx.mul(c, y)) for x, y in zip(out, row)]
        return tuple(out)

    def contains(self, v: Vector) -> bool:
        return all(x == 0 for x in self.reduce(v))


class AffineMatrixSpace:
    """base + span(basis) inside the matrices of a fixed shape."""

    __slots__ = ("ctx", "base", "basis", "alternating")

    def __init__(self, base: Matrix, basis: Sequence[Matrix], alternating: bool = False):
        ctx = base.ctx
        for g in basis:
            if g.ctx != ctx:
                raise ValueError("field mismatch in basis")
            if g.shape != base.shape:
                raise ValueError("shape mismatch in basis")
        flats = [g.flatten() for g in basis]
        if flats and Span(ctx, flats).dim != len(flats):
            raise ValueError("translation basis is linearly dependent")
        if alternating:
            if not base.is_alternating() or any(not g.is_alternating() for g in basis):
                raise ValueError("alternating flag set on non-alternating data")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", tuple(basis))
        object.__setattr__(self, "alternating", alternating)

    def __setattr__(self, name, value):
        raise AttributeError("AffineMatrixSpace is immutable")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def shape(self) -> tuple[int, int]:
        return self.base.shape

    def __repr__(self) -> str:
        n, m = self.shape
        return (
            f"AffineMatrixSpace({self.ctx.to_str()}, shape={n}x{m}, dim={self.dim},"
            f" alternating={self.alternating})"
        )

    # -- membership ------------------------------------------------------------

    def member_at(self, coords: Sequence[Element]) -> Matrix:
        if len(coords) != self.dim:
            raise ValueError("coordinate count mismatch")
        acc = self.base
        for c, g in zip(coords, self.basis):
            c = self.ctx.normalize(c)
            if c != 0:
                acc = acc + g.scale(c)
        return acc

    def translation_span(self) -> Span:
        return Span(self.ctx, [g.flatten() for g in self.basis], width=self.shape[0] * self.shape[1])

    def translation_contains(self, m: Matrix) -> bool:
        return self.translation_span().contains(m.flatten())

    def contains(self, m: Matrix) -> bool:
        if m.shape != self.shape or m.ctx != self.ctx:
            return False
        return self.translation_span().contains((m - self.base).flatten())

    # -- enumeration and sampling -------------------------------------------------

    def member_count(self) -> int:
        if self.ctx.kind != "prime":
            raise ValueError("member count is finite only over a prime field")
        return self.ctx.p**self.dim

    def enumerate(self, budget: int = 10**6) -> Iterator[tuple[tuple[Element, ...], Matrix]]:
        """All members in lexicographic coordinate order."""
        if self.dim == 0:
            yield (), self.base
            return
        if self.ctx.kind != "prime":
            raise ValueError("exhaustive enumeration needs a prime field")
        total = self.member_count()
        if total > budget:
            raise BudgetExceededError(f"{total} members exceed budget {budget}")
        yield from self.enumerate_range(0, total)

    def enumerate_range(self, lo: int, hi: int) -> Iterator[tuple[tuple[Element, ...], Matrix]]:
        """Members with enumeration index in [lo, hi); partition-safe."""
        if self.ctx.kind != "prime" and self.dim > 0:
            raise ValueError("exhaustive enumeration needs a prime field")
        q = self.ctx.p if self.dim else 1
        for idx in range(lo, hi):
            coords = _engine.index_to_coords(idx, self.dim, q) if self.dim else ()
            yield coords, self.member_at(coords)

    def sample(
        self, count: int, seed: int, box: int = DEFAULT_RATIONAL_BOX
    ) -> Iterator[tuple[tuple[Element, ...], Matrix]]:
        """Seeded member stream; draw i is independent of any partitioning."""
        yield from self.sample_range(0, count, seed, box)

    def sample_range(
        self, lo: int, hi: int, seed: int, box: int = DEFAULT_RATIONAL_BOX
    ) -> Iterator[tuple[tuple[Element, ...], Matrix]]:
        d = self.dim
        for i in range(lo, hi):
            coords = self.coords_for_sample(i, seed, box)
            yield coords, self.member_at(coords)

    def coords_for_sample(self, i: int, seed: int, box: int = DEFAULT_RATIONAL_BOX) -> tuple[Element, ...]:
        d = self.dim
        if self.ctx.kind == "prime":
            return tuple(uniform_below(seed, i * d + j, self.ctx.p) for j in range(d))
        from fractions import Fraction

        w = 2 * box + 1
        return tuple(Fraction(uniform_below(seed, i * d + j, w) - box) for j in range(d))

    # -- engine bridge ---------------------------------------------------------------

    def flat_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Residue arrays (base_flat, basis_flat) for the vectorized engine."""
        if self.ctx.kind != "prime":
            raise ValueError("engine arrays exist only over prime fields")
        n, m = self.shape
        base_flat = np.array(self.base.flatten(), dtype=np.int64)
        if self.dim:
            basis_flat = np.array([g.flatten() for g in self.basis], dtype=np.int64)
        else:
            basis_flat = np.empty((0, n * m), dtype=np.int64)
        return base_flat, basis_flat

    # -- serialization ------------------------------------------------------------------

    def to_json(self) -> dict:
        n, m = self.shape
        return {
            "field": self.ctx.to_str(),
            "shape": [n, m],
            "alternating": self.alternating,
            "base": self.base.to_json(),
            "basis": [g.to_json() for g in self.basis],
        }

    @staticmethod
    def from_json(obj: dict) -> "AffineMatrixSpace":
        base = Matrix.from_json(obj["base"])
        basis = [Matrix.from_json(g) for g in obj["basis"]]
        sp = AffineMatrixSpace(base, basis, alternating=bool(obj["alternating"]))
        if list(sp.shape) != list(obj["shape"]):
            raise ValueError("declared shape does not match base")
        return sp


@dataclass(frozen=True)
class BlockView:
    """Named access to the blocks of a square matrix split at index r."""

    matrix: Matrix
    r: int

    @property
    def a(self) -> Matrix:
        return self.matrix.block(0, self.r, 0, self.r)

    @property
    def b(self) -> Matrix:
        n = self.matrix.ncols
        return self.matrix.block(0, self.r, self.r, n)

    @property
    def c(self) -> Matrix:
        n = self.matrix.nrows
        return self.matrix.block(self.r, n, 0, self.r)

    @property
    def d(self) -> Matrix:
        n, m = self.matrix.shape
        return self.matrix.block(self.r, n, self.r, m)


# -- group actions ----------------------------------------------------------------------


def congruence_act(sp: AffineMatrixSpace, p: Matrix) -> AffineMatrixSpace:
    """X -> P^T X P member-wise; preserves rank multiset and alternation."""
    if p.det() == 0:
        raise ValueError("congruence requires an invertible matrix")
    pt = p.T
    return AffineMatrixSpace(
        pt @ sp.base @ p, [pt @ g @ p for g in sp.basis], alternating=sp.alternating
    )


def equivalence_act(sp: AffineMatrixSpace, p: Matrix, q: Matrix) -> AffineMatrixSpace:
    """X -> P X Q member-wise; preserves the rank multiset."""
    if p.det() == 0 or q.det() == 0:
        raise ValueError("equivalence requires invertible factors")
    return AffineMatrixSpace(p @ sp.base @ q, [p @ g @ q for g in sp.basis])


def spaces_equal(x: AffineMatrixSpace, y: AffineMatrixSpace) -> bool:
    """Exact set equality of affine spaces."""
    if x.ctx != y.ctx or x.shape != y.shape or x.dim != y.dim:
        return False
    span = y.translation_span()
    if not span.contains((x.base - y.base).flatten()):
        return False
    return all(span.contains(g.flatten()) for g in x.basis)


def rank_multiset(sp: AffineMatrixSpace, budget: int = 10**4) -> dict[int, int]:
    """Exhaustive rank -> count map (prime field, budgeted)."""
    if sp.ctx.kind != "prime":
        raise ValueError("rank multiset needs a prime field")
    total = sp.member_count()
    if total > budget:
        raise BudgetExceededError(f"{total} members exceed budget {budget}")
    n, m = sp.shape
    base_flat, basis_flat = sp.flat_arrays()
    counts = _engine.rank_counts(base_flat, basis_flat, n, m, sp.ctx.p, total)
    return {r: int(c) for r, c in enumerate(counts) if c}


# -- brute-force equivalence of small square spaces ------------------------------------------


def _gl_matrices(ctx: FieldCtx, s: int) -> list[Matrix]:
    """GL_s(F_q) in lexicographic order of the flattened entry tuple."""
    out = []
    for flat in product(range(ctx.p), repeat=s * s):
        m = Matrix.from_flat(ctx, s, s, flat)
        if m.det() != 0:
            out.append(m)
    return out


def brute_equivalence_test(
    x: AffineMatrixSpace, y: AffineMatrixSpace
) -> tuple[Matrix, Matrix] | None:
    """First (P, Q) in GL_s^2 lexicographic scan with P X Q == Y, else None.

    Deliberately refuses s >= 3 or q > 7: the search space past |GL_2(F_7)|^2
    stops being a meaningful brute-force certificate.
    """
    if x.ctx != y.ctx or x.ctx.kind != "prime":
        raise ValueError("both spaces must live over one prime field")
    s = x.shape[0]
    if x.shape != (s, s) or y.shape != (s, s):
        raise ValueError("square spaces of equal size required")
    if s > 2 or x.ctx.p > 7:
        raise ValueError("brute-force envelope is s <= 2, q <= 7")
    if x.dim != y.dim:
        return None
    p = x.ctx.p
    gl = _gl_matrices(x.ctx, s)
    if s == 1:
        for pm in gl:
            for qm in gl:
                cand = equivalence_act(x, pm, qm)
                if spaces_equal(cand, y):
                    return pm, qm
        return None
    witness = _brute_equivalence_2x2(x, y, gl, p)
    if witness is None:
        return None
    pm, qm = witness
    assert spaces_equal(equivalence_act(x, pm, qm), y)
    return pm, qm


def _brute_equivalence_2x2(x, y, gl, p: int):
    # Membership in an affine space via its annihilator: v lies in the row
    # span of B iff v @ K == 0 for K a kernel basis of B.
    ann = rows_matrix(x.ctx, [g.flatten() for g in y.basis]).kernel_basis() if y.dim else None
    if ann is None:
        kmat = np.eye(4, dtype=np.int64)
    elif not ann:
        kmat = np.empty((4, 0), dtype=np.int64)
    else:
        kmat = np.array(ann, dtype=np.int64).T
    g_arr = np.array([m.flatten() for m in gl], dtype=np.int64).reshape(-1, 2, 2)
    x_mats = [np.array(x.base.flatten(), dtype=np.int64).reshape(2, 2)] + [
        np.array(g.flatten(), dtype=np.int64).reshape(2, 2) for g in x.basis
    ]
    y0 = np.array(y.base.flatten(), dtype=np.int64)
    count = len(gl)
    step = max(1, (1 << 20) // max(1, count))
    for lo in range(0, count, step):
        p_blk = g_arr[lo : lo + step]
        ok = None
        for t, xm in enumerate(x_mats):
            px = p_blk @ xm % p
            pxq = np.einsum("aij,bjk->abik", px, g_arr) % p
            flat = pxq.reshape(pxq.shape[0], pxq.shape[1], 4)
            if t == 0:
                flat = (flat - y0) % p
            resid = flat @ kmat % p if kmat.size else np.zeros(flat.shape[:2] + (1,), dtype=np.int64)
            good = ~resid.any(axis=2)
            ok = good if ok is None else (ok & good)
            if not ok.any():
                break
        if ok is not None and ok.any():
            a, b = np.argwhere(ok)[0]
            return gl[lo + int(a)], gl[int(b)]
    return None


# -- exhaustive optimal-dimension search -----------------------------------------------------


def gaussian_binomial(m: int, d: int, q: int) -> int:
    """Number of d-dimensional subspaces of F_q^m."""
    if d < 0 or d > m:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def echelon_bases(m: int, d: int, q: int) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Reduced-echelon representatives of the d-dim subspaces of F_q^m."""
    for pivots in combinations(range(m), d):
        free = [
            (i, j)
            for i in range(d)
            for j in range(pivots[i] + 1, m)
            if j not in pivots
        ]
        for values in product(range(q), repeat=len(free)):
            w = np.zeros((d, m), dtype=np.int64)
            for i, pc in enumerate(pivots):
                w[i, pc] = 1
            for (i, j), v in zip(free, values):
                w[i, j] = v
            yield pivots, w


@dataclass(frozen=True)
class OptimalSearchResult:
    max_dim: int
    exists_by_dim: dict[int, bool]
    witness: AffineMatrixSpace | None


def exhaustive_optimal_dimension(
    n: int,
    r: int,
    ctx: FieldCtx,
    predicate: str,
    *,
    table_budget: int = 10**6,
    work_budget: int = 3 * 10**8,
) -> OptimalSearchResult:
    """Exact maximum dimension of an affine subspace of A_n(F_q) satisfying
    ``predicate`` ("constant-rank" or "rank-at-least" relative to r).

    Enumerates direction spaces as echelon representatives and, for each,
    classifies every coset in a single vectorized pass over the full ambient
    rank table.  Both predicates pass to affine subspaces, so the scan walks
    dimensions upward and stops at the first empty level.
    """
    if ctx.kind != "prime":
        raise ValueError("exhaustive search needs a prime field")
    if predicate not in ("constant-rank", "rank-at-least"):
        raise ValueError(f"unknown predicate {predicate!r}")
    if r < 0 or r > n or r % 2 == 1:
        raise ValueError("target rank must be even and within the size")
    q = ctx.p
    m = n * (n - 1) // 2
    total = q**m
    if total > table_budget:
        raise BudgetExceededError(f"ambient table of {total} entries exceeds {table_budget}")

    units = [alternating_from_upper(ctx, n, [1 if t == u else 0 for t in range(m)]) for u in range(m)]
    basis_flat = np.array([u.flatten() for u in units], dtype=np.int64)
    base_flat = np.zeros(n * n, dtype=np.int64)
    ranks = np.empty(total, dtype=np.int64)
    inv_table = _engine._inverse_table(q)
    for lo, hi in _engine.chunk_ranges(0, total, n * n):
        coords = _engine.lex_coords(lo, hi, m, q)
        mats = _engine.members_from_coords(coords, base_flat, basis_flat, n, n, q)
        ranks[lo:hi] = _engine.batch_rank(mats, q, inv_table)
    bad = (ranks != r) if predicate == "constant-rank" else (ranks < r)

    all_vecs = _engine.lex_coords(0, total, m, q)
    exists_by_dim: dict[int, bool] = {}
    witness = None
    max_dim = -1
    for d in range(0, m + 1):
        found = None
        if d == 0:
            idx = int(np.argmin(bad)) if not bad.all() else -1
            if idx >= 0:
                found = (None, idx)
        elif d == m:
            if not bad.any():
                found = (np.eye(m, dtype=np.int64), 0)
        else:
            n_spaces = gaussian_binomial(m, d, q)
            if n_spaces * total > work_budget:
                raise BudgetExceededError(
                    f"dimension {d} needs {n_spaces} x {total} work units"
                )
            found = _coset_scan(all_vecs, bad, m, d, q)
        exists_by_dim[d] = found is not None
        if found is None:
            break
        max_dim = d
        w_rows, rep_idx = found
        base = alternating_from_upper(ctx, n, [int(v) for v in all_vecs[rep_idx]])
        gens = (
            [alternating_from_upper(ctx, n, [int(v) for v in row]) for row in w_rows]
            if w_rows is not None
            else []
        )
        witness = AffineMatrixSpace(base, gens, alternating=True)
        if predicate == "constant-rank":
            assert all(mat.rank() == r for _, mat in witness.enumerate(10**6))
        else:
            assert all(mat.rank() >= r for _, mat in witness.enumerate(10**6))
    return OptimalSearchResult(max_dim=max_dim, exists_by_dim=exists_by_dim, witness=witness)


def _coset_scan(all_vecs: np.ndarray, bad: np.ndarray, m: int, d: int, q: int):
    """First (direction rows, coset representative index) whose coset avoids bad."""
    key_pows = q ** np.arange(m - d - 1, -1, -1, dtype=np.int64)
    n_cosets = q ** (m - d)
    for pivots, w in echelon_bases(m, d, q):
        nonpiv = [j for j in range(m) if j not in pivots]
        red = (all_vecs - all_vecs[:, list(pivots)] @ w) % q
        keys = red[:, nonpiv] @ key_pows
        bad_counts = np.bincount(keys[bad], minlength=n_cosets)
        hit = int(np.argmin(bad_counts)) if bad_counts.size else 0
        if bad_counts[hit] == 0:
            rep_idx = int(np.argmax(keys == hit))
            return w, rep_idx
    return None
