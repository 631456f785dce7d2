"""Dense exact matrices with deterministic elimination.

All algorithms pivot on the first nonzero entry in column order, never by
magnitude, so kernels, echelon forms and certificates are reproducible
bit for bit across runs and platforms.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .fields import Element, FieldCtx

Vector = tuple[Element, ...]


class Matrix:
    """Immutable dense matrix over a :class:`FieldCtx`."""

    __slots__ = ("ctx", "data", "nrows", "ncols")

    def __init__(self, ctx: FieldCtx, rows: Iterable[Iterable[Element]]):
        norm = ctx.normalize
        data = tuple(tuple(norm(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise ValueError("ragged rows")
        else:
            width = 0
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", width)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zeros(ctx: FieldCtx, nrows: int, ncols: int | None = None) -> "Matrix":
        ncols = nrows if ncols is None else ncols
        z = ctx.zero()
        return Matrix(ctx, [[z] * ncols for _ in range(nrows)])

    @staticmethod
    def identity(ctx: FieldCtx, n: int) -> "Matrix":
        z, o = ctx.zero(), ctx.one()
        return Matrix(ctx, [[o if i == j else z for j in range(n)] for i in range(n)])

    @staticmethod
    def from_rows(ctx: FieldCtx, rows: Sequence[Sequence[Element]]) -> "Matrix":
        return Matrix(ctx, rows)

    # -- basic queries --------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> Element:
        return self.data[ij[0]][ij[1]]

    def row(self, i: int) -> Vector:
        return self.data[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.data)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Matrix)
            and self.ctx == other.ctx
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((self.ctx, self.data))

    def __repr__(self) -> str:
        body = "; ".join(
            " ".join(self.ctx.element_to_str(x) for x in row) for row in self.data
        )
        return f"Matrix({self.ctx.to_str()}, [{body}])"

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def is_alternating(self) -> bool:
        """Square, zero diagonal, and a[i][j] == -a[j][i] (all characteristics)."""
        if not self.is_square:
            return False
        neg = self.ctx.neg
        d = self.data
        for i in range(self.nrows):
            if d[i][i] != 0:
                return False
            for j in range(i + 1, self.nrows):
                if d[i][j] != neg(d[j][i]):
                    return False
        return True

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        add = self.ctx.add
        return Matrix(
            self.ctx,
            [
                [add(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        sub = self.ctx.sub
        return Matrix(
            self.ctx,
            [
                [sub(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def __neg__(self) -> "Matrix":
        neg = self.ctx.neg
        return Matrix(self.ctx, [[neg(a) for a in row] for row in self.data])

    def scale(self, c: Element) -> "Matrix":
        mul, c = self.ctx.mul, self.ctx.normalize(c)
        return Matrix(self.ctx, [[mul(c, a) for a in row] for row in self.data])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ctx != other.ctx:
            raise ValueError("field mismatch")
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.ctx.kind == "prime":
            p = self.ctx.p
            bt = list(zip(*other.data))
            return Matrix(
                self.ctx,
                [
                    [sum(a * b for a, b in zip(row, col)) % p for col in bt]
                    for row in self.data
                ],
            )
        bt = list(zip(*other.data))
        return Matrix(
            self.ctx,
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.data],
        )

    def transpose(self) -> "Matrix":
        return Matrix(self.ctx, list(zip(*self.data))) if self.data else self

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def _check_same_shape(self, other: "Matrix") -> None:
        if self.ctx != other.ctx:
            raise ValueError("field mismatch")
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    # -- slicing and stacking ----------------------------------------------------

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        d = self.data
        return Matrix(self.ctx, [[d[i][j] for j in cols] for i in rows])

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix(self.ctx, [row[c0:c1] for row in self.data[r0:r1]])

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Matrix(self.ctx, [ra + rb for ra, rb in zip(self.data, other.data)])

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return Matrix(self.ctx, self.data + other.data)

    def flatten(self) -> Vector:
        """Row-major vectorization."""
        return tuple(x for row in self.data for x in row)

    @staticmethod
    def from_flat(ctx: FieldCtx, nrows: int, ncols: int, flat: Sequence[Element]) -> "Matrix":
        if len(flat) != nrows * ncols:
            raise ValueError("length mismatch")
        return Matrix(ctx, [flat[i * ncols : (i + 1) * ncols] for i in range(nrows)])

    # -- elimination ----------------------------------------------------------

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form and pivot column indices."""
        rows = [list(r) for r in self.data]
        ctx = self.ctx
        pivots: list[int] = []
        r = 0
        for c in range(self.ncols):
            pivot_row = None
            for i in range(r, self.nrows):
                if rows[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            inv = ctx.inv(rows[r][c])
            rows[r] = [ctx.mul(inv, x) for x in rows[r]]
            for i in range(self.nrows):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [
                        ctx.sub(x, ctx.mul(f, y)) for x, y in zip(rows[i], rows[r])
                    ]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return Matrix(ctx, rows), tuple(pivots)

    def rank(self) -> int:
        """Rank by Gaussian elimination; asserts even rank on alternating input."""
        r = _rank_only(self)
        if self.is_square and self.is_alternating():
            assert r % 2 == 0, "alternating matrix with odd rank"
        return r

    def kernel_basis(self) -> list[Vector]:
        """Right kernel basis, one vector per free column in index order."""
        R, pivots = self.rref()
        ctx = self.ctx
        pivot_set = set(pivots)
        free = [j for j in range(self.ncols) if j not in pivot_set]
        basis: list[Vector] = []
        for f in free:
            v = [ctx.zero()] * self.ncols
            v[f] = ctx.one()
            for i, pc in enumerate(pivots):
                v[pc] = ctx.neg(R.data[i][f])
            basis.append(tuple(v))
        return basis

    def det(self) -> Element:
        """Determinant by forward elimination with tracked row swaps."""
        if not self.is_square:
            raise ValueError("determinant of non-square matrix")
        n = self.nrows
        ctx = self.ctx
        rows = [list(r) for r in self.data]
        sign_flip = False
        acc = ctx.one()
        for c in range(n):
            pivot_row = None
            for i in range(c, n):
                if rows[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                return ctx.zero()
            if pivot_row != c:
                rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
                sign_flip = not sign_flip
            piv = rows[c][c]
            acc = ctx.mul(acc, piv)
            inv = ctx.inv(piv)
            for i in range(c + 1, n):
                if rows[i][c] != 0:
                    f = ctx.mul(rows[i][c], inv)
                    rows[i] = [
                        ctx.sub(x, ctx.mul(f, y)) for x, y in zip(rows[i], rows[c])
                    ]
        return ctx.neg(acc) if sign_flip else acc

    def inverse(self) -> "Matrix":
        if not self.is_square:
            raise ValueError("inverse of non-square matrix")
        n = self.nrows
        aug, pivots = self.hstack(Matrix.identity(self.ctx, n)).rref()
        if pivots[:n] != tuple(range(n)):
            raise ValueError("matrix is singular")
        return aug.block(0, n, n, 2 * n)

    def solve(self, b: Vector) -> Vector | None:
        """A particular solution of ``self @ x = b`` (free variables zero), or None."""
        if len(b) != self.nrows:
            raise ValueError("length mismatch")
        ctx = self.ctx
        aug = self.hstack(Matrix(ctx, [[x] for x in b]))
        R, pivots = aug.rref()
        if self.ncols in pivots:
            return None
        x = [ctx.zero()] * self.ncols
        for i, pc in enumerate(pivots):
            x[pc] = R.data[i][self.ncols]
        return tuple(x)

    # -- serialization -----------------------------------------------------------

    def to_json(self) -> dict:
        enc = self.ctx.element_to_str
        return {
            "field": self.ctx.to_str(),
            "rows": self.nrows,
            "cols": self.ncols,
            "data": [[enc(x) for x in row] for row in self.data],
        }

    @staticmethod
    def from_json(obj: dict) -> "Matrix":
        ctx = FieldCtx.parse(obj["field"])
        m = Matrix(ctx, [[ctx.parse_element(x) for x in row] for row in obj["data"]])
        if m.shape != (obj["rows"], obj["cols"]):
            raise ValueError("declared shape does not match data")
        return m


def _rank_only(m: Matrix) -> int:
    """Rank without the parity assertion (shared by rank and internal callers)."""
    ctx = m.ctx
    rows = [list(r) for r in m.data]
    nrows, ncols = m.nrows, m.ncols
    rank = 0
    if ctx.kind == "prime":
        p = ctx.p
        for c in range(ncols):
            pivot_row = None
            for i in range(rank, nrows):
                if rows[i][c]:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
            prow = rows[rank]
            inv = pow(prow[c], -1, p)
            for i in range(rank + 1, nrows):
                ric = rows[i][c]
                if ric:
                    f = ric * inv % p
                    ri = rows[i]
                    for j in range(c, ncols):
                        ri[j] = (ri[j] - f * prow[j]) % p
            rank += 1
            if rank == nrows:
                break
        return rank
    for c in range(ncols):
        pivot_row = None
        for i in range(rank, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        prow = rows[rank]
        inv = ctx.inv(prow[c])
        for i in range(rank + 1, nrows):
            if rows[i][c] != 0:
                f = ctx.mul(rows[i][c], inv)
                rows[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(rows[i], prow)]
        rank += 1
        if rank == nrows:
            break
    return rank


# -- Pfaffians ------------------------------------------------------------------


def pfaffian(m: Matrix) -> Element:
    """Pfaffian by skew-symmetric elimination, valid in every characteristic.

    Sign convention: pfaffian([[0, 1], [-1, 0]]) == 1.  Odd-sized input
    returns the scalar zero by contract.  Raises ValueError if the input is
    not alternating.
    """
    if not m.is_alternating():
        raise ValueError("pfaffian requires an alternating matrix")
    n = m.nrows
    ctx = m.ctx
    if n % 2 == 1:
        return ctx.zero()
    rows = [list(r) for r in m.data]
    acc = ctx.one()
    negate = False
    for k in range(0, n - 1, 2):
        if rows[k][k + 1] == 0:
            j = None
            for cand in range(k + 2, n):
                if rows[k][cand] != 0:
                    j = cand
                    break
            if j is None:
                return ctx.zero()
            _swap_symmetric(rows, k + 1, j)
            negate = not negate
        piv = rows[k][k + 1]
        inv = ctx.inv(piv)
        # Clear row k / column k beyond position k+1 using row and column k+1.
        for j in range(k + 2, n):
            if rows[k][j] != 0:
                _add_symmetric_multiple(ctx, rows, j, k + 1, ctx.neg(ctx.mul(rows[k][j], inv)))
        # Clear row k+1 / column k+1 beyond position k+1 using row and column k.
        inv_neg = ctx.inv(rows[k + 1][k])
        for j in range(k + 2, n):
            if rows[k + 1][j] != 0:
                _add_symmetric_multiple(ctx, rows, j, k, ctx.neg(ctx.mul(rows[k + 1][j], inv_neg)))
        acc = ctx.mul(acc, piv)
    return ctx.neg(acc) if negate else acc


def _swap_symmetric(rows: list[list[Element]], i: int, j: int) -> None:
    rows[i], rows[j] = rows[j], rows[i]
    for r in rows:
        r[i], r[j] = r[j], r[i]


def _add_symmetric_multiple(ctx: FieldCtx, rows: list[list[Element]], dst: int, src: int, f: Element) -> None:
    """Congruence update: row dst += f * row src, then column dst += f * column src."""
    add, mul = ctx.add, ctx.mul
    rows[dst] = [add(x, mul(f, y)) for x, y in zip(rows[dst], rows[src])]
    for r in rows:
        r[dst] = add(r[dst], mul(f, r[src]))


def pfaffian_expansion(m: Matrix) -> Element:
    """Independent Pfaffian oracle: recursive expansion along the first row.

    Exponential cost; intended as a cross-check for sizes up to about 10.
    """
    if not m.is_alternating():
        raise ValueError("pfaffian requires an alternating matrix")
    if m.nrows % 2 == 1:
        return m.ctx.zero()
    if m.nrows > 12:
        raise ValueError("expansion oracle limited to small sizes")
    return _pf_expand(m.ctx, m.data, list(range(m.nrows)))


def _pf_expand(ctx: FieldCtx, d, idx: list[int]) -> Element:
    if not idx:
        return ctx.one()
    i0 = idx[0]
    acc = ctx.zero()
    for t in range(1, len(idx)):
        a = d[i0][idx[t]]
        if a == 0:
            continue
        rest = idx[1:t] + idx[t + 1 :]
        term = ctx.mul(a, _pf_expand(ctx, d, rest))
        # Expansion sign alternates with the position of the struck column.
        acc = ctx.add(acc, term) if t % 2 == 1 else ctx.sub(acc, term)
    return acc


# -- alternating coordinates -----------------------------------------------------


def upper_pairs(n: int) -> list[tuple[int, int]]:
    """Strict upper-triangle positions in row-major order."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def alternating_from_upper(ctx: FieldCtx, n: int, coords: Sequence[Element]) -> Matrix:
    """Build an alternating matrix from its strict upper triangle (row-major)."""
    pairs = upper_pairs(n)
    if len(coords) != len(pairs):
        raise ValueError("coordinate count mismatch")
    z = ctx.zero()
    rows = [[z] * n for _ in range(n)]
    for (i, j), c in zip(pairs, coords):
        c = ctx.normalize(c)
        rows[i][j] = c
        rows[j][i] = ctx.neg(c)
    return Matrix(ctx, rows)


def upper_coords(m: Matrix) -> Vector:
    """Strict upper triangle of an alternating matrix, row-major."""
    return tuple(m.data[i][j] for i, j in upper_pairs(m.nrows))


# -- structure probes --------------------------------------------------------------


def invertible_principal_submatrix(m: Matrix) -> tuple[int, ...]:
    """Lexicographically least index set I with m[I, I] invertible, |I| = rank.

    Valid for alternating input: a column basis always indexes an invertible
    principal submatrix, and the two index families coincide, so the greedy
    lex-least column basis is returned and then verified by Pfaffian.
    """
    if not m.is_alternating():
        raise ValueError("requires an alternating matrix")
    r = m.rank()
    chosen: list[int] = []
    cur_rank = 0
    for j in range(m.ncols):
        if len(chosen) == r:
            break
        cand = chosen + [j]
        new_rank = _rank_only(m.submatrix(range(m.nrows), cand))
        if new_rank > cur_rank:
            chosen.append(j)
            cur_rank = new_rank
    sub = m.submatrix(chosen, chosen)
    assert pfaffian(sub) != 0, "principal submatrix on column basis must be invertible"
    return tuple(chosen)


def eigenvalues_in_field(m: Matrix) -> list[Element]:
    """Eigenvalues lying in the ground field, ascending.

    Prime fields are scanned exhaustively.  Over the rationals the candidates
    come from the rational-root bound on the exact characteristic polynomial,
    which captures every rational eigenvalue; irrational and complex spectra
    are out of scope by construction.
    """
    if not m.is_square:
        raise ValueError("eigenvalues of non-square matrix")
    ctx = m.ctx
    n = m.nrows
    if ctx.kind == "prime":
        out = []
        ident = Matrix.identity(ctx, n)
        for lam in range(ctx.p):
            if (m - ident.scale(lam)).det() == 0:
                out.append(lam)
        return out
    coeffs = char_poly(m)
    return _rational_roots(coeffs)


def char_poly(m: Matrix) -> list[Fraction]:
    """Monic characteristic polynomial coefficients [1, c1, ..., cn] over Q.

    Faddeev-LeVerrier recursion; requires characteristic zero for the exact
    division by step counts.
    """
    if m.ctx.kind != "rational":
        raise ValueError("char_poly implemented over the rationals only")
    n = m.nrows
    coeffs: list[Fraction] = [Fraction(1)]
    mk = Matrix.identity(m.ctx, n)
    for k in range(1, n + 1):
        mk = m @ mk
        ck = -_trace(mk) / k
        coeffs.append(ck)
        if k < n:
            mk = mk + Matrix.identity(m.ctx, n).scale(ck)
    return coeffs


def _trace(m: Matrix) -> Element:
    acc = m.ctx.zero()
    for i in range(m.nrows):
        acc = m.ctx.add(acc, m.data[i][i])
    return acc


def _rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    # Clear denominators to an integer polynomial, strip powers of x, then
    # test the finitely many p/q candidates given by the rational-root bound.
    from math import gcd, lcm

    den = lcm(*[c.denominator for c in coeffs]) if coeffs else 1
    ints = [int(c * den) for c in coeffs]
    roots: list[Fraction] = []
    while ints and ints[-1] == 0:
        ints.pop()
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
    if len(ints) <= 1:
        return sorted(roots)
    a_lead, a_tail = ints[0], ints[-1]

    def divisors(v: int) -> list[int]:
        v = abs(v)
        out = set()
        d = 1
        while d * d <= v:
            if v % d == 0:
                out.add(d)
                out.add(v // d)
            d += 1
        return sorted(out)

    def value(x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in ints:
            acc = acc * x + c
        return acc

    seen = set()
    for num in divisors(a_tail):
        for d in divisors(a_lead):
            if gcd(num, d) != 1:
                continue
            for cand in (Fraction(num, d), Fraction(-num, d)):
                if cand not in seen:
                    seen.add(cand)
                    if value(cand) == 0:
                        roots.append(cand)
    return sorted(roots)


# -- vectors -----------------------------------------------------------------------


def mat_vec(m: Matrix, v: Vector) -> Vector:
    if len(v) != m.ncols:
        raise ValueError("length mismatch")
    ctx = m.ctx
    if ctx.kind == "prime":
        p = ctx.p
        return tuple(sum(a * b for a, b in zip(row, v)) % p for row in m.data)
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m.data)


def vec_dot(ctx: FieldCtx, u: Vector, v: Vector) -> Element:
    if len(u) != len(v):
        raise ValueError("length mismatch")
    if ctx.kind == "prime":
        return sum(a * b for a, b in zip(u, v)) % ctx.p
    return sum((a * b for a, b in zip(u, v)), ctx.zero())


def form_value(gram: Matrix, x: Vector, y: Vector) -> Element:
    """Bilinear form value x^T gram y."""
    return vec_dot(gram.ctx, x, mat_vec(gram, y))


def rows_matrix(ctx: FieldCtx, vecs: Sequence[Vector]) -> Matrix:
    return Matrix(ctx, list(vecs))


def span_dim(ctx: FieldCtx, vecs: Sequence[Vector]) -> int:
    if not vecs:
        return 0
    return _rank_only(rows_matrix(ctx, vecs))


def in_span(ctx: FieldCtx, vecs: Sequence[Vector], v: Vector) -> bool:
    """Membership of v in the row span of vecs."""
    if not vecs:
        return all(x == 0 for x in v)
    base = span_dim(ctx, vecs)
    return span_dim(ctx, list(vecs) + [v]) == base


def column_space_contains(m: Matrix, v: Vector) -> bool:
    return in_span(m.ctx, list(zip(*m.data)) if m.data else [], v)
