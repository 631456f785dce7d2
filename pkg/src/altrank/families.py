"""Constructors for the extremal families and their closed-form dimensions.

Each constructor verifies the contract of any inner family it embeds instead
of trusting the caller, and lays out translation bases in a fixed order
(top-left entries, then the inner family's generators, then the free blocks,
each row-major) so coordinates are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import analyze
from .fields import Element, FieldCtx
from .matrices import Matrix, alternating_from_upper, pfaffian, upper_pairs
from .spaces import AffineMatrixSpace
from .symplectic import FormSpacePair, standard_symplectic

INNER_VERIFY_BUDGET = 10**6
INNER_VERIFY_SAMPLES = 10**4


def _unit(ctx: FieldCtx, rows: int, cols: int, i: int, j: int) -> Matrix:
    z, o = ctx.zero(), ctx.one()
    data = [[z] * cols for _ in range(rows)]
    data[i][j] = o
    return Matrix(ctx, data)


def _alternating_units(ctx: FieldCtx, n: int) -> list[Matrix]:
    m = n * (n - 1) // 2
    return [
        alternating_from_upper(ctx, n, [1 if t == u else 0 for t in range(m)])
        for u in range(m)
    ]


def _strictly_upper_units(ctx: FieldCtx, n: int) -> list[Matrix]:
    return [_unit(ctx, n, n, i, j) for i, j in upper_pairs(n)]


def _embed(ctx: FieldCtx, n: int, m: int, r0: int, c0: int, block: Matrix) -> Matrix:
    z = ctx.zero()
    data = [[z] * m for _ in range(n)]
    for i in range(block.nrows):
        for j in range(block.ncols):
            data[r0 + i][c0 + j] = block[i, j]
    return Matrix(ctx, data)


def _bordered(ctx: FieldCtx, n: int, s: int, a: Matrix, b: Matrix, c: Matrix) -> Matrix:
    """[[a, b, c], [-b^T, 0, 0], [-c^T, 0, 0]] padded to n x n."""
    z = ctx.zero()
    data = [[z] * n for _ in range(n)]
    for i in range(s):
        for j in range(s):
            data[i][j] = a[i, j]
            data[i][s + j] = b[i, j]
            data[s + j][i] = ctx.neg(b[i, j])
        for j in range(n - 2 * s):
            data[i][2 * s + j] = c[i, j]
            data[2 * s + j][i] = ctx.neg(c[i, j])
    return Matrix(ctx, data)


def _verify_all_invertible(sp: AffineMatrixSpace, what: str) -> None:
    s = sp.shape[0]
    if sp.shape != (s, s):
        raise ValueError(f"{what} must consist of square matrices")
    profile = analyze.rank_profile(
        sp, budget=INNER_VERIFY_BUDGET, seed=0, samples=INNER_VERIFY_SAMPLES
    )
    if profile.min_rank < s:
        raise ValueError(f"{what} contains a singular member")


def build_strictly_upper_space(ctx: FieldCtx, n: int) -> AffineMatrixSpace:
    """Linear space of strictly upper-triangular n x n matrices."""
    if n < 1:
        raise ValueError("size must be positive")
    return AffineMatrixSpace(Matrix.zeros(ctx, n, n), _strictly_upper_units(ctx, n))


def build_unitriangular_space(ctx: FieldCtx, s: int) -> AffineMatrixSpace:
    """Identity plus the strictly upper-triangular space; every member invertible."""
    if s < 1:
        raise ValueError("size must be positive")
    return AffineMatrixSpace(Matrix.identity(ctx, s), _strictly_upper_units(ctx, s))


def build_invertible_alternating(ctx: FieldCtx, s: int) -> AffineMatrixSpace:
    """Affine space of invertible alternating 2s x 2s matrices of dimension s(s-1).

    Members are [[0, U], [-U^T, B]] with U running over the unitriangular
    space and B over the alternating s x s matrices.
    """
    if s < 1:
        raise ValueError("size must be positive")
    n = 2 * s
    base = standard_symplectic(ctx, s)
    gens: list[Matrix] = []
    for u in _strictly_upper_units(ctx, s):
        g = _embed(ctx, n, n, 0, s, u) - _embed(ctx, n, n, s, 0, u.T)
        gens.append(g)
    for b in _alternating_units(ctx, s):
        gens.append(_embed(ctx, n, n, s, s, b))
    return AffineMatrixSpace(base, gens, alternating=True)


def build_bordered_alternating(
    ctx: FieldCtx, n: int, s: int, inner: Optional[AffineMatrixSpace] = None
) -> AffineMatrixSpace:
    """Constant-rank-2s affine space in the alternating n x n matrices.

    Members are [[A, B, C], [-B^T, 0, 0], [-C^T, 0, 0]] with A alternating
    s x s, B in the inner family of invertible s x s matrices (dimension
    s(s-1)/2), and C free s x (n-2s).  Total dimension s(n-s-1).
    """
    if s < 1 or n < 2 * s:
        raise ValueError("needs s >= 1 and n >= 2s")
    if inner is None:
        inner = build_unitriangular_space(ctx, s)
    if inner.ctx != ctx or inner.shape != (s, s):
        raise ValueError("inner family has the wrong field or shape")
    if inner.dim != s * (s - 1) // 2:
        raise ValueError("inner family must have dimension s(s-1)/2")
    _verify_all_invertible(inner, "inner family")
    zs = Matrix.zeros(ctx, s, s)
    zc = Matrix.zeros(ctx, s, n - 2 * s)
    base = _bordered(ctx, n, s, zs, inner.base, zc)
    gens: list[Matrix] = []
    for a in _alternating_units(ctx, s):
        gens.append(_bordered(ctx, n, s, a, zs, zc))
    for b in inner.basis:
        gens.append(_bordered(ctx, n, s, zs, b, zc))
    for i in range(s):
        for j in range(n - 2 * s):
            gens.append(_bordered(ctx, n, s, zs, zs, _unit(ctx, s, n - 2 * s, i, j)))
    return AffineMatrixSpace(base, gens, alternating=True)


def build_row_block_family(
    ctx: FieldCtx, n: int, s: int, inner: Optional[AffineMatrixSpace] = None
) -> AffineMatrixSpace:
    """Full-row-rank rectangular family {[B C]} in the s x (n-s) matrices.

    B runs over the inner family of invertible s x s matrices and C is free.
    This is the row-slab of the bordered alternating family.
    """
    if s < 1 or n < 2 * s:
        raise ValueError("needs s >= 1 and n >= 2s")
    if inner is None:
        inner = build_unitriangular_space(ctx, s)
    if inner.ctx != ctx or inner.shape != (s, s):
        raise ValueError("inner family has the wrong field or shape")
    if inner.dim != s * (s - 1) // 2:
        raise ValueError("inner family must have dimension s(s-1)/2")
    _verify_all_invertible(inner, "inner family")
    w = n - s
    zc = Matrix.zeros(ctx, s, n - 2 * s)
    base = inner.base.hstack(zc)
    gens = [b.hstack(zc) for b in inner.basis]
    zs = Matrix.zeros(ctx, s, s)
    for i in range(s):
        for j in range(n - 2 * s):
            gens.append(zs.hstack(_unit(ctx, s, n - 2 * s, i, j)))
    sp = AffineMatrixSpace(base, gens)
    assert sp.shape == (s, w)
    return sp


def build_corank_one_space(
    ctx: FieldCtx, r: int, inner: Optional[AffineMatrixSpace] = None
) -> AffineMatrixSpace:
    """Constant-rank-r affine space in the alternating (r+1) x (r+1) matrices.

    Members are [[H, C], [-C^T, 0]] with H in an inner family of invertible
    alternating r x r matrices of dimension s(s-1) and C a free column.
    Total dimension s(s+1), the one-size-up exception to the generic formula.
    """
    if r < 2 or r % 2 == 1:
        raise ValueError("rank must be even and positive")
    s = r // 2
    if inner is None:
        inner = build_invertible_alternating(ctx, s)
    if inner.ctx != ctx or inner.shape != (r, r):
        raise ValueError("inner family has the wrong field or shape")
    if inner.dim != s * (s - 1) or not inner.alternating:
        raise ValueError("inner family must be alternating of dimension s(s-1)")
    _verify_all_invertible(inner, "inner family")
    n = r + 1
    base = _border_column(ctx, n, inner.base, Matrix.zeros(ctx, r, 1))
    gens = [_border_column(ctx, n, h, Matrix.zeros(ctx, r, 1)) for h in inner.basis]
    zh = Matrix.zeros(ctx, r, r)
    for i in range(r):
        gens.append(_border_column(ctx, n, zh, _unit(ctx, r, 1, i, 0)))
    return AffineMatrixSpace(base, gens, alternating=True)


def _border_column(ctx: FieldCtx, n: int, h: Matrix, c: Matrix) -> Matrix:
    r = h.nrows
    z = ctx.zero()
    data = [[z] * n for _ in range(n)]
    for i in range(r):
        for j in range(r):
            data[i][j] = h[i, j]
    for i in range(r):
        for j in range(n - r):
            data[i][r + j] = c[i, j]
            data[r + j][i] = ctx.neg(c[i, j])
    return Matrix(ctx, data)


def build_rank_at_least_space(
    ctx: FieldCtx, n: int, r: int, inner: Optional[AffineMatrixSpace] = None
) -> AffineMatrixSpace:
    """Affine space in the alternating n x n matrices with every rank >= r.

    Members are [[H, C], [-C^T, D]] with H in an inner family of invertible
    alternating r x r matrices, C free, and D free alternating.  Total
    dimension C(n,2) - s^2.
    """
    if r < 2 or r % 2 == 1 or n < r:
        raise ValueError("needs even r >= 2 and n >= r")
    s = r // 2
    if inner is None:
        inner = build_invertible_alternating(ctx, s)
    if inner.ctx != ctx or inner.shape != (r, r):
        raise ValueError("inner family has the wrong field or shape")
    if inner.dim != s * (s - 1) or not inner.alternating:
        raise ValueError("inner family must be alternating of dimension s(s-1)")
    _verify_all_invertible(inner, "inner family")
    base = _embed(ctx, n, n, 0, 0, inner.base)
    gens = [_embed(ctx, n, n, 0, 0, h) for h in inner.basis]
    for i in range(r):
        for j in range(n - r):
            gens.append(
                _embed(ctx, n, n, 0, r, _unit(ctx, r, n - r, i, j))
                - _embed(ctx, n, n, r, 0, _unit(ctx, n - r, r, j, i))
            )
    for d in _alternating_units(ctx, n - r):
        gens.append(_embed(ctx, n, n, r, r, d))
    return AffineMatrixSpace(base, gens, alternating=True)


def build_operator_block_space(
    ctx: FieldCtx,
    n: int,
    core: Optional[AffineMatrixSpace] = None,
    budget: int = INNER_VERIFY_BUDGET,
) -> FormSpacePair:
    """Trivial-spectrum operator space paired with the standard symplectic form.

    Operators are [[A, B], [0, A^T]] with A in a trivial-spectrum core
    (default: the strictly upper-triangular space) and B free alternating.
    Dimension dim(core) + n(n-1)/2; block triangularity keeps the spectrum of
    every member equal to that of its core part.
    """
    if n < 1:
        raise ValueError("size must be positive")
    if core is None:
        core = build_strictly_upper_space(ctx, n)
    if core.ctx != ctx or core.shape != (n, n):
        raise ValueError("core space has the wrong field or shape")
    if not core.base.is_zero():
        raise ValueError("core space must be linear")
    if ctx.kind == "prime":
        report = analyze.trivial_spectrum_check(core, budget)
        if not report.trivial:
            raise ValueError("core space fails the trivial-spectrum gate")
    nn = 2 * n
    ops: list[Matrix] = []
    for a in core.basis:
        ops.append(_embed(ctx, nn, nn, 0, 0, a) + _embed(ctx, nn, nn, n, n, a.T))
    for b in _alternating_units(ctx, n):
        ops.append(_embed(ctx, nn, nn, 0, n, b))
    return FormSpacePair(standard_symplectic(ctx, n), tuple(ops))


def a_xyz(ctx: FieldCtx, x: Element, y: Element, z: Element) -> Matrix:
    """The alternating 4 x 4 matrix whose Pfaffian is x^2 + y^2 + z^2."""
    x, y, z = ctx.normalize(x), ctx.normalize(y), ctx.normalize(z)
    nx, ny, nz = ctx.neg(x), ctx.neg(y), ctx.neg(z)
    o = ctx.zero()
    return Matrix(
        ctx,
        [
            [o, x, y, z],
            [nx, o, z, ny],
            [ny, nz, o, x],
            [nz, y, nx, o],
        ],
    )


def build_counterexample_plane(ctx: FieldCtx) -> AffineMatrixSpace:
    """The 2-dimensional affine plane of 4 x 4 alternating matrices whose rank
    behavior separates fields: rank 4 throughout over the rationals, rank
    drops over small prime fields."""
    gens = [a_xyz(ctx, 1, 0, 0), a_xyz(ctx, 0, 1, 0)]
    return AffineMatrixSpace(a_xyz(ctx, 0, 0, 1), gens, alternating=True)


def optimal_dimension_formula(n: int, r: int, problem: str) -> int:
    """Closed-form maximum affine dimension for the three rank problems.

    problem: "invertible" (all members invertible, needs n = r),
    "rank_at_least" (every rank >= r), or "constant_rank" (every rank = r,
    with the one-size-up branch at n = r+1).
    """
    if r % 2 == 1 or r < 0 or r > n:
        raise ValueError("rank must be even and within the size")
    s = r // 2
    if problem == "invertible":
        if n != r:
            raise ValueError("the invertible problem needs n = r")
        return s * (s - 1)
    if problem == "rank_at_least":
        return n * (n - 1) // 2 - s * s
    if problem == "constant_rank":
        return s * (s + 1) if n == r + 1 else s * (n - s - 1)
    raise ValueError(f"unknown problem {problem!r}")


@dataclass(frozen=True)
class PlaneCertificate:
    """Exact anisotropy certificate for the plane's translation Pfaffian form."""

    coefficients: tuple  # (x^2, xy, y^2)
    diagonal: bool
    all_positive: bool
    anisotropic: bool
    no_rank_two: bool

    def to_json(self) -> dict:
        return {
            "coefficients": [str(c) for c in self.coefficients],
            "diagonal": self.diagonal,
            "all_positive": self.all_positive,
            "anisotropic": self.anisotropic,
            "no_rank_two": self.no_rank_two,
        }


def certify_plane_anisotropy() -> PlaneCertificate:
    """Extract the translation plane's Pfaffian form over the rationals and
    certify it anisotropic, so the plane holds no rank-2 matrix."""
    ctx = FieldCtx.rational()
    g1 = a_xyz(ctx, 1, 0, 0)
    g2 = a_xyz(ctx, 0, 1, 0)
    a = pfaffian(g1)
    c = pfaffian(g2)
    b = ctx.sub(ctx.sub(pfaffian(g1 + g2), a), c)
    diagonal = b == 0
    positive = a > 0 and c > 0
    anisotropic = diagonal and positive
    return PlaneCertificate((a, b, c), diagonal, positive, anisotropic, anisotropic)


def pfaffian_form_coefficients(ctx: FieldCtx) -> dict[str, Element]:
    """Quadratic-form coefficients of Pf(x*A(1,0,0) + y*A(0,1,0) + z*A(0,0,1)).

    The Pfaffian of a 4 x 4 alternating matrix is quadratic in its entries and
    the entries here are linear in (x, y, z), so six evaluations determine the
    form exactly.
    """
    gens = [a_xyz(ctx, 1, 0, 0), a_xyz(ctx, 0, 1, 0), a_xyz(ctx, 0, 0, 1)]

    def ev(cs):
        acc = Matrix.zeros(ctx, 4, 4)
        for cc, g in zip(cs, gens):
            acc = acc + g.scale(ctx.normalize(cc))
        return pfaffian(acc)

    sq = [ev([1 if t == i else 0 for t in range(3)]) for i in range(3)]
    names = ["xy", "xz", "yz"]
    pairs = [(0, 1), (0, 2), (1, 2)]
    out = {"xx": sq[0], "yy": sq[1], "zz": sq[2]}
    for name, (i, j) in zip(names, pairs):
        mixed = ev([1 if t in (i, j) else 0 for t in range(3)])
        out[name] = ctx.sub(ctx.sub(mixed, sq[i]), sq[j])
    return out


def plane_rank_drop_witness(
    ctx: FieldCtx, budget: int = 10**6
) -> Optional[tuple[tuple, Matrix]]:
    """First plane member (lexicographic coordinates) with rank below 4."""
    plane = build_counterexample_plane(ctx)
    for coords, member in plane.enumerate(budget):
        if member.rank() < 4:
            return coords, member
    return None


def translation_rank_two_witness(ctx: FieldCtx) -> Optional[tuple[tuple, Matrix]]:
    """First nonzero translation combination of rank 2, scanning lexicographically."""
    if ctx.kind != "prime":
        raise ValueError("witness scan needs a prime field")
    g1 = a_xyz(ctx, 1, 0, 0)
    g2 = a_xyz(ctx, 0, 1, 0)
    for x in range(ctx.p):
        for y in range(ctx.p):
            if x == 0 and y == 0:
                continue
            m = g1.scale(x) + g2.scale(y)
            if m.rank() == 2:
                return (x, y), m
    return None
