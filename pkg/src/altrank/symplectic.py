"""Symplectic normalization and the forms/operators correspondence.

A nondegenerate alternating Gram matrix K defines a symplectic form
x^T K y.  This module finds Lagrangians, builds congruences onto the
standard block form [[0, I], [-I, 0]], and translates between affine spaces
of alternating Gram matrices and spaces of operators via G = K u.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fields import FieldCtx
from .matrices import (
    Matrix,
    Vector,
    eigenvalues_in_field,
    form_value,
    mat_vec,
    rows_matrix,
    span_dim,
)
from .spaces import AffineMatrixSpace, Span


def standard_symplectic(ctx: FieldCtx, s: int) -> Matrix:
    """The 2s x 2s block matrix [[0, I_s], [-I_s, 0]]."""
    z, o = ctx.zero(), ctx.one()
    n = 2 * s
    rows = [[z] * n for _ in range(n)]
    for i in range(s):
        rows[i][s + i] = o
        rows[s + i][i] = ctx.neg(o)
    return Matrix(ctx, rows)


def radical(a: Matrix) -> list[Vector]:
    """Kernel basis of an alternating Gram matrix (the form's radical)."""
    if not a.is_alternating():
        raise ValueError("radical is defined for alternating matrices")
    return a.kernel_basis()


def is_totally_singular(gram: Matrix, vecs: Sequence[Vector]) -> bool:
    return totally_singular_witness(gram, vecs) is None


def totally_singular_witness(gram: Matrix, vecs: Sequence[Vector]) -> tuple[int, int] | None:
    """First (i, j) with gram(vecs[i], vecs[j]) != 0, scanning i < j."""
    images = [mat_vec(gram, v) for v in vecs]
    ctx = gram.ctx
    for i in range(len(vecs)):
        for j in range(i, len(vecs)):
            acc = ctx.zero()
            for a, b in zip(vecs[i], images[j]):
                acc = ctx.add(acc, ctx.mul(a, b))
            if acc != 0:
                return (i, j)
    return None


def find_lagrangian(k: Matrix) -> list[Vector]:
    """Deterministic greedy Lagrangian of an invertible alternating Gram matrix."""
    n = k.nrows
    if n % 2 == 1 or k.det() == 0 or not k.is_alternating():
        raise ValueError("needs an invertible alternating matrix")
    s = n // 2
    ctx = k.ctx
    basis: list[Vector] = []
    while len(basis) < s:
        if basis:
            constraints = rows_matrix(ctx, basis) @ k
            candidates = constraints.kernel_basis()
        else:
            candidates = [tuple(Matrix.identity(ctx, n).row(i)) for i in range(n)]
        for v in candidates:
            if span_dim(ctx, basis + [v]) > len(basis):
                basis.append(v)
                break
        else:
            raise AssertionError("totally singular extension must exist below half dimension")
    return basis


def symplectic_basis(k: Matrix, lagrangian: Sequence[Vector] | None = None) -> Matrix:
    """Invertible P with P^T K P in standard block form.

    If a Lagrangian is supplied, its vectors become the last s columns of P,
    so P^{-1} carries the Lagrangian onto the span of the last s coordinate
    vectors.  All postconditions are re-verified before returning.
    """
    n = k.nrows
    if n % 2 == 1 or not k.is_alternating() or k.det() == 0:
        raise ValueError("needs an invertible alternating matrix")
    s = n // 2
    ctx = k.ctx
    if lagrangian is None:
        ys = find_lagrangian(k)
    else:
        ys = [tuple(ctx.normalize(x) for x in v) for v in lagrangian]
        if len(ys) != s or span_dim(ctx, ys) != s:
            raise ValueError("lagrangian must be an independent family of half dimension")
        if not is_totally_singular(k, ys):
            raise ValueError("supplied subspace is not totally singular")

    # Dual family: x_i with x_i^T K y_j = delta_ij, free coordinates zero.
    # Row j of the constraint matrix is y_j^T K and y_j^T K x = -(x^T K y_j).
    constraints = rows_matrix(ctx, ys) @ k
    neg_one = ctx.neg(ctx.one())
    xs: list[Vector] = []
    for i in range(s):
        target = tuple(neg_one if t == i else ctx.zero() for t in range(s))
        sol = constraints.solve(target)
        if sol is None:
            raise AssertionError("nondegeneracy guarantees a dual solution")
        xs.append(sol)
    # Skew-correct the x block against itself; adding Lagrangian vectors keeps
    # the pairing with ys intact and needs no division by 2.
    for t in range(s):
        xt = xs[t]
        for i in range(t):
            c = form_value(k, xs[i], xt)
            if c != 0:
                xt = tuple(ctx.sub(a, ctx.mul(c, b)) for a, b in zip(xt, ys[i]))
        xs[t] = xt

    cols = xs + ys
    p = rows_matrix(ctx, cols).transpose()
    static = standard_symplectic(ctx, s)
    if p.det() == 0 or (p.T @ k @ p) != static:
        raise AssertionError("symplectic basis postcondition failed")
    if lagrangian is not None:
        inv = p.inverse()
        for v in ys:
            image = mat_vec(inv, v)
            if any(image[t] != 0 for t in range(s)):
                raise AssertionError("lagrangian was not carried onto the last coordinates")
    return p


@dataclass(frozen=True)
class FormSpacePair:
    """An invertible alternating Gram matrix with a matching operator space.

    Operators u correspond to Gram matrices G = K u, so K u must itself be
    alternating for every generator.
    """

    gram: Matrix
    operators: tuple[Matrix, ...]

    def __post_init__(self):
        k = self.gram
        if not k.is_alternating() or k.det() == 0:
            raise ValueError("gram matrix must be invertible and alternating")
        for u in self.operators:
            if u.ctx != k.ctx or u.shape != k.shape:
                raise ValueError("operator shape or field mismatch")
            if not (k @ u).is_alternating():
                raise ValueError("operator is not alternating with respect to the form")
        flats = [u.flatten() for u in self.operators]
        if flats and span_dim(k.ctx, flats) != len(flats):
            raise ValueError("operator generators are dependent")

    @property
    def ctx(self) -> FieldCtx:
        return self.gram.ctx

    @property
    def dim(self) -> int:
        return len(self.operators)

    def to_json(self) -> dict:
        return {
            "field": self.ctx.to_str(),
            "gram": self.gram.to_json(),
            "operators": [u.to_json() for u in self.operators],
        }

    @staticmethod
    def from_json(obj: dict) -> "FormSpacePair":
        return FormSpacePair(
            Matrix.from_json(obj["gram"]),
            tuple(Matrix.from_json(u) for u in obj["operators"]),
        )


def phi_forms_to_operators(sp: AffineMatrixSpace, s0: Matrix | None = None) -> FormSpacePair:
    """Translate an affine space of alternating forms to operators at a base point.

    The base point s0 (default: the space's base) must be an invertible member;
    each translation generator G maps to the operator K^{-1} G.
    """
    if not sp.alternating:
        raise ValueError("needs an alternating space")
    k = sp.base if s0 is None else s0
    if not sp.contains(k):
        raise ValueError("base point must belong to the space")
    if k.det() == 0:
        raise ValueError("base point must be invertible")
    kinv = k.inverse()
    return FormSpacePair(k, tuple(kinv @ g for g in sp.basis))


def phi_operators_to_forms(pair: FormSpacePair) -> AffineMatrixSpace:
    """Inverse translation: base K, translation generators K u."""
    return AffineMatrixSpace(
        pair.gram, [pair.gram @ u for u in pair.operators], alternating=True
    )


def pencil_symplectic_iff_trivial_spectrum(k: Matrix, g: Matrix) -> tuple[bool, bool]:
    """(every K + t G invertible, spectrum of K^{-1} G inside {0}); the two
    booleans agree whenever K is invertible alternating over a prime field."""
    ctx = k.ctx
    if ctx.kind != "prime":
        raise ValueError("pencil scan needs a prime field")
    if k.det() == 0:
        raise ValueError("pencil base must be invertible")
    pencil_ok = all((k + g.scale(t)).det() != 0 for t in range(ctx.p))
    eigs = eigenvalues_in_field(k.inverse() @ g)
    trivial = all(e == 0 for e in eigs)
    return pencil_ok, trivial
