"""Verification engine: rank profiles, spectrum scans, and conclusion checkers.

Every check is exact.  Enumeration-scale work is delegated to the batched
prime-field engine; witnesses coming back from it are re-verified with the
pure arithmetic in this package before they are reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import _engine, rand
from .errors import BudgetExceededError, ContractError
from .fields import Element
from .matrices import Matrix, Vector, eigenvalues_in_field, mat_vec, span_dim
from .spaces import AffineMatrixSpace, Span

DEFAULT_ENUM_BUDGET = 10**6
DEFAULT_SAMPLES = 10**5


@dataclass(frozen=True)
class RankProfile:
    """Observed rank extremes of a matrix space."""

    min_rank: int
    max_rank: int
    constant: bool
    method: str  # "exhaustive" | "sampled"
    checked: int
    seed: Optional[int]
    witness_min: tuple
    witness_max: tuple

    @property
    def constant_proved(self) -> bool:
        return self.constant and self.method == "exhaustive"

    def to_json(self, ctx=None) -> dict:
        def enc(coords):
            if ctx is None:
                return [str(c) for c in coords]
            return [ctx.element_to_str(c) for c in coords]

        obj = {
            "min_rank": self.min_rank,
            "max_rank": self.max_rank,
            "constant": self.constant,
            "method": self.method,
            "checked": self.checked,
            "witness_min": enc(self.witness_min),
            "witness_max": enc(self.witness_max),
        }
        if self.method == "sampled":
            obj["seed"] = self.seed
        return obj


def _sampled_coords_prime(sp: AffineMatrixSpace, seed: int, i: int) -> tuple:
    d = sp.dim
    return tuple(rand.uniform_below(seed, i * d + j, sp.ctx.p) for j in range(d))


def rank_profile(
    sp: AffineMatrixSpace,
    budget: int = DEFAULT_ENUM_BUDGET,
    seed: int = 0,
    samples: int = DEFAULT_SAMPLES,
    threads: Optional[int] = None,
) -> RankProfile:
    """Min/max rank over all members (exhaustive) or a seeded sample.

    Exhaustive mode runs when the member count is finite and within budget;
    only exhaustive profiles can prove rank constancy.  Witnesses are the
    lexicographically least coordinate tuples attaining each extreme.
    """
    ctx = sp.ctx
    if ctx.kind == "prime":
        total = ctx.p**sp.dim
        exhaustive = total <= budget
        count = total if exhaustive else samples
        base_flat, basis_flat = sp.flat_arrays()
        mn, mn_idx, mx, mx_idx = _engine.profile_ranks(
            base_flat,
            basis_flat,
            sp.shape[0],
            sp.shape[1],
            ctx.p,
            exhaustive=exhaustive,
            total=count,
            seed=seed,
            expect_even=sp.alternating,
            threads=threads,
        )
        if exhaustive:
            wmin = _engine.index_to_coords(mn_idx, sp.dim, ctx.p)
            wmax = _engine.index_to_coords(mx_idx, sp.dim, ctx.p)
        else:
            wmin = _sampled_coords_prime(sp, seed, mn_idx)
            wmax = _sampled_coords_prime(sp, seed, mx_idx)
        for coords, expect in ((wmin, mn), (wmax, mx)):
            if sp.member_at(coords).rank() != expect:
                raise AssertionError("engine witness failed exact re-verification")
        return RankProfile(
            mn, mx, mn == mx, "exhaustive" if exhaustive else "sampled",
            count, None if exhaustive else seed, wmin, wmax,
        )

    # Rational field: finite work only for dimension zero, otherwise sample.
    if sp.dim == 0:
        r = sp.base.rank()
        return RankProfile(r, r, True, "exhaustive", 1, None, (), ())
    mn = mx = None
    wmin = wmax = ()
    for i in range(samples):
        coords = sp.coords_for_sample(i, seed)
        r = sp.member_at(coords).rank()
        if sp.alternating and r % 2 != 0:
            raise AssertionError("alternating member with odd rank")
        if mn is None or r < mn:
            mn, wmin = r, coords
        if mx is None or r > mx:
            mx, wmax = r, coords
    return RankProfile(mn, mx, mn == mx, "sampled", samples, seed, wmin, wmax)


@dataclass(frozen=True)
class TrivialSpectrumReport:
    trivial: bool
    checked: int
    witness: Optional[tuple]  # (member, eigenvalue)

    def __bool__(self) -> bool:
        return self.trivial

    def to_json(self, ctx=None) -> dict:
        obj = {"trivial": self.trivial, "checked": self.checked}
        if self.witness is not None:
            m, lam = self.witness
            obj["witness_member"] = m.to_json()
            obj["witness_eigenvalue"] = m.ctx.element_to_str(lam)
        return obj


def trivial_spectrum_check(
    sp: AffineMatrixSpace, budget: int = DEFAULT_ENUM_BUDGET
) -> TrivialSpectrumReport:
    """Whether every member of a linear space has all eigenvalues zero.

    Eigenvalue sets scale along with members, so it is enough to test whether
    any member admits eigenvalue one, i.e. whether det(M - I) vanishes
    somewhere on the space.  The witness reported is the first (member,
    eigenvalue) pair in member-major, eigenvalue-minor order.
    """
    ctx = sp.ctx
    if ctx.kind != "prime":
        raise ValueError("spectrum scan needs a prime field")
    if not sp.base.is_zero():
        raise ValueError("spectrum scan is defined for linear spaces")
    if sp.shape[0] != sp.shape[1]:
        raise ValueError("members must be square")
    p = ctx.p
    total = p**sp.dim
    if total > budget:
        raise BudgetExceededError(
            f"{total} members exceed the spectrum scan budget {budget}"
        )
    _, basis_flat = sp.flat_arrays()
    hits = _engine.unit_eigen_hits(basis_flat, sp.shape[0], p, total)
    if len(hits) == 0:
        return TrivialSpectrumReport(True, total, None)
    best = None
    for z in hits:
        coords = _engine.index_to_coords(z, sp.dim, p)
        for lam in range(1, p):
            scaled = tuple((lam * c) % p for c in coords)
            idx = 0
            for c in scaled:
                idx = idx * p + c
            cand = (idx, lam)
            if best is None or cand < best:
                best = cand
    idx, lam = best
    member = sp.member_at(_engine.index_to_coords(idx, sp.dim, p))
    if lam not in eigenvalues_in_field(member):
        raise AssertionError("spectrum witness failed exact re-verification")
    return TrivialSpectrumReport(False, total, (member, lam))


@dataclass(frozen=True)
class FAReport:
    """Outcome of a rank-degeneration conclusion check.

    When the rank hypothesis fails the conclusion fields are None and
    first_failure carries the ("hypothesis", witness) tag.
    """

    mode: str
    r: int
    hypothesis_held: bool
    D_zero: Optional[bool]
    moment_vanishing: Optional[tuple]
    first_failure: Optional[tuple]

    @property
    def conclusions_hold(self) -> bool:
        return bool(
            self.hypothesis_held and self.D_zero and all(self.moment_vanishing)
        )

    def to_json(self) -> dict:
        obj = {
            "mode": self.mode,
            "r": self.r,
            "hypothesis_held": self.hypothesis_held,
        }
        if self.hypothesis_held:
            obj["D_zero"] = self.D_zero
            obj["moment_vanishing"] = list(self.moment_vanishing)
        if self.first_failure is not None:
            kind, detail = self.first_failure
            obj["first_failure"] = {
                "kind": kind,
                "detail": detail.to_json() if isinstance(detail, Matrix) else detail,
            }
        return obj


def flanders_atkinson_check(
    m: Matrix, r: int, mode: str, gram: Optional[Matrix] = None
) -> FAReport:
    """Scan a rank-degeneration hypothesis and, if it holds, its conclusions.

    Modes:
      pencil       rank(s*J + t*M) <= r for all (s, t); J = I_r padded by zero
      line         rank(J + t*M) <= r for all t
      alternating  rank(J_K + t*M) <= r for all t; J_K = K padded by zero,
                   K invertible alternating, M alternating

    Conclusions with M split into blocks at row/column r:
    the lower-right block D vanishes, and the moment products vanish for
    k = 0..r-1 (B A^k C in the first two modes; B^T K^{-1} (A K^{-1})^k B in
    alternating mode).  Higher k reduce to these by Cayley-Hamilton.
    """
    ctx = m.ctx
    if ctx.kind != "prime":
        raise ValueError("hypothesis scanning needs a prime field")
    if not m.is_square:
        raise ValueError("square matrix required")
    n = m.nrows
    if not 0 <= r <= n:
        raise ValueError("rank bound out of range")
    if mode not in ("pencil", "line", "alternating"):
        raise ValueError(f"unknown mode {mode!r}")

    if mode == "alternating":
        if gram is None or gram.shape != (r, r):
            raise ValueError("alternating mode needs an r x r gram matrix")
        if not gram.is_alternating() or gram.det() == 0:
            raise ValueError("gram matrix must be invertible and alternating")
        if not m.is_alternating():
            raise ValueError("alternating mode needs an alternating matrix")
        j = _embed(gram, n)
    else:
        j = _embed(Matrix.identity(ctx, r), n)

    def fail(witness) -> FAReport:
        return FAReport(mode, r, False, None, None, ("hypothesis", witness))

    if mode == "pencil":
        for s in range(ctx.p):
            for t in range(ctx.p):
                rk = (j.scale(s) + m.scale(t)).rank()
                if rk > r:
                    return fail((s, t, rk))
    else:
        for t in range(ctx.p):
            rk = (j + m.scale(t)).rank()
            if rk > r:
                return fail((1, t, rk))

    a = m.block(0, r, 0, r)
    d = m.block(r, n, r, n)
    d_zero = d.is_zero()
    first = None if d_zero else ("D", d)
    moments = []
    if mode == "alternating":
        b = m.block(0, r, r, n)
        kinv = gram.inverse()
        step = kinv @ a
        y = kinv @ b
        bt = b.T
        for k in range(r):
            prod = bt @ y
            ok = prod.is_zero()
            moments.append(ok)
            if not ok and first is None:
                first = ("moment", (k, prod))
            y = step @ y
    else:
        b = m.block(r, n, 0, r)
        c = m.block(0, r, r, n)
        y = c
        for k in range(r):
            prod = b @ y
            ok = prod.is_zero()
            moments.append(ok)
            if not ok and first is None:
                first = ("moment", (k, prod))
            y = a @ y
    return FAReport(mode, r, True, d_zero, tuple(moments), first)


def _embed(block: Matrix, n: int) -> Matrix:
    ctx = block.ctx
    rows = [[ctx.zero()] * n for _ in range(n)]
    for i in range(block.nrows):
        for jj in range(block.ncols):
            rows[i][jj] = block[i, jj]
    return Matrix(ctx, rows)


@dataclass(frozen=True)
class KernelImageReport:
    cardinality_ok: bool
    holds: bool
    witness: Optional[tuple]  # (matrix, kernel vector)

    def __bool__(self) -> bool:
        return self.holds


def kernel_to_image_check(sp: AffineMatrixSpace, u0: Matrix) -> KernelImageReport:
    """Whether every member maps ker(u0) into im(u0).

    u0 must attain the maximum rank in the space (caller-certified).  The
    condition is linear in the member, so the base point and the translation
    generators suffice.  The cardinality gate |F| > rank(u0) is reported, not
    asserted, so undersized fields can still be explored.
    """
    ctx = sp.ctx
    r0 = u0.rank()
    cardinality_ok = ctx.cardinality_at_least(r0 + 1)
    image = Span(ctx, [tuple(u0.col(j)) for j in range(u0.ncols)])
    kernel = u0.kernel_basis()
    witness = None
    holds = True
    for mat in (sp.base, *sp.basis):
        for x in kernel:
            if not image.contains(mat_vec(mat, x)):
                holds = False
                witness = (mat, x)
                break
        if not holds:
            break
    return KernelImageReport(cardinality_ok, holds, witness)


def extract_range_lagrangian(ops: Sequence[Matrix], gram: Matrix) -> Optional[list[Vector]]:
    """Common range Lagrangian of an independent family of maps, if forced.

    ops spans a space of q' x p matrices (maps from F^p into a symplectic
    space of dimension q') in which every generator has totally singular
    range.  Above the dimension bound p*q'/2 the input is inconsistent;
    strictly below it no conclusion is available (None); at the bound with
    p > 2 the common column span must be a Lagrangian, which is verified and
    returned as a basis.
    """
    if not ops:
        return None
    ctx = gram.ctx
    qprime = gram.nrows
    if not gram.is_alternating() or gram.det() == 0:
        raise ValueError("gram matrix must be invertible and alternating")
    p = ops[0].ncols
    if p <= 2:
        raise ValueError("needs more than two source dimensions")
    for u in ops:
        if u.shape != (qprime, p) or u.ctx != ctx:
            raise ValueError("map shape or field mismatch")
    flats = [u.flatten() for u in ops]
    if span_dim(ctx, flats) != len(ops):
        raise ValueError("generators must be independent")
    bound = p * qprime // 2
    if 2 * len(ops) > p * qprime:
        raise ValueError(f"dimension {len(ops)} exceeds the singular-range bound {bound}")
    for u in ops:
        cols = [tuple(u.col(j)) for j in range(p)]
        for i in range(p):
            ki = mat_vec(gram, cols[i])
            for jj in range(i, p):
                acc = ctx.zero()
                for aa, bb in zip(cols[jj], ki):
                    acc = ctx.add(acc, ctx.mul(aa, bb))
                if acc != 0:
                    raise ValueError("a generator's range is not totally singular")
    if len(ops) < bound:
        return None

    vecs: list[Vector] = []
    for u in ops:
        vecs.extend(tuple(u.col(j)) for j in range(p))
    lag = Span(ctx, vecs)
    if lag.dim != qprime // 2:
        raise ContractError(
            f"combined range has dimension {lag.dim}, expected {qprime // 2}"
        )
    basis = lag.basis()
    from .symplectic import is_totally_singular

    if not is_totally_singular(gram, basis):
        raise ContractError("combined range is not totally singular")
    return basis


def duality_invariant_check(
    pair, *, seed: int = 0, samples: int = 100, budget: int = DEFAULT_ENUM_BUDGET
) -> bool:
    """Orthogonality invariant of a trivial-spectrum operator space.

    For each standard basis vector and a seeded batch of random nonzero x:
    x stays outside the orbit span S.x, and both x and S.x lie in the
    form-orthogonal of x.  The trivial-spectrum precondition is re-checked
    when the member count fits the budget.
    """
    ctx = pair.ctx
    k = pair.gram
    n = k.nrows
    ops = pair.operators
    if ctx.kind == "prime" and ctx.p ** len(ops) <= budget:
        span_space = AffineMatrixSpace(
            Matrix.zeros(ctx, n, n), list(ops), alternating=False
        )
        if not trivial_spectrum_check(span_space, budget):
            raise ValueError("operator space fails the trivial-spectrum gate")

    def check(x: Vector) -> bool:
        orbit = [mat_vec(u, x) for u in ops]
        if Span(ctx, orbit, width=n).contains(x):
            return False
        kx = mat_vec(k, x)
        if _dot(ctx, x, kx) != 0:
            return False
        for y in orbit:
            if _dot(ctx, y, kx) != 0:
                return False
        return True

    ident = Matrix.identity(ctx, n)
    for i in range(n):
        if not check(tuple(ident.row(i))):
            return False
    stream = rand.CounterStream(rand.derive_seed(seed, "duality"))
    for _ in range(samples):
        if not check(stream.nonzero_vector(ctx, n)):
            return False
    return True


def _dot(ctx, x: Vector, y: Vector) -> Element:
    acc = ctx.zero()
    for a, b in zip(x, y):
        acc = ctx.add(acc, ctx.mul(a, b))
    return acc
