"""Constructive congruence reduction of constant-rank alternating spaces.

Given an affine space of alternating n x n matrices with constant rank r and
the critical dimension s(n-s-1) (s = r/2, n >= r+3), the pipeline produces an
invertible P carrying the space onto the bordered alternating family, plus an
inner family of invertible s x s matrices recovered up to equivalence.  Every
mathematical step is re-verified and recorded as a verdict bit; failures
yield a failed certificate with witnesses rather than an exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import analyze
from .errors import ContractError
from .families import build_bordered_alternating, build_row_block_family
from .fields import FieldCtx
from .matrices import Matrix, Vector, form_value, mat_vec, rows_matrix, span_dim
from .spaces import AffineMatrixSpace, BlockView, Span, congruence_act, equivalence_act, spaces_equal
from .symplectic import symplectic_basis
from .rand import CounterStream, derive_seed

VERDICT_KEYS = (
    "base_point_rank",
    "generator_identities",
    "lagrangian_extraction",
    "lagrangian_singularity",
    "normal_form",
    "set_equality",
    "complement_uniqueness",
)


@dataclass
class ReductionCertificate:
    """Machine-checkable record of one reduction run."""

    n: int
    r: int
    s: int
    verdicts: dict
    P: Optional[Matrix] = None
    lagrangian: Optional[list] = None
    recovered_M: Optional[AffineMatrixSpace] = None
    witnesses: dict = field(default_factory=dict)

    @property
    def all_verdicts_true(self) -> bool:
        return all(self.verdicts.get(k, False) for k in VERDICT_KEYS)

    def to_json(self) -> dict:
        obj = {
            "n": self.n,
            "r": self.r,
            "s": self.s,
            "verdicts": {k: self.verdicts.get(k, False) for k in VERDICT_KEYS},
            "witnesses": self.witnesses,
        }
        obj["P"] = self.P.to_json() if self.P is not None else None
        if self.lagrangian is not None:
            ctx = self.P.ctx if self.P is not None else None
            obj["lagrangian"] = [
                [ctx.element_to_str(c) if ctx else str(c) for c in v]
                for v in self.lagrangian
            ]
        else:
            obj["lagrangian"] = None
        obj["recovered_M"] = (
            self.recovered_M.to_json() if self.recovered_M is not None else None
        )
        return obj


def find_rank_r_member(
    sp: AffineMatrixSpace, r: int, *, enum_budget: int = 10**6,
    samples: int = 10**4, seed: int = 0,
) -> Optional[tuple[tuple, Matrix]]:
    """First member of rank exactly r, in enumeration order when the space is
    small enough to enumerate and in seeded sample order otherwise."""
    if sp.ctx.kind == "prime" and sp.member_count() <= enum_budget:
        it = sp.enumerate(enum_budget)
    else:
        it = sp.sample(samples, seed)
    for coords, member in it:
        if member.rank() == r:
            return coords, member
    return None


def normalize_radical_to_tail(sp: AffineMatrixSpace, s0: Matrix) -> tuple[Matrix, Matrix]:
    """Congruence P1 moving the radical of member s0 onto the last coordinates.

    Returns (P1, K) with P1^T s0 P1 = [[K, 0], [0, 0]] and K invertible
    alternating of size rank(s0).
    """
    ctx = sp.ctx
    n = sp.shape[0]
    radical = s0.kernel_basis()
    r = n - len(radical)
    chosen: list[Vector] = list(radical)
    complement: list[Vector] = []
    ident = Matrix.identity(ctx, n)
    for i in range(n):
        e = tuple(ident.row(i))
        if span_dim(ctx, chosen + [e]) > len(chosen):
            chosen.append(e)
            complement.append(e)
        if len(complement) == r:
            break
    p1 = rows_matrix(ctx, complement + list(radical)).transpose()
    moved = p1.T @ s0 @ p1
    k = moved.block(0, r, 0, r)
    if not moved.block(0, n, r, n).is_zero() or not moved.block(r, n, 0, n).is_zero():
        raise AssertionError("radical normalization left nonzero tail blocks")
    if k.det() == 0 or not k.is_alternating():
        raise AssertionError("leading block is not an invertible alternating matrix")
    return p1, k


def reduce_full_row_rank(
    t: AffineMatrixSpace,
    *,
    enum_budget: int = 10**6,
    samples: int = 10**4,
    seed: int = 0,
    rank_certified: bool = False,
) -> tuple[Matrix, Matrix, AffineMatrixSpace]:
    """Equivalence (Q, Q') carrying a full-row-rank space onto [B C] form.

    t consists of s x (n-s) matrices of rank s whose codimension is at most
    s(s+1)/2.  The construction finds the universal column space
    W = { v : u v^T lies in the translation span for every u }, sends a
    complement of W to the first s coordinates, and reads off the recovered
    family M from the leading block.  Returns (Q, Q', M) with
    Q t Q' = {[B C] : B in M, C arbitrary}, verified exactly.
    """
    ctx = t.ctx
    s, w = t.shape
    if w < s:
        raise ValueError("wider-than-tall spaces required")
    if not ctx.cardinality_at_least(3):
        raise ValueError("field must have more than two elements")
    codim = s * w - t.dim
    if codim > s * (s + 1) // 2:
        raise ValueError("codimension exceeds s(s+1)/2")
    if not rank_certified:
        profile = analyze.rank_profile(t, budget=enum_budget, seed=seed, samples=samples)
        if profile.min_rank < s:
            raise ContractError("a member drops below full row rank")

    span = t.translation_span()
    phi_rows = []
    for j in range(w):
        cols = []
        for i in range(s):
            flat = [ctx.zero()] * (s * w)
            flat[i * w + j] = ctx.one()
            cols.append(span.reduce(tuple(flat)))
        phi_rows.append([x for col in cols for x in col])
    # column j of phi is the stacked residual of the unit slabs e_i e_j^T
    phi = rows_matrix(ctx, phi_rows).transpose()
    wbasis = phi.kernel_basis()
    if len(wbasis) != w - s:
        raise ContractError(
            f"universal column space has dimension {len(wbasis)}, expected {w - s}"
        )
    chosen = list(wbasis)
    complement: list[Vector] = []
    ident = Matrix.identity(ctx, w)
    for i in range(w):
        e = tuple(ident.row(i))
        if span_dim(ctx, chosen + [e]) > len(chosen):
            chosen.append(e)
            complement.append(e)
        if len(complement) == s:
            break
    g = rows_matrix(ctx, complement + list(wbasis))
    qprime = g.inverse()
    q = Matrix.identity(ctx, s)

    base_b = (t.base @ qprime).block(0, s, 0, s)
    gen_bs = []
    kept_flats: list[Vector] = []
    for gmat in t.basis:
        b = (gmat @ qprime).block(0, s, 0, s)
        flat = b.flatten()
        if span_dim(ctx, kept_flats + [flat]) > len(kept_flats):
            kept_flats.append(flat)
            gen_bs.append(b)
    m_space = AffineMatrixSpace(base_b, gen_bs)
    if m_space.dim != s * (s - 1) // 2:
        raise ContractError(
            f"recovered family has dimension {m_space.dim}, expected {s * (s - 1) // 2}"
        )
    if ctx.kind == "prime" and ctx.p**m_space.dim <= enum_budget:
        for _, member in m_space.enumerate(enum_budget):
            if member.det() == 0:
                raise ContractError("recovered family contains a singular member")
    else:
        for _, member in m_space.sample(samples, derive_seed(seed, "m-invertible")):
            if member.det() == 0:
                raise ContractError("recovered family contains a singular member")

    target = build_row_block_family(ctx, w + s, s, inner=m_space)
    if not spaces_equal(equivalence_act(t, q, qprime), target):
        raise ContractError("slab space does not match the [B C] form")
    return q, qprime, m_space


def totally_singular_rejection(
    sp: AffineMatrixSpace, candidate: list[Vector]
) -> Optional[tuple[Matrix, Vector, Vector]]:
    """A (member, x, y) witness with x^T member y != 0, or None if the
    candidate subspace is totally singular for the whole affine space."""
    for member in (sp.base, *sp.basis):
        mx = [mat_vec(member, y) for y in candidate]
        for i, x in enumerate(candidate):
            for j in range(i, len(candidate)):
                acc = sp.ctx.zero()
                for a, b in zip(x, mx[j]):
                    acc = sp.ctx.add(acc, sp.ctx.mul(a, b))
                if acc != 0:
                    return member, x, candidate[j]
    return None


def _rank_two_slab_witness(
    sp: AffineMatrixSpace, s: int, x: Vector, y: Vector
) -> Optional[Matrix]:
    """Rank-2 alternating member of the translation span that pairs x and y.

    Requires x, y independent modulo the span of the last n-s coordinates.
    Built from the first two rows of the inverse of a basis extending
    (x, y, tail units), so its radical contains that tail.
    """
    ctx = sp.ctx
    n = sp.shape[0]
    ident = Matrix.identity(ctx, n)
    tail = [tuple(ident.row(i)) for i in range(s, n)]
    basis = [x, y] + tail
    if span_dim(ctx, basis) != len(basis):
        return None
    for i in range(n):
        e = tuple(ident.row(i))
        if span_dim(ctx, basis + [e]) > len(basis):
            basis.append(e)
        if len(basis) == n:
            break
    binv = rows_matrix(ctx, basis).transpose().inverse()
    phi1 = binv.row(0)
    phi2 = binv.row(1)
    col1 = rows_matrix(ctx, [phi1]).transpose()
    col2 = rows_matrix(ctx, [phi2]).transpose()
    bmat = col1 @ rows_matrix(ctx, [phi2]) - col2 @ rows_matrix(ctx, [phi1])
    if form_value(bmat, x, y) == 0:
        raise AssertionError("dual-basis form lost its defining pair")
    return bmat


def unique_totally_singular_complement(
    sp: AffineMatrixSpace, s: int, *, seed: int = 0, candidates: int = 200
) -> list[Vector]:
    """The unique (n-s)-dimensional subspace totally singular for every member.

    sp must be in the bordered canonical form, so the span of the last n-s
    coordinates qualifies.  Uniqueness is certified by (a) checking that the
    translation span contains every alternating matrix supported on the
    leading s x s block, (b) re-checking the dimension obstruction that rules
    out any other candidate, and (c) rejecting a seeded family of perturbed
    candidate subspaces with explicit witnesses.
    """
    ctx = sp.ctx
    n = sp.shape[0]
    r = 2 * s
    if n <= 2 * s + 2:
        raise ValueError("needs n >= 2s + 3")
    ident = Matrix.identity(ctx, n)
    tail = [tuple(ident.row(i)) for i in range(s, n)]
    if totally_singular_rejection(sp, tail) is not None:
        raise ContractError("the canonical tail subspace is not totally singular")

    # (a) alternating slab matrices supported on the first s coordinates
    for i in range(s):
        for j in range(i + 1, s):
            slab = _pair_form(ctx, n, i, j)
            if not sp.translation_contains(slab):
                raise ContractError("leading-block slab is missing from the translation span")

    # (b) for every tail coordinate past r the member columns span s directions,
    # which forces the dimension contradiction for any other singular subspace
    for j in range(r, n):
        cols = [tuple(g.col(j)) for g in sp.basis]
        if Span(ctx, cols, width=n).dim < s:
            raise ContractError("tail columns of the translation span are too thin")

    tail_span = Span(ctx, tail)
    structured: list[list[Vector]] = []
    for i in range(s):
        for j in range(s, n):
            cand = [tuple(ident.row(t)) for t in range(s, n) if t != j]
            cand.append(tuple(ident.row(i)))
            structured.append(cand)
    stream = CounterStream(derive_seed(seed, "complement"))
    checked = 0
    idx = 0
    while checked < candidates:
        if idx < len(structured):
            cand = structured[idx]
            idx += 1
        else:
            rows = [stream.vector(ctx, n) for _ in range(n - s)]
            if span_dim(ctx, rows) != n - s:
                continue
            cand = rows
        if all(all(c == 0 for c in v[:s]) for v in cand):
            continue  # equals the canonical tail subspace
        witness = totally_singular_rejection(sp, cand)
        if witness is None:
            raise ContractError("a second totally singular complement exists")
        if s >= 2:
            pair = _independent_pair_mod(ctx, cand, tail_span)
            if pair is not None:
                x, y = pair
                bmat = _rank_two_slab_witness(sp, s, x, y)
                if bmat is not None and not sp.translation_contains(bmat):
                    raise ContractError("rank-2 rejection form escaped the translation span")
        checked += 1
    return tail


def _pair_form(ctx: FieldCtx, n: int, i: int, j: int) -> Matrix:
    z, o = ctx.zero(), ctx.one()
    data = [[z] * n for _ in range(n)]
    data[i][j] = o
    data[j][i] = ctx.neg(o)
    return Matrix(ctx, data)


def _independent_pair_mod(ctx, cand: list[Vector], tail_span: Span):
    picked = None
    for v in cand:
        res = tail_span.reduce(v)
        if all(c == 0 for c in res):
            continue
        if picked is None:
            picked = v
            continue
        if span_dim(ctx, [tail_span.reduce(picked), res]) == 2:
            return picked, v
    return None


def canonical_reduction(
    sp: AffineMatrixSpace,
    r: int,
    *,
    seed: int = 0,
    rank_certified: bool = False,
    enum_budget: int = 10**6,
    samples: int = 10**4,
    candidates: int = 200,
) -> ReductionCertificate:
    """Full reduction pipeline with a machine-checkable certificate.

    Preconditions (errors): prime field of size at least max(r-1, 2 + r/2),
    alternating n x n space with n >= r+3 and dimension exactly s(n-s-1),
    constant rank r established exhaustively within budget unless
    rank_certified is set.  Mathematical failures during the pipeline are
    recorded as false verdicts, not exceptions.
    """
    ctx = sp.ctx
    if ctx.kind != "prime":
        raise ValueError("the reduction pipeline scans pencils over a prime field")
    if r < 2 or r % 2 == 1:
        raise ValueError("rank must be even and positive")
    s = r // 2
    n = sp.shape[0]
    if not sp.alternating or sp.shape != (n, n):
        raise ValueError("needs an alternating square space")
    if n < r + 3:
        raise ValueError("needs n >= r + 3")
    bound = max(r - 1, 2 + s)
    if not ctx.cardinality_at_least(bound):
        raise ValueError(f"field must have at least {bound} elements")
    if sp.dim != s * (n - s - 1):
        raise ValueError(f"dimension must be the critical value {s * (n - s - 1)}")
    if not rank_certified:
        if sp.member_count() > enum_budget:
            raise ValueError(
                "constant rank must be caller-certified when enumeration exceeds the budget"
            )
        profile = analyze.rank_profile(sp, budget=enum_budget, seed=seed)
        if not (profile.constant_proved and profile.min_rank == r):
            raise ContractError("space does not have constant rank r")

    cert = ReductionCertificate(n=n, r=r, s=s, verdicts={k: False for k in VERDICT_KEYS})

    hit = find_rank_r_member(sp, r, enum_budget=enum_budget, samples=samples, seed=seed)
    if hit is None:
        cert.witnesses["failure"] = "no member of rank exactly r was found"
        return cert
    coords0, s0 = hit
    cert.verdicts["base_point_rank"] = True
    cert.witnesses["base_point_coords"] = [ctx.element_to_str(c) for c in coords0]

    rebased = AffineMatrixSpace(s0, sp.basis, alternating=True)
    p1, k = normalize_radical_to_tail(rebased, s0)
    sp1 = congruence_act(rebased, p1)

    fa_ok = True
    for g in sp1.basis:
        report = analyze.flanders_atkinson_check(g, r, "alternating", gram=k)
        if not report.conclusions_hold:
            fa_ok = False
            cert.witnesses["failure"] = {
                "step": "generator_identities",
                "report": report.to_json(),
            }
            break
    cert.verdicts["generator_identities"] = fa_ok
    if not fa_ok:
        return cert

    kinv = k.inverse()
    ops: list[Matrix] = []
    flats: list[Vector] = []
    for g in sp1.basis:
        b = BlockView(g, r).b
        flat = b.flatten()
        if span_dim(ctx, flats + [flat]) > len(flats):
            flats.append(flat)
            ops.append(kinv @ b)
    try:
        lag = analyze.extract_range_lagrangian(ops, k)
    except (ValueError, ContractError) as exc:
        cert.witnesses["failure"] = {"step": "lagrangian_extraction", "error": str(exc)}
        return cert
    if lag is None:
        cert.witnesses["failure"] = {
            "step": "lagrangian_extraction",
            "error": "slab span sits below the equality bound",
        }
        return cert
    cert.verdicts["lagrangian_extraction"] = True
    cert.lagrangian = lag

    sing_ok = True
    for member in (sp1.base, *sp1.basis):
        a = BlockView(member, r).a
        for i, x in enumerate(lag):
            for y in lag[i:]:
                if form_value(a, x, y) != 0:
                    sing_ok = False
                    cert.witnesses["failure"] = {
                        "step": "lagrangian_singularity",
                        "member": member.to_json(),
                    }
                    break
            if not sing_ok:
                break
        if not sing_ok:
            break
    cert.verdicts["lagrangian_singularity"] = sing_ok
    if not sing_ok:
        return cert

    p2r = symplectic_basis(k, lag)
    p2 = _block_diag(p2r, Matrix.identity(ctx, n - r))
    sp2 = congruence_act(sp1, p2)
    nf_ok = all(
        m.block(s, n, s, n).is_zero() for m in (sp2.base, *sp2.basis)
    )
    cert.verdicts["normal_form"] = nf_ok
    if not nf_ok:
        cert.witnesses["failure"] = {"step": "normal_form"}
        return cert

    slab_base = sp2.base.block(0, s, s, n)
    slab_gens: list[Matrix] = []
    kept: list[Vector] = []
    for g in sp2.basis:
        bs = g.block(0, s, s, n)
        flat = bs.flatten()
        if span_dim(ctx, kept + [flat]) > len(kept):
            kept.append(flat)
            slab_gens.append(bs)
    slab = AffineMatrixSpace(slab_base, slab_gens)
    try:
        q, qprime, m_space = reduce_full_row_rank(
            slab,
            enum_budget=enum_budget,
            samples=samples,
            seed=seed,
            rank_certified=True,
        )
    except (ValueError, ContractError) as exc:
        cert.witnesses["failure"] = {"step": "set_equality", "error": str(exc)}
        return cert
    cert.recovered_M = m_space

    p3t = _block_diag(q.T, qprime)
    p_total = p1 @ p2 @ p3t
    cert.P = p_total
    try:
        target = build_bordered_alternating(ctx, n, s, inner=m_space)
    except ValueError as exc:
        cert.witnesses["failure"] = {"step": "set_equality", "error": str(exc)}
        return cert
    eq_ok = spaces_equal(congruence_act(sp, p_total), target)
    cert.verdicts["set_equality"] = eq_ok
    if not eq_ok:
        cert.witnesses["failure"] = {"step": "set_equality"}
        return cert

    try:
        unique_totally_singular_complement(
            congruence_act(sp, p_total), s, seed=seed, candidates=candidates
        )
        cert.verdicts["complement_uniqueness"] = True
        cert.witnesses["complement_candidates_rejected"] = candidates
    except ContractError as exc:
        cert.witnesses["failure"] = {"step": "complement_uniqueness", "error": str(exc)}
    return cert


def _block_diag(a: Matrix, b: Matrix) -> Matrix:
    ctx = a.ctx
    n = a.nrows + b.nrows
    z = ctx.zero()
    data = [[z] * n for _ in range(n)]
    for i in range(a.nrows):
        for j in range(a.ncols):
            data[i][j] = a[i, j]
    for i in range(b.nrows):
        for j in range(b.ncols):
            data[a.nrows + i][a.ncols + j] = b[i, j]
    return Matrix(ctx, data)
