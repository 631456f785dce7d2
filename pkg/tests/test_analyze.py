import pytest

from altrank.analyze import (
    duality_invariant_check,
    extract_range_lagrangian,
    flanders_atkinson_check,
    kernel_to_image_check,
    rank_profile,
    trivial_spectrum_check,
)
from altrank.errors import BudgetExceededError, ContractError
from altrank.families import (
    build_bordered_alternating,
    build_counterexample_plane,
    build_operator_block_space,
    build_strictly_upper_space,
)
from altrank.fields import FieldCtx
from altrank.matrices import Matrix
from altrank.spaces import AffineMatrixSpace
from altrank.symplectic import FormSpacePair, standard_symplectic

F2 = FieldCtx.prime(2)
F3 = FieldCtx.prime(3)
F5 = FieldCtx.prime(5)
Q = FieldCtx.rational()


def unit(ctx, n, i, j):
    m = [[ctx.zero()] * n for _ in range(n)]
    m[i][j] = ctx.one()
    return Matrix(ctx, m)


# -- rank profiles -----------------------------------------------------------------------


def test_rank_profile_exhaustive_witnesses():
    sp = build_bordered_alternating(F3, 7, 2)
    prof = rank_profile(sp, budget=10**4, seed=0, samples=10)
    assert prof.constant_proved
    assert prof.witness_min == (0,) * 8  # lex-least coordinates
    assert sp.member_at(prof.witness_min).rank() == prof.min_rank


def test_rank_profile_sampled_mode():
    sp = build_bordered_alternating(F5, 7, 2)  # 5^8 members
    prof = rank_profile(sp, budget=10**3, seed=7, samples=400)
    assert prof.method == "sampled" and prof.checked == 400
    assert prof.seed == 7
    assert not prof.constant_proved  # sampling never proves constancy
    assert prof.min_rank == prof.max_rank == 4
    assert sp.member_at(prof.witness_max).rank() == prof.max_rank


def test_rank_profile_rational_sampling():
    plane = build_counterexample_plane(Q)
    prof = rank_profile(plane, budget=0, seed=3, samples=50)
    assert prof.method == "sampled" and prof.checked == 50
    assert prof.min_rank == prof.max_rank == 4


def test_rank_profile_rational_dim_zero():
    sp = AffineMatrixSpace(standard_symplectic(Q, 2), [], alternating=True)
    prof = rank_profile(sp, budget=10, seed=0, samples=10)
    assert prof.method == "exhaustive" and prof.checked == 1
    assert prof.constant_proved and prof.min_rank == 4


# -- spectrum scans ----------------------------------------------------------------------


def test_trivial_spectrum_identity_span():
    sp = AffineMatrixSpace(Matrix.zeros(F3, 2), [Matrix.identity(F3, 2)])
    rep = trivial_spectrum_check(sp)
    assert not rep.trivial and not rep
    member, lam = rep.witness
    assert lam == 1 and member == Matrix.identity(F3, 2)


def test_trivial_spectrum_symplectic_span():
    k = standard_symplectic(F5, 1)
    sp = AffineMatrixSpace(Matrix.zeros(F5, 2), [k])
    rep = trivial_spectrum_check(sp)
    assert not rep.trivial
    member, lam = rep.witness
    assert (member, lam) == (k, 2)  # K has eigenvalues +-2 mod 5


def test_trivial_spectrum_strictly_upper():
    sp = build_strictly_upper_space(F3, 3)
    rep = trivial_spectrum_check(sp)
    assert rep.trivial and rep.checked == 27
    assert bool(rep)


def test_trivial_spectrum_guards():
    sp = build_strictly_upper_space(F3, 3)
    with pytest.raises(BudgetExceededError):
        trivial_spectrum_check(sp, budget=5)
    nonlinear = AffineMatrixSpace(Matrix.identity(F3, 2), [])
    with pytest.raises(ValueError):
        trivial_spectrum_check(nonlinear)
    rect = AffineMatrixSpace(Matrix.zeros(F3, 2, 3), [])
    with pytest.raises(ValueError):
        trivial_spectrum_check(rect)


# -- rank-degeneration conclusions ---------------------------------------------------------


def test_fa_pencil_block_supported_matrix():
    m = Matrix(F5, [[1, 2, 0], [3, 4, 0], [0, 0, 0]])
    rep = flanders_atkinson_check(m, 2, "pencil")
    assert rep.hypothesis_held and rep.D_zero
    assert all(rep.moment_vanishing)
    assert rep.conclusions_hold and rep.first_failure is None


def test_fa_hypothesis_failure_reported():
    m = unit(F5, 3, 2, 2)
    rep = flanders_atkinson_check(m, 2, "pencil")
    assert not rep.hypothesis_held
    assert rep.first_failure[0] == "hypothesis"
    assert not rep.conclusions_hold


def test_fa_line_mode():
    m = Matrix(F5, [[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    rep = flanders_atkinson_check(m, 2, "line")
    assert rep.hypothesis_held and rep.conclusions_hold


def test_fa_alternating_mode_on_bordered_generators():
    sp = build_bordered_alternating(F5, 7, 2)
    k = sp.base.block(0, 4, 0, 4)
    assert k == standard_symplectic(F5, 2)
    for g in sp.basis:
        rep = flanders_atkinson_check(g, 4, "alternating", gram=k)
        assert rep.hypothesis_held and rep.D_zero
        assert all(rep.moment_vanishing)


def test_fa_guards():
    m = Matrix(Q, [[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        flanders_atkinson_check(m, 1, "pencil")
    m5 = unit(F5, 3, 0, 1)
    with pytest.raises(ValueError):
        flanders_atkinson_check(m5, 2, "sideways")
    with pytest.raises(ValueError):
        flanders_atkinson_check(m5, 2, "alternating", gram=Matrix.identity(F5, 2))


# -- kernel-to-image ----------------------------------------------------------------------


def test_kernel_to_image_positive_and_negative():
    z = Matrix.zeros(F3, 3)
    e12 = unit(F3, 3, 0, 1)
    e23 = unit(F3, 3, 1, 2)
    sp = AffineMatrixSpace(z, [e12])
    rep = kernel_to_image_check(sp, e12)
    assert rep.holds and rep.cardinality_ok and bool(rep)
    sp2 = AffineMatrixSpace(z, [e12, e23])
    rep2 = kernel_to_image_check(sp2, e12)
    assert not rep2.holds
    mat, x = rep2.witness
    assert mat == e23 and x == (0, 0, 1)


def test_kernel_to_image_cardinality_flag():
    z = Matrix.zeros(F2, 3)
    u0 = Matrix(F2, [[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    rep = kernel_to_image_check(AffineMatrixSpace(z, [u0]), u0)
    assert rep.holds and not rep.cardinality_ok  # needs |F| > rank = 2


# -- common range Lagrangians ---------------------------------------------------------------


def bound_ops(ctx):
    def mk(row):
        return Matrix(ctx, [list(row), [0, 0, 0]])

    return [mk((1, 0, 0)), mk((0, 1, 0)), mk((0, 0, 1))]


def test_extract_range_lagrangian_at_bound():
    k = standard_symplectic(F5, 1)
    lag = extract_range_lagrangian(bound_ops(F5), k)
    assert lag == [(1, 0)]


def test_extract_range_lagrangian_below_bound():
    k = standard_symplectic(F5, 1)
    assert extract_range_lagrangian(bound_ops(F5)[:2], k) is None


def test_extract_range_lagrangian_guards():
    k = standard_symplectic(F5, 1)
    ops = bound_ops(F5)
    extra = Matrix(F5, [[0, 0, 0], [1, 0, 0]])  # range span(e2), still singular
    with pytest.raises(ValueError):
        extract_range_lagrangian(ops + [extra], k)  # above the bound
    bad_range = Matrix(F5, [[1, 0, 0], [0, 1, 0]])  # rank-2 range cannot be singular
    with pytest.raises(ValueError):
        extract_range_lagrangian([bad_range], k)
    with pytest.raises(ValueError):
        extract_range_lagrangian([Matrix(F5, [[1, 0], [0, 0]])], k)  # p = 2
    with pytest.raises(ValueError):
        extract_range_lagrangian(ops, Matrix.zeros(F5, 2))  # singular gram
    with pytest.raises(ValueError):
        extract_range_lagrangian(ops + [ops[0]], k)  # dependent generators


def test_extract_range_lagrangian_contract_failure():
    # dim at the bound but columns spanning too much: ranges hit both e1 and e2
    k = standard_symplectic(F5, 1)

    def mk(rows):
        return Matrix(F5, rows)

    ops = [
        mk([[1, 0, 0], [0, 0, 0]]),
        mk([[0, 1, 0], [0, 0, 0]]),
        mk([[0, 0, 0], [1, 0, 0]]),
    ]
    with pytest.raises(ContractError):
        extract_range_lagrangian(ops, k)


# -- duality invariant -----------------------------------------------------------------------


def test_duality_invariant_on_block_operators():
    for n in (2, 3):
        pair = build_operator_block_space(F5, n)
        assert duality_invariant_check(pair, seed=0, samples=25)


def test_duality_invariant_gate():
    k = standard_symplectic(F5, 1)
    pair = FormSpacePair(k, [Matrix.identity(F5, 2)])
    with pytest.raises(ValueError):
        duality_invariant_check(pair, seed=0, samples=5)
