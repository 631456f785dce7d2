"""Command-line interface: construct, verify, reduce, table, optimal-search,
counterexample.

Reports are JSON (or TSV for tables) written to stdout or an explicit path,
byte-identical for a fixed seed and flag set; timing goes to stderr.  Exit
codes: 0 success, 1 mathematical check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from . import __version__, analyze, families, reduction
from .errors import BudgetExceededError, ContractError
from .fields import FieldCtx
from .matrices import Matrix
from .spaces import AffineMatrixSpace, exhaustive_optimal_dimension
from .symplectic import FormSpacePair, phi_operators_to_forms

FAMILY_NAMES = (
    "nt",
    "nonsingular-alt",
    "m-tilde-alt",
    "h-plus",
    "h-bar",
    "m-tilde-rect",
    "operator-block",
    "counterexample-plane",
    "standard-symplectic",
)


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(obj: dict, out: str) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _load_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _stderr_time(label: str, t0: float) -> None:
    print(f"[time] {label}: {time.perf_counter() - t0:.3f}s", file=sys.stderr)


def _report(command: str, ctx: Optional[FieldCtx], parameters: dict, seed: Optional[int]) -> dict:
    return {
        "command": command,
        "version": __version__,
        "field": ctx.to_str() if ctx is not None else None,
        "parameters": parameters,
        "seed": seed,
    }


def _rank_expectation(name: str, n: Optional[int], r: Optional[int], s: Optional[int]):
    if name in ("nonsingular-alt", "standard-symplectic"):
        return ("constant", 2 * s)
    if name == "m-tilde-alt":
        return ("constant", 2 * s)
    if name == "m-tilde-rect":
        return ("constant", s)
    if name == "h-plus":
        return ("constant", r)
    if name == "h-bar":
        return ("at_least", r)
    return None


def build_family(
    name: str,
    ctx: FieldCtx,
    *,
    n: Optional[int] = None,
    r: Optional[int] = None,
    s: Optional[int] = None,
    inner: Optional[AffineMatrixSpace] = None,
):
    """(space or pair, expected dimension, rank expectation) for a family name."""
    if name == "nt":
        if n is None:
            raise ValueError("nt needs --n")
        sp = families.build_strictly_upper_space(ctx, n)
        return sp, n * (n - 1) // 2, None
    if name == "nonsingular-alt":
        if s is None:
            raise ValueError("nonsingular-alt needs --s")
        sp = families.build_invertible_alternating(ctx, s)
        return sp, s * (s - 1), _rank_expectation(name, n, r, s)
    if name == "m-tilde-alt":
        if n is None or s is None:
            raise ValueError("m-tilde-alt needs --n and --s")
        sp = families.build_bordered_alternating(ctx, n, s, inner=inner)
        return sp, s * (n - s - 1), _rank_expectation(name, n, r, s)
    if name == "h-plus":
        if r is None:
            raise ValueError("h-plus needs --r")
        sp = families.build_corank_one_space(ctx, r, inner=inner)
        sval = r // 2
        return sp, sval * (sval + 1), _rank_expectation(name, n, r, sval)
    if name == "h-bar":
        if n is None or r is None:
            raise ValueError("h-bar needs --n and --r")
        sp = families.build_rank_at_least_space(ctx, n, r, inner=inner)
        sval = r // 2
        return sp, n * (n - 1) // 2 - sval * sval, _rank_expectation(name, n, r, sval)
    if name == "m-tilde-rect":
        if n is None or s is None:
            raise ValueError("m-tilde-rect needs --n and --s")
        sp = families.build_row_block_family(ctx, n, s, inner=inner)
        return sp, s * (s - 1) // 2 + s * (n - 2 * s), _rank_expectation(name, n, r, s)
    if name == "operator-block":
        if n is None:
            raise ValueError("operator-block needs --n")
        pair = families.build_operator_block_space(ctx, n)
        return pair, n * (n - 1), None
    if name == "counterexample-plane":
        sp = families.build_counterexample_plane(ctx)
        return sp, 2, None
    if name == "standard-symplectic":
        if s is None:
            raise ValueError("standard-symplectic needs --s")
        from .symplectic import standard_symplectic

        sp = AffineMatrixSpace(standard_symplectic(ctx, s), [], alternating=True)
        return sp, 0, _rank_expectation(name, n, r, s)
    raise ValueError(f"unknown family {name!r}")


def _verify_rank(space, kind: str, value: int, budget: int, samples: int, seed: int):
    profile = analyze.rank_profile(space, budget=budget, seed=seed, samples=samples)
    if kind == "constant":
        ok = profile.min_rank == value and profile.max_rank == value
    else:
        ok = profile.min_rank >= value
    return ok, profile


# -- construct --------------------------------------------------------------------------


def cmd_construct(args) -> int:
    ctx = FieldCtx.parse(args.field)
    inner = None
    if args.inner is not None:
        inner = AffineMatrixSpace.from_json(_load_json(args.inner))
    t0 = time.perf_counter()
    built, expected, expectation = build_family(
        args.family, ctx, n=args.n, r=args.r, s=args.s, inner=inner
    )
    report = _report(
        "construct",
        ctx,
        {"family": args.family, "n": args.n, "r": args.r, "s": args.s},
        args.seed,
    )
    results: dict = {}
    if isinstance(built, FormSpacePair):
        results["dimension"] = built.dim
        results["expected_dimension"] = expected
        results["alternating_invariant"] = True  # validated at construction
        report["pair"] = built.to_json()
        ok = built.dim == expected
    else:
        results["dimension"] = built.dim
        results["expected_dimension"] = expected
        ok = built.dim == expected
        if expectation is not None:
            kind, value = expectation
            rank_ok, profile = _verify_rank(
                built, kind, value, args.budget, args.sample, args.seed
            )
            results["rank"] = profile.to_json(ctx)
            results["rank_verdict"] = rank_ok
            ok = ok and rank_ok
        report["space"] = built.to_json()
    results["verdict"] = ok
    report["results"] = results
    _stderr_time("construct", t0)
    _emit_json(report, args.out)
    return 0 if ok else 1


# -- verify -----------------------------------------------------------------------------


def cmd_verify(args) -> int:
    obj = _load_json(getattr(args, "in"))
    t0 = time.perf_counter()
    if args.check == "duality":
        pair = FormSpacePair.from_json(obj)
        ctx = pair.ctx
        holds = analyze.duality_invariant_check(pair, seed=args.seed)
        report = _report("verify", ctx, {"check": args.check}, args.seed)
        report["results"] = {"holds": holds}
        _stderr_time("verify", t0)
        _emit_json(report, args.out)
        return 0 if holds else 1

    space = AffineMatrixSpace.from_json(obj)
    ctx = space.ctx
    params = {"check": args.check, "rank": args.rank, "profile_mode": args.profile_mode}
    report = _report("verify", ctx, params, args.seed)
    ok = True
    results: dict = {}
    if args.check == "rank-profile":
        profile = analyze.rank_profile(
            space, budget=args.budget, seed=args.seed, samples=args.sample
        )
        results["profile"] = profile.to_json(ctx)
        if args.rank is not None:
            if args.profile_mode == "constant":
                ok = profile.min_rank == args.rank and profile.max_rank == args.rank
            else:
                ok = profile.min_rank >= args.rank
            results["verdict"] = ok
    elif args.check == "trivial-spectrum":
        rep = analyze.trivial_spectrum_check(space, args.budget)
        results["report"] = rep.to_json(ctx)
        ok = rep.trivial
    elif args.check == "flanders-atkinson":
        if args.rank is None:
            raise ValueError("flanders-atkinson needs --rank")
        r = args.rank
        n = space.shape[0]
        base = space.base
        if not base.block(0, n, r, n).is_zero() or not base.block(r, n, 0, n).is_zero():
            raise ValueError("base must be zero outside its leading block")
        lead = base.block(0, r, 0, r)
        reports = []
        for g in space.basis:
            if args.fa_mode == "alternating":
                rep = analyze.flanders_atkinson_check(g, r, "alternating", gram=lead)
            else:
                if lead != Matrix.identity(ctx, r):
                    raise ValueError("pencil and line modes need an identity leading block")
                rep = analyze.flanders_atkinson_check(g, r, args.fa_mode)
            reports.append(rep.to_json())
            ok = ok and rep.conclusions_hold
        results["generators"] = reports
    else:
        raise ValueError(f"unknown check {args.check!r}")
    results["verdict"] = ok
    report["results"] = results
    _stderr_time("verify", t0)
    _emit_json(report, args.out)
    return 0 if ok else 1


# -- reduce -----------------------------------------------------------------------------


def cmd_reduce(args) -> int:
    space = AffineMatrixSpace.from_json(_load_json(getattr(args, "in")))
    t0 = time.perf_counter()
    cert = reduction.canonical_reduction(
        space,
        args.rank,
        seed=args.seed,
        rank_certified=args.rank_certified,
        enum_budget=args.budget,
        samples=args.sample,
        candidates=args.candidates,
    )
    report = _report(
        "reduce",
        space.ctx,
        {"rank": args.rank, "candidates": args.candidates, "rank_certified": args.rank_certified},
        args.seed,
    )
    report["certificate"] = cert.to_json()
    report["results"] = {"all_verdicts_true": cert.all_verdicts_true}
    _stderr_time("reduce", t0)
    _emit_json(report, args.out)
    return 0 if cert.all_verdicts_true else 1


# -- table ------------------------------------------------------------------------------


def _hypothesis_met(problem: str, n: int, r: int, ctx: FieldCtx) -> bool:
    if problem == "invertible":
        return ctx.cardinality_at_least(max(r - 1, 1))
    if problem == "constant_rank":
        return ctx.cardinality_at_least(max(r - 1, 2 + r // 2))
    if problem == "rank_at_least":
        return ctx.cardinality_at_least(n - 1 if n % 2 == 0 else n - 2)
    raise ValueError(problem)


def dimension_table(
    ctxs: list[FieldCtx],
    r_values: list[int],
    n_min: int,
    n_max: int,
    *,
    budget: int = 10**6,
    samples: int = 10**5,
    seed: int = 0,
    rank_checks: bool = True,
) -> list[dict]:
    """Rows comparing closed-form dimensions against constructed families.

    For each (n, r, field) satisfying the relevant cardinality hypothesis:
    the rank-at-least family, the constant-rank family (the bordered family,
    or the corank-one family at n = r+1), and at n = r both witnesses of the
    invertible problem.  Row order is fixed by (n, r, field, problem, family).
    """
    rows = []
    for n in range(n_min, n_max + 1):
        for r in r_values:
            if r > n:
                continue
            s = r // 2
            for ctx in ctxs:
                cells = []
                if _hypothesis_met("rank_at_least", n, r, ctx):
                    cells.append(("rank_at_least", "h-bar"))
                if _hypothesis_met("constant_rank", n, r, ctx):
                    cells.append(
                        ("constant_rank", "h-plus" if n == r + 1 else "m-tilde-alt")
                    )
                if n == r and _hypothesis_met("invertible", n, r, ctx):
                    cells.append(("invertible", "nonsingular-alt"))
                    cells.append(("invertible", "operator-pullback"))
                for problem, family in cells:
                    theorem_dim = families.optimal_dimension_formula(n, r, problem)
                    if family == "operator-pullback":
                        pair = families.build_operator_block_space(ctx, s)
                        space = phi_operators_to_forms(pair)
                        expected = space.dim
                        expectation = ("constant", r)
                    else:
                        space, expected, expectation = build_family(
                            family, ctx, n=n, r=r, s=s
                        )
                    row = {
                        "n": n,
                        "r": r,
                        "q": ctx.to_str(),
                        "problem": problem,
                        "family": family,
                        "theorem_dim": theorem_dim,
                        "constructed_dim": space.dim,
                        "agree": space.dim == theorem_dim == expected,
                    }
                    if rank_checks and expectation is not None:
                        kind, value = expectation
                        ok, profile = _verify_rank(space, kind, value, budget, samples, seed)
                        row["rank_verdict"] = "pass" if ok else "fail"
                        row["method"] = profile.method
                        row["agree"] = row["agree"] and ok
                    else:
                        row["rank_verdict"] = "-"
                        row["method"] = "-"
                    rows.append(row)
    return rows


def cmd_table(args) -> int:
    ctxs = [FieldCtx.parse(f) for f in args.fields.split(",")]
    r_values = sorted({int(x) for x in args.r.split(",")})
    t0 = time.perf_counter()
    rows = dimension_table(
        ctxs,
        r_values,
        args.n_min,
        args.n_max,
        budget=args.budget,
        samples=args.sample,
        seed=args.seed,
        rank_checks=not args.skip_rank_verify,
    )
    header = [
        "n", "r", "q", "problem", "family",
        "theorem_dim", "constructed_dim", "rank_verdict", "method",
    ]
    lines = [
        f"# altrank {__version__} seed={args.seed} budget={args.budget} sample={args.sample}",
        "\t".join(header),
    ]
    ok = True
    for row in rows:
        ok = ok and row["agree"] and row["rank_verdict"] != "fail"
        lines.append("\t".join(str(row[k]) for k in header))
    _stderr_time("table", t0)
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


# -- optimal search ----------------------------------------------------------------------


def cmd_optimal_search(args) -> int:
    ctx = FieldCtx.parse(args.field)
    t0 = time.perf_counter()
    result = exhaustive_optimal_dimension(
        args.n,
        args.r,
        ctx,
        args.predicate,
        table_budget=args.table_budget,
        work_budget=args.work_budget,
    )
    problem = "constant_rank" if args.predicate == "constant-rank" else "rank_at_least"
    formula = families.optimal_dimension_formula(args.n, args.r, problem)
    report = _report(
        "optimal-search",
        ctx,
        {"n": args.n, "r": args.r, "predicate": args.predicate},
        None,
    )
    report["results"] = {
        "max_dim": result.max_dim,
        "exists_by_dim": {str(d): v for d, v in result.exists_by_dim.items()},
        "formula": formula,
        "agrees": result.max_dim == formula,
        "witness": result.witness.to_json() if result.witness is not None else None,
    }
    _stderr_time("optimal-search", t0)
    _emit_json(report, args.out)
    return 0 if result.max_dim == formula else 1


# -- counterexample ----------------------------------------------------------------------


def cmd_counterexample(args) -> int:
    t0 = time.perf_counter()
    ratctx = FieldCtx.rational()
    coeffs = families.pfaffian_form_coefficients(ratctx)
    coeffs_ok = all(coeffs[k] == 1 for k in ("xx", "yy", "zz")) and all(
        coeffs[k] == 0 for k in ("xy", "xz", "yz")
    )
    cert = families.certify_plane_anisotropy()
    plane = families.build_counterexample_plane(ratctx)
    profile = analyze.rank_profile(plane, budget=0, seed=args.seed, samples=args.sample)
    rational_ok = profile.min_rank == 4 and profile.max_rank == 4

    f3 = FieldCtx.prime(3)
    f5 = FieldCtx.prime(5)
    drop3 = families.plane_rank_drop_witness(f3)
    two5 = families.translation_rank_two_witness(f5)

    report = _report("counterexample", None, {"samples": args.sample}, args.seed)
    report["results"] = {
        "pfaffian_form": {k: str(v) for k, v in sorted(coeffs.items())},
        "pfaffian_form_expected": coeffs_ok,
        "anisotropy_certificate": cert.to_json(),
        "rational_plane": profile.to_json(ratctx),
        "rational_all_rank_4": rational_ok,
        "mod_3_rank_drop": {
            "coords": [str(c) for c in drop3[0]],
            "member": drop3[1].to_json(),
        }
        if drop3
        else None,
        "mod_5_rank_two": {
            "coords": [str(c) for c in two5[0]],
            "member": two5[1].to_json(),
        }
        if two5
        else None,
    }
    ok = bool(coeffs_ok and cert.no_rank_two and rational_ok and drop3 and two5)
    report["results"]["verdict"] = ok
    _stderr_time("counterexample", t0)
    _emit_json(report, args.out)
    return 0 if ok else 1


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altrank",
        description="exact constructions and verification for affine spaces of alternating matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_field=True):
        if with_field:
            p.add_argument("--field", required=True, help="Fp:<p> or Q")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=10**6, help="max enumerated members")
        p.add_argument("--sample", type=int, default=10**5, help="sample count past the budget")
        p.add_argument("--out", default="-", help="output path or - for stdout")

    p = sub.add_parser("construct", help="build a named family and verify its contract")
    p.add_argument("--family", required=True, choices=FAMILY_NAMES)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--inner", help="path to a space JSON overriding the inner family")
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="run a check against a space JSON")
    p.add_argument("--in", default="-", help="space JSON path or - for stdin")
    p.add_argument(
        "--check",
        required=True,
        choices=("rank-profile", "trivial-spectrum", "flanders-atkinson", "duality"),
    )
    p.add_argument("--rank", type=int)
    p.add_argument("--profile-mode", choices=("constant", "at-least"), default="constant")
    p.add_argument("--fa-mode", choices=("pencil", "line", "alternating"), default="alternating")
    common(p, with_field=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="run the canonical reduction pipeline")
    p.add_argument("--in", default="-", help="space JSON path or - for stdin")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--rank-certified", action="store_true")
    p.add_argument("--candidates", type=int, default=200)
    common(p, with_field=False)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("table", help="dimension-formula table across a grid")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=9)
    p.add_argument("--r", default="2,4,6", help="comma-separated even ranks")
    p.add_argument("--fields", default="Fp:3,Fp:5,Fp:7", help="comma-separated fields")
    p.add_argument("--skip-rank-verify", action="store_true")
    common(p, with_field=False)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("optimal-search", help="exhaustive optimal dimension at tiny sizes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--predicate", choices=("constant-rank", "rank-at-least"), required=True)
    p.add_argument("--table-budget", type=int, default=10**6)
    p.add_argument("--work-budget", type=int, default=3 * 10**8)
    common(p)
    p.set_defaults(func=cmd_optimal_search)

    p = sub.add_parser("counterexample", help="field-dependent rank behavior demonstration")
    common(p, with_field=False)
    p.set_defaults(func=cmd_counterexample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ContractError as exc:
        print(f"contract failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, BudgetExceededError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
