"""``defectcalc`` command-line front end.

Exit codes: 0 success or verdict true, 1 verdict false, 2 usage error,
3 bad input, 4 numerical failure.  Errors are reported as one JSON object
on stderr.
"""
from __future__ import annotations

import argparse
import contextlib
import io as _stdio
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .decompose import decompose_iso, decompose_sym
from .defect import (
    MAX_ORDER,
    DefectKind,
    defect_with_scale,
    lemma_independence_rank,
    strictness_order,
    tensor_strictness_order,
)
from .errors import InputError, NumericalError
from .instances import (
    SUITES,
    conjugate_pair,
    gen_block_tuples,
    gen_jordan_iso,
    gen_jordan_sym,
    gen_tensor_lift,
    planted_pair,
    random_similarity,
    run_suite,
)
from .linalg import DEFAULT_TOL, Tolerance, fro
from .tuples import product_pair, scale_pair

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3, 4
TOL_ENV = "DEFECTCALC_TOL_REL"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _tolerance(args) -> Tolerance:
    rel = DEFAULT_TOL.rel
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            rel = float(env)
        except ValueError:
            raise InputError(f"{TOL_ENV}={env!r} is not a number") from None
    if args.tol_rel is not None:
        rel = args.tol_rel
    abs_floor = DEFAULT_TOL.abs_floor if args.tol_abs is None else args.tol_abs
    return Tolerance(abs_floor=abs_floor, rel=rel)


def _load(path):
    try:
        return io.parse_pair(Path(path).read_bytes())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _verdict(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_FALSE


# ------------------------------------------------------------------ commands
# each returns (exit code, json document, human-readable text)

def _cmd_check(args, tol):
    p = _load(args.pair)
    mat, scale = defect_with_scale(p, args.kind, args.m)
    norm, thr = fro(mat), tol.threshold(scale)
    doc = {"type": "check", "kind": args.kind.value, "m": args.m, "norm": norm,
           "threshold": thr, "verdict": norm <= thr}
    word = "is" if norm <= thr else "is not"
    text = f"pair {word} {args.m}-{args.kind.name.lower()} (defect norm {norm:.6g}, threshold {thr:.3g})"
    return _verdict(norm <= thr), doc, text


def _order_text(rep, what):
    lines = [f"{what} ({rep.kind.name.lower()})"]
    lines += [f"  k={k:<3d} norm={v:.6g}" for k, v in rep.probes]
    found = "none up to %d" % rep.max_order_searched if rep.strict_order is None else rep.strict_order
    lines.append(f"strict order: {found}")
    return "\n".join(lines)


def _report_result(rep, what):
    return _verdict(rep.strict_order is not None), rep, _order_text(rep, what)


def _cmd_order(args, tol):
    rep = strictness_order(_load(args.pair), args.kind, args.max, tol)
    return _report_result(rep, "defect probes")


def _cmd_tensor(args, tol):
    rep = tensor_strictness_order(_load(args.left), _load(args.right), args.kind, args.max, tol)
    return _report_result(rep, "tensor pair probes")


def _cmd_product(args, tol):
    p = product_pair(_load(args.left), _load(args.right), tol)
    rep = strictness_order(p, args.kind, args.max, tol)
    return _report_result(rep, "product pair probes")


def _cmd_defect(args, tol):
    mat, scale = defect_with_scale(_load(args.pair), args.kind, args.m)
    text = np.array2string(mat, precision=6, suppress_small=True, max_line_width=120)
    return EXIT_OK, ("matrix", mat), f"defect of order {args.m} (norm {fro(mat):.6g}):\n{text}"


def _cmd_decompose(args, tol):
    solve = decompose_iso if args.kind is DefectKind.ISOMETRIC else decompose_sym
    r = solve(_load(args.left), _load(args.right), tol)
    text = "\n".join([
        f"c = {io.dumps(complex(r.c))}",
        f"m1 = {r.m1}, m2 = {r.m2} (tensor order {r.tensor_order})",
        f"residuals {r.residual1:.3g}, {r.residual2:.3g}; strict {r.strict1}, {r.strict2}",
    ])
    return EXIT_OK, r, text


def _cmd_lemma_rank(args, tol):
    p = _load(args.pair)
    rank, m = lemma_independence_rank(p, args.kind, t=args.t, tol=tol, sign=args.sign, family=args.family)
    doc = {"type": "lemma_rank", "kind": args.kind.value, "rank": rank, "strict_order": m,
           "verdict": rank == m}
    return _verdict(rank == m), doc, f"rank {rank}, strict order {m}"


def _cmd_suite(args, tol):
    rep = run_suite(args.name, args.trials, args.seed, tol)
    lines = [f"{rep.suite_name}: {rep.passes}/{rep.trials} passed"]
    lines += [f"  seed {s}: {d} (residual {res})" for s, d, res in rep.failures]
    return _verdict(rep.ok), rep, "\n".join(lines)


def _cmd_gen(args, tol):
    meta = {"generator": args.family}
    if args.family == "jordan":
        make = gen_jordan_iso if args.kind is DefectKind.ISOMETRIC else gen_jordan_sym
        p = make(args.m, args.seed)
        meta.update(m=str(args.m))
    elif args.family == "blocks":
        p = gen_block_tuples(gen_jordan_iso(args.m, args.seed), args.d)[args.which - 1]
        meta.update(m=str(args.m), d=str(args.d), which=str(args.which))
    elif args.family == "lift":
        p = gen_tensor_lift(_load(args.pair), args.dim2)
        meta.update(dim2=str(args.dim2))
    else:
        rng = np.random.default_rng(args.seed)
        p = conjugate_pair(planted_pair(rng, args.kind, args.m, args.d), random_similarity(rng, args.m))
        if args.c is not None:
            p = scale_pair(p, args.c)
        meta.update(kind=args.kind.value, m=str(args.m), d=str(args.d))
    if args.seed is not None:
        meta["seed"] = str(args.seed)
    return EXIT_OK, ("pair", p, meta), f"generated {args.family} pair (d={p.d}, n={p.n})"


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol-rel", type=float, default=None, help=f"relative tolerance (env {TOL_ENV})")
    common.add_argument("--tol-abs", type=float, default=None, help="absolute floor of the zero test")
    common.add_argument("--json", action="store_true", help="print only JSON")
    common.add_argument("--out", metavar="FILE", help="write the result to FILE instead of stdout")

    kind = _Parser(add_help=False)
    kind.add_argument("--kind", type=DefectKind.parse, default=DefectKind.ISOMETRIC, help="iso or sym")

    parser = _Parser(prog="defectcalc", description="Defect calculus for commuting tuple pairs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_, parents=(common, kind)):
        sp = sub.add_parser(name, parents=list(parents), help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("check", _cmd_check, "test whether the order-m defect vanishes")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--m", type=int, required=True)

    sp = add("order", _cmd_order, "strict order of a pair")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--max", type=int, default=MAX_ORDER)

    sp = add("defect", _cmd_defect, "print the order-m defect matrix")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--m", type=int, required=True)

    for name, func, help_ in (("tensor", _cmd_tensor, "strict order of the tensor pair"),
                              ("product", _cmd_product, "strict order of the product pair")):
        sp = add(name, func, help_)
        sp.add_argument("--left", required=True, help="first factor pair")
        sp.add_argument("--right", required=True, help="second factor pair")
        sp.add_argument("--max", type=int, default=MAX_ORDER)

    sp = add("decompose", _cmd_decompose, "recover the gauge scalar and factor orders")
    sp.add_argument("--left", required=True, help="first factor pair")
    sp.add_argument("--right", required=True, help="second factor pair")

    sp = add("lemma-rank", _cmd_lemma_rank, "rank of the independence family")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--t", type=int, default=None)
    sp.add_argument("--sign", type=int, choices=(1, -1), default=1)
    sp.add_argument("--family", choices=("left", "right"), default="left")

    sp = add("suite", _cmd_suite, "run a randomized property suite", parents=(common,))
    sp.add_argument("name", choices=sorted(SUITES))
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("gen", _cmd_gen, "write a generated pair document")
    sp.add_argument("family", choices=("jordan", "blocks", "lift", "planted"))
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--which", type=int, choices=(1, 2), default=1)
    sp.add_argument("--dim2", type=int, default=2)
    sp.add_argument("--pair", help="input pair for 'lift'")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--c", type=_complex, default=None, help="gauge applied to the right tuple of 'planted'")
    return parser


def _render(result, as_json: bool, text: str) -> str:
    if isinstance(result, tuple) and result[0] == "matrix":
        return io.serialize_matrix(result[1]) if as_json else text + "\n"
    if isinstance(result, tuple) and result[0] == "pair":
        return io.serialize_pair(result[1], result[2])
    if isinstance(result, dict):
        return io.dumps(result) + "\n" if as_json else text + "\n"
    return io.serialize_report(result) if as_json else text + "\n"


def _error(code: int, exc: BaseException) -> str:
    doc = {"error": type(exc).__name__, "exit_code": code, "message": str(exc)}
    if getattr(exc, "path", None) is not None:
        doc["path"] = exc.path
    return io.dumps(doc) + "\n"


def dispatch(argv) -> tuple[int, str, str]:
    """Run one command line; returns ``(exit code, stdout text, stderr text)``."""
    parser = build_parser()
    captured = _stdio.StringIO()
    try:
        with contextlib.redirect_stdout(captured):
            args = parser.parse_args(list(argv))
    except UsageError as exc:
        return EXIT_USAGE, "", _error(EXIT_USAGE, exc)
    except SystemExit as exc:  # --help
        return int(exc.code or 0), captured.getvalue(), ""
    try:
        tol = _tolerance(args)
        code, result, text = args.func(args, tol)
        out = _render(result, args.json, text)
    except InputError as exc:
        return EXIT_INPUT, "", _error(EXIT_INPUT, exc)
    except NumericalError as exc:
        return EXIT_NUMERICAL, "", _error(EXIT_NUMERICAL, exc)
    if args.out:
        try:
            Path(args.out).write_text(out, encoding="utf-8")
        except OSError as exc:
            err = InputError(f"cannot write {args.out}: {exc.strerror}")
            return EXIT_INPUT, "", _error(EXIT_INPUT, err)
        out = ""
    return code, out, ""


def main(argv=None) -> int:
    code, out, err = dispatch(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
