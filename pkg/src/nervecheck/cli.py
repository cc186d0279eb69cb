"""Command-line front end.

Subcommands:
  check      run one named check and print its report
  check-all  run every check with per-check default tolerances
  eval       evaluate an expression file at a sampled point
  list       print the known check identifiers

Exit status: 0 on success/pass, 1 when a check fails, 2 on usage or parse
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import formdsl
from .cartanmodel import EquivariantForm
from .harness import (CHECK_IDS, CheckConfig, CheckReport, run_check,
                      sample_algebra, sample_point, sample_tangent)
from .matrixgroup import GroupPoint, Tangent, basis_element, identity_point


def _report_text(r: CheckReport) -> str:
    status = "PASS" if r.passed else "FAIL"
    return f"{r.check_id} {status} max_err={r.max_abs_err:.6e} tol={r.tol:.1e}"


def _emit(payload: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(payload + "\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")


def _cmd_check(args) -> int:
    cfg = CheckConfig(check_id=args.id, trials=args.trials, seed=args.seed,
                      fd_step=args.fd_step, tol=args.tol)
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_check(cfg)
    if args.format == "json":
        payload = json.dumps(report.to_json_dict())
    else:
        payload = _report_text(report)
    _emit(payload, args.out)
    return 0 if report.passed else 1


def _cmd_check_all(args) -> int:
    reports = []
    for cid in CHECK_IDS:
        cfg = CheckConfig(check_id=cid, trials=args.trials, seed=args.seed,
                          fd_step=args.fd_step)
        try:
            cfg.validate()
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        reports.append(run_check(cfg))
    if args.format == "json":
        payload = json.dumps([r.to_json_dict() for r in reports], indent=2)
    else:
        payload = "\n".join(_report_text(r) for r in reports)
    _emit(payload, args.out)
    return 0 if all(r.passed for r in reports) else 1


@dataclass(frozen=True)
class _EvalSetup:
    point: GroupPoint
    tangents: tuple[Tangent, ...]
    x: np.ndarray


def _parse_seed_token(text: str, prefix: str) -> int:
    head, _, tail = text.partition(":")
    if head != prefix or not tail:
        raise ValueError(f"expected {prefix}:<integer>, got {text!r}")
    try:
        return int(tail)
    except ValueError:
        raise ValueError(f"expected {prefix}:<integer>, got {text!r}") from None


def _eval_setup(at: str, tangents: str, level: int, degree: int) -> _EvalSetup:
    if at == "identity":
        pt = identity_point(level)
    else:
        rng = np.random.default_rng(_parse_seed_token(at, "seed"))
        pt = sample_point(rng, level)

    if tangents == "debug":
        if degree != 1:
            raise ValueError(
                f"the debug sampler supplies one tangent, but the expression "
                f"has degree {degree}")
        ts = (Tangent(pt, tuple(h @ basis_element(3, 4) for h in pt.factors)),)
        return _EvalSetup(pt, ts, basis_element(1, 2))
    if tangents.startswith("repeat"):
        rng = np.random.default_rng(_parse_seed_token(tangents, "repeat"))
        one = sample_tangent(rng, pt)
        return _EvalSetup(pt, (one,) * degree, sample_algebra(rng))
    rng = np.random.default_rng(_parse_seed_token(tangents, "seed"))
    x = sample_algebra(rng)
    ts = tuple(sample_tangent(rng, pt) for _ in range(degree))
    return _EvalSetup(pt, ts, x)


def _cmd_eval(args) -> int:
    # A name like "mu.form" falls back to the bundled corpus when no such
    # file exists on disk; an on-disk file always wins.
    try:
        with open(args.expr, "r", encoding="utf-8") as fh:
            src = fh.read()
    except OSError as exc:
        if args.expr in formdsl.CORPUS_NAMES:
            src = formdsl.corpus_source(args.expr)
        else:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    try:
        ast = formdsl.parse(src)
        level = max(formdsl.max_factor_index(ast), 1)
        form = formdsl.interpret(ast, level=level)
    except formdsl.FormDslError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(form, EquivariantForm):
        degree = form.form_degree
    else:
        degree = form.degree
    try:
        setup = _eval_setup(args.at, args.tangents, level, degree)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    concrete = form(setup.x) if isinstance(form, EquivariantForm) else form
    value = concrete(setup.point, *setup.tangents)
    print("%.17g" % value)
    return 0


def _cmd_list(_args) -> int:
    for cid in CHECK_IDS:
        print(cid)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nervecheck",
        description="Numerical checks for simplicial de Rham identities "
                    "on SO(4).")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run one named check")
    check.add_argument("--id", required=True, choices=CHECK_IDS,
                       help="check identifier (see `list`)")
    check.add_argument("--trials", type=int, default=200)
    check.add_argument("--seed", type=int, default=42)
    check.add_argument("--fd-step", dest="fd_step", type=float, default=1e-5)
    check.add_argument("--tol", type=float, default=None,
                       help="override the per-check default tolerance")
    check.add_argument("--format", choices=("json", "text"), default="json")
    check.add_argument("--out", default=None, help="write the report here "
                       "instead of stdout")
    check.set_defaults(func=_cmd_check)

    allcmd = sub.add_parser("check-all", help="run every check")
    allcmd.add_argument("--trials", type=int, default=200)
    allcmd.add_argument("--seed", type=int, default=42)
    allcmd.add_argument("--fd-step", dest="fd_step", type=float, default=1e-5)
    allcmd.add_argument("--format", choices=("json", "text"), default="json")
    allcmd.add_argument("--out", default=None)
    allcmd.set_defaults(func=_cmd_check_all)

    evalcmd = sub.add_parser("eval", help="evaluate an expression file")
    evalcmd.add_argument("--expr", required=True, help="path to a .form file")
    evalcmd.add_argument("--at", default="identity",
                         help="base point: identity or seed:N")
    evalcmd.add_argument("--tangents", default="seed:0",
                         help="tangent sampler: seed:M, repeat:M, or debug")
    evalcmd.set_defaults(func=_cmd_eval)

    listcmd = sub.add_parser("list", help="print the check identifiers")
    listcmd.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
