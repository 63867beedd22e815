"""Command-line driver.

Exit codes: 0 pass, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import coherent, pbw, qoscr, tetra, ybr
from .report import THREADS_ENV, VerifyReport, default_threads

# per-check default degree when --degree is not given
DEFAULT_DEGREE = {
    "involution": 4,
    "symmetry": 4,
    "intertwine": 4,
    "tetrahedron": 4,
    "spectral": 3,
    "theorem1": 4,
    "recursion": 4,
    "b3": 4,
    "master": 4,
    "psi": 12,
    "rules": 0,
}
B3_ORACLE_DEGREE = 3


class UsageError(Exception):
    pass


def _triple(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if len(vals) != 3 or min(vals) < 0:
        raise argparse.ArgumentTypeError("expected three nonnegative integers")
    return vals


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--degree", type=int, default=None, help="degree bound for exact checks")
    p.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance")
    p.add_argument("--q", type=float, default=0.3)
    p.add_argument("--u", type=float, default=0.2)
    p.add_argument("--v", type=float, default=0.4)
    p.add_argument("--spins", default=None, help="comma-separated spins, e.g. 1/2,1/2,1/2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", dest="json_path", default=None, help="write a JSON report here")
    p.add_argument("--threads", type=int, default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="qtetra",
        description="Exact checks for the q-oscillator tetrahedron r-matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("r-element", parents=[common], help="one matrix element <m|r|n>")
    p.add_argument("--m", type=_triple, required=True)
    p.add_argument("--n", type=_triple, required=True)

    sub.add_parser("r-table", parents=[common], help="all r-matrix elements up to --degree")

    p = sub.add_parser("verify", parents=[common], help="run a verification")
    p.add_argument("check", choices=sorted(DEFAULT_DEGREE) + ["all"])
    p.add_argument("--trials", type=int, default=3, help="spectral parameter draws")
    p.add_argument("--oracle-degree", type=int, default=B3_ORACLE_DEGREE)

    p = sub.add_parser("yb", parents=[common], help="Yang-Baxter R-matrices")
    p.add_argument("action", choices=["build", "verify"])
    p.add_argument("--csv", dest="csv_path", default=None)
    p.add_argument("--dps", type=int, default=ybr.DEFAULT_DPS)

    p = sub.add_parser("decomp-table", parents=[common], help="PBW basis-change table")
    p.add_argument("--algebra", choices=["B2", "B3"], default="B2")
    return parser


def _degree(args, check: str) -> int:
    d = DEFAULT_DEGREE[check] if args.degree is None else args.degree
    if d < 0:
        raise UsageError("--degree must be >= 0")
    return d


def _threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.threads
    return default_threads()


def run_check(check: str, args) -> VerifyReport:
    d = _degree(args, check)
    threads = _threads(args)
    if check == "involution":
        return qoscr.verify_involution(d)
    if check == "symmetry":
        return qoscr.verify_symmetry(d)
    if check == "intertwine":
        return qoscr.verify_intertwining(d)
    if check == "tetrahedron":
        return tetra.verify_tetrahedron(d, threads=threads)
    if check == "spectral":
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        return tetra.verify_spectral_reduction(d, args.trials, seed=args.seed, threads=threads)
    if check == "theorem1":
        return pbw.verify_b2_decomposition(d)
    if check == "recursion":
        return pbw.verify_recursion(d)
    if check == "b3":
        rep = pbw.verify_t1_t2(d)
        oracle = pbw.verify_b3_against_oracle(min(d, args.oracle_degree))
        rep.name = "b3"
        rep.params["oracle_degree"] = min(d, args.oracle_degree)
        rep.duration += oracle.duration
        rep.merge(oracle)
        return rep
    if check == "master":
        return coherent.verify_master_identity(d)
    if check == "psi":
        return coherent.verify_psi_identity(d)
    if check == "rules":
        return pbw.certify_rules()
    raise UsageError(f"unknown check {check!r}")


def _spins(args, count: int) -> list[str]:
    if args.spins is None:
        return ["1/2"] * count
    spins = [s.strip() for s in args.spins.split(",")]
    if len(spins) != count:
        raise UsageError(f"--spins needs {count} values")
    for s in spins:
        ybr.SpinLabel.parse(s)
    return spins


def _emit(report: VerifyReport, args) -> int:
    print(report.summary())
    for note in report.notes:
        print(f"  note: {note}")
    for f in report.failures[:10]:
        print(f"  failure: {f}")
    if args.json_path:
        report.write_json(args.json_path)
    return 0 if report.passed or report.inconclusive else 1


def _write_or_print(payload, path: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if path:
        Path(path).write_text(text)
    else:
        print(text)


def _dispatch(args) -> int:
    if args.command == "r-element":
        value = qoscr.r_element(args.m, args.n)
        print(value)
        if args.json_path:
            _write_or_print(
                {"m": list(args.m), "n": list(args.n), "value": value.to_json()}, args.json_path
            )
        return 0
    if args.command == "r-table":
        _write_or_print(qoscr.r_table(_degree(args, "involution")), args.json_path)
        return 0
    if args.command == "decomp-table":
        d = DEFAULT_DEGREE["b3"] if args.degree is None else args.degree
        _write_or_print(pbw.decomposition_table(args.algebra, d), args.json_path)
        return 0
    if args.command == "verify":
        if args.check == "all":
            reports = [run_check(check, args) for check in sorted(DEFAULT_DEGREE)]
            worst = max(_emit(rep, _no_json(args)) for rep in reports)
            if args.json_path:
                _write_or_print([rep.to_dict() for rep in reports], args.json_path)
            return worst
        return _emit(run_check(args.check, args), args)
    if args.command == "yb":
        if args.action == "build":
            s1, s2 = _spins(args, 2)
            R = ybr.yb_build(s1, s2, args.q, args.u, min(args.tol, 1e-15), dps=args.dps)
            if args.csv_path:
                Path(args.csv_path).write_text(R.to_csv())
            if args.json_path:
                Path(args.json_path).write_text(R.to_json())
            meta = R.metadata()
            print(
                f"R[{meta['s1']},{meta['s2']}](u={args.u}) at q={args.q}: "
                f"{len(R.entries)} nonzero entries, truncation order {R.order}"
            )
            if not args.csv_path and not args.json_path:
                print(R.to_csv(), end="")
            return 0
        s1, s2, s3 = _spins(args, 3)
        return _emit(
            ybr.verify_ybe(s1, s2, s3, args.q, args.u, args.v, args.tol, dps=args.dps), args
        )
    raise UsageError(f"unknown command {args.command!r}")


def _no_json(args):
    ns = argparse.Namespace(**vars(args))
    ns.json_path = None
    return ns


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is not None and args.threads >= 1:
        os.environ[THREADS_ENV] = str(args.threads)
    try:
        return _dispatch(args)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"qtetra: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
