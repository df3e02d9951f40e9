"""Command-line front end.

Exit codes: 0 established / verified, 2 not observed / verification failed /
depth infeasible, 1 any error (bad input, unreadable file, unmet precondition).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .criteria import AnalysisParams, chaos_verdict, dense_null_orbit_verdict, sensitivity_verdict
from .errors import DepthInfeasible, LYChaosError, MalformedSpec, VerificationFailed
from .scramble import construct_witness, verify_scramble
from .serialize import (balls_in, dumps, fmt, loads, scramble_report_out, tree_in, tree_out, tree_report_out,
                        verdict_out, witness_in, witness_out)
from .shiftops import Norm, SparseVector, apply_power, norm, pair_distance_along
from .tree import build_nested_tree, verify_tree
from .weights import WeightSeq, make_weights

log = logging.getLogger("lychaos")

LINEAR_LIMIT = 300.0  # linear values are shown only when |log| is below this


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be LO:HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _times(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"times must be comma-separated integers, got {text!r}") from None
    if any(t < 0 for t in out):
        raise argparse.ArgumentTypeError("times must be non-negative")
    return out


def _vector_pairs(text: str) -> list[tuple[int, float]]:
    """``"j:v,j:v"``; an empty string is the zero vector."""
    pairs = []
    for item in text.split(","):
        if not item.strip():
            continue
        try:
            j, v = item.split(":")
            pairs.append((int(j), float(v)))
        except ValueError:
            raise MalformedSpec(f"vector entries must be j:value, got {item!r}") from None
    return pairs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lychaos", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lychaos {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weights", required=True, type=Path, help="weight spec file (JSON)")
    common.add_argument("--horizon", type=_positive_int, default=10_000)
    common.add_argument("--theta-div", type=_positive_float, default=40.0)
    common.add_argument("--theta-dec", type=_positive_float, default=40.0)
    common.add_argument("--range", type=_range, default=(-10_000, 10_000), metavar="LO:HI",
                        help="end indices of the scanned windows (write --range=-10:10 for a negative LO)")
    common.add_argument("--p", choices=["1", "2", "inf"], default="1", help="l^p norm")
    common.add_argument("--m-max", type=_positive_int, default=8, help="decay levels to certify")
    common.add_argument("--support", type=_positive_int, default=3, help="support bound for null orbits")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, help="write the document here instead of stdout")

    sub.add_parser("analyze", parents=[common], help="run the chaos deciders")
    orbit = sub.add_parser("orbit", parents=[common], help="log-norms along an orbit")
    orbit.add_argument("--vector", required=True, help='finite-support vector, "j:v,j:v"')
    orbit.add_argument("--other", help="second vector; prints log-distances instead")
    orbit.add_argument("--times", required=True, type=_times, help="comma-separated times")
    scr = sub.add_parser("scramble", parents=[common], help="build and verify a scrambled family")
    scr.add_argument("--targets", required=True, type=Path)
    scr.add_argument("--levels", type=_positive_int, default=8)
    tree = sub.add_parser("tree", parents=[common], help="nested-ball construction")
    tree.add_argument("--basis", required=True, type=Path)
    tree.add_argument("--depth", type=_positive_int, default=4)
    ver = sub.add_parser("verify", help="re-verify a witness or tree file")
    ver.add_argument("file", type=Path)
    ver.add_argument("--out", type=Path)
    return parser


def _read_json(path: Path):
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise MalformedSpec(f"{path}: bad JSON ({exc})") from None


def _params(args) -> AnalysisParams:
    lo, hi = args.range
    return AnalysisParams(horizon=args.horizon, theta_div=args.theta_div, theta_dec=args.theta_dec,
                          k_lo=lo, k_hi=hi, p=Norm.parse(args.p), m_max=args.m_max,
                          support=args.support, seed=args.seed)


def _emit(args, kind: str, body: dict):
    text = dumps(kind, body)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def _say(args, line: str):
    # keep stdout clean for the document itself when no --out is given
    print(line, file=sys.stdout if args.out else sys.stderr)


def cmd_analyze(args, w: WeightSeq) -> int:
    params = _params(args)
    chaos = chaos_verdict(w, params)
    sens = sensitivity_verdict(w, params)
    null = dense_null_orbit_verdict(w, params)
    body = {"weights": w.describe(), "params": params.echo(),
            "verdicts": {"chaos": verdict_out(chaos), "sensitivity": verdict_out(sens),
                         "dense_null_orbits": verdict_out(null)}}
    _emit(args, "report", body)
    for name, v in (("chaos", chaos), ("sensitivity", sens), ("dense_null_orbits", null)):
        extra = f" (failed: {', '.join(v.failed)})" if v.failed else ""
        _say(args, f"{name}: {v.status.value}{extra}")
    return 0 if chaos.established else 2


def cmd_orbit(args, w: WeightSeq) -> int:
    p = Norm.parse(args.p)
    x = SparseVector.from_pairs(w.side, _vector_pairs(args.vector))
    if args.other is not None:
        y = SparseVector.from_pairs(w.side, _vector_pairs(args.other))
        logs = pair_distance_along(w, x, y, args.times, p)
        head = "t\tlog_distance\tdistance"
    else:
        logs = [norm(apply_power(w, x, t), p) for t in args.times]
        head = "t\tlog_norm\tnorm"
    rows = [head]
    for t, l in zip(args.times, logs):
        if l == float("-inf"):
            lin = "0"
        else:
            lin = fmt(math.exp(l)) if abs(l) < LINEAR_LIMIT else "-"
        rows.append(f"{t}\t{fmt(l)}\t{lin}")
    text = "\n".join(rows) + "\n"
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_scramble(args, w: WeightSeq) -> int:
    params = _params(args)
    targets = balls_in(w.side, _read_json(args.targets))
    try:
        wit = construct_witness(w, targets, args.levels, params)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    rep = verify_scramble(w, wit)
    echo = dict(params.echo(), levels=args.levels)
    _emit(args, "witness", witness_out(w, wit, echo))
    _say(args, f"p_times: {list(wit.p_times)}")
    _say(args, f"q_times: {list(wit.q_times)}")
    _say(args, f"verify: {'pass' if rep.passed else 'fail'}")
    return 0 if rep.passed else 2


def cmd_tree(args, w: WeightSeq) -> int:
    params = _params(args)
    basis = balls_in(w.side, _read_json(args.basis))
    try:
        tree = build_nested_tree(w, basis, args.depth, params.p, params)
    except DepthInfeasible as exc:
        print(f"depth {args.depth} infeasible: {exc}", file=sys.stderr)
        print(f"max feasible depth: {exc.max_depth}")
        return 2
    echo = dict(params.echo(), depth=args.depth)
    _emit(args, "tree", tree_out(w, tree, echo))
    _say(args, f"level sizes: {tree.sizes}")
    rep = verify_tree(w, tree)
    _say(args, f"verify: {'pass' if rep.passed else 'fail'}")
    return 0 if rep.passed else 2


def cmd_verify(args) -> int:
    kind, body = loads(args.file.read_text())
    if kind == "witness":
        w, wit = witness_in(body)
        rep = verify_scramble(w, wit)
        out = scramble_report_out(rep)
        if rep.first_failure is not None:
            f = rep.first_failure
            failure = f"pair ({f.i}, {f.j}) at level {f.level}"
        else:
            failure = None if rep.schedule_ok else "schedules not strictly increasing"
    elif kind == "tree":
        w, tree = tree_in(body)
        rep = verify_tree(w, tree)
        out = tree_report_out(rep)
        failure = rep.first_failure
    else:
        raise MalformedSpec(f"cannot verify a {kind} file")
    out = dict(out, source=kind, weights=w.describe())
    _emit(args, "verification", out)
    _say(args, "verify: pass" if rep.passed else f"verify: fail, first failure {failure}")
    return 0 if rep.passed else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "verify":
            return cmd_verify(args)
        w = make_weights(_read_json(args.weights))
        return {"analyze": cmd_analyze, "orbit": cmd_orbit, "scramble": cmd_scramble,
                "tree": cmd_tree}[args.command](args, w)
    except LYChaosError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: IOFailure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
