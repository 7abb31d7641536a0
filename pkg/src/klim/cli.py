"""Command-line entry point: ``klim betti | limit | verify | product``.

Exit codes: 0 when every verdict passes (or is indeterminate), 1 when a
mathematical check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .atomic import ResourceGuardError, build_complex, cup, max_degree, monoid_product, verify_cup_leibniz, verify_d_squared
from .bicx import verify_decomposition, verify_delta_exactness, verify_delta_squared, verify_double_complex, vanishing_check
from .cache import SCHEMA_VERSION, ResultCache, cache_key
from .gprod import (
    compatible,
    d_leibniz_counterexample,
    delta_leibniz_counterexample,
    gproduct,
    leibniz_batch,
    leibniz_classify,
    sign_lemmas_exhaustive,
    stabilization_cup_check,
    verify_associativity,
)
from .limit import LimitIndex, verify_generation
from .report import Report
from .setcore import ArrangementError, AtomSet

CHECKS = (
    "d2",
    "delta2",
    "decomp",
    "exactness",
    "bicomplex",
    "leibniz",
    "assoc",
    "signlemmas",
    "cup-leibniz",
    "stabilization",
    "vanishing",
)

# flags that never change a result
NEUTRAL = ("jobs", "format", "cache")


class UsageError(Exception):
    pass


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    return x


def parse_family(text: str) -> list[tuple[int, ...]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse family literal {text!r}: {exc}") from None
    if isinstance(data, list) and data and all(isinstance(x, int) for x in data):
        data = [data]  # a bare atom
    if not isinstance(data, list) or not all(isinstance(m, list) and all(isinstance(x, int) for x in m) for m in data):
        raise UsageError(f"family literal must be a list of integer lists: {text!r}")
    return [tuple(sorted(m)) for m in data]


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))


# -- commands -----------------------------------------------------------------------


def cmd_betti(args):
    _need(args, "k", "l")
    cx = build_complex(args.k, args.l, args.max_atoms)
    by_degree = cx.betti(args.jobs)
    top = max_degree(args.k, args.l)
    payload = {
        "k": args.k,
        "l": args.l,
        "max_atoms": cx.max_atoms,
        "generators": cx.size,
        "max_degree": top,
        "by_degree": {p: h for p, h in by_degree.items()},
        "by_codegree": {top - p: by_degree[p] for p in sorted(by_degree, reverse=True)},
        "indeterminate_degrees": sorted(cx.indeterminate),
    }
    verdict = "indeterminate" if cx.indeterminate else "pass"
    matrices = {f"d{p}": M for p, M in sorted(cx.d.items())}
    return payload, verdict, matrices


def cmd_limit(args):
    _need(args, "q", "stage_k")
    rep = verify_generation(args.q, args.stage_k)
    payload = rep.to_dict()
    return payload, rep.verdict, None


def _verify_report(args) -> Report:
    check = args.check
    if check == "d2":
        _need(args, "k", "l")
        return verify_d_squared(args.k, args.l, args.max_atoms)
    if check == "delta2":
        return verify_delta_squared(args.n or 6, args.m or 3)
    if check == "decomp":
        return verify_decomposition(args.n or 6, args.m or 3)
    if check == "exactness":
        return verify_delta_exactness(args.n or 6, args.m, args.jobs)
    if check == "bicomplex":
        return verify_double_complex(args.n or 6, args.m or 3)
    if check == "leibniz":
        batch = leibniz_batch(args.trials or 200, args.seed, args.n or 10)
        cex = [delta_leibniz_counterexample(), d_leibniz_counterexample()]
        ok = batch.passed and all(r.passed for r in cex)
        return Report(
            "leibniz",
            ok,
            batch.params,
            {"in_regime": batch.details, "counterexamples": [r.to_dict() for r in cex]},
            batch.failures + [r.check for r in cex if not r.passed],
        )
    if check == "assoc":
        return verify_associativity(args.trials or 500, args.seed, args.n or 9)
    if check == "signlemmas":
        return sign_lemmas_exhaustive(args.n or 8)
    if check == "cup-leibniz":
        _need(args, "k", "l")
        return verify_cup_leibniz(args.k, args.l, args.trials or 500, args.seed)
    if check == "stabilization":
        _need(args, "k", "l")
        return stabilization_cup_check(args.k, args.l, args.max_atoms)
    if check == "vanishing":
        _need(args, "k", "l")
        return vanishing_check(args.k, args.l)
    raise UsageError(f"unknown check {check!r}")


def cmd_verify(args):
    rep = _verify_report(args)
    return rep.to_dict(), rep.verdict, None


def _terms(chain, fmt) -> list:
    return [[fmt(x), int(v) if Fraction(v).denominator == 1 else str(v)] for x, v in sorted(chain.items())]


def _atoms_str(S: AtomSet) -> str:
    return "a{" + ",".join("{" + ",".join(map(str, a)) + "}" for a in S.atoms) + "}"


def cmd_product(args):
    _need(args, "lhs", "rhs")
    lhs, rhs = parse_family(args.lhs), parse_family(args.rhs)
    if args.op == "graded":
        a, b = LimitIndex.from_family(lhs), LimitIndex.from_family(rhs)
        c = compatible(a, b)
        payload = {
            "op": "graded",
            "lhs": str(a),
            "rhs": str(b),
            "compatible": c.compatible,
            "reason": c.reason,
            "leibniz_class": leibniz_classify(a, b),
            "pairing": "canonical lexicographic order",
            "result": _terms(gproduct(a, b), str),
        }
    elif args.op == "cup":
        _need(args, "l")
        S, T = AtomSet.of(lhs, args.l), AtomSet.of(rhs, args.l)
        for X in (S, T):
            if args.k is not None and X.atoms and X.arity != args.k:
                raise UsageError(f"atoms must have size k={args.k}")
        payload = {"op": "cup", "lhs": _atoms_str(S), "rhs": _atoms_str(T), "result": _terms(cup(S, T), _atoms_str)}
    else:
        _need(args, "l", "m")
        if len(lhs) != 1 or len(rhs) != 1:
            raise UsageError("monoid product takes one atom on each side")
        atom = monoid_product(lhs[0], args.l, rhs[0], args.m)
        payload = {"op": "monoid", "lhs": list(lhs[0]), "rhs": list(rhs[0]), "l": args.l, "m": args.m, "result": list(atom)}
    return payload, "pass", None


COMMANDS = {"betti": cmd_betti, "limit": cmd_limit, "verify": cmd_verify, "product": cmd_product}


# -- output ---------------------------------------------------------------------------


def _flatten(prefix: str, x, out: list):
    if isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(x, list) and x and all(isinstance(v, (dict, list)) for v in x):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, json.dumps(x) if isinstance(x, list) else x))


def render(envelope: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(envelope, indent=2) + "\n"
    payload = envelope["payload"]
    if envelope["command"] == "betti" and fmt in ("table", "csv"):
        rows = [(p, payload["max_degree"] - int(p), h) for p, h in payload["by_degree"].items()]
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["degree", "codegree", "betti"])
            w.writerows([(p, c, "" if h is None else h) for p, c, h in rows])
            return buf.getvalue()
        lines = [f"A({payload['k']},{payload['l']})  generators={payload['generators']}  verdict={envelope['verdict']}"]
        lines.append(f"{'degree':>8} {'codegree':>9} {'betti':>7}")
        lines += [f"{p:>8} {c:>9} {'?' if h is None else h:>7}" for p, c, h in rows]
        return "\n".join(lines) + "\n"
    flat: list = []
    _flatten("", payload, flat)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        w.writerows(flat)
        w.writerow(["verdict", envelope["verdict"]])
        return buf.getvalue()
    width = max((len(k) for k, _ in flat), default=0)
    lines = [f"{envelope['command']}: {envelope['verdict']}"]
    lines += [f"  {k:<{width}}  {v}" for k, v in flat]
    return "\n".join(lines) + "\n"


# -- argument parsing -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on it)")
    common.add_argument("--cache", default=os.environ.get("KLIM_CACHE_DIR"), help="cache directory (default $KLIM_CACHE_DIR)")
    common.add_argument("--k", type=int)
    common.add_argument("--l", type=int)
    common.add_argument("--q", type=int)
    common.add_argument("--stage-k", dest="stage_k", type=int)
    common.add_argument("--n", type=int, help="ground set bound [n]")
    common.add_argument("--m", type=int, help="family size bound (right factor size for --op monoid)")
    common.add_argument("--max-atoms", dest="max_atoms", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="klim", description="Atomic complexes of k-equal arrangements and their limits.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("betti", parents=[common], help="Betti numbers of A(k,l)")
    sub.add_parser("limit", parents=[common], help="homology of a stabilized stage and the generation check")
    v = sub.add_parser("verify", parents=[common], help="run one verification")
    v.add_argument("check", choices=CHECKS)
    p = sub.add_parser("product", parents=[common], help="multiply two generators")
    p.add_argument("--op", choices=("graded", "cup", "monoid"), default="graded")
    p.add_argument("--lhs")
    p.add_argument("--rhs")
    return parser


def _validate(args):
    for name in ("k", "l", "q", "stage_k", "n", "m", "max_atoms", "trials", "jobs"):
        v = getattr(args, name, None)
        if v is None:
            continue
        low = 0 if name in ("q", "max_atoms") else 1
        if v < low:
            raise UsageError(f"--{name.replace('_', '-')} must be at least {low}")


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in NEUTRAL and k != "command"}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config(args)
    command = args.command if args.command != "verify" else f"verify {args.check}"
    cache = ResultCache(args.cache) if args.cache else None
    key = cache_key(command, config)
    start = time.perf_counter()
    cached = False
    try:
        _validate(args)
        hit = cache.load(key) if cache else None
        if hit:
            payload, verdict, _ = hit
            cached = True
        else:
            payload, verdict, matrices = COMMANDS[args.command](args)
            payload = jsonable(payload)
            if cache:
                cache.store(key, payload, verdict, matrices)
    except (UsageError, ResourceGuardError, ArrangementError, ValueError) as exc:
        print(f"klim: error: {exc}", file=sys.stderr)
        return 2
    envelope = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "config": config,
        "timing": {"seconds": round(time.perf_counter() - start, 6), "cached": cached, "jobs": args.jobs},
        "payload": payload,
        "verdict": verdict,
    }
    stdout.write(render(envelope, args.format))
    return 1 if verdict == "fail" else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
