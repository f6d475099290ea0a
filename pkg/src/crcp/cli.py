"""Command-line front end: generate, build, query, verify, bench.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
All randomness flows from the --seed flag.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from ._accel import backend_name
from .errors import UsageError, VerificationError
from .geometry import MonotoneNorm, load_dataset, save_dataset
from .oracle import (
    gen_adversarial_quadrant,
    gen_adversarial_strip,
    gen_random,
    run_benchmark,
)
from .ranges import parse_query
from .structures import build_index
from .verification import VERIFY_KINDS, verify_kind

GENERATORS = ("uniform", "clustered", "adv-strip", "adv-quadrant")


def _add_common(p, kinds=True):
    p.add_argument("--norm", default="l2", help="norm spec: l1|l2|linf|l<p>|wl<p>:w1,w2[,w3]")
    p.add_argument("--eps", type=float, default=0.5, help="approximation parameter (> 0)")
    if kinds:
        p.add_argument("--kind", required=True, choices=VERIFY_KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crcp",
        description="Approximate colored range closest-pair structures",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a dataset file")
    g.add_argument("--generator", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--colors", type=int, default=2)
    g.add_argument("--d", type=int, default=2, choices=(2, 3))
    g.add_argument("--distribution", default=None, help=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    b = sub.add_parser("build", help="build an index and dump its statistics")
    b.add_argument("--data", required=True)
    _add_common(b)

    q = sub.add_parser("query", help="answer a query file")
    q.add_argument("--data", required=True)
    q.add_argument("--queries", required=True)
    _add_common(q)

    v = sub.add_parser("verify", help="verify an index against the exact oracle")
    v.add_argument("--data", required=True)
    v.add_argument("--rects", type=int, default=200, help="random rectangles for rect kinds")
    v.add_argument(
        "--anchored-queries", type=int, default=30, help="random queries for anchored kinds"
    )
    v.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    _add_common(v)

    be = sub.add_parser("bench", help="run a query workload and write a report")
    be.add_argument("--data", required=True)
    be.add_argument("--queries", required=True)
    _add_common(be)
    return ap


def _write_lines(path: Optional[str], lines: List[str]):
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_gen(args) -> int:
    if args.generator not in GENERATORS:
        raise UsageError(f"unknown generator {args.generator!r}; pick one of {GENERATORS}")
    if args.generator == "uniform":
        ds = gen_random(args.n, args.colors, "uniform-box", args.d, args.seed)
    elif args.generator == "clustered":
        ds = gen_random(args.n, args.colors, "clustered", args.d, args.seed)
    elif args.generator == "adv-strip":
        ds = gen_adversarial_strip(args.n)
    else:
        ds = gen_adversarial_quadrant(args.n)
    header = f"generator={args.generator} n={args.n} seed={args.seed}"
    save_dataset(ds, args.out, header)
    return 0


def _load(args):
    ds = load_dataset(args.data)
    norm = MonotoneNorm.parse(args.norm, ds.dim if ds.n else (3 if args.kind in ("slab", "2box", "dom3", "anchored3d") else 2))
    if not args.eps > 0:
        raise UsageError("--eps must be > 0")
    return ds, norm


def cmd_build(args) -> int:
    ds, norm = _load(args)
    index = build_index(args.kind, ds, norm, args.eps)
    stats = index.stats() if hasattr(index, "stats") else {"total": index.node_count()}
    lines = [
        f"kind {args.kind}",
        f"n {ds.n}",
        f"eps {args.eps:g}",
        f"norm {norm.spec()}",
        f"backend {backend_name()}",
    ]
    lines += [f"nodes.{k} {v}" for k, v in sorted(stats.items())]
    _write_lines(args.out, lines)
    return 0


def _parse_query_line(line: str, kind: str, dim3: int):
    if kind in ("anchored2d", "anchored3d"):
        parts = line.split()
        d = 2 if kind == "anchored2d" else 3
        if len(parts) < 1 + d:
            raise UsageError(f"anchored query needs trailing anchor coords: {line!r}")
        rng = parse_query(" ".join(parts[:-d]), dim3)
        anchor = tuple(float(t) for t in parts[-d:])
        return rng, anchor
    return parse_query(line, dim3), None


def cmd_query(args) -> int:
    ds, norm = _load(args)
    index = build_index(args.kind, ds, norm, args.eps)
    out = []
    with open(args.queries, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            rng, anchor = _parse_query_line(line, args.kind, ds.dim)
            ans = index.query(rng, anchor) if anchor is not None else index.query(rng)
            if ans is None:
                out.append("none")
            else:
                out.append(f"pair {ans.a} {ans.b} {ans.length:.17g}")
    _write_lines(args.out, out)
    return 0


def cmd_verify(args) -> int:
    ds, norm = _load(args)
    try:
        summary = verify_kind(
            args.kind,
            ds,
            norm,
            args.eps,
            seed=args.seed,
            rect_count=args.rects,
            anchored_count=args.anchored_queries,
            corrupt=args.corrupt,
        )
    except VerificationError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        if exc.query is not None:
            print(f"  range:   {exc.query!r}", file=sys.stderr)
        print(f"  answer:  {exc.answer!r}", file=sys.stderr)
        print(f"  optimum: {exc.optimum!r}", file=sys.stderr)
        return 1
    lines = summary.lines() + ["result PASS"]
    _write_lines(args.out, lines)
    return 0


def cmd_bench(args) -> int:
    ds, norm = _load(args)
    from .ranges import load_queries

    queries = load_queries(args.queries, ds.dim)
    try:
        report = run_benchmark(args.kind, ds, norm, args.eps, queries, args.seed)
    except VerificationError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 1
    if args.out:
        report.write(args.out)
    print(report.summary())
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {
        "gen": cmd_gen,
        "build": cmd_build,
        "query": cmd_query,
        "verify": cmd_verify,
        "bench": cmd_bench,
    }
    try:
        return handlers[args.cmd](args)
    except (UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
