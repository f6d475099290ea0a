#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

The backend is fixed at import time by CRCP_DISABLE_NUMBA, so each backend
runs in its own subprocess; results must agree exactly and the table shows
the wall-clock ratio per stage.

    python benchmarks/backend_bench.py [--n 400] [--queries 300]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
import crcp
from crcp.structures import build_index
from crcp.oracle import StripOracle, brute_force_crcp
from crcp.ranges import Strip, Rect

n = int(sys.argv[1])
nq = int(sys.argv[2])
ds = crcp.gen_random(n, 3, "uniform-box", 2, 12345)
norm = crcp.MonotoneNorm(2, 2.0)
timings = {}
answers = []

# warmup: pull kernels through the JIT cache so timings are steady-state
warm = crcp.gen_random(32, 2, "uniform-box", 2, 1)
widx = build_index("strip", warm, norm, 0.5)
widx.query(Strip(0, 0.1, 0.9))
StripOracle(warm, norm, 0)
brute_force_crcp(warm, norm, Strip(0, 0.1, 0.9))

t0 = time.perf_counter()
idx = build_index("strip", ds, norm, 0.5)
timings["build_strip"] = time.perf_counter() - t0

rng = np.random.default_rng(7)
queries = []
for _ in range(nq):
    a, b = np.sort(rng.random(2))
    queries.append(Strip(0, float(a), float(b)))
t0 = time.perf_counter()
for q in queries:
    ans = idx.query(q)
    answers.append(None if ans is None else (ans.a, ans.b, ans.length))
timings["query_strip"] = time.perf_counter() - t0

t0 = time.perf_counter()
oracle = StripOracle(ds, norm, 0)
timings["oracle_tables"] = time.perf_counter() - t0

t0 = time.perf_counter()
for q in queries[: min(nq, 50)]:
    ans = brute_force_crcp(ds, norm, q)
    answers.append(None if ans is None else (ans.a, ans.b, ans.length))
timings["brute_force"] = time.perf_counter() - t0

import hashlib
digest = hashlib.sha256(repr(answers).encode()).hexdigest()
print(json.dumps({"backend": crcp.backend_name(), "timings": timings,
                  "digest": digest}))
"""


def run(disable: bool, n: int, nq: int):
    env = dict(os.environ)
    env["CRCP_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run(
        [sys.executable, "-c", WORKER, str(n), str(nq)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--queries", type=int, default=300)
    args = ap.parse_args()
    fast = run(False, args.n, args.queries)
    slow = run(True, args.n, args.queries)
    if fast["digest"] != slow["digest"]:
        print("BACKENDS DISAGREE", file=sys.stderr)
        return 1
    print(f"{'stage':<16}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for stage in fast["timings"]:
        tf = fast["timings"][stage]
        ts = slow["timings"][stage]
        print(f"{stage:<16}{tf:>12.4f}{ts:>12.4f}{ts / tf:>10.1f}x")
    print("answers identical across backends")
    return 0


if __name__ == "__main__":
    sys.exit(main())
