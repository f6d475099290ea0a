"""The pure-Python fallback must agree with the compiled kernels exactly."""

import json
import os
import subprocess
import sys

SCRIPT = r"""
import json
import numpy as np
import crcp
from crcp.structures import build_index
from crcp.ranges import Strip, Quadrant, Rect

ds = crcp.gen_random(36, 3, "uniform-box", 2, 321)
norm = crcp.MonotoneNorm(2, 2.0)
answers = []
idx = build_index("strip", ds, norm, 0.5)
rng = np.random.default_rng(1)
for _ in range(30):
    a, b = np.sort(rng.random(2))
    ans = idx.query(Strip(0, float(a), float(b)))
    answers.append(None if ans is None else [ans.a, ans.b, ans.length])
qi = build_index("quadrant", ds, norm, 0.5)
for _ in range(30):
    c = rng.random(2)
    ans = qi.query(Quadrant((1, 1), (float(c[0]), float(c[1]))))
    answers.append(None if ans is None else [ans.a, ans.b, ans.length])
ai = build_index("anchored2d", ds, norm, 0.5)
for _ in range(10):
    c = rng.random((2, 2)); lo, hi = c.min(0), c.max(0)
    o = lo + rng.random(2) * (hi - lo)
    ans = ai.query(Rect(lo[0], hi[0], lo[1], hi[1]), tuple(o))
    answers.append(None if ans is None else [ans.a, ans.b, ans.length])
print(json.dumps({"backend": crcp.backend_name(), "answers": answers}))
"""


def _run(disable: str):
    env = dict(os.environ)
    env["CRCP_DISABLE_NUMBA"] = disable
    out = subprocess.run(
        [sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def test_backends_agree():
    fast = _run("0")
    slow = _run("1")
    assert slow["backend"] == "python"
    assert fast["answers"] == slow["answers"]
