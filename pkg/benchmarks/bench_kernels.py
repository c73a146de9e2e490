"""Time the compiled wavelet kernels against the numpy fallback.

Each backend runs in its own interpreter (the fallback is forced with
``VSTDECONV_PURE_PYTHON=1``) so module-level selection is exercised as in
normal use. Usage::

    python3 benchmarks/bench_kernels.py [--size 128] [--repeat 20]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
import vstdeconv
from vstdeconv.convolution import ConvOperator
from vstdeconv.core import make_rng
from vstdeconv.dictionary import make_dictionary
from vstdeconv.prox import InnerLoopConfig, prox_f2
from vstdeconv.solver import SolverConfig, solve

size, repeat = int(sys.argv[1]), int(sys.argv[2])
rng = make_rng(0)
x = rng.random((size, size))
out = {"compiled": vstdeconv.COMPILED}

def best(fn, n):
    return min(timeit.repeat(fn, number=1, repeat=n))

for name in ("haar", "db4", "uwt-haar"):
    D = make_dictionary(name, (size, size))
    a = D.analyze(x)
    out[f"{name} analyze+synthesize"] = best(lambda: D.synthesize(D.analyze(x)), repeat)

D = make_dictionary("haar", (size, size))
alpha = D.analyze(x - 0.5)
cfg = InnerLoopConfig(max_inner_iters=20, tol=0.0)
out["prox_f2 (20 inner, haar)"] = best(lambda: prox_f2(alpha, 0.1, D=D, cfg=cfg, warn=False), max(3, repeat // 4))

H = ConvOperator.gaussian((size, size), 1.0)
y = rng.poisson(30 * x).astype(float)
out["solve (50 iters, haar)"] = best(lambda: solve(y, H, D, SolverConfig(lam=0.3, max_iters=50)), 3)
print(json.dumps(out))
"""


def run(env_flag, size, repeat):
    env = dict(os.environ, VSTDECONV_PURE_PYTHON=env_flag)
    res = subprocess.run([sys.executable, "-c", WORKER, str(size), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)

    fast = run("0", args.size, args.repeat)
    slow = run("1", args.size, args.repeat)
    if not fast.pop("compiled"):
        print("compiled kernels are not built; both columns use the fallback", file=sys.stderr)
    slow.pop("compiled")
    print(f"{args.size}x{args.size}, best of repeats, milliseconds")
    print(f"{'kernel':32s}{'compiled':>12s}{'numpy':>12s}{'speedup':>10s}")
    for key in fast:
        c, p = 1e3 * fast[key], 1e3 * slow[key]
        print(f"{key:32s}{c:12.3f}{p:12.3f}{p / c:9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
