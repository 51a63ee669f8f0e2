"""Compiled against pure-Python kernels: wall time per step and output parity.

    python benchmarks/bench_kernels.py [--steps 20000] [--repeat 3]
"""
import argparse
import math
import time

import numpy as np

from hetring.dynamics import backend
from hetring.graph import make_ring


def workloads(steps):
    rng = np.random.default_rng(0)
    for n, m in ((5, 1), (12, 2), (40, 3)):
        g = make_ring(n, m)
        ptr, idx = g.inhibitor_csr()
        x0 = rng.uniform(1e-7, 1e-3, n)
        x0[0] = 0.5
        nan = float("nan")
        yield f"linear ({n},{m})", steps, lambda k, x0=x0, ptr=ptr, idx=idx: k.run(
            x0, steps, 2.0, math.log(2.0), 3.5, ptr, idx, False, nan, 10)
        yield f"log ({n},{m})", steps, lambda k, x0=x0, ptr=ptr, idx=idx: k.run(
            np.log(x0), steps, 2.0, math.log(2.0), 3.5, ptr, idx, True, nan, 10)
        yield f"epochs ({n},{m})", steps, lambda k, x0=x0, ptr=ptr, idx=idx: k.run_epochs(
            np.log(x0), steps, math.log(2.0), 3.5, ptr, idx, math.log(0.25), 10 ** 6, nan)


def best_time(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    return all(np.array_equal(np.asarray(u), np.asarray(v)) for u, v in zip(a, b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "compiled" not in backend.available():
        raise SystemExit("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
    fast, slow = backend.get("compiled"), backend.get("python")
    print(f"{'workload':<18}{'compiled ns/step':>18}{'python ns/step':>16}{'speedup':>10}  identical")
    for name, steps, fn in workloads(args.steps):
        tc, rc = best_time(lambda: fn(fast), args.repeat)
        tp, rp = best_time(lambda: fn(slow), 1)
        print(f"{name:<18}{tc / steps * 1e9:>18.1f}{tp / steps * 1e9:>16.1f}{tp / tc:>10.0f}  {same(rc, rp)}")


if __name__ == "__main__":
    main()
