"""Timing comparison of the compiled and pure-numpy kernel backends.

Runs each kernel on batches of the sizes the sequential estimator
actually sees, plus a full sequential fit with each backend, and prints
a small table.  Usage:

    python benchmarks/bench_kernels.py [--n 5000] [--l 2000]
"""
from __future__ import annotations

import argparse
import importlib
import time

import numpy as np


def _load_backends():
    backends = {}
    try:
        backends["cython"] = importlib.import_module("tierbounds._kernels")
    except ImportError:
        pass
    backends["python"] = importlib.import_module("tierbounds._kernels_py")
    return backends


def _bench(fn, args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(backends, sizes=(500, 2000, 8000)):
    rng = np.random.default_rng(0)
    thresholds = np.array([-1.42, 1.09])
    rows = []
    for n in sizes:
        mu0 = rng.normal(0.0, 1.5, n)
        mu1 = mu0 + rng.normal(1.0, 1.0, n)
        a = rng.integers(0, 2, n).astype(float)
        y = rng.normal(0.0, 2.0, n)
        pi = rng.uniform(0.05, 0.95, n)
        cases = {
            "bound_terms": (mu0, mu1, 2.0, thresholds),
            "bound_terms_smooth": (mu0, mu1, 2.0, thresholds, 0.05),
            "correction_terms": (a, y, pi, mu0, mu1, 2.0, thresholds),
            "correction_terms_smooth": (a, y, pi, mu0, mu1, 2.0, thresholds, 0.05),
        }
        for name, args in cases.items():
            timings = {label: _bench(getattr(mod, name), args)
                       for label, mod in backends.items()}
            rows.append((name, n, timings))
    return rows


def bench_sequential(n, l, seed=0):
    """Time a full sequential fit under each backend via the env override."""
    import os
    import subprocess
    import sys

    script = (
        "import time, tierbounds as tb\n"
        "from tierbounds.inference import S1SConfig, s1s\n"
        f"table, _ = tb.simulate({n}, {seed})\n"
        f"part = tb.TierPartition((-1.42, 1.09))\n"
        "t0 = time.perf_counter()\n"
        f"s1s(table, part, {l}, S1SConfig(seed=1))\n"
        "print(tb.BACKEND, time.perf_counter() - t0)\n"
    )
    out = {}
    for label in ("cython", "python"):
        env = dict(os.environ, TIERBOUNDS_BACKEND="" if label == "cython" else "python")
        proc = subprocess.run([sys.executable, "-c", script], env=env,
                              capture_output=True, text=True, check=True)
        used, secs = proc.stdout.split()
        out[label] = (used, float(secs))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=5000)
    parser.add_argument("--l", type=int, default=2000)
    args = parser.parse_args()

    backends = _load_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"{'kernel':<26}{'batch':>7}" + "".join(f"{b:>12}" for b in backends)
          + f"{'speedup':>10}")
    for name, n, timings in bench_kernels(backends):
        cells = "".join(f"{timings[b] * 1e6:>10.1f}us" for b in backends)
        if "cython" in timings:
            ratio = f"{timings['python'] / timings['cython']:>9.1f}x"
        else:
            ratio = f"{'n/a':>10}"
        print(f"{name:<26}{n:>7}{cells}{ratio}")

    print(f"\nfull sequential fit (n={args.n}, l={args.l}):")
    for label, (used, secs) in bench_sequential(args.n, args.l).items():
        print(f"  requested {label:<7} -> backend {used:<7} {secs:7.2f}s")


if __name__ == "__main__":
    main()
