#!/usr/bin/env python3
"""Benchmark the numba-compiled forward/gradient kernels against the pure
numpy fallback.

The kernel backend is chosen at import time by the DELAYED_BANDIT_PURE_NUMPY
environment variable, so this script re-executes itself once per backend and
compares wall times for a grid of batch sizes and network shapes.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def run_backend(pure_numpy: bool, repeats: int) -> dict:
    env = dict(os.environ)
    env["DELAYED_BANDIT_PURE_NUMPY"] = "1" if pure_numpy else ""
    out = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeats", str(repeats)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.splitlines()[-1])


def worker(repeats: int) -> dict:
    import numpy as np

    from delaybandit.kernels import USE_NUMBA, forward_batch, grad_batch
    from delaybandit.network import NetworkShape, init_symmetric, unflatten

    rng = np.random.default_rng(0)
    cases = [
        ("small  (L=2, m=16,  d=8,   n=64)", NetworkShape(2, 16, 8), 64),
        ("medium (L=2, m=64,  d=88,  n=256)", NetworkShape(2, 64, 88), 256),
        ("deep   (L=3, m=64,  d=88,  n=256)", NetworkShape(3, 64, 88), 256),
        ("wide   (L=2, m=256, d=88,  n=256)", NetworkShape(2, 256, 88), 256),
    ]
    results = {"backend": "numba" if USE_NUMBA else "numpy", "cases": {}}
    for name, shape, n in cases:
        theta = init_symmetric(shape, rng)
        w1, wh, wl = unflatten(theta, shape)
        xs = rng.standard_normal((n, shape.input_dim))
        forward_batch(w1, wh, wl, xs)          # warm-up / JIT compile
        grad_batch(w1, wh, wl, xs)
        t0 = time.perf_counter()
        for _ in range(repeats):
            forward_batch(w1, wh, wl, xs)
        fwd = (time.perf_counter() - t0) / repeats
        t0 = time.perf_counter()
        for _ in range(repeats):
            grad_batch(w1, wh, wl, xs)
        grad = (time.perf_counter() - t0) / repeats
        results["cases"][name] = {"forward_s": fwd, "gradient_s": grad}
    return results


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--worker", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.worker:
        print(json.dumps(worker(args.repeats)))
        return
    numba = run_backend(False, args.repeats)
    numpy_ = run_backend(True, args.repeats)
    width = max(len(k) for k in numba["cases"])
    print(f"{'case':<{width}}  {'op':<8} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name in numba["cases"]:
        for op, key in (("forward", "forward_s"), ("gradient", "gradient_s")):
            a = numba["cases"][name][key]
            b = numpy_["cases"][name][key]
            print(f"{name:<{width}}  {op:<8} {a * 1e3:>8.2f}ms {b * 1e3:>8.2f}ms "
                  f"{b / a:>7.2f}x")


if __name__ == "__main__":
    main()
