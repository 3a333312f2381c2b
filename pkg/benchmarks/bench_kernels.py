"""Throughput of the compiled and pure-Python trial kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--N 100] [--trials 2000]

Both backends are run on identical trials and their outputs are checked
for bit equality before timings are reported.
"""
import argparse
import time
from fractions import Fraction

import numpy as np

from coaltwo.core import Parameters
from coaltwo.mc import get_backend, sample_outcomes


def _time(fn, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--N", type=int, default=100)
    ap.add_argument("--s", default="3/10")
    ap.add_argument("--r", default="1/10")
    ap.add_argument("--state", default="q12")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--generative-trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    params = Parameters(args.N, Fraction(args.s), Fraction(args.r))
    try:
        get_backend("cython")
        backends = ("cython", "python")
    except ImportError:
        print("compiled kernel not built; timing the fallback only")
        backends = ("python",)

    print(f"N={args.N} s={args.s} r={args.r} start={args.state}")
    print(f"{'sampler':<11} {'backend':<8} {'trials':>7} {'seconds':>9} {'steps/s':>12} {'speedup':>8}")
    for sampler, M in (("matrix", args.trials), ("generative", args.generative_trials)):
        results = {}
        for name in backends:
            sec, (ti, tj) = _time(lambda: sample_outcomes(params, args.state, M, args.seed,
                                                          sampler=sampler, backend=name))
            results[name] = (sec, ti, tj)
        ref = results[backends[-1]]
        for name in backends:
            sec, ti, tj = results[name]
            if not (np.array_equal(ti, ref[1]) and np.array_equal(tj, ref[2])):
                raise SystemExit(f"{sampler}: backends disagree")
            steps = int(np.maximum(ti, tj).sum())
            print(f"{sampler:<11} {name:<8} {M:>7} {sec:>9.4f} {steps / sec:>12.3e} {ref[0] / sec:>7.1f}x")


if __name__ == "__main__":
    main()
