"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--size N] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from mcaoi import kernels
from mcaoi.simulator import survival_table, uniform_stream


def cases(size):
    u = uniform_stream(0, size)
    u_sorted = np.sort(u)
    thr = survival_table(0.6, u_sorted[0])
    cycles = kernels.cycles_from_uniforms(u, thr)
    hist = kernels.cycle_histogram(cycles)
    small = np.ascontiguousarray(cycles[: max(size // 1000, 10)])
    return {
        "cycles_from_uniforms": lambda k: k.cycles_from_uniforms(u, thr),
        "histogram_from_sorted": lambda k: k.histogram_from_sorted(u_sorted, thr),
        "cycle_histogram": lambda k: k.cycle_histogram(cycles),
        "slot_scan": lambda k: k.slot_scan(u, 0.4, -1),
        "power_sums": lambda k: k.power_sums(hist),
        "discretized_moments": lambda k: k.discretized_moments(small, 100.0, 2000.0, 100),
        "fraction_below_direct": lambda k: k.fraction_below_direct(cycles, 100.0, 2000.0, 5000.0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = kernels.implementations()
    names = sorted(impls)
    print(f"size={args.size} repeat={args.repeat} (best of, milliseconds)")
    print(f"{'kernel':<24}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(args.size).items():
        best = {n: min(timeit.repeat(lambda: fn(impls[n]), number=1, repeat=args.repeat)) * 1e3 for n in names}
        line = f"{label:<24}" + "".join(f"{best[n]:>12.3f}" for n in names)
        if "cython" in best:
            line += f"{best['python'] / best['cython']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
