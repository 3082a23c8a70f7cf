"""Time the downset DP and its superset-sum kernel on the numba and numpy backends.

    python benchmarks/bench_dp.py [--repeat 5]

The first numba call includes JIT compilation (or cache load) and is reported
separately as warm-up.
"""
import argparse
import time

import numpy as np

from antichains import kernels
from antichains._accel import HAVE_NUMBA
from antichains.counting import count_antichains_dp
from antichains.poset import build_grid


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--sos-bits", type=int, default=22)
    args = parser.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])

    if HAVE_NUMBA:
        start = time.perf_counter()
        count_antichains_dp(build_grid(2, 3), backend="numba")
        print(f"numba warm-up: {time.perf_counter() - start:.3f}s")

    print(f"{'case':<22}{'backend':<8}{'best (s)':>10}  result")
    for t, n in [(2, 6), (3, 4)]:
        P = build_grid(t, n)
        results = {}
        for b in backends:
            secs, value = best_of(lambda: count_antichains_dp(P, backend=b), args.repeat)
            results[b] = value
            print(f"{f'alpha([{t}]^{n})':<22}{b:<8}{secs:>10.4f}  {value}")
        assert len(set(results.values())) == 1, results

    rng = np.random.default_rng(0)
    base = rng.integers(0, 16, size=1 << args.sos_bits, dtype=np.int64)
    outs = {}
    for b in backends:
        def run():
            a = base.copy()
            kernels.superset_sum(a, b)
            return a
        secs, outs[b] = best_of(run, args.repeat)
        print(f"{f'superset sum 2^{args.sos_bits}':<22}{b:<8}{secs:>10.4f}")
    if len(outs) == 2:
        assert np.array_equal(outs["numpy"], outs["numba"])


if __name__ == "__main__":
    main()
