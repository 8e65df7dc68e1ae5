"""Compare the numba and pure-numpy backends on the two hot kernels.

Usage: python3 benchmarks/bench_backends.py [--repeats N]

Times the busy-period convolution recurrence (several threshold sizes) and
the regenerative cycle simulator (several cycle counts) on both backends,
after a warm-up pass so numba compilation is excluded.  Prints a small table
with the speedup of numba over numpy.
"""

import argparse
import time

from damctl import exact, kernels, simulator
from damctl.distributions import Exponential


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_recurrence(repeats):
    print("busy-period recurrence")
    print("%8s %12s %12s %9s" % ("L", "numba (s)", "numpy (s)", "speedup"))
    for level in (500, 2000, 8000):
        model = exact.DamModel(lam=1.0, b1=Exponential(rate=1.0), b2=Exponential(rate=2.0),
                               level=level)
        times = {}
        for backend in ("numba", "numpy"):
            exact.busy_period_counts(model, backend=backend)  # warm up
            times[backend] = _best_of(
                lambda: exact.busy_period_counts(model, backend=backend), repeats)
        print("%8d %12.5f %12.5f %8.1fx"
              % (level, times["numba"], times["numpy"],
                 times["numpy"] / times["numba"]))


def bench_simulator(repeats):
    print("\nregenerative simulator")
    print("%8s %12s %12s %9s" % ("cycles", "numba (s)", "numpy (s)", "speedup"))
    model = exact.DamModel(lam=1.0, b1=Exponential(rate=1.25), b2=Exponential(rate=2.0),
                           level=5)
    for cycles in (2_000, 20_000, 200_000):
        times = {}
        for backend in ("numba", "numpy"):
            if backend == "numpy" and cycles > 20_000:
                # the interpreted path is ~100x slower; keep the run short
                times[backend] = float("nan")
                continue
            cfg = simulator.SimulationConfig(model=model, n_cycles=cycles, seed=0)
            simulator.simulate(cfg, backend=backend)  # warm up
            times[backend] = _best_of(
                lambda: simulator.simulate(cfg, backend=backend), repeats)
        speed = times["numpy"] / times["numba"]
        print("%8d %12.5f %12.5f %8.1fx" % (cycles, times["numba"],
                                            times["numpy"], speed))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats per cell (best-of)")
    args = parser.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    bench_recurrence(args.repeats)
    bench_simulator(args.repeats)


if __name__ == "__main__":
    main()
