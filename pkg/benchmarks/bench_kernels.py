"""Numba kernels against their pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeats 5]

Each row times one workload on both backends (one warmup run discarded,
median of the rest) and checks that the two return the same answer.
"""

from __future__ import annotations

import argparse
import statistics
import time

from chainsched import _kernels
from chainsched.baselines import oracle_solve
from chainsched.cli import loose_chains
from chainsched.generate import generate
from chainsched.model import make_instance
from chainsched.solver import solve_width_dp


def median_ms(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000)
    return statistics.median(times)


def workloads():
    for k, m in [(2, 20), (3, 10), (3, 15), (4, 8)]:
        inst = loose_chains(k, m)
        yield f"width-dp loose {k}x{m}", lambda inst=inst: solve_width_dp(inst).cmax
    for seed in range(3):
        inst = generate("general", 9, 3, seed)
        yield f"width-dp general n=9 seed={seed}", lambda inst=inst: solve_width_dp(inst).cmax
    for n in (7, 8):
        inst = generate("agreeable-queues", n, 2, n)
        yield f"oracle agreeable n={n}", lambda inst=inst: oracle_solve(inst).lmax_opt
    inst = generate("general", 8, 3, 1)
    yield "oracle general n=8 (counting)", lambda: oracle_solve(inst, count_orders=True).optimal_orders
    # no precedence and loose deadlines: nothing prunes, all 9! orders are visited
    free = make_instance([(f"j{i}", 0, 1 + i % 3, 100) for i in range(9)])
    yield "oracle 9 free jobs (counting)", lambda: oracle_solve(free, count_orders=True).optimal_orders


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    if not _kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'workload':36} {'numba_ms':>10} {'python_ms':>10} {'speedup':>8}  same")
    previous = _kernels.backend()
    try:
        for label, fn in workloads():
            _kernels.set_backend("numba")
            fast, fast_out = median_ms(fn, args.repeats), fn()
            _kernels.set_backend("python")
            slow, slow_out = median_ms(fn, args.repeats), fn()
            print(f"{label:36} {fast:10.2f} {slow:10.2f} {slow / fast:8.1f}  {fast_out == slow_out}")
    finally:
        _kernels.set_backend(previous)


if __name__ == "__main__":
    main()
