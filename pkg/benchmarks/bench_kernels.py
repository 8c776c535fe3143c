#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Both backends consume the identical RNG stream, so outputs are checked for
equality while timing.  Run from the repo root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from edge_epirisk import _kernels as K
from edge_epirisk import mobility as mob
from edge_epirisk.scenario import RandomDirection, RandomWalk, RandomWaypoint


def timed(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_trajectories(backend, mobility, n_individuals, sim_time, seed=7):
    params = mob.params_vector(mobility, 100.0)
    out = np.empty((64, 2))

    def run():
        acc = 0.0
        for ss in np.random.SeedSequence(seed).spawn(n_individuals):
            rng = np.random.Generator(np.random.PCG64(ss))
            row = backend.init_state(params, rng)
            backend.advance(row, params, sim_time, rng)
            backend.advance_record(row, params, sim_time / 64.0, 64, rng, out)
            acc += out[-1, 0]
        return acc

    return timed(run)


def bench_snapshot(backend, trials, n, seed=11):
    def run():
        rng = np.random.Generator(np.random.PCG64(seed))
        return backend.snapshot_tally(rng, trials, n, 2.5, 3e-3, 0.5, 1.5, 100.0, None)

    return timed(run)


def main():
    if K.BACKEND != "compiled":
        print("compiled backend unavailable; nothing to compare")
        return
    fast = K.get_backend("compiled")
    ref = K.get_backend("python")
    print(f"active backend: {K.BACKEND}")
    print(f"{'case':<42}{'python':>10}{'compiled':>10}{'speedup':>9}")

    cases = [
        ("rd trajectories 50 x 2000 s", RandomDirection(speed=1.5, step_max=50.0)),
        ("rwk trajectories 50 x 2000 s", RandomWalk(step=20.0, speed=1.0)),
        ("rwp trajectories 50 x 2000 s", RandomWaypoint()),
    ]
    for label, m in cases:
        t_ref, r_ref = bench_trajectories(ref, m, 50, 2000.0)
        t_fast, r_fast = bench_trajectories(fast, m, 50, 2000.0)
        assert r_ref == r_fast, "backends diverged"
        print(f"{label:<42}{t_ref:>9.3f}s{t_fast:>9.3f}s{t_ref / t_fast:>8.1f}x")

    t_ref, r_ref = bench_snapshot(ref, 200_000, 20)
    t_fast, r_fast = bench_snapshot(fast, 200_000, 20)
    assert r_ref == r_fast, "backends diverged"
    print(f"{'snapshot tally 2e5 trials x N=20':<42}{t_ref:>9.3f}s{t_fast:>9.3f}s{t_ref / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
