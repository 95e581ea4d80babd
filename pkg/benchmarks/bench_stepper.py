#!/usr/bin/env python3
"""Benchmark: compiled stepper vs pure-Python fallback.

Runs the same workloads through both backends, reports wall time, speedup
and the maximum deviation between trajectories (expected 0: the backends
perform identical arithmetic).

Usage: python benchmarks/bench_stepper.py [--repeat N]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

import swdelay as sd
from swdelay.simulate import compiled_backend, pure_python_backend, simulate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def workloads():
    ex1 = sd.load_system_file(FIXTURES / "ex1.json")
    ex2 = sd.load_system_file(FIXTURES / "ex2.json")
    yield ("discrete delays, n=2, T=30, dt=0.005",
           ex1.system, np.ones(2), sd.Periodic(((0, 2.0), (1, 1.0))),
           30.0, 0.005)
    yield ("distributed kernel, n=3, T=10, dt=0.01",
           ex2.system, np.ones(3), sd.RandomDwell(0.2, 1.0, 1),
           10.0, 0.01)


def time_run(backend, sys_model, hist, sig, horizon, dt, repeat):
    best = float("inf")
    traj = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        traj = simulate(sys_model, hist, sig, horizon, dt, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, traj


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    fast = compiled_backend()
    slow = pure_python_backend()
    if fast is None:
        print("compiled stepper not built; timing the fallback only")

    header = f"{'workload':45s} {'compiled':>10s} {'python':>10s} " \
             f"{'speedup':>8s} {'max|diff|':>10s}"
    print(header)
    print("-" * len(header))
    for name, sys_model, hist, sig, horizon, dt in workloads():
        t_slow, traj_slow = time_run(slow, sys_model, hist, sig, horizon,
                                     dt, args.repeat)
        if fast is None:
            print(f"{name:45s} {'-':>10s} {t_slow * 1e3:8.1f}ms "
                  f"{'-':>8s} {'-':>10s}")
            continue
        t_fast, traj_fast = time_run(fast, sys_model, hist, sig, horizon,
                                     dt, args.repeat)
        diff = float(np.abs(traj_fast.states - traj_slow.states).max())
        print(f"{name:45s} {t_fast * 1e3:8.2f}ms {t_slow * 1e3:8.1f}ms "
              f"{t_slow / t_fast:7.1f}x {diff:10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
