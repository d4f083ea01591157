"""Time the numba kernels against the plain-numpy ones.

    python benchmarks/bench_backends.py [--trials 100] [--oracle-size 10]

Each workload runs once per backend after a warm-up call, so numba
compilation is excluded from the timings.
"""

import argparse
import time

from liftwatchdog import _kernels
from liftwatchdog.distribution import sample_random_joint
from liftwatchdog.experiment import SweepConfig, run_sweep
from liftwatchdog.lift import compute_lift_profile, risk_split
from liftwatchdog.partition import brute_force_optimal


def sweep_workload(trials):
    cfg = SweepConfig(num_trials=trials, num_secrets=13, num_symbols=20, seed=1)
    return lambda: run_sweep(cfg, workers=1)


def oracle_workload(size):
    joint = sample_random_joint(13, size, 5)
    split = risk_split(compute_lift_profile(joint), 0.0)
    assert len(split.high_risk) == size
    return lambda: brute_force_optimal(joint, split)


def timed(fn, repeat=1):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--oracle-size", type=int, default=10)
    args = parser.parse_args()

    backends = [k for k in (_kernels.NUMBA_KERNELS, _kernels.NUMPY_KERNELS) if k is not None]
    workloads = {
        f"sweep {args.trials} trials x 10 eps (|S|=13, |X|=20)": sweep_workload(args.trials),
        f"oracle, {args.oracle_size} high-risk symbols": oracle_workload(args.oracle_size),
    }
    print(f"{'workload':<48} " + " ".join(f"{k.name:>10}" for k in backends))
    for name, fn in workloads.items():
        row = []
        for kern in backends:
            _kernels.active = kern
            oracle_warm = oracle_workload(4)
            oracle_warm()
            sweep_workload(1)()
            row.append(timed(fn))
        print(f"{name:<48} " + " ".join(f"{t:>9.3f}s" for t in row))
    _kernels.active = _kernels.select_kernels()


if __name__ == "__main__":
    main()
