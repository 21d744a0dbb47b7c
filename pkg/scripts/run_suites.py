"""Run the randomized verification suites for each discount family and print a summary table."""

import argparse
import time

import numpy as np

from oneswitch import du, verify
from oneswitch.core import PowerUtility, PreferenceModel
from oneswitch.discount import classify_impatience

FAMILIES = ("exponential", "lin_exp", "sum_exp", "hyperbolic")


def run_family(family, n_models, n_pairs, seed, grid):
    rng = np.random.default_rng(seed)
    kinds = {k: 0 for k in verify.SwitchKind}
    agree = 0
    t0 = time.perf_counter()
    for _ in range(n_models):
        D = verify.random_discount(family, rng)
        model = PreferenceModel(PowerUtility(), D)
        agree += verify.impatience_suite(D).ok
        for _ in range(n_pairs):
            a, b = verify.random_pair(rng, model.utility)
            kinds[verify.one_switch_oracle(model, a, b, du.DEFAULT_SIGMA_MAX, grid).kind] += 1
    weak = verify.weak_one_switch_property_suite(model, n_pairs, seed)
    return kinds, agree, weak.ok, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", type=int, default=20, help="random parameter draws per family")
    ap.add_argument("--pairs", type=int, default=50, help="sequence pairs per model")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=int, default=du.DEFAULT_GRID_POINTS)
    args = ap.parse_args()

    print(f"{'family':12s} {'zero':>6s} {'one':>6s} {'weak':>6s} {'viol':>6s}  impatience-agree  weak-suite  time")
    for fam in FAMILIES:
        kinds, agree, weak_ok, dt = run_family(fam, args.models, args.pairs, args.seed, args.grid)
        k = verify.SwitchKind
        print(
            f"{fam:12s} {kinds[k.ZERO_SWITCH]:6d} {kinds[k.ONE_SWITCH]:6d} {kinds[k.WEAK_ONE_SWITCH]:6d} "
            f"{kinds[k.VIOLATION]:6d}  {agree:>7d}/{args.models:<8d} {'ok' if weak_ok else 'FAIL':>10s}  {dt:5.1f}s"
        )


if __name__ == "__main__":
    main()
