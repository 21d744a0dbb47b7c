"""Write the reference discount curves and their rates to CSV, then summarize their shapes."""

import argparse

import numpy as np

from oneswitch.curves import COLUMNS, REFERENCE_MODELS, reference_curves


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="reference_curves.csv")
    ap.add_argument("--t-max", type=float, default=200.0)
    ap.add_argument("--step", type=float, default=0.5)
    args = ap.parse_args()

    table = reference_curves(args.t_max, args.step)
    np.savetxt(args.out, table, delimiter=",", header=",".join(COLUMNS), comments="", fmt="%.17g")
    print(f"wrote {len(table)} rows to {args.out}")
    for k, name in enumerate(REFERENCE_MODELS):
        rate = table[:, 1 + len(REFERENCE_MODELS) + k]
        trend = np.sign(np.diff(rate))
        shape = "constant" if not trend.any() else ("increasing" if (trend > 0).all() else "decreasing")
        print(f"{name:12s} D({args.t_max:g})={table[-1, 1 + k]:.5f}  rate {rate[0]:.5f} -> {rate[-1]:.5f} ({shape})")


if __name__ == "__main__":
    main()
