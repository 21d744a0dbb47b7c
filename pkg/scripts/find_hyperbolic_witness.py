"""Search for a double switch under hyperbolic discounting and freeze it as a fixture.

The stored fixture was produced with the defaults below:
    python scripts/find_hyperbolic_witness.py --seed 20240601 --budget 1000000
"""

import argparse
import json
import time

from oneswitch import verify
from oneswitch.core import PowerUtility, PreferenceModel
from oneswitch.discount import Hyperbolic


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--budget", type=int, default=1_000_000)
    ap.add_argument("--out", default="tests/fixtures/hyperbolic_witness.json")
    args = ap.parse_args()

    model = PreferenceModel(PowerUtility(), Hyperbolic(args.k))
    t0 = time.perf_counter()
    res = verify.double_switch_search(model, args.seed, args.budget)
    elapsed = time.perf_counter() - t0
    if isinstance(res, verify.NotFound):
        print(f"no double switch within budget {args.budget} ({elapsed:.1f} s)")
        return 1
    obj = {"found": True, "seed": args.seed, "budget": args.budget, **verify.witness_to_json(res.witness)}
    with open(args.out, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    print(f"crossings {res.witness.crossings} found in {elapsed:.2f} s; wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
