"""Native vs fresh-solver-per-call optimisation on random scheduling instances.

For every instance and strategy, prints optimum, call count, cumulative
decisions/conflicts and time for both modes as CSV.

    python3 scripts/cop_modes.py --instances 20 --max-jobs 5 --horizon 12
"""

import argparse
import csv
import random
import sys

from nativesat.cop import STRATEGIES
from nativesat.generate import random_mrcpsp
from nativesat.mrcpsp import compare_mrcpsp


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--max-jobs", type=int, default=5)
    p.add_argument("--max-modes", type=int, default=2)
    p.add_argument("--horizon", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = random.Random(args.seed)
    cols = ["instance", "strategy", "mode", "optimum", "calls", "decisions", "conflicts", "millis"]
    w = csv.DictWriter(sys.stdout, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    totals = {"native": 0, "fresh": 0}
    for i in range(args.instances):
        inst = random_mrcpsp(rng, args.max_jobs, args.max_modes, args.horizon)
        for strategy in STRATEGIES:
            summary = compare_mrcpsp(inst, strategy, seed=args.seed).summary()
            for mode, row in summary.items():
                totals[mode] += row["conflicts"]
                row["millis"] = f"{row['millis']:.1f}"
                w.writerow({"instance": i, "strategy": strategy, "mode": mode, **row})
    print(f"# cumulative conflicts: {totals}", file=sys.stderr)


if __name__ == "__main__":
    main()
