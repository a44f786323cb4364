"""Per-level search statistics of native vs baseline CDP+I mining.

Writes one CSV row per (mode, level): the data behind nodes-per-level and
clauses-per-level plots.

    python3 scripts/level_stats.py --task cfis --min-support 3 --out levels.csv
    python3 scripts/level_stats.py --db my.dat --task gfis
"""

import argparse
import csv
import random
import sys
from pathlib import Path

from nativesat.cdpi import LEVEL_COLUMNS, MODES, run_cdpi
from nativesat.generate import random_db
from nativesat.mining import KINDS, LABELLED, MiningTask, parse_db


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--db", help="transaction file; a random one is generated when omitted")
    p.add_argument("--task", choices=KINDS, default="cfis")
    p.add_argument("--min-support", type=int, default=2)
    p.add_argument("--items", type=int, default=12)
    p.add_argument("--transactions", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    args = p.parse_args(argv)

    if args.db:
        db = parse_db(Path(args.db).read_text())
    else:
        rng = random.Random(args.seed)
        db = random_db(rng, args.items, args.transactions, labelled=args.task in LABELLED, density=0.5)
    task = MiningTask(args.task, args.min_support)

    runs = {mode: run_cdpi(db, task, mode, seed=args.seed) for mode in MODES}
    if runs["native"].itemsets() != runs["baseline"].itemsets():
        raise SystemExit("modes disagree")

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(out, fieldnames=["mode"] + LEVEL_COLUMNS + ["millis"], lineterminator="\n")
    w.writeheader()
    for mode, res in runs.items():
        for r in res.levels:
            w.writerow({"mode": mode, **r.row(), "millis": f"{r.millis:.1f}"})
    for mode, res in runs.items():
        print(f"# {mode}: {len(res.solutions)} patterns, {res.decisions} decisions, "
              f"{res.conflicts} conflicts", file=sys.stderr)


if __name__ == "__main__":
    main()
