"""Seeded random instances for tests, the acceptance suite and scripts."""

from __future__ import annotations

import random
from typing import Optional

from .mining import TransactionDb
from .mrcpsp import MrcpspInstance, parse_instance

TOY_DB = "1 2 3\n1 2\n2 3\n"

CHAIN = {
    "jobs": ["S", "A", "B", "E"],
    "startDummy": "S",
    "endDummy": "E",
    "modes": {j: ["m"] for j in "SABE"},
    "duration": {"S": {"m": 0}, "A": {"m": 2}, "B": {"m": 3}, "E": {"m": 0}},
    "successors": {"S": ["A"], "A": ["B"], "B": ["E"]},
    "horizon": 10,
}


def chain_instance() -> MrcpspInstance:
    """Two jobs in sequence, durations 2 and 3; optimal makespan 6."""
    return parse_instance(CHAIN)


def random_cnf(rng: random.Random, max_vars=20, max_clauses=80, max_width=4):
    n = rng.randint(1, max_vars)
    m = rng.randint(0, max_clauses)
    clauses = []
    for _ in range(m):
        width = rng.randint(1, min(n, max_width))
        clauses.append([v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), width)])
    return n, clauses


def random_db(rng: random.Random, max_items=12, max_trans=25, labelled=False, density=None) -> TransactionDb:
    m = rng.randint(2, max_items)
    n = rng.randint(2, max_trans)
    p = density if density is not None else rng.uniform(0.3, 0.7)
    trs = [frozenset(i for i in range(1, m + 1) if rng.random() < p) for _ in range(n)]
    labels = [rng.random() < 0.5 for _ in range(n)] if labelled else None
    return TransactionDb(trs, labels, m)


def random_mrcpsp(rng: random.Random, max_jobs=5, max_modes=2, max_horizon=12) -> MrcpspInstance:
    k = rng.randint(1, max_jobs)
    real = [f"J{i}" for i in range(k)]
    jobs = ["S"] + real + ["E"]
    mode_names = ["a", "b", "c", "d"][:max_modes]
    modes = {j: ["a"] for j in jobs}
    for j in real:
        modes[j] = mode_names[: rng.randint(1, max_modes)]
    dur = {j: {m: (rng.randint(1, 4) if j in real else 0) for m in modes[j]} for j in jobs}
    succ = {"S": list(real), "E": []}
    for i, j in enumerate(real):
        succ[j] = [x for x in real[i + 1 :] if rng.random() < 0.3] + ["E"]

    def usage(res, hi):
        return {j: {m: {res: (rng.randint(0, hi) if j in real else 0)} for m in modes[j]} for j in jobs}

    # a mode may still be unusable, but never because it outgrows a limit on its own
    cap = rng.randint(1, 3)
    data = dict(
        jobs=jobs, startDummy="S", endDummy="E", modes=modes, duration=dur,
        renewable={"R": cap}, nonRenewable={"N": rng.randint(k, 3 * k)},
        usageRenewable=usage("R", cap), usageNonRenewable=usage("N", 3),
        successors=succ, horizon=rng.randint(min(6, max_horizon), max_horizon),
    )
    return parse_instance(data)


def popcount_objective(rng: random.Random, max_vars=12, max_domain=64, seed_clauses: Optional[int] = None):
    """Random CNF with a weighted objective whose domain stays within ``max_domain``."""
    n = rng.randint(2, max_vars)
    m = rng.randint(0, 3 * n) if seed_clauses is None else seed_clauses
    clauses = [
        [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), rng.randint(1, min(n, 3)))]
        for _ in range(m)
    ]
    weights = {v: rng.randint(0, (max_domain - 1) // n) for v in range(1, n + 1)}
    return n, clauses, weights
