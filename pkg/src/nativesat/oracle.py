"""Brute-force reference answers.

Nothing here touches the solver or the encoders: CNF questions are answered
by evaluating every assignment, mining questions by enumerating every
itemset with bitmasks, scheduling questions by enumerating modes and start
times. Inputs above the budget are refused.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .mining import MiningTask, TransactionDb
from .mrcpsp import MrcpspInstance, schedule_violations


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_vars: int = 20
    max_items: int = 12
    max_jobs: int = 5


DEFAULT_BUDGET = OracleBudget()


# -- CNF ---------------------------------------------------------------------


@lru_cache(maxsize=4)
def _columns(nvars: int) -> tuple[np.ndarray, ...]:
    idx = np.arange(1 << nvars, dtype=np.uint32)
    return tuple(((idx >> v) & 1).astype(bool) for v in range(nvars))


def _satisfying(nvars: int, clauses: Iterable[Sequence[int]], budget: OracleBudget) -> np.ndarray:
    """Boolean mask over all ``2**nvars`` assignments (bit v-1 holds variable v)."""
    if nvars > budget.max_vars:
        raise BudgetExceeded(f"{nvars} variables exceed the budget of {budget.max_vars}")
    cols = _columns(nvars)
    ok = np.ones(1 << nvars, dtype=bool)
    for clause in clauses:
        sat = np.zeros(1 << nvars, dtype=bool)
        for lit in clause:
            col = cols[abs(lit) - 1]
            sat |= col if lit > 0 else ~col
        ok &= sat
    return ok


def is_satisfiable(nvars: int, clauses, budget: OracleBudget = DEFAULT_BUDGET) -> bool:
    return bool(_satisfying(nvars, clauses, budget).any())


def enumerate_models(
    nvars: int,
    clauses,
    projection: Optional[Sequence[int]] = None,
    budget: OracleBudget = DEFAULT_BUDGET,
) -> set[tuple[int, ...]]:
    """Distinct projections of the models, as tuples of signed literals."""
    proj = list(range(1, nvars + 1)) if projection is None else [abs(v) for v in projection]
    ok = _satisfying(nvars, clauses, budget)
    rows = np.nonzero(ok)[0].astype(np.uint32)
    if not proj:
        return {()} if rows.size else set()
    bits = np.stack([(rows >> (v - 1)) & 1 for v in proj], axis=1)
    return {tuple(v if b else -v for v, b in zip(proj, row)) for row in np.unique(bits, axis=0)}


def count_models(nvars, clauses, projection=None, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    return len(enumerate_models(nvars, clauses, projection, budget))


def optimum_of(
    nvars: int,
    clauses,
    weights: dict[int, int],
    sense: str = "max",
    budget: OracleBudget = DEFAULT_BUDGET,
) -> Optional[int]:
    """Best value of ``sum(w * x_v)`` over all models, or None if there are none."""
    ok = _satisfying(nvars, clauses, budget)
    if not ok.any():
        return None
    cols = _columns(nvars)
    obj = np.zeros(1 << nvars, dtype=np.int64)
    for v, w in weights.items():
        obj += w * cols[v - 1]
    vals = obj[ok]
    return int(vals.max() if sense == "max" else vals.min())


# -- itemset mining ----------------------------------------------------------


def _tables(db: TransactionDb, budget: OracleBudget):
    m = db.n_items
    if m > budget.max_items:
        raise BudgetExceeded(f"{m} items exceed the budget of {budget.max_items}")
    full = (1 << len(db.transactions)) - 1
    item_cover = [0] * m
    for t, tr in enumerate(db.transactions):
        for i in tr:
            item_cover[i - 1] |= 1 << t
    cover = [full] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        cover[mask] = cover[mask ^ low] & item_cover[low.bit_length() - 1]
    posmask = 0
    if db.labels is not None:
        for t, lab in enumerate(db.labels):
            if lab:
                posmask |= 1 << t
    return m, cover, posmask


def _weight(mask, weights):
    total = 0
    i = 1
    while mask:
        if mask & 1:
            total += weights.get(i, 0)
        mask >>= 1
        i += 1
    return total


def _to_set(mask: int) -> frozenset:
    return frozenset(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def _proper_supersets(mask, m):
    rest = ((1 << m) - 1) & ~mask
    sub = rest
    while sub:
        yield mask | sub
        sub = (sub - 1) & rest


def _proper_subsets(mask):
    if mask == 0:
        return
    sub = (mask - 1) & mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def mine_patterns(
    db: TransactionDb, task: MiningTask, budget: OracleBudget = DEFAULT_BUDGET
) -> set[frozenset]:
    """Itemsets meeting the local constraints and dominated by no other such itemset."""
    m, cover, posmask = _tables(db, budget)
    kind = task.kind
    sup = [c.bit_count() for c in cover]

    def local(mask):
        s = sup[mask]
        if kind == "mrim":
            if s >= task.min_support:
                return False
        elif s < task.min_support:
            return False
        if kind == "dfis":
            p = (cover[mask] & posmask).bit_count()
            if p - (s - p) <= task.threshold:
                return False
        if task.values is not None and task.min_value is not None:
            if _weight(mask, task.values) < task.min_value:
                return False
        if task.costs is not None and task.max_cost is not None:
            if _weight(mask, task.costs) > task.max_cost:
                return False
        return True

    cand = [local(mask) for mask in range(1 << m)]
    first = 1 if task.exclude_empty else 0
    out = set()
    if kind == "rsd":
        groups: dict[tuple[int, int], list[int]] = {}
        for mask in range(first, 1 << m):
            if cand[mask]:
                c = cover[mask]
                groups.setdefault((c & posmask, c & ~posmask), []).append(mask)
        keys = list(groups)
        for key in keys:
            p, n = key
            beaten = any(
                other != key and p & other[0] == p and other[1] & n == other[1]
                for other in keys
            )
            if beaten:
                continue
            for mask in groups[key]:
                if not any(y != mask and y & mask == mask for y in groups[key]):
                    out.add(_to_set(mask))
        return out

    for mask in range(first, 1 << m):
        if not cand[mask]:
            continue
        if kind in ("cfis", "dfis"):
            rivals = (y for y in _proper_supersets(mask, m) if sup[y] == sup[mask])
        elif kind == "gfis":
            rivals = (y for y in _proper_subsets(mask) if sup[y] == sup[mask])
        else:
            rivals = _proper_subsets(mask)
        if not any(cand[y] for y in rivals):
            out.add(_to_set(mask))
    return out


def mine_by_definition(
    db: TransactionDb, task: MiningTask, budget: OracleBudget = DEFAULT_BUDGET
) -> set[frozenset]:
    """Textbook pattern definitions, without side constraints.

    closed: frequent, every proper superset has smaller support.
    generator: frequent, no proper subset (the empty set included) has equal support.
    minimal rare: infrequent, every proper subset frequent.
    closed discriminative: discriminative, frequent, closed on total support.
    """
    if task.kind == "rsd":
        raise ValueError("no separate textbook form for rsd")
    m, cover, posmask = _tables(db, budget)
    sup = [c.bit_count() for c in cover]
    ms = task.min_support
    out = set()
    for mask in range(1, 1 << m):
        s = sup[mask]
        if task.kind == "cfis":
            ok = s >= ms and all(sup[y] < s for y in _proper_supersets(mask, m))
        elif task.kind == "gfis":
            ok = s >= ms and all(sup[y] != s for y in _proper_subsets(mask))
        elif task.kind == "mrim":
            ok = s < ms and all(sup[y] >= ms for y in _proper_subsets(mask))
        else:
            p = (cover[mask] & posmask).bit_count()
            ok = (
                s >= ms
                and p - (s - p) > task.threshold
                and all(sup[y] < s for y in _proper_supersets(mask, m))
            )
        if ok:
            out.add(_to_set(mask))
    return out


# -- scheduling --------------------------------------------------------------


def optimum_makespan(
    inst: MrcpspInstance, budget: OracleBudget = DEFAULT_BUDGET
) -> Optional[tuple[int, dict, dict]]:
    """Minimum makespan by enumerating every mode vector and start-time vector.

    Returns ``(makespan, start, mode)`` or None when nothing fits the horizon.
    Start times of a job are tried from its precedence-earliest time; a
    branch stops once it cannot beat the best makespan found so far.
    """
    real = [j for j in inst.jobs if j not in (inst.start_dummy, inst.end_dummy)]
    if len(real) > budget.max_jobs:
        raise BudgetExceeded(f"{len(real)} jobs exceed the budget of {budget.max_jobs}")
    order = inst.topological_order()
    preds = {j: [] for j in inst.jobs}
    for j in inst.jobs:
        for s in inst.successors.get(j, []):
            preds[s].append(j)
    H = inst.horizon
    best: list = [None]

    for combo in itertools.product(*(inst.modes[j] for j in order)):
        mode = dict(zip(order, combo))
        if any(
            sum(inst.usage("nonRenewable", j, mode[j], r) for j in inst.jobs) > lim
            for r, lim in inst.non_renewable.items()
        ):
            continue
        start: dict[str, int] = {}

        def place(k):
            if k == len(order):
                if not schedule_violations(inst, start, mode):
                    ms = start[inst.end_dummy]
                    if best[0] is None or ms < best[0][0]:
                        best[0] = (ms, dict(start), dict(mode))
                return
            j = order[k]
            earliest = max(
                (start[p] + inst.duration[p][mode[p]] for p in preds[j]), default=1
            )
            latest = 1 if j == inst.start_dummy else H
            d = inst.duration[j][mode[j]]
            for t in range(earliest, latest + 1):
                # the end dummy cannot start before t + d
                if best[0] is not None and t + d >= best[0][0]:
                    break
                start[j] = t
                place(k + 1)
                del start[j]

        place(0)
    return best[0]
