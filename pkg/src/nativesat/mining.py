"""Transaction databases and SAT models for five itemset mining tasks.

Each task is a base model (item literals, cover literals, support counters,
local constraints) plus a dominance relation between solutions. The
dominance relation shows up twice: as blocking clauses posted into a live
solver, and as a plain predicate used to certify results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .encode import Builder, IntVar

KINDS = ("cfis", "gfis", "mrim", "dfis", "rsd")
ASCENDING = {"gfis", "mrim"}
LABELLED = {"dfis", "rsd"}


class DbParseError(ValueError):
    pass


@dataclass
class TransactionDb:
    """A multiset of transactions over items ``1..n_items``.

    ``labels[t]`` is True for a positive transaction; ``None`` when the
    database is unlabelled.
    """

    transactions: list[frozenset[int]]
    labels: Optional[list[bool]] = None
    n_items: int = 0

    def __post_init__(self):
        self.transactions = [frozenset(t) for t in self.transactions]
        top = max((max(t) for t in self.transactions if t), default=0)
        if self.n_items < top:
            if self.n_items:
                raise ValueError(f"item {top} outside universe 1..{self.n_items}")
            self.n_items = top
        for t in self.transactions:
            if any(i < 1 for i in t):
                raise ValueError("items must be positive integers")
        if self.labels is not None and len(self.labels) != len(self.transactions):
            raise ValueError("labels must be given for every transaction or none")

    def __len__(self):
        return len(self.transactions)

    @property
    def items(self) -> range:
        return range(1, self.n_items + 1)

    @property
    def labelled(self) -> bool:
        return self.labels is not None

    def cover(self, itemset) -> frozenset[int]:
        s = frozenset(itemset)
        return frozenset(t for t, tr in enumerate(self.transactions) if s <= tr)

    def support(self, itemset) -> int:
        return len(self.cover(itemset))

    def split_cover(self, itemset) -> tuple[frozenset[int], frozenset[int]]:
        cov = self.cover(itemset)
        pos = frozenset(t for t in cov if self.labels[t])
        return pos, cov - pos

    def to_text(self) -> str:
        # an empty unlabelled transaction becomes a blank line, which parse_db skips
        lines = []
        for t, tr in enumerate(self.transactions):
            items = " ".join(map(str, sorted(tr)))
            if self.labelled:
                items = ("+ " if self.labels[t] else "- ") + items
            lines.append(items.rstrip())
        return "\n".join(lines) + "\n"


def parse_db(text: str, n_items: int = 0) -> TransactionDb:
    """Parse a FIMI-style transaction file.

    One transaction per line as whitespace-separated positive integers,
    optionally preceded by ``+`` or ``-`` as a class label. Blank lines are
    skipped. Labels must be present on every line or on none.
    """
    transactions = []
    labels = []
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = line.split()
        if not toks:
            continue
        label = None
        if toks[0] in ("+", "-"):
            label = toks[0] == "+"
            toks = toks[1:]
        items = set()
        for tok in toks:
            if not tok.isdigit():
                raise DbParseError(f"line {lineno}: bad item {tok!r}")
            item = int(tok)
            if item == 0:
                raise DbParseError(f"line {lineno}: item 0 is not allowed")
            items.add(item)
        transactions.append(frozenset(items))
        labels.append(label)
    if any(lab is None for lab in labels):
        if any(lab is not None for lab in labels):
            raise DbParseError("mixed labelled and unlabelled transactions")
        return TransactionDb(transactions, None, n_items)
    return TransactionDb(transactions, labels if labels else None, n_items)


@dataclass
class MiningTask:
    """What to mine.

    ``threshold`` is the discriminative margin for ``dfis``: positive support
    minus negative support must exceed it. ``values``/``costs`` are optional
    per-item weights for the minimum-value and maximum-cost side constraints.
    """

    kind: str
    min_support: int = 1
    threshold: int = 0
    values: Optional[Mapping[int, int]] = None
    min_value: Optional[int] = None
    costs: Optional[Mapping[int, int]] = None
    max_cost: Optional[int] = None
    exclude_empty: bool = True

    def __post_init__(self):
        self.kind = self.kind.lower()
        if self.kind not in KINDS:
            raise ValueError(f"unknown task {self.kind!r}; expected one of {KINDS}")
        for name, w in (("values", self.values), ("costs", self.costs)):
            if w is not None and any(x < 0 for x in w.values()):
                raise ValueError(f"{name} must be nonnegative")

    @property
    def ascending(self) -> bool:
        return self.kind in ASCENDING


@dataclass(frozen=True)
class PatternSolution:
    itemset: frozenset
    support: int
    pos_support: Optional[int] = None
    neg_support: Optional[int] = None
    pos_cover: Optional[frozenset] = None
    neg_cover: Optional[frozenset] = None

    def to_json(self) -> str:
        out = {"itemset": sorted(self.itemset), "support": self.support}
        if self.pos_support is not None:
            out["posSupport"] = self.pos_support
            out["negSupport"] = self.neg_support
        return json.dumps(out)

    @classmethod
    def of(cls, db: TransactionDb, itemset) -> "PatternSolution":
        """Solution record computed directly from the database."""
        itemset = frozenset(itemset)
        if not db.labelled:
            return cls(itemset, db.support(itemset))
        pos, neg = db.split_cover(itemset)
        return cls(itemset, len(pos) + len(neg), len(pos), len(neg), pos, neg)


@dataclass
class ModelContext:
    db: TransactionDb
    task: MiningTask
    builder: Builder
    item_lits: dict[int, int]
    cover_lits: list[int]
    support: IntVar
    pos_support: Optional[IntVar] = None
    neg_support: Optional[IntVar] = None
    extras: dict = field(default_factory=dict)

    @property
    def solver(self):
        return self.builder.solver

    @property
    def projection(self) -> list[int]:
        return [self.item_lits[i] for i in self.db.items]


def _weighted_bits(item_lits, weights):
    bits = []
    for item, lit in item_lits.items():
        bits.extend([lit] * weights.get(item, 0))
    return bits


def build_base_model(db: TransactionDb, task: MiningTask, builder: Builder) -> ModelContext:
    """Post the single-solution part of a mining model.

    Per item a selection literal ``x_i``; per transaction a cover literal
    ``c_t <-> AND(not x_i for i not in t)``; support channelled from the cover
    literals; then frequency (or rarity), discrimination and side constraints.
    """
    if task.kind in LABELLED and not db.labelled:
        raise ValueError(f"task {task.kind} needs a labelled database")
    if task.min_support > len(db):
        raise ValueError(f"min_support {task.min_support} exceeds {len(db)} transactions")
    if db.n_items == 0:
        raise ValueError("database has no items")

    x = {i: builder.new_var() for i in db.items}
    covers = []
    for tr in db.transactions:
        c = builder.new_var()
        missing = [x[i] for i in db.items if i not in tr]
        for lit in missing:
            builder.add([-c, -lit])
        builder.add([c] + missing)
        covers.append(c)

    n = len(db)
    support = builder.int_var(0, n)
    builder.bool_sum_eq(covers, support)
    ctx = ModelContext(db, task, builder, x, covers, support)

    if task.kind == "mrim":
        builder.add([-support.ge(task.min_support)])
    else:
        builder.add([support.ge(task.min_support)])

    if db.labelled:
        pos = [c for c, lab in zip(covers, db.labels) if lab]
        neg = [c for c, lab in zip(covers, db.labels) if not lab]
        ctx.pos_support = builder.sum_var(pos)
        ctx.neg_support = builder.sum_var(neg)
    if task.kind == "dfis":
        # pos - neg > threshold, one clause per negative-support threshold
        ps, ns = ctx.pos_support, ctx.neg_support
        for v in range(ns.lo, ns.hi + 1):
            builder.add([-ns.ge(v), ps.ge(v + task.threshold + 1)])

    if task.values is not None and task.min_value is not None:
        bits = _weighted_bits(x, task.values)
        if task.min_value > len(bits):
            builder.add([])
        elif task.min_value > 0:
            builder.add([builder.at_least_lits(bits, task.min_value)[task.min_value - 1]])
    if task.costs is not None and task.max_cost is not None:
        builder.at_most(_weighted_bits(x, task.costs), task.max_cost)

    if task.exclude_empty:
        builder.add(list(x.values()))
        if task.kind == "gfis" and satisfies_local(db, task, frozenset()):
            # the empty itemset is a dominating subset of everything
            builder.add([-lit for lit in support.eq_lits(n)])
    return ctx


def level_schedule(db: TransactionDb, task: MiningTask) -> list[int]:
    """Itemset cardinalities in the order they are searched."""
    first = 1 if task.exclude_empty else 0
    levels = list(range(first, db.n_items + 1))
    return levels if task.ascending else levels[::-1]


def extract_solution(ctx: ModelContext) -> PatternSolution:
    """Read the current model of ``ctx.solver`` as a pattern."""
    s = ctx.solver
    itemset = frozenset(i for i, lit in ctx.item_lits.items() if s.value(lit))
    support = ctx.support.value(s)
    if not ctx.db.labelled:
        return PatternSolution(itemset, support)
    cov = [t for t, c in enumerate(ctx.cover_lits) if s.value(c)]
    pos = frozenset(t for t in cov if ctx.db.labels[t])
    neg = frozenset(cov) - pos
    return PatternSolution(
        itemset, support, ctx.pos_support.value(s), ctx.neg_support.value(s), pos, neg
    )


def blocking_clauses(ctx: ModelContext, sol: PatternSolution) -> list[list[int]]:
    """Clauses forbidding every future assignment that ``sol`` dominates."""
    x = ctx.item_lits
    items = ctx.db.items
    kind = ctx.task.kind
    inside = [x[i] for i in items if i in sol.itemset]
    outside = [x[i] for i in items if i not in sol.itemset]
    other_support = [-lit for lit in ctx.support.eq_lits(sol.support)]

    if kind in ("cfis", "dfis"):
        return [outside + other_support]
    if kind == "gfis":
        return [[-lit for lit in inside] + other_support]
    if kind == "mrim":
        return [[-lit for lit in inside]]

    # rsd: forbid X with pos(X) <= pos(S) and neg(X) >= neg(S), unless both
    # covers are equal and X is not a subset of S
    b = ctx.builder
    labels = ctx.db.labels
    covers = ctx.cover_lits
    clause = []
    for t, c in enumerate(covers):
        if labels[t] and t not in sol.pos_cover:
            clause.append(c)
        elif not labels[t] and t in sol.neg_cover:
            clause.append(-c)
    extra = []
    if outside:
        escape = b.new_var()
        for t, c in enumerate(covers):
            if labels[t] and t in sol.pos_cover:
                extra.append([-escape, c])
            elif not labels[t] and t not in sol.neg_cover:
                extra.append([-escape, -c])
        extra.append([-escape] + outside)
        clause.append(escape)
    return [clause] + extra


def satisfies_local(db: TransactionDb, task: MiningTask, itemset) -> bool:
    """Whether ``itemset`` meets the single-solution constraints of ``task``."""
    itemset = frozenset(itemset)
    sup = db.support(itemset)
    if task.kind == "mrim":
        if sup >= task.min_support:
            return False
    elif sup < task.min_support:
        return False
    if task.kind == "dfis":
        pos, neg = db.split_cover(itemset)
        if len(pos) - len(neg) <= task.threshold:
            return False
    if task.values is not None and task.min_value is not None:
        if sum(task.values.get(i, 0) for i in itemset) < task.min_value:
            return False
    if task.costs is not None and task.max_cost is not None:
        if sum(task.costs.get(i, 0) for i in itemset) > task.max_cost:
            return False
    return True


def dominates(kind: str, y: PatternSolution, x: PatternSolution) -> bool:
    """True when solution ``y`` dominates solution ``x``."""
    if kind in ("cfis", "dfis"):
        return y.itemset > x.itemset and y.support == x.support
    if kind == "gfis":
        return y.itemset < x.itemset and y.support == x.support
    if kind == "mrim":
        return y.itemset < x.itemset
    if not (x.pos_cover <= y.pos_cover and y.neg_cover <= x.neg_cover):
        return False
    same = x.pos_cover == y.pos_cover and x.neg_cover == y.neg_cover
    return not same or y.itemset > x.itemset


def check_solution(
    db: TransactionDb,
    task: MiningTask,
    sol: PatternSolution,
    all_solutions: Sequence[PatternSolution],
) -> bool:
    """Recompute ``sol`` from the database and check it is not dominated.

    Dominance is tested against every other solution in ``all_solutions``
    (and, for generators, the implicit empty itemset).
    """
    fresh = PatternSolution.of(db, sol.itemset)
    if fresh.support != sol.support:
        return False
    if sol.pos_support is not None and (fresh.pos_support, fresh.neg_support) != (
        sol.pos_support,
        sol.neg_support,
    ):
        return False
    if not satisfies_local(db, task, sol.itemset):
        return False
    rivals = [PatternSolution.of(db, o.itemset) for o in all_solutions if o.itemset != sol.itemset]
    if task.kind == "gfis" and task.exclude_empty and satisfies_local(db, task, ()):
        rivals.append(PatternSolution.of(db, ()))
    return not any(dominates(task.kind, y, fresh) for y in rivals)


def filter_dominated(
    db: TransactionDb, task: MiningTask, solutions: Sequence[PatternSolution]
) -> tuple[list[PatternSolution], list[PatternSolution]]:
    """Split ``solutions`` into (non-dominated, dominated) after recomputing each.

    Raises ValueError if a solution's reported counts disagree with the
    database or it violates the local constraints.
    """
    fresh = []
    for sol in solutions:
        rec = PatternSolution.of(db, sol.itemset)
        if rec.support != sol.support or (
            sol.pos_support is not None
            and (rec.pos_support, rec.neg_support) != (sol.pos_support, sol.neg_support)
        ):
            raise ValueError(f"reported counts of {sorted(sol.itemset)} do not match the database")
        if not satisfies_local(db, task, sol.itemset):
            raise ValueError(f"{sorted(sol.itemset)} violates the local constraints")
        fresh.append(rec)
    rivals = list(fresh)
    if task.kind == "gfis" and task.exclude_empty and satisfies_local(db, task, ()):
        rivals.append(PatternSolution.of(db, ()))
    kept, dropped = [], []
    for sol, rec in zip(solutions, fresh):
        beaten = any(y.itemset != rec.itemset and dominates(task.kind, y, rec) for y in rivals)
        (dropped if beaten else kept).append(sol)
    return kept, dropped
