"""Level-by-level dominance mining on an incremental solver.

For every level (an itemset cardinality) the driver restricts the model to
that level, enumerates all solutions, then lifts the restriction and posts
the dominance-blocking clauses of the level's solutions.

``native`` keeps one solver for the whole run: the level restriction is a
clause group switched on by assuming its selector and retired afterwards,
so learned clauses survive from level to level. ``baseline`` builds a fresh
solver for every level and re-encodes all blocking clauses found so far.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Optional

from .encode import Builder, ClauseGroup
from .mining import (
    MiningTask,
    ModelContext,
    PatternSolution,
    TransactionDb,
    blocking_clauses,
    build_base_model,
    extract_solution,
    filter_dominated,
    level_schedule,
)
from .solver import Solver

MODES = ("native", "baseline")
LEVEL_COLUMNS = ["level", "solutions", "decisions", "conflicts", "learned", "total_clauses"]


@dataclass
class LevelRun:
    level: int
    solutions: list[PatternSolution] = field(default_factory=list)
    decisions: int = 0
    conflicts: int = 0
    learned: int = 0
    total_clauses: int = 0
    millis: float = 0.0

    def row(self) -> dict:
        return {
            "level": self.level,
            "solutions": len(self.solutions),
            "decisions": self.decisions,
            "conflicts": self.conflicts,
            "learned": self.learned,
            "total_clauses": self.total_clauses,
        }


@dataclass
class CdpiResult:
    solutions: list[PatternSolution]
    levels: list[LevelRun]
    mode: str
    # solutions dropped by the final non-dominance pass
    filtered: list[PatternSolution] = field(default_factory=list)

    @property
    def decisions(self) -> int:
        return sum(r.decisions for r in self.levels)

    @property
    def conflicts(self) -> int:
        return sum(r.conflicts for r in self.levels)

    def itemsets(self) -> set[frozenset]:
        return {s.itemset for s in self.solutions}


def level_restriction(ctx: ModelContext, level: int) -> ClauseGroup:
    """Removable ``|itemset| == level`` constraint."""
    group = ctx.builder.new_group()
    ctx.builder.cardinality_eq(ctx.projection, level, group.selector)
    return group


def run_cdpi(
    db: TransactionDb,
    task: MiningTask,
    mode: str = "native",
    guard_blocking: bool = True,
    seed: Optional[int] = None,
    time_limit: Optional[float] = None,
) -> CdpiResult:
    """Mine all non-dominated patterns of ``task`` in ``db``.

    ``guard_blocking`` (native only) guards per-solution blocking clauses by
    the level selector so they go inert once the level is retired; switch it
    off to keep them as plain permanent clauses.

    Raises :class:`~nativesat.solver.SolverTimeout` past ``time_limit`` seconds.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    stop_at = time.monotonic() + time_limit if time_limit is not None else None
    levels = level_schedule(db, task)
    runs: list[LevelRun] = []
    found: list[PatternSolution] = []

    if mode == "native":
        solver = Solver(seed=seed, stop_at=stop_at)
        ctx = build_base_model(db, task, Builder(solver))
        for level in levels:
            t0 = time.perf_counter()
            before = solver.statistics()
            run = LevelRun(level)
            group = level_restriction(ctx, level)
            solver.solve_all(
                ctx.projection,
                lambda _cube: run.solutions.append(extract_solution(ctx)),
                assumptions=[group.selector],
                guard=guard_blocking,
            )
            ctx.builder.retire_group(group)
            for sol in run.solutions:
                for clause in blocking_clauses(ctx, sol):
                    ctx.builder.add(clause)
            after = solver.statistics()
            run.decisions = after.decisions - before.decisions
            run.conflicts = after.conflicts - before.conflicts
            run.learned = after.learned_count
            run.total_clauses = after.total_clauses
            run.millis = (time.perf_counter() - t0) * 1000
            runs.append(run)
            found.extend(run.solutions)
    else:
        for level in levels:
            t0 = time.perf_counter()
            solver = Solver(seed=seed, stop_at=stop_at)
            ctx = build_base_model(db, task, Builder(solver))
            for sol in found:
                for clause in blocking_clauses(ctx, sol):
                    ctx.builder.add(clause)
            ctx.builder.cardinality_eq(ctx.projection, level)
            run = LevelRun(level)
            solver.solve_all(
                ctx.projection,
                lambda _cube: run.solutions.append(extract_solution(ctx)),
                guard=False,
            )
            st = solver.statistics()
            run.decisions = st.decisions
            run.conflicts = st.conflicts
            run.learned = st.learned_count
            run.total_clauses = st.total_clauses
            run.millis = (time.perf_counter() - t0) * 1000
            runs.append(run)
            found.extend(run.solutions)

    kept, dropped = filter_dominated(db, task, found)
    if dropped and task.kind != "rsd":
        # with cardinality levels in the right order nothing can be dominated here
        raise RuntimeError(f"{task.kind}: post-processing removed {len(dropped)} solutions")
    return CdpiResult(kept, runs, mode, dropped)


def report_levels(runs: list[LevelRun], fmt: str = "csv") -> str:
    """Per-level statistics as CSV (default) or a JSON array."""
    rows = [r.row() for r in runs]
    if fmt == "json":
        return json.dumps(rows)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=LEVEL_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
