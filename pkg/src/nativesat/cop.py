"""Optimisation as a sequence of satisfiability calls.

Three strategies over an order-encoded objective ``X in lo..hi``, stated for
maximisation (minimisation is the mirror image):

* ``linear``  -- assume ``X >= b`` for increasing ``b`` until UNSAT;
* ``unsat``   -- assume ``X >= b`` for decreasing ``b`` until SAT;
* ``bisect``  -- halve the open interval; SAT halves become permanent.

Every bound is a single literal of the order encoding, passed as an
assumption, so one solver instance serves the whole sequence and keeps its
learned clauses. :func:`compare_modes` reruns the same schedule with a fresh
solver per call for comparison.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .encode import Builder, IntVar
from .solver import Solver

STRATEGIES = ("linear", "unsat", "bisect")
SENSES = ("max", "min")


@dataclass
class CallRecord:
    call: int
    bound: int
    verdict: bool
    decisions: int
    conflicts: int
    millis: float


@dataclass
class CopResult:
    optimum: Optional[int]
    sense: str
    strategy: str
    calls: list[CallRecord] = field(default_factory=list)
    model: Optional[list[bool]] = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return self.optimum is not None

    def value(self, lit: int) -> bool:
        """Value of ``lit`` in the model that certifies the optimum."""
        if self.model is None:
            raise ValueError("no model: problem infeasible")
        return self.model[abs(lit)] == (lit > 0)

    def int_value(self, x: IntVar) -> int:
        return x.value_in(self.model)

    def calls_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["call", "bound", "verdict", "decisions", "conflicts", "millis"])
        for r in self.calls:
            w.writerow(
                [r.call, r.bound, "SAT" if r.verdict else "UNSAT", r.decisions, r.conflicts, f"{r.millis:.3f}"]
            )
        return buf.getvalue()


def _normalise(sense: str, strategy: str) -> tuple[str, str]:
    sense = {"maximise": "max", "maximize": "max", "minimise": "min", "minimize": "min"}.get(
        sense, sense
    )
    if sense not in SENSES:
        raise ValueError(f"unknown sense {sense!r}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    return sense, strategy


def _bound_lit(x: IntVar, sense: str, b: int) -> int:
    return x.ge(b) if sense == "max" else x.le(b)


def _drive(lo, hi, sense, strategy, jump, probe, promote):
    """Run one strategy; ``probe(b)`` returns the objective value or None.

    Works on the maximisation view: for minimisation the caller's objective
    is negated, so ``b`` and the returned values are negated here and back
    in the probe.
    """
    if sense == "min":
        lo, hi = -hi, -lo
        inner_probe, inner_promote = probe, promote

        def probe(b):
            v = inner_probe(-b)
            return None if v is None else -v

        def promote(b):
            inner_promote(-b)

    best = None
    if strategy == "linear":
        b = lo
        while b <= hi:
            v = probe(b)
            if v is None:
                break
            best = v
            b = v + 1 if jump else b + 1
    elif strategy == "unsat":
        for b in range(hi, lo - 1, -1):
            v = probe(b)
            if v is not None:
                best = v
                break
    else:
        v = probe(lo)
        if v is not None:
            best = v
            if jump:
                lo = v
            while lo < hi:
                mid = (lo + hi + 1) // 2
                v = probe(mid)
                if v is None:
                    hi = mid - 1
                else:
                    best = v
                    lo = v if jump else mid
                    promote(lo)
    if best is None:
        return None
    return -best if sense == "min" else best


def optimize(
    solver: Solver,
    objective: IntVar,
    sense: str = "max",
    strategy: str = "bisect",
    jump: bool = True,
    time_limit: Optional[float] = None,
) -> CopResult:
    """Optimise ``objective`` on a live solver.

    ``jump`` lets a SAT answer move the bound straight past the model's
    objective value instead of stepping by one. Past ``time_limit`` seconds
    :class:`~nativesat.solver.SolverTimeout` is raised.
    """
    sense, strategy = _normalise(sense, strategy)
    if time_limit is not None:
        solver.stop_at = time.monotonic() + time_limit
    result = CopResult(None, sense, strategy)

    def probe(b):
        lit = _bound_lit(objective, sense, b)
        t0 = time.perf_counter()
        sat = solver.solve([lit])
        ms = (time.perf_counter() - t0) * 1000
        st = solver.statistics()
        result.calls.append(
            CallRecord(len(result.calls) + 1, b, sat, st.call_decisions, st.call_conflicts, ms)
        )
        if not sat:
            return None
        result.model = [False] + [lit > 0 for lit in solver.model()]
        return objective.value(solver)

    def promote(b):
        solver.add_clause([_bound_lit(objective, sense, b)])

    result.optimum = _drive(objective.lo, objective.hi, sense, strategy, jump, probe, promote)
    if result.optimum is None:
        result.model = None
    return result


def optimize_fresh(
    build: Callable[[Builder], IntVar],
    sense: str = "max",
    strategy: str = "bisect",
    jump: bool = True,
    seed: Optional[int] = None,
    time_limit: Optional[float] = None,
) -> CopResult:
    """Same schedule as :func:`optimize`, rebuilding the model for every call.

    ``build`` must post the model into the given builder and return the
    objective; it must allocate variables deterministically.
    """
    sense, strategy = _normalise(sense, strategy)
    result = CopResult(None, sense, strategy)
    proven: list[int] = []
    stop_at = time.monotonic() + time_limit if time_limit is not None else None
    x0 = build(Builder(Solver()))

    def probe(b):
        t0 = time.perf_counter()
        solver = Solver(seed=seed, stop_at=stop_at)
        x = build(Builder(solver))
        for p in proven:
            solver.add_clause([_bound_lit(x, sense, p)])
        sat = solver.solve([_bound_lit(x, sense, b)])
        ms = (time.perf_counter() - t0) * 1000
        st = solver.statistics()
        result.calls.append(
            CallRecord(len(result.calls) + 1, b, sat, st.call_decisions, st.call_conflicts, ms)
        )
        if not sat:
            return None
        result.model = [False] + [lit > 0 for lit in solver.model()]
        return x.value(solver)

    result.optimum = _drive(x0.lo, x0.hi, sense, strategy, jump, probe, proven.append)
    if result.optimum is None:
        result.model = None
    return result


@dataclass
class ModeComparison:
    native: CopResult
    fresh: CopResult

    def summary(self) -> dict:
        return {
            mode: {
                "optimum": r.optimum,
                "calls": len(r.calls),
                "decisions": sum(c.decisions for c in r.calls),
                "conflicts": sum(c.conflicts for c in r.calls),
                "millis": sum(c.millis for c in r.calls),
            }
            for mode, r in (("native", self.native), ("fresh", self.fresh))
        }


def compare_modes(
    build: Callable[[Builder], IntVar],
    sense: str = "max",
    strategy: str = "bisect",
    jump: bool = True,
    seed: Optional[int] = None,
) -> ModeComparison:
    """Run one strategy natively and with a fresh solver per call."""
    solver = Solver(seed=seed)
    x = build(Builder(solver))
    native = optimize(solver, x, sense, strategy, jump)
    fresh = optimize_fresh(build, sense, strategy, jump, seed)
    if native.optimum != fresh.optimum:
        raise RuntimeError(f"modes disagree: native {native.optimum} vs fresh {fresh.optimum}")
    return ModeComparison(native, fresh)
