"""Incremental CDCL SAT solver with an ipasir-style interface.

Literals are DIMACS integers: variable ``v`` is the positive literal ``v`` and
its negation is ``-v``. Internally a literal is stored as ``2 * v + sign`` so
that negation is ``code ^ 1`` and per-literal tables are plain lists.

A single :class:`Solver` is meant to stay alive across many calls. Clauses
added between calls are permanent, assumptions last for exactly one call and
learned clauses are kept until the in-call database reduction drops them.
"""

from __future__ import annotations

import heapq
import random
import time
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

SAT = True
UNSAT = False


class SolverTimeout(Exception):
    """Raised when a solve call runs past the solver's deadline."""


class SolverStateError(RuntimeError):
    """Raised when a query does not match the result of the last call."""


@dataclass
class SolverStats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    solves: int = 0
    # counters of the most recent solve call only
    call_conflicts: int = 0
    call_decisions: int = 0
    call_propagations: int = 0
    learned_count: int = 0
    permanent_clauses: int = 0

    @property
    def total_clauses(self) -> int:
        return self.permanent_clauses + self.learned_count


class _Clause:
    __slots__ = ("lits", "learned", "lbd", "activity", "deleted")

    def __init__(self, lits, learned=False, lbd=0):
        self.lits = lits
        self.learned = learned
        self.lbd = lbd
        self.activity = 0.0
        self.deleted = False


def luby(y: float, i: int) -> float:
    """Return the ``i``-th element (0-based) of the Luby sequence scaled by ``y``."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return y**seq


def _code(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


def _lit(code: int) -> int:
    return -(code >> 1) if code & 1 else code >> 1


class Solver:
    """A CDCL solver kept alive across calls.

    Two-watched-literal propagation, first-UIP learning with local clause
    minimisation, VSIDS-style branching with phase saving, Luby restarts and
    LBD-based reduction of the learned clause database.

    Parameters
    ----------
    seed:
        Seeds the tiny random perturbation of initial variable activities.
        ``None`` keeps branching fully deterministic in allocation order.
    restart_base:
        Number of conflicts in the first Luby restart interval.
    max_learned:
        Initial cap on learned clauses before a reduction; grows by 10%
        after each reduction. ``None`` picks ``max(2000, clauses / 3)``.
    time_limit:
        Seconds of wall time allowed per solve call; ``None`` for no limit.
    stop_at:
        Absolute ``time.monotonic()`` instant after which any call aborts.
    """

    def __init__(
        self,
        seed: Optional[int] = None,
        restart_base: int = 100,
        max_learned: Optional[int] = None,
        time_limit: Optional[float] = None,
        stop_at: Optional[float] = None,
        var_decay: float = 0.95,
        clause_decay: float = 0.999,
    ):
        self.nvars = 0
        self.restart_base = restart_base
        self.max_learned = max_learned
        self.time_limit = time_limit
        self.stop_at = stop_at
        self.deadline: Optional[float] = None
        self._rng = random.Random(seed) if seed is not None else None
        self._var_decay = var_decay
        self._clause_decay = clause_decay

        self._lval = [0, 0]
        self._watches: list[list[_Clause]] = [[], []]
        self._level = [0]
        self._reason: list[Optional[_Clause]] = [None]
        self._activity = [0.0]
        self._polarity = [1]
        self._seen = [False]
        # variables occurring in no attached clause are never branched on
        self._decision = [False]
        self._heap: list[tuple[float, int]] = []
        self._var_inc = 1.0
        self._cla_inc = 1.0

        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0

        self._clauses: list[tuple[int, ...]] = []
        self._learned: list[_Clause] = []
        self._ok = True
        self._simplified_at = 0

        self._assumptions: list[int] = []
        self._model: Optional[list[int]] = None
        self._status: Optional[bool] = None
        self._failed: set[int] = set()
        self._stats = SolverStats()

    # -- construction -------------------------------------------------

    def new_var(self) -> int:
        """Allocate a fresh variable and return its positive literal."""
        self.nvars += 1
        v = self.nvars
        self._lval += [0, 0]
        self._watches += [[], []]
        self._level.append(0)
        self._reason.append(None)
        act = self._rng.random() * 1e-5 if self._rng is not None else 0.0
        self._activity.append(act)
        self._polarity.append(1)
        self._seen.append(False)
        self._decision.append(True)
        heapq.heappush(self._heap, (-act, v))
        return v

    def new_vars(self, n: int) -> list[int]:
        return [self.new_var() for _ in range(n)]

    def _check_lit(self, lit: int) -> None:
        if not isinstance(lit, int) or lit == 0 or abs(lit) > self.nvars:
            raise ValueError(f"literal {lit!r} refers to an unallocated variable")

    def add_clause(self, lits: Iterable[int]) -> None:
        """Add a permanent clause.

        Duplicate literals are merged and tautologies are dropped. An empty
        clause (or one falsified at the root) makes the formula permanently
        unsatisfiable; subsequent calls return UNSAT.
        """
        clause: list[int] = []
        seen: set[int] = set()
        for lit in lits:
            self._check_lit(lit)
            if -lit in seen:
                return
            if lit not in seen:
                seen.add(lit)
                clause.append(lit)
        self._clauses.append(tuple(clause))
        if not self._ok:
            return
        self._cancel_until(0)
        for lit in clause:
            v = abs(lit)
            if not self._decision[v]:
                self._decision[v] = True
                heapq.heappush(self._heap, (-self._activity[v], v))

        lval = self._lval
        codes = []
        for lit in clause:
            c = _code(lit)
            val = lval[c]
            if val == 1:
                return
            if val == 0:
                codes.append(c)
        if not codes:
            self._ok = False
        elif len(codes) == 1:
            self._enqueue(codes[0], None)
            if self._propagate() is not None:
                self._ok = False
        else:
            self._attach(_Clause(codes))

    def add_clauses(self, clauses: Iterable[Iterable[int]]) -> None:
        for clause in clauses:
            self.add_clause(clause)

    def assume(self, lit: int) -> None:
        """Enforce ``lit`` during the next solve call only."""
        self._check_lit(lit)
        if lit not in self._assumptions:
            self._assumptions.append(lit)

    @property
    def clauses(self) -> list[tuple[int, ...]]:
        """Permanent clauses as added (after merging duplicates)."""
        return list(self._clauses)

    @property
    def learned_clauses(self) -> list[tuple[int, ...]]:
        return [tuple(_lit(c) for c in cl.lits) for cl in self._learned]

    @property
    def okay(self) -> bool:
        """False once the permanent clauses are known to be unsatisfiable."""
        return self._ok

    # -- solving ------------------------------------------------------

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        """Solve under the queued (and given) assumptions.

        Returns ``SAT`` (True) or ``UNSAT`` (False). The assumption queue is
        cleared whatever the outcome.
        """
        for lit in assumptions:
            self.assume(lit)
        assumps = [_code(lit) for lit in self._assumptions]
        self._assumptions = []
        self._model = None
        self._failed = set()
        st = self._stats
        st.solves += 1
        st.call_conflicts = st.call_decisions = st.call_propagations = 0
        limits = [] if self.stop_at is None else [self.stop_at]
        if self.time_limit is not None:
            limits.append(time.monotonic() + self.time_limit)
        self.deadline = min(limits) if limits else None
        if self.deadline is not None and time.monotonic() > self.deadline:
            self._status = None
            raise SolverTimeout()

        if not self._ok:
            self._status = UNSAT
            return UNSAT
        self._simplify()
        if self.max_learned is None:
            self._max_learned = max(2000.0, len(self._clauses) / 3)
        else:
            self._max_learned = float(self.max_learned)

        status = None
        restarts = 0
        try:
            while status is None:
                budget = luby(2, restarts) * self.restart_base
                status = self._search(int(budget), assumps)
                restarts += 1
        finally:
            if status is None:
                self._cancel_until(0)
        if status is SAT:
            self._model = self._lval[::2][1:]
        self._cancel_until(0)
        self._status = status
        self._stats.learned_count = len(self._learned)
        return status

    def value(self, lit: int) -> bool:
        """Value of ``lit`` in the model of the last (satisfiable) call."""
        if self._status is not SAT or self._model is None:
            raise SolverStateError("value() requires the last solve to be SAT")
        v = abs(lit)
        if v > len(self._model) or v == 0:
            raise ValueError(f"literal {lit} was not part of the last model")
        val = self._model[v - 1] == 1
        return val if lit > 0 else not val

    def model(self) -> list[int]:
        """The last model as a list of signed literals, one per variable."""
        if self._status is not SAT or self._model is None:
            raise SolverStateError("model() requires the last solve to be SAT")
        return [v if x == 1 else -v for v, x in enumerate(self._model, 1)]

    def failed_assumptions(self) -> set[int]:
        """Assumptions sufficient for the last UNSAT answer."""
        if self._status is not UNSAT:
            raise SolverStateError("failed_assumptions() requires the last solve to be UNSAT")
        return set(self._failed)

    def solve_all(
        self,
        projection: Iterable[int],
        on_solution: Optional[Callable[[tuple[int, ...]], object]] = None,
        assumptions: Sequence[int] = (),
        guard: bool = True,
        limit: Optional[int] = None,
    ) -> int:
        """Enumerate assignments to ``projection`` extendable to a model.

        Each solution is blocked by a permanent clause over the projected
        variables. With ``guard`` the blocking clause also carries the
        negation of every active assumption, so it goes inert once those
        assumptions are no longer made (or are fixed false).

        ``on_solution`` receives the projected assignment as a tuple of signed
        literals in projection order. Returns the number of solutions.
        """
        proj = list(dict.fromkeys(abs(v) for v in projection))
        for v in proj:
            self._check_lit(v)
        assumps = list(dict.fromkeys(list(self._assumptions) + list(assumptions)))
        self._assumptions = []
        count = 0
        while limit is None or count < limit:
            if self.solve(assumps) is UNSAT:
                break
            cube = tuple(v if self.value(v) else -v for v in proj)
            count += 1
            if on_solution is not None:
                on_solution(cube)
            if not proj:
                # the single empty assignment cannot be blocked by a clause
                break
            block = [-lit for lit in cube]
            if guard:
                block += [-a for a in assumps]
            self.add_clause(block)
        return count

    def statistics(self) -> SolverStats:
        self._stats.learned_count = len(self._learned)
        self._stats.permanent_clauses = len(self._clauses)
        return replace(self._stats)

    # -- DIMACS -------------------------------------------------------

    def to_dimacs(self) -> str:
        from .dimacs import write_dimacs

        return write_dimacs(self.nvars, self._clauses)

    # -- internals ----------------------------------------------------

    def _attach(self, clause: _Clause) -> None:
        lits = clause.lits
        self._watches[lits[0]].append(clause)
        self._watches[lits[1]].append(clause)

    def _enqueue(self, code: int, reason: Optional[_Clause]) -> None:
        self._lval[code] = 1
        self._lval[code ^ 1] = -1
        v = code >> 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(code)

    def _cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        trail = self._trail
        lval = self._lval
        pol = self._polarity
        act = self._activity
        heap = self._heap
        start = self._trail_lim[level]
        for i in range(len(trail) - 1, start - 1, -1):
            code = trail[i]
            v = code >> 1
            lval[code] = 0
            lval[code ^ 1] = 0
            self._reason[v] = None
            pol[v] = code & 1
            heapq.heappush(heap, (-act[v], v))
        del trail[start:]
        del self._trail_lim[level:]
        self._qhead = len(trail)
        if len(heap) > 8 * self.nvars + 64:
            self._heap = [(-act[v], v) for v in range(1, self.nvars + 1) if lval[2 * v] == 0]
            heapq.heapify(self._heap)

    def _propagate(self) -> Optional[_Clause]:
        lval = self._lval
        watches = self._watches
        trail = self._trail
        level = self._level
        reason = self._reason
        dl = len(self._trail_lim)
        conflict = None
        qhead = self._qhead
        props = 0
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            props += 1
            ws = watches[false_lit]
            if not ws:
                continue
            kept = []
            n = len(ws)
            i = 0
            while i < n:
                c = ws[i]
                i += 1
                lits = c.lits
                if lits[0] == false_lit:
                    lits[0] = lits[1]
                    lits[1] = false_lit
                first = lits[0]
                if lval[first] == 1:
                    kept.append(c)
                    continue
                for k in range(2, len(lits)):
                    lk = lits[k]
                    if lval[lk] != -1:
                        lits[1] = lk
                        lits[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    kept.append(c)
                    if lval[first] == -1:
                        conflict = c
                        kept.extend(ws[i:])
                        break
                    lval[first] = 1
                    lval[first ^ 1] = -1
                    v = first >> 1
                    level[v] = dl
                    reason[v] = c
                    trail.append(first)
            watches[false_lit] = kept
            if conflict is not None:
                qhead = len(trail)
                break
        self._qhead = qhead
        self._stats.propagations += props
        self._stats.call_propagations += props
        return conflict

    def _bump_var(self, v: int) -> None:
        act = self._activity
        act[v] += self._var_inc
        if act[v] > 1e100:
            for i in range(1, self.nvars + 1):
                act[i] *= 1e-100
            self._var_inc *= 1e-100
            self._heap = [(-act[i], i) for i in range(1, self.nvars + 1) if self._lval[2 * i] == 0]
            heapq.heapify(self._heap)
        elif self._lval[2 * v] == 0:
            heapq.heappush(self._heap, (-act[v], v))

    def _bump_clause(self, c: _Clause) -> None:
        c.activity += self._cla_inc
        if c.activity > 1e20:
            for cl in self._learned:
                cl.activity *= 1e-20
            self._cla_inc *= 1e-20

    def _analyze(self, confl: _Clause) -> tuple[list[int], int, int]:
        seen = self._seen
        level = self._level
        reason = self._reason
        trail = self._trail
        cur = len(self._trail_lim)
        learnt = [0]
        to_clear = []
        path = 0
        p = -1
        idx = len(trail) - 1
        while True:
            if confl.learned:
                self._bump_clause(confl)
            lits = confl.lits
            for j in range(0 if p == -1 else 1, len(lits)):
                q = lits[j]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    self._bump_var(v)
                    seen[v] = True
                    to_clear.append(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1

        # local minimisation: drop literals implied by other learnt literals
        out = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                out.append(q)
                continue
            for x in r.lits[1:]:
                xv = x >> 1
                if not seen[xv] and level[xv] > 0:
                    out.append(q)
                    break
        for v in to_clear:
            seen[v] = False

        bt = 0
        if len(out) > 1:
            best = 1
            for j in range(2, len(out)):
                if level[out[j] >> 1] > level[out[best] >> 1]:
                    best = j
            out[1], out[best] = out[best], out[1]
            bt = level[out[1] >> 1]
        lbd = len({level[q >> 1] for q in out})
        return out, bt, lbd

    def _analyze_final(self, p: int) -> set[int]:
        """Assumption literals responsible for the assumption ``p`` being false."""
        failed = {_lit(p)}
        if not self._trail_lim:
            return failed
        seen = self._seen
        reason = self._reason
        level = self._level
        seen[p >> 1] = True
        trail = self._trail
        for i in range(len(trail) - 1, self._trail_lim[0] - 1, -1):
            x = trail[i]
            v = x >> 1
            if seen[v]:
                r = reason[v]
                if r is None:
                    failed.add(_lit(x))
                else:
                    for q in r.lits[1:]:
                        if level[q >> 1] > 0:
                            seen[q >> 1] = True
                seen[v] = False
        seen[p >> 1] = False
        return failed

    def _pick_branch(self) -> int:
        heap = self._heap
        lval = self._lval
        decision = self._decision
        while heap:
            _, v = heapq.heappop(heap)
            if lval[2 * v] == 0 and decision[v]:
                return 2 * v + self._polarity[v]
        return -1

    def _simplify(self) -> None:
        """Detach clauses satisfied at the root and stop branching on
        variables that no longer occur in any attached clause.

        Such variables take the value false in reported models; adding a
        clause that mentions one makes it a decision variable again.
        """
        if len(self._trail) == self._simplified_at:
            return
        lval = self._lval
        level = self._level
        for c in self._learned:
            if any(lval[x] == 1 and level[x >> 1] == 0 for x in c.lits):
                c.deleted = True
        self._learned = [c for c in self._learned if not c.deleted]
        live = [False] * (self.nvars + 1)
        for code in range(2, len(self._watches)):
            ws = self._watches[code]
            if ws:
                kept = []
                for c in ws:
                    if c.deleted or (
                        not c.learned and any(lval[x] == 1 and level[x >> 1] == 0 for x in c.lits)
                    ):
                        continue
                    kept.append(c)
                    for x in c.lits:
                        live[x >> 1] = True
                self._watches[code] = kept
        decision = self._decision
        for v in range(1, self.nvars + 1):
            if decision[v] and not live[v] and lval[2 * v] == 0:
                decision[v] = False
        self._simplified_at = len(self._trail)

    def _reduce_db(self) -> None:
        lval = self._lval
        reason = self._reason

        def locked(c):
            first = c.lits[0]
            return lval[first] == 1 and reason[first >> 1] is c

        def satisfied(c):
            return any(lval[x] == 1 and self._level[x >> 1] == 0 for x in c.lits)

        ranked = sorted(
            self._learned, key=lambda c: (not satisfied(c), -c.lbd, c.activity)
        )
        target = len(ranked) // 2
        removed = 0
        for c in ranked:
            if removed >= target:
                break
            if locked(c) or (c.lbd <= 2 and not satisfied(c)):
                continue
            c.deleted = True
            removed += 1
        if not removed:
            return
        self._learned = [c for c in self._learned if not c.deleted]
        for code in range(2, len(self._watches)):
            ws = self._watches[code]
            if ws:
                self._watches[code] = [c for c in ws if not c.deleted]

    def _search(self, nof_conflicts: int, assumps: list[int]) -> Optional[bool]:
        st = self._stats
        lval = self._lval
        trail_lim = self._trail_lim
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                st.conflicts += 1
                st.call_conflicts += 1
                conflicts += 1
                if not trail_lim:
                    self._ok = False
                    return UNSAT
                learnt, bt, lbd = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    c = _Clause(learnt, learned=True, lbd=lbd)
                    self._learned.append(c)
                    self._attach(c)
                    self._bump_clause(c)
                    self._enqueue(learnt[0], c)
                self._var_inc /= self._var_decay
                self._cla_inc /= self._clause_decay
                if self.deadline is not None and conflicts % 64 == 0:
                    if time.monotonic() > self.deadline:
                        raise SolverTimeout()
                continue

            if conflicts >= nof_conflicts:
                self._cancel_until(0)
                return None
            if len(self._learned) - len(self._trail) >= self._max_learned:
                self._reduce_db()
                self._max_learned *= 1.1

            nxt = -1
            while len(trail_lim) < len(assumps):
                p = assumps[len(trail_lim)]
                if lval[p] == 1:
                    trail_lim.append(len(self._trail))
                elif lval[p] == -1:
                    self._failed = self._analyze_final(p)
                    return UNSAT
                else:
                    nxt = p
                    break
            if nxt == -1:
                nxt = self._pick_branch()
                if nxt == -1:
                    return SAT
                st.decisions += 1
                st.call_decisions += 1
                if self.deadline is not None and st.call_decisions % 256 == 0:
                    if time.monotonic() > self.deadline:
                        raise SolverTimeout()
            trail_lim.append(len(self._trail))
            self._enqueue(nxt, None)
