"""Model construction on top of a live :class:`~nativesat.solver.Solver`.

Integers use the order encoding: ``X in lo..hi`` gets one literal per
threshold ``X >= v`` for ``v`` in ``lo+1..hi`` linked by a ladder of binary
clauses. Counting goes through a totalizer whose outputs are unary
"at least v" literals, channelled in both directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .solver import Solver


@dataclass
class IntVar:
    """An order-encoded integer.

    ``ge_lits[k]`` means ``X >= lo + 1 + k``. Thresholds at or below ``lo``
    are the constant true literal and thresholds above ``hi`` its negation.
    """

    lo: int
    hi: int
    ge_lits: list[int]
    true_lit: int = field(repr=False)

    def ge(self, v: int) -> int:
        if v <= self.lo:
            return self.true_lit
        if v > self.hi:
            return -self.true_lit
        return self.ge_lits[v - self.lo - 1]

    def le(self, v: int) -> int:
        return -self.ge(v + 1)

    def eq_lits(self, v: int) -> tuple[int, ...]:
        """Literals whose conjunction means ``X == v``."""
        if not self.lo <= v <= self.hi:
            raise ValueError(f"{v} outside {self.lo}..{self.hi}")
        lits = []
        if v > self.lo:
            lits.append(self.ge(v))
        if v < self.hi:
            lits.append(-self.ge(v + 1))
        return tuple(lits)

    def value(self, solver: Solver) -> int:
        """Value of the integer in the solver's last model."""
        return self.lo + sum(1 for lit in self.ge_lits if solver.value(lit))

    def value_in(self, model: Sequence[bool]) -> int:
        """Value under a saved model indexed by variable (index 0 unused)."""
        return self.lo + sum(1 for lit in self.ge_lits if model[lit] == (lit > 0))


@dataclass
class ClauseGroup:
    selector: int
    retired: bool = False
    size: int = 0


class Builder:
    """Fresh variables, integers, counters and removable clause groups."""

    def __init__(self, solver: Optional[Solver] = None):
        self.solver = solver if solver is not None else Solver()
        self._true: Optional[int] = None

    @property
    def true(self) -> int:
        """A literal fixed true at the root."""
        if self._true is None:
            self._true = self.solver.new_var()
            self.solver.add_clause([self._true])
        return self._true

    @property
    def false(self) -> int:
        return -self.true

    def new_var(self) -> int:
        return self.solver.new_var()

    def add(self, lits: Iterable[int], guard: Sequence[int] = ()) -> None:
        """Add a clause, optionally active only while every ``guard`` holds."""
        self.solver.add_clause(list(lits) + [-g for g in guard])

    # -- integers ---------------------------------------------------------

    def int_var(self, lo: int, hi: int) -> IntVar:
        if lo > hi:
            raise ValueError(f"empty domain {lo}..{hi}")
        lits = [self.new_var() for _ in range(hi - lo)]
        for a, b in zip(lits, lits[1:]):
            self.add([-b, a])
        return IntVar(lo, hi, lits, self.true)

    def eq_lits(self, x: IntVar, v: int) -> tuple[int, ...]:
        return x.eq_lits(v)

    # -- counting ---------------------------------------------------------

    def _totalizer(self, bits: Sequence[int], cap: int, guard: Sequence[int]) -> list[int]:
        """Unary counter over ``bits``: ``out[v-1]`` iff at least ``v`` bits hold.

        Only thresholds up to ``cap`` are materialised; ``out[cap-1]`` then
        means "at least cap". Both implication directions are posted.
        """
        n = len(bits)
        cap = min(cap, n)
        if cap <= 0:
            return []
        if n == 1:
            return [bits[0]]
        mid = n // 2
        left = self._totalizer(bits[:mid], cap, guard)
        right = self._totalizer(bits[mid:], cap, guard)
        width = min(cap, len(left) + len(right))
        out = [self.new_var() for _ in range(width)]
        # a_0 = b_0 = true; a_{p+1} = b_{q+1} = false
        p, q = len(left), len(right)
        for i in range(p + 1):
            for j in range(q + 1):
                s = i + j
                if s >= 1:
                    clause = [out[min(s, width) - 1]]
                    if i:
                        clause.append(-left[i - 1])
                    if j:
                        clause.append(-right[j - 1])
                    self.add(clause, guard)
                if s + 1 <= width:
                    clause = [-out[s]]
                    if i < p:
                        clause.append(left[i])
                    if j < q:
                        clause.append(right[j])
                    self.add(clause, guard)
        return out

    def at_least_lits(self, bits: Sequence[int], cap: int) -> list[int]:
        return self._totalizer(list(bits), cap, ())

    def bool_sum_eq(self, bits: Sequence[int], x: IntVar, guard: Sequence[int] = ()) -> None:
        """Channel the number of true ``bits`` into ``x``.

        Repeated literals count once per occurrence, which is how weighted
        sums are expressed.
        """
        bits = list(bits)
        n = len(bits)
        if x.hi < 0 or x.lo > n:
            raise ValueError(f"sum of {n} bits cannot lie in {x.lo}..{x.hi}")
        cap = min(n, x.hi + 1)
        out = self._totalizer(bits, cap, guard)

        def at_least(v):
            if v <= 0:
                return self.true
            if v > n:
                return self.false
            return out[v - 1]

        for v in range(x.lo + 1, x.hi + 1):
            self.add([-x.ge(v), at_least(v)], guard)
            self.add([x.ge(v), -at_least(v)], guard)
        if x.lo > 0:
            self.add([at_least(x.lo)], guard)
        if x.hi < n:
            self.add([-at_least(x.hi + 1)], guard)

    def sum_var(self, bits: Sequence[int], lo: int = 0, hi: Optional[int] = None) -> IntVar:
        """New integer equal to the count of true ``bits``, clipped to ``lo..hi``."""
        bits = list(bits)
        hi = len(bits) if hi is None else min(hi, len(bits))
        x = self.int_var(max(lo, 0), hi)
        self.bool_sum_eq(bits, x)
        return x

    def cardinality_eq(self, bits: Sequence[int], k: int, selector: Optional[int] = None) -> None:
        """Exactly ``k`` of ``bits`` are true (only while ``selector`` holds)."""
        bits = list(bits)
        if not 0 <= k <= len(bits):
            raise ValueError(f"k={k} outside 0..{len(bits)}")
        guard = () if selector is None else (selector,)
        if k == 0:
            for b in bits:
                self.add([-b], guard)
            return
        out = self._totalizer(bits, k + 1, guard)
        self.add([out[k - 1]], guard)
        if k < len(bits):
            self.add([-out[k]], guard)

    def at_most(self, bits: Sequence[int], k: int, guard: Sequence[int] = ()) -> None:
        bits = list(bits)
        if k >= len(bits):
            return
        if k < 0:
            self.add([], guard)
            return
        if k == 0:
            for b in bits:
                self.add([-b], guard)
            return
        out = self._totalizer(bits, k + 1, guard)
        self.add([-out[k]], guard)

    def exactly_one(self, bits: Sequence[int]) -> None:
        bits = list(bits)
        self.add(bits)
        for i in range(len(bits)):
            for j in range(i + 1, len(bits)):
                self.add([-bits[i], -bits[j]])

    def and_lit(self, lits: Sequence[int]) -> int:
        """Fresh literal equivalent to the conjunction of ``lits``."""
        if not lits:
            return self.true
        if len(lits) == 1:
            return lits[0]
        a = self.new_var()
        for lit in lits:
            self.add([-a, lit])
        self.add([a] + [-lit for lit in lits])
        return a

    # -- removable groups ---------------------------------------------------

    def new_group(self) -> ClauseGroup:
        return ClauseGroup(self.new_var())

    def add_to_group(self, group: ClauseGroup, lits: Iterable[int]) -> None:
        if group.retired:
            raise ValueError("cannot add to a retired group")
        self.add(lits, (group.selector,))
        group.size += 1

    def retire_group(self, group: ClauseGroup) -> None:
        """Fix the selector false; members and clauses learned from them go inert."""
        if group.retired:
            return
        self.add([-group.selector])
        group.retired = True
