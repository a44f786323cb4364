"""Multi-mode resource-constrained project scheduling as a SAT optimisation.

Time-indexed model: every job gets an order-encoded start in ``1..horizon``,
a one-hot mode and an ``active[job, t]`` literal per time step. Durations
depend on the chosen mode, so window and precedence clauses are posted once
per mode and conditioned on its literal. Resource sums are counted by
repeating each literal ``usage`` times.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .cop import CopResult, compare_modes, optimize, optimize_fresh
from .encode import Builder, IntVar
from .solver import Solver


class InstanceError(ValueError):
    pass


@dataclass
class MrcpspInstance:
    jobs: list[str]
    start_dummy: str
    end_dummy: str
    modes: dict[str, list[str]]
    duration: dict[str, dict[str, int]]
    renewable: dict[str, int]
    non_renewable: dict[str, int]
    usage_renewable: dict[str, dict[str, dict[str, int]]]
    usage_non_renewable: dict[str, dict[str, dict[str, int]]]
    successors: dict[str, list[str]]
    horizon: int

    def usage(self, kind: str, job: str, mode: str, res: str) -> int:
        table = self.usage_renewable if kind == "renewable" else self.usage_non_renewable
        return table.get(job, {}).get(mode, {}).get(res, 0)

    def topological_order(self) -> list[str]:
        indeg = {j: 0 for j in self.jobs}
        for j in self.jobs:
            for s in self.successors.get(j, []):
                indeg[s] += 1
        order = []
        ready = [j for j in self.jobs if indeg[j] == 0]
        while ready:
            j = ready.pop(0)
            order.append(j)
            for s in self.successors.get(j, []):
                indeg[s] -= 1
                if indeg[s] == 0:
                    ready.append(s)
        if len(order) != len(self.jobs):
            raise InstanceError("precedence graph has a cycle")
        return order

    def to_json(self) -> dict:
        return {
            "jobs": self.jobs,
            "startDummy": self.start_dummy,
            "endDummy": self.end_dummy,
            "modes": self.modes,
            "duration": self.duration,
            "renewable": self.renewable,
            "nonRenewable": self.non_renewable,
            "usageRenewable": self.usage_renewable,
            "usageNonRenewable": self.usage_non_renewable,
            "successors": self.successors,
            "horizon": self.horizon,
        }


def parse_instance(data) -> MrcpspInstance:
    """Build a validated instance from JSON text or an already-decoded dict."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        jobs = [str(j) for j in data["jobs"]]
        inst = MrcpspInstance(
            jobs=jobs,
            start_dummy=str(data["startDummy"]),
            end_dummy=str(data["endDummy"]),
            modes={str(j): [str(m) for m in ms] for j, ms in data["modes"].items()},
            duration={
                str(j): {str(m): d for m, d in dm.items()} for j, dm in data["duration"].items()
            },
            renewable=dict(data.get("renewable", {})),
            non_renewable=dict(data.get("nonRenewable", {})),
            usage_renewable=data.get("usageRenewable", {}),
            usage_non_renewable=data.get("usageNonRenewable", {}),
            successors={str(j): [str(s) for s in ss] for j, ss in data.get("successors", {}).items()},
            horizon=data["horizon"],
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise InstanceError(f"malformed instance: {exc!r}") from None
    validate(inst)
    return inst


def validate(inst: MrcpspInstance) -> None:
    jobs = set(inst.jobs)
    if len(jobs) != len(inst.jobs):
        raise InstanceError("duplicate job names")
    for dummy in (inst.start_dummy, inst.end_dummy):
        if dummy not in jobs:
            raise InstanceError(f"missing dummy job {dummy!r}")
    if not isinstance(inst.horizon, int) or inst.horizon < 1:
        raise InstanceError("horizon must be a positive integer")
    for j in inst.jobs:
        modes = inst.modes.get(j)
        if not modes:
            raise InstanceError(f"job {j!r} has no modes")
        for m in modes:
            d = inst.duration.get(j, {}).get(m)
            if not isinstance(d, int):
                raise InstanceError(f"missing duration for ({j}, {m})")
            if d < 0:
                raise InstanceError(f"negative duration for ({j}, {m})")
    for kind, limits in (("renewable", inst.renewable), ("nonRenewable", inst.non_renewable)):
        for r, lim in limits.items():
            if not isinstance(lim, int) or lim < 0:
                raise InstanceError(f"{kind} limit of {r!r} must be a nonnegative integer")
    for table in (inst.usage_renewable, inst.usage_non_renewable):
        for j, per_mode in table.items():
            if j not in jobs:
                raise InstanceError(f"usage given for unknown job {j!r}")
            for m, per_res in per_mode.items():
                for r, u in per_res.items():
                    if not isinstance(u, int) or u < 0:
                        raise InstanceError(f"bad usage {u!r} for ({j}, {m}, {r})")
    for j, succ in inst.successors.items():
        if j not in jobs or any(s not in jobs for s in succ):
            raise InstanceError(f"successors of {j!r} reference unknown jobs")
    for dummy in (inst.start_dummy, inst.end_dummy):
        for m in inst.modes[dummy]:
            if inst.duration[dummy][m] != 0:
                raise InstanceError(f"dummy {dummy!r} must have duration 0")
            for r in inst.renewable:
                if inst.usage("renewable", dummy, m, r):
                    raise InstanceError(f"dummy {dummy!r} must not use resources")
            for r in inst.non_renewable:
                if inst.usage("nonRenewable", dummy, m, r):
                    raise InstanceError(f"dummy {dummy!r} must not use resources")
    if inst.successors.get(inst.end_dummy):
        raise InstanceError("end dummy must not have successors")
    inst.topological_order()
    # every job must reach the end dummy so that its start bounds the makespan
    reaches = {inst.end_dummy}
    for j in reversed(inst.topological_order()):
        if any(s in reaches for s in inst.successors.get(j, [])):
            reaches.add(j)
    missing = [j for j in inst.jobs if j not in reaches]
    if missing:
        raise InstanceError(f"end dummy is not a successor of {missing}")


@dataclass
class MrcpspVars:
    start: dict[str, IntVar]
    mode: dict[str, dict[str, int]]
    active: dict[tuple[str, int], int]
    objective: IntVar = field(repr=False)


def encode(inst: MrcpspInstance, builder: Builder) -> MrcpspVars:
    """Post the scheduling model; the objective is the end dummy's start."""
    H = inst.horizon
    times = range(1, H + 1)
    start = {j: builder.int_var(1, H) for j in inst.jobs}
    mode = {}
    for j in inst.jobs:
        ms = inst.modes[j]
        if len(ms) == 1:
            mode[j] = {ms[0]: builder.true}
        else:
            mode[j] = {m: builder.new_var() for m in ms}
            builder.exactly_one(list(mode[j].values()))

    active = {}
    for j in inst.jobs:
        s = start[j]
        for t in times:
            a = builder.new_var()
            active[j, t] = a
            builder.add([-a, -s.ge(t + 1)])
            for m, ml in mode[j].items():
                d = inst.duration[j][m]
                builder.add([-ml, -s.ge(t - d + 1), s.ge(t + 1), a])
                builder.add([-ml, -a, s.ge(t - d + 1)])

    for j in inst.jobs:
        sj = start[j]
        for succ in inst.successors.get(j, []):
            ss = start[succ]
            for m, ml in mode[j].items():
                d = inst.duration[j][m]
                for v in times:
                    builder.add([-ml, -sj.ge(v), ss.ge(v + d)])

    for r, limit in inst.non_renewable.items():
        bits = []
        for j in inst.jobs:
            for m, ml in mode[j].items():
                bits += [ml] * inst.usage("nonRenewable", j, m, r)
        builder.at_most(bits, limit)

    for r, limit in inst.renewable.items():
        users = [
            (j, m, inst.usage("renewable", j, m, r))
            for j in inst.jobs
            for m in mode[j]
            if inst.usage("renewable", j, m, r) > 0
        ]
        if sum(u for _, _, u in users) <= limit:
            continue
        for t in times:
            bits = []
            for j, m, u in users:
                lit = active[j, t] if len(mode[j]) == 1 else builder.and_lit([mode[j][m], active[j, t]])
                bits += [lit] * u
            builder.at_most(bits, limit)

    builder.add([-start[inst.start_dummy].ge(2)])
    return MrcpspVars(start, mode, active, start[inst.end_dummy])


@dataclass
class Schedule:
    start: dict[str, int]
    mode: dict[str, str]
    makespan: int

    def to_json(self) -> str:
        return json.dumps({"start": self.start, "mode": self.mode, "makespan": self.makespan})


def schedule_violations(inst: MrcpspInstance, start: dict, mode: dict) -> list[str]:
    """Check a schedule directly against the problem definition."""
    problems = []
    H = inst.horizon
    for j in inst.jobs:
        if j not in start or j not in mode:
            problems.append(f"{j}: unscheduled")
            continue
        if not 1 <= start[j] <= H:
            problems.append(f"{j}: start {start[j]} outside 1..{H}")
        if mode[j] not in inst.modes[j]:
            problems.append(f"{j}: unknown mode {mode[j]!r}")
    if problems:
        return problems
    dur = {j: inst.duration[j][mode[j]] for j in inst.jobs}
    if start[inst.start_dummy] != 1:
        problems.append("start dummy does not start at 1")
    for j in inst.jobs:
        for s in inst.successors.get(j, []):
            if start[s] < start[j] + dur[j]:
                problems.append(f"precedence {j}->{s} violated")
    for r, limit in inst.non_renewable.items():
        used = sum(inst.usage("nonRenewable", j, mode[j], r) for j in inst.jobs)
        if used > limit:
            problems.append(f"non-renewable {r}: {used} > {limit}")
    for r, limit in inst.renewable.items():
        for t in range(1, H + 1):
            used = sum(
                inst.usage("renewable", j, mode[j], r)
                for j in inst.jobs
                if start[j] <= t < start[j] + dur[j]
            )
            if used > limit:
                problems.append(f"renewable {r} at t={t}: {used} > {limit}")
    return problems


def decode(inst: MrcpspInstance, mv: MrcpspVars, result: CopResult) -> Schedule:
    start = {j: result.int_value(mv.start[j]) for j in inst.jobs}
    mode = {}
    for j in inst.jobs:
        chosen = [m for m, lit in mv.mode[j].items() if result.value(lit)]
        mode[j] = chosen[0]
    return Schedule(start, mode, start[inst.end_dummy])


def solve_mrcpsp(
    inst: MrcpspInstance,
    strategy: str = "bisect",
    mode: str = "native",
    jump: bool = True,
    seed: Optional[int] = None,
    time_limit: Optional[float] = None,
) -> tuple[Optional[Schedule], CopResult]:
    """Minimise the makespan. Returns ``(None, result)`` when infeasible.

    The returned schedule has been re-checked with :func:`schedule_violations`.
    """
    holder = {}

    def build(b):
        holder["vars"] = encode(inst, b)
        return holder["vars"].objective

    if mode == "native":
        solver = Solver(seed=seed)
        obj = build(Builder(solver))
        result = optimize(solver, obj, "min", strategy, jump, time_limit)
    elif mode in ("fresh", "baseline"):
        result = optimize_fresh(build, "min", strategy, jump, seed, time_limit)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not result.feasible:
        return None, result
    sched = decode(inst, holder["vars"], result)
    bad = schedule_violations(inst, sched.start, sched.mode)
    if bad:
        raise RuntimeError(f"solver returned an invalid schedule: {bad}")
    return sched, result


def compare_mrcpsp(inst: MrcpspInstance, strategy: str = "bisect", seed: Optional[int] = None):
    return compare_modes(lambda b: encode(inst, b).objective, "min", strategy, True, seed)
