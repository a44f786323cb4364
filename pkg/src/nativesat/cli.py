"""Command-line front end and benchmark harness.

Exit codes: 0 on success, 1 when the problem is infeasible / UNSAT, 2 on a
usage error (bad flags, unreadable or malformed input).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
import time
from pathlib import Path
from typing import Optional

from .cdpi import MODES, report_levels, run_cdpi
from .cop import STRATEGIES, optimize, optimize_fresh
from .dimacs import DimacsError, load_into, parse_dimacs
from .encode import Builder
from .mining import KINDS, DbParseError, MiningTask, parse_db
from .mrcpsp import InstanceError, parse_instance, solve_mrcpsp
from .solver import Solver, SolverTimeout

TIME_LIMIT_ENV = "NATIVESAT_TIME_LIMIT"
BENCH_COLUMNS = [
    "instance",
    "mode",
    "repeats",
    "status",
    "time_s",
    "par2_s",
    "decisions",
    "conflicts",
    "result",
]


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _default_limit() -> Optional[float]:
    raw = os.environ.get(TIME_LIMIT_ENV)
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TIME_LIMIT_ENV} must be a number, got {raw!r}") from None


def _var_range(text: str) -> list[int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"objective range must look like LO:HI, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise UsageError(f"bad objective range {text!r}")
    return list(range(lo, hi + 1))


def _weights(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from None
    out = {}
    for key, name in (("values", "values"), ("costs", "costs")):
        if key in data:
            out[name] = {int(i): int(w) for i, w in data[key].items()}
    if "minValue" in data:
        out["min_value"] = int(data["minValue"])
    if "maxCost" in data:
        out["max_cost"] = int(data["maxCost"])
    return out


# -- pipelines ---------------------------------------------------------------


def mine(db_text, kind, min_support, mode, threshold=0, weights=None, include_empty=False,
         seed=None, time_limit=None):
    db = parse_db(db_text)
    task = MiningTask(
        kind, min_support=min_support, threshold=threshold,
        exclude_empty=not include_empty, **(weights or {}),
    )
    result = run_cdpi(db, task, mode=mode, seed=seed, time_limit=time_limit)
    result.solutions.sort(key=lambda s: (len(s.itemset), sorted(s.itemset)))
    return result


def _objective_builder(nvars, clauses, obj_vars):
    def build(b: Builder):
        load_into(b.solver, nvars, clauses)
        return b.sum_var(obj_vars)

    return build


def optimize_dimacs(text, obj_vars, sense="max", strategy="bisect", mode="native",
                    jump=True, seed=None, time_limit=None):
    nvars, clauses = parse_dimacs(text)
    if obj_vars and obj_vars[-1] > nvars:
        raise UsageError(f"objective variable {obj_vars[-1]} exceeds {nvars} variables")
    build = _objective_builder(nvars, clauses, obj_vars)
    if mode == "native":
        solver = Solver(seed=seed)
        x = build(Builder(solver))
        return optimize(solver, x, sense, strategy, jump, time_limit)
    return optimize_fresh(build, sense, strategy, jump, seed, time_limit)


# -- subcommands -------------------------------------------------------------


def _emit(text: str, path: Optional[str], fallback) -> None:
    if path is None:
        fallback.write(text)
    else:
        Path(path).write_text(text)


def cmd_mine(args) -> int:
    result = mine(
        _read(args.db), args.task, args.min_support, args.mode, args.threshold,
        _weights(args.weights), args.include_empty, args.seed, args.time_limit,
    )
    lines = "".join(s.to_json() + "\n" for s in result.solutions)
    _emit(lines, args.out, sys.stdout)
    _emit(report_levels(result.levels), args.stats, sys.stderr)
    return 0


def cmd_optimize(args) -> int:
    result = optimize_dimacs(
        _read(args.dimacs), _var_range(args.objective_var_range), args.sense,
        args.strategy, args.mode, not args.no_jump, args.seed, args.time_limit,
    )
    if args.calls:
        Path(args.calls).write_text(result.calls_csv())
    if not result.feasible:
        print("INFEASIBLE")
        return 1
    print(f"OPTIMUM {result.optimum}")
    return 0


def cmd_mrcpsp(args) -> int:
    inst = parse_instance(_read(args.instance))
    mode = "native" if args.mode == "native" else "fresh"
    sched, result = solve_mrcpsp(inst, args.strategy, mode, not args.no_jump, args.seed, args.time_limit)
    if args.calls:
        Path(args.calls).write_text(result.calls_csv())
    if sched is None:
        print("INFEASIBLE")
        return 1
    _emit(sched.to_json() + "\n", args.out, sys.stdout)
    return 0


def cmd_solve_dimacs(args) -> int:
    nvars, clauses = parse_dimacs(_read(args.cnf))
    solver = Solver(seed=args.seed, time_limit=args.time_limit)
    load_into(solver, nvars, clauses)
    try:
        sat = solver.solve()
    except SolverTimeout:
        print("s UNKNOWN")
        return 1
    if not sat:
        print("s UNSATISFIABLE")
        return 1
    print("s SATISFIABLE")
    model = solver.model()[:nvars]
    print("v " + " ".join(str(l) for l in model) + " 0")
    return 0


# -- bench -------------------------------------------------------------------


def _run_instance(spec: dict, base: Path, mode: str, seed, time_limit):
    """One run; returns (decisions, conflicts, comparable result, display result)."""
    kind = spec.get("kind", "mine")
    if kind == "mine":
        res = mine(
            _read(str(base / spec["db"])), spec["task"], spec.get("minSupport", 1), mode,
            spec.get("threshold", 0), seed=seed, time_limit=time_limit,
        )
        key = sorted(sorted(s.itemset) for s in res.solutions)
        return res.decisions, res.conflicts, key, len(res.solutions)
    if kind == "optimize":
        res = optimize_dimacs(
            _read(str(base / spec["dimacs"])), _var_range(spec["objectiveVarRange"]),
            spec.get("sense", "max"), spec.get("strategy", "bisect"), mode,
            seed=seed, time_limit=time_limit,
        )
    elif kind == "mrcpsp":
        inst = parse_instance(_read(str(base / spec["instance"])))
        _, res = solve_mrcpsp(
            inst, spec.get("strategy", "bisect"), "native" if mode == "native" else "fresh",
            seed=seed, time_limit=time_limit,
        )
    else:
        raise UsageError(f"unknown instance kind {kind!r}")
    dec = sum(c.decisions for c in res.calls)
    con = sum(c.conflicts for c in res.calls)
    shown = "INFEASIBLE" if res.optimum is None else res.optimum
    return dec, con, res.optimum, shown


def bench(instances: list[dict], base: Path, modes=MODES, repeats=3, seed=0,
          time_limit: Optional[float] = None) -> list[dict]:
    """Averaged rows, one per (instance, mode).

    Raises RuntimeError if two modes that both finished disagree.
    """
    rows = []
    for idx, spec in enumerate(instances):
        name = spec.get("name", f"instance{idx}")
        answers = {}
        for mode in modes:
            times, decs, cons = [], [], []
            status, shown = "ok", ""
            for rep in range(repeats):
                t0 = time.perf_counter()
                try:
                    dec, con, key, shown = _run_instance(spec, base, mode, seed + rep, time_limit)
                except SolverTimeout:
                    status = "timeout"
                    break
                times.append(time.perf_counter() - t0)
                decs.append(dec)
                cons.append(con)
                answers.setdefault(mode, key)
                if answers[mode] != key:
                    raise RuntimeError(f"{name}/{mode}: result changed between repeats")
            if status == "timeout":
                t = par2 = 2 * time_limit
                row = dict(time_s=t, par2_s=par2, decisions="", conflicts="", result="")
            else:
                t = statistics.mean(times)
                row = dict(
                    time_s=t, par2_s=t,
                    decisions=statistics.mean(decs), conflicts=statistics.mean(cons),
                    result=shown,
                )
            rows.append(dict(instance=name, mode=mode, repeats=repeats, status=status, **row))
        finished = list(answers.values())
        if any(a != finished[0] for a in finished[1:]):
            raise RuntimeError(f"{name}: modes disagree: {answers}")
    return rows


def bench_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        out = dict(r)
        for k in ("time_s", "par2_s"):
            out[k] = f"{r[k]:.4f}"
        for k in ("decisions", "conflicts"):
            if r[k] != "":
                out[k] = f"{r[k]:.1f}"
        w.writerow(out)
    return buf.getvalue()


def cmd_bench(args) -> int:
    try:
        instances = json.loads(_read(args.instances))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.instances}: {exc}") from None
    if not isinstance(instances, list):
        raise UsageError("instance list must be a JSON array")
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    for m in modes:
        if m not in MODES:
            raise UsageError(f"unknown mode {m!r}")
    if args.repeats < 1:
        raise UsageError("--repeats must be positive")
    rows = bench(instances, Path(args.instances).parent, modes, args.repeats, args.seed, args.time_limit)
    _emit(bench_csv(rows), args.out, sys.stdout)
    return 0


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nativesat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, modes=True):
        if modes:
            sp.add_argument("--mode", choices=MODES, default="native")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--time-limit", type=float, default=None,
                        help=f"seconds; defaults to ${TIME_LIMIT_ENV}")

    m = sub.add_parser("mine", help="mine non-dominated patterns")
    m.add_argument("--task", required=True, choices=KINDS)
    m.add_argument("--db", required=True, help="transaction file, one line per transaction")
    m.add_argument("--min-support", type=int, default=1)
    m.add_argument("--threshold", type=int, default=0, help="dfis: pos - neg must exceed this")
    m.add_argument("--weights", help="JSON with values/minValue/costs/maxCost")
    m.add_argument("--include-empty", action="store_true")
    m.add_argument("--out", help="JSON-lines solutions (default stdout)")
    m.add_argument("--stats", help="per-level CSV (default stderr)")
    common(m)
    m.set_defaults(func=cmd_mine)

    o = sub.add_parser("optimize", help="optimise a popcount objective over a CNF")
    o.add_argument("--dimacs", required=True)
    o.add_argument("--strategy", required=True, choices=STRATEGIES)
    o.add_argument("--objective-var-range", required=True, metavar="LO:HI")
    o.add_argument("--sense", choices=("max", "min"), default="max")
    o.add_argument("--no-jump", action="store_true")
    o.add_argument("--calls", help="write per-call CSV here")
    common(o)
    o.set_defaults(func=cmd_optimize)

    r = sub.add_parser("mrcpsp", help="minimise the makespan of a scheduling instance")
    r.add_argument("--instance", required=True)
    r.add_argument("--strategy", required=True, choices=STRATEGIES)
    r.add_argument("--no-jump", action="store_true")
    r.add_argument("--out")
    r.add_argument("--calls")
    common(r)
    r.set_defaults(func=cmd_mrcpsp)

    d = sub.add_parser("solve-dimacs", help="solve a DIMACS CNF file")
    d.add_argument("cnf")
    common(d, modes=False)
    d.set_defaults(func=cmd_solve_dimacs)

    b = sub.add_parser("bench", help="compare modes over an instance list")
    b.add_argument("--instances", required=True, help="JSON array of instance specs")
    b.add_argument("--modes", default=",".join(MODES))
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--time-limit", type=float, default=None)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.time_limit is None:
            args.time_limit = _default_limit()
        return args.func(args)
    except (UsageError, DimacsError, DbParseError, InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
