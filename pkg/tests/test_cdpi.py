import csv
import io
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from nativesat import oracle
from nativesat.cdpi import LEVEL_COLUMNS, report_levels, run_cdpi
from nativesat.generate import TOY_DB, random_db
from nativesat.mining import KINDS, LABELLED, MiningTask, TransactionDb, check_solution, parse_db


def S(*sets):
    return {frozenset(s) for s in sets}


@pytest.fixture
def toy():
    return parse_db(TOY_DB)


@pytest.mark.parametrize("mode", ["native", "baseline"])
def test_toy_closed(toy, mode):
    res = run_cdpi(toy, MiningTask("cfis", 2), mode)
    assert res.itemsets() == S({2}, {1, 2}, {2, 3})


@pytest.mark.parametrize("mode", ["native", "baseline"])
def test_toy_generators(toy, mode):
    assert run_cdpi(toy, MiningTask("gfis", 2), mode).itemsets() == S({1}, {3})


@pytest.mark.parametrize("mode", ["native", "baseline"])
def test_toy_minimal_rare(toy, mode):
    assert run_cdpi(toy, MiningTask("mrim", 2), mode).itemsets() == S({1, 3})


def test_single_transaction():
    db = TransactionDb([{1}])
    assert run_cdpi(db, MiningTask("cfis", 1)).itemsets() == S({1})


def test_identical_transactions_one_closed_set():
    db = parse_db("1 3 4\n" * 4)
    assert run_cdpi(db, MiningTask("cfis", 1)).itemsets() == S({1, 3, 4})


def test_solutions_are_certified(toy):
    res = run_cdpi(toy, MiningTask("cfis", 1))
    for sol in res.solutions:
        assert check_solution(toy, MiningTask("cfis", 1), sol, res.solutions)


def test_unknown_mode(toy):
    with pytest.raises(ValueError):
        run_cdpi(toy, MiningTask("cfis"), "turbo")


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.sampled_from(KINDS), st.booleans())
def test_engine_matches_oracle(seed, kind, unguarded):
    rng = random.Random(seed)
    db = random_db(rng, max_items=7, max_trans=12, labelled=kind in LABELLED)
    task = MiningTask(kind, rng.randint(1, max(1, len(db) // 2)), threshold=rng.randint(-1, 1))
    expected = oracle.mine_patterns(db, task)
    native = run_cdpi(db, task, "native", guard_blocking=not unguarded)
    baseline = run_cdpi(db, task, "baseline")
    assert native.itemsets() == expected == baseline.itemsets()
    if kind != "rsd":
        assert native.filtered == [] and baseline.filtered == []


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from(KINDS))
def test_side_constraints_match_oracle(seed, kind):
    rng = random.Random(seed)
    db = random_db(rng, max_items=6, max_trans=10, labelled=kind in LABELLED)
    items = list(db.items)
    task = MiningTask(
        kind,
        rng.randint(1, max(1, len(db) // 2)),
        values={i: rng.randint(0, 3) for i in items},
        min_value=rng.randint(0, 4),
        costs={i: rng.randint(0, 3) for i in items},
        max_cost=rng.randint(2, 8),
        exclude_empty=rng.random() < 0.5,
    )
    assert run_cdpi(db, task).itemsets() == oracle.mine_patterns(db, task)


def test_level_stats_per_level_counts_agree(toy):
    task = MiningTask("cfis", 1)
    a = run_cdpi(toy, task, "native", seed=1)
    b = run_cdpi(toy, task, "baseline", seed=1)
    assert [len(r.solutions) for r in a.levels] == [len(r.solutions) for r in b.levels]


def test_native_clause_count_nondecreasing():
    db = random_db(random.Random(4), max_items=9, max_trans=20)
    res = run_cdpi(db, MiningTask("cfis", 2))
    totals = [r.total_clauses for r in res.levels]
    assert totals == sorted(totals)


def test_report_levels_csv_and_json(toy):
    res = run_cdpi(toy, MiningTask("cfis", 2))
    rows = list(csv.DictReader(io.StringIO(report_levels(res.levels))))
    assert list(rows[0]) == LEVEL_COLUMNS
    assert [int(r["level"]) for r in rows] == [3, 2, 1]
    # the top level has no solution but still gets a row
    assert rows[0]["solutions"] == "0"
    data = json.loads(report_levels(res.levels, "json"))
    assert [d["solutions"] for d in data] == [int(r["solutions"]) for r in rows]


def test_rsd_post_filter_only_trims(toy):
    rng = random.Random(8)
    for _ in range(10):
        db = random_db(rng, max_items=6, max_trans=10, labelled=True)
        res = run_cdpi(db, MiningTask("rsd", 1))
        assert res.itemsets() == oracle.mine_patterns(db, MiningTask("rsd", 1))
        assert not res.itemsets() & {s.itemset for s in res.filtered}
