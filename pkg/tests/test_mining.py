import random

import pytest
from hypothesis import given, strategies as st

from nativesat.encode import Builder
from nativesat.generate import TOY_DB, random_db
from nativesat.mining import (
    DbParseError,
    MiningTask,
    PatternSolution,
    TransactionDb,
    blocking_clauses,
    build_base_model,
    check_solution,
    dominates,
    filter_dominated,
    level_schedule,
    parse_db,
    satisfies_local,
)


@pytest.fixture
def toy():
    return parse_db(TOY_DB)


def test_parse_toy(toy):
    assert len(toy) == 3
    assert list(toy.items) == [1, 2, 3]
    assert not toy.labelled


def test_parse_labels():
    db = parse_db("+ 1 2\n- 2 3\n")
    assert db.labels == [True, False]
    assert db.transactions == [frozenset({1, 2}), frozenset({2, 3})]


@pytest.mark.parametrize("text", ["1 x 3\n", "1 0\n", "+ 1\n2\n", "1 -2\n"])
def test_parse_errors(text):
    with pytest.raises(DbParseError):
        parse_db(text)


def test_parse_skips_blank_lines_and_keeps_empty_transactions():
    db = parse_db("1 2\n\n3\n")
    assert len(db) == 2
    db = parse_db("+ 1\n+\n")
    assert db.transactions[1] == frozenset()


def test_db_validation():
    with pytest.raises(ValueError):
        TransactionDb([{1, 5}], n_items=3)
    with pytest.raises(ValueError):
        TransactionDb([{1}], labels=[True, False])


@given(st.lists(st.frozensets(st.integers(1, 6), min_size=1), min_size=1, max_size=8))
def test_text_round_trip(trs):
    db = TransactionDb(trs, n_items=6)
    again = parse_db(db.to_text(), n_items=6)
    assert again.transactions == db.transactions


@given(st.lists(st.tuples(st.booleans(), st.frozensets(st.integers(1, 6))), min_size=1, max_size=8))
def test_labelled_text_round_trip(rows):
    db = TransactionDb([t for _, t in rows], [lab for lab, _ in rows], n_items=6)
    again = parse_db(db.to_text(), n_items=6)
    assert (again.transactions, again.labels) == (db.transactions, db.labels)


@pytest.mark.parametrize("itemset,sup", [({1, 2}, 2), (set(), 3), ({1, 3}, 1), ({2}, 3)])
def test_model_support(toy, itemset, sup):
    b = Builder()
    ctx = build_base_model(toy, MiningTask("cfis", exclude_empty=False), b)
    fix = [ctx.item_lits[i] if i in itemset else -ctx.item_lits[i] for i in toy.items]
    assert b.solver.solve(fix)
    assert ctx.support.value(b.solver) == sup == toy.support(itemset)


def test_base_model_rejects_bad_inputs(toy):
    with pytest.raises(ValueError):
        build_base_model(toy, MiningTask("dfis"), Builder())
    with pytest.raises(ValueError):
        build_base_model(toy, MiningTask("cfis", min_support=4), Builder())


def test_task_validation():
    with pytest.raises(ValueError):
        MiningTask("closed")
    with pytest.raises(ValueError):
        MiningTask("cfis", values={1: -1}, min_value=0)
    assert MiningTask("GFIS").kind == "gfis"


def test_level_schedule(toy):
    assert level_schedule(toy, MiningTask("cfis")) == [3, 2, 1]
    assert level_schedule(toy, MiningTask("gfis")) == [1, 2, 3]
    assert level_schedule(toy, MiningTask("mrim", exclude_empty=False)) == [0, 1, 2, 3]
    assert level_schedule(TransactionDb([{1}]), MiningTask("cfis")) == [1]


def test_cfis_blocking_clause_shape(toy):
    b = Builder()
    ctx = build_base_model(toy, MiningTask("cfis", 2), b)
    (clause,) = blocking_clauses(ctx, PatternSolution.of(toy, {2}))
    x = ctx.item_lits
    assert x[1] in clause and x[3] in clause and x[2] not in clause
    # the remaining literals say support != 3
    rest = [l for l in clause if l not in (x[1], x[3])]
    assert sorted(rest) == sorted(-l for l in ctx.support.eq_lits(3))


def test_blocking_forbids_dominated_assignments(toy):
    b = Builder()
    ctx = build_base_model(toy, MiningTask("cfis", 2), b)
    for c in blocking_clauses(ctx, PatternSolution.of(toy, {1, 2})):
        b.add(c)
    x = ctx.item_lits
    # {1} has support 2 like {1,2}: now forbidden; {2} (support 3) still allowed
    assert not b.solver.solve([x[1], -x[2], -x[3]])
    assert b.solver.solve([-x[1], x[2], -x[3]])


def test_check_solution(toy):
    task = MiningTask("cfis", 2)
    closed = [PatternSolution.of(toy, s) for s in ({2}, {1, 2}, {2, 3})]
    one = PatternSolution.of(toy, {1})
    assert not check_solution(toy, task, one, closed + [one])
    assert check_solution(toy, task, closed[0], closed)
    assert not dominates("cfis", closed[0], closed[0])
    # a wrong support is rejected
    assert not check_solution(toy, task, PatternSolution({2}, 2), closed)


def test_filter_dominated(toy):
    task = MiningTask("cfis", 2)
    sols = [PatternSolution.of(toy, s) for s in ({1}, {2}, {1, 2})]
    kept, dropped = filter_dominated(toy, task, sols)
    assert {s.itemset for s in dropped} == {frozenset({1})}
    assert len(kept) == 2
    with pytest.raises(ValueError):
        filter_dominated(toy, task, [PatternSolution(frozenset({2}), 1)])
    with pytest.raises(ValueError):
        filter_dominated(toy, task, [PatternSolution.of(toy, {1, 3})])


def test_rsd_dominance_relation():
    db = parse_db("+ 1 2\n+ 1\n- 1 2\n- 2\n")
    a = PatternSolution.of(db, {1})  # pos {0,1}, neg {2}
    b = PatternSolution.of(db, {2})  # pos {0}, neg {2,3}
    c = PatternSolution.of(db, {1, 2})  # pos {0}, neg {2}
    assert dominates("rsd", a, b)
    assert dominates("rsd", a, c)
    assert not dominates("rsd", b, a)
    # equal covers: the larger description wins
    d = PatternSolution.of(parse_db("+ 1 2\n- 3\n"), {1})
    e = PatternSolution.of(parse_db("+ 1 2\n- 3\n"), {1, 2})
    assert dominates("rsd", e, d) and not dominates("rsd", d, e)


def test_satisfies_local_side_constraints(toy):
    task = MiningTask("cfis", 1, values={1: 2, 2: 1}, min_value=2, costs={3: 5}, max_cost=4)
    assert satisfies_local(toy, task, {1})
    assert not satisfies_local(toy, task, {2})
    assert not satisfies_local(toy, task, {1, 3})


def test_dfis_threshold_is_strict():
    db = parse_db("+ 1\n+ 1\n- 1\n")
    assert satisfies_local(db, MiningTask("dfis", 1, threshold=0), {1})
    assert not satisfies_local(db, MiningTask("dfis", 1, threshold=1), {1})


def test_random_db_generator_shape():
    rng = random.Random(0)
    db = random_db(rng, max_items=5, max_trans=7, labelled=True)
    assert db.n_items <= 5 and len(db) <= 7 and db.labelled
