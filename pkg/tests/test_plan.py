import itertools

import pytest
from hypothesis import given, strategies as st

from ndcurry.plan import (
    MAX_ENUMERATED_ADDRESSES, ChoicePlan, PlanBudgetError, PlanSyntaxError, addresses,
    choose, closure_depth, enumerate_plans, explore_plans, format_plan, lchoice, parse_plan,
    rchoice,
)
from ndcurry.programs import eo_plan, min_plan, perm_plan

from strategies import addresses as address_strategy, plans


def test_choose_reads_current_address():
    assert choose(ChoicePlan(default=False)) is False
    assert choose(ChoicePlan({"": True})) is True
    p = ChoicePlan({"": True, "L": False})
    assert choose(lchoice(p)) is False


def test_lchoice_rchoice_extend_the_address():
    p = rchoice(lchoice(ChoicePlan()))
    assert p.current == "LR"
    assert lchoice(p).current == "LRL"


def test_bad_address_rejected():
    with pytest.raises(ValueError):
        ChoicePlan({"LX": True})


@given(plans, address_strategy)
def test_choose_follows_table_then_default(p, path):
    q = p
    for step in path:
        q = lchoice(q) if step == "L" else rchoice(q)
    assert choose(q) == p.bits.get(path, p.default)


@given(plans)
def test_same_plan_same_output(p):
    xs = (1, 2, 3, 4)
    assert perm_plan(p, xs) == perm_plan(p, xs)


def _consulted(fn, p):
    traced, log = p.traced()
    fn(traced)
    return set(log)


@given(plans, st.dictionaries(address_strategy, st.booleans(), max_size=6))
def test_left_computation_ignores_right_bits(p, noise):
    xs = (0, 1, 2)
    left = lambda q: perm_plan(lchoice(q), xs)
    mutated = ChoicePlan({**p.bits, **{"R" + a: b for a, b in noise.items()}}, p.default)
    assert left(p) == left(mutated)
    assert not any(a.startswith("R") for a in _consulted(left, p))


@given(plans)
def test_sibling_plans_read_disjoint_addresses(p):
    xs = (0, 1, 2)
    ls = _consulted(lambda q: perm_plan(lchoice(q), xs), p)
    rs = _consulted(lambda q: perm_plan(rchoice(q), xs), p)
    assert not ls & rs


# -- literal syntax ----------------------------------------------------------------

def test_parse_plan_literal():
    p = parse_plan("=1,L=0,RL=1")
    assert p.bits == {"": True, "L": False, "RL": True} and p.default is False
    assert parse_plan("default=1").default is True
    assert format_plan(p) == "=1,L=0,RL=1,default=0"


@pytest.mark.parametrize("bad", ["L=2", "X=1", "L", "=1,=0", "LL=yes"])
def test_parse_plan_errors(bad):
    with pytest.raises(PlanSyntaxError):
        parse_plan(bad)


@given(plans)
def test_format_parse_round_trip(p):
    q = parse_plan(format_plan(p))
    assert q == p


# -- enumeration -------------------------------------------------------------------

def test_addresses_shortest_first():
    assert addresses(2) == ["", "L", "R", "LL", "LR", "RL", "RR"]


def test_enumerate_covers_one_address():
    outs = [choose(p) for p in enumerate_plans(0)]
    assert sorted(outs) == [False, True]


def test_enumerate_budget_guard():
    assert len(addresses(3)) <= MAX_ENUMERATED_ADDRESSES < len(addresses(4))
    with pytest.raises(PlanBudgetError):
        list(enumerate_plans(4))
    with pytest.raises(PlanBudgetError):
        list(enumerate_plans(-1))


@pytest.mark.parametrize("depth", [0, 1, 2])
def test_enumerate_is_every_assignment(depth):
    got = {tuple(sorted(p.bits.items())) for p in enumerate_plans(depth)}
    n = len(addresses(depth))
    assert len(got) == 2 ** n


def test_perm_plan_over_enumeration():
    outs = {perm_plan(p, (1, 2)) for p in enumerate_plans(1)}
    assert outs == {(1, 2), (2, 1)}
    outs = {perm_plan(p, (1, 2, 3)) for p in enumerate_plans(3)}
    assert outs == set(itertools.permutations((1, 2, 3)))


def test_closure_depth_for_small_programs():
    assert closure_depth(lambda p: eo_plan(p, 4)) == 0
    assert closure_depth(lambda p: perm_plan(p, (1, 2))) == 1
    with pytest.raises(PlanBudgetError):
        closure_depth(lambda p: perm_plan(p, (1, 2, 3, 4, 5, 6)), max_depth=2)


@pytest.mark.parametrize("xs", [(), (1,), (1, 2), (3, 1, 2), (0, 0, 1, 2)])
def test_explore_agrees_with_full_enumeration(xs):
    explored = [out for _p, out in explore_plans(lambda p: perm_plan(p, xs))]
    full = {perm_plan(p, xs) for p in enumerate_plans(3)}
    assert set(explored) == full
    # one run per execution path
    assert len(explored) == max(1, len(list(itertools.permutations(xs))))


@given(st.lists(st.integers(0, 4), min_size=1, max_size=5))
def test_explored_plans_replay(xs):
    for p, out in explore_plans(lambda q: min_plan(q, xs)):
        assert min_plan(p, xs) == out


def test_explore_limit():
    with pytest.raises(PlanBudgetError):
        list(explore_plans(lambda p: perm_plan(p, (1, 2, 3, 4)), limit=5))
