import itertools
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from ndcurry import programs as pg
from ndcurry import tree as nd
from ndcurry.core import (
    ChoiceExpr, CtorApp, EvalConfig, FailExpr, FunApp, Let, ParseError, RChoice, RValue,
    ResultSet, Semantics, Strategy, Var, compare_semantics, eval_lazy_failure_demo, evaluate,
    extract_values, load_program, parse_expr, parse_program, peano, pull_tab, result_tree_of,
    show_expr, show_term, term_of_python,
)
from ndcurry.core.evaluator import R_FAIL
from ndcurry.core.syntax import expr_of_term

from strategies import trees

CT, RT = Semantics.CALL_TIME, Semantics.RUN_TIME
EAGER, LAZY = Strategy.EAGER, Strategy.LAZY
MODES = list(itertools.product((RT, CT), (EAGER, LAZY)))

PEANO = load_program("peano")
LISTS = load_program("lists")
PERM = load_program("perm")


def run(program, text, semantics=CT, strategy=LAZY, fuel=10_000):
    return evaluate(program, parse_expr(text, program), EvalConfig(semantics, strategy, fuel))


def num(n):
    return expr_of_term(peano(n))


# -- parsing ----------------------------------------------------------------------------

def test_parse_double_program():
    prog = parse_program("add Z y = y\nadd (S x) y = S (add x y)\ndouble x = add x x\n")
    assert [r.fun for r in prog.rules] == ["add", "add", "double"]
    assert prog.arity("double") == 1


def test_parse_choice_body():
    (rule,) = parse_program("f x = x ? S x").rules
    assert isinstance(rule.rhs, ChoiceExpr)
    assert rule.rhs.left == Var("x") and rule.rhs.right == CtorApp("S", (Var("x"),))


def test_parse_let_and_fail():
    (rule,) = parse_program("f x = let y = x in y ? fail  -- comment").rules
    assert isinstance(rule.rhs, Let)
    assert isinstance(rule.rhs.body.right, FailExpr)


def test_parse_data_declaration():
    prog = parse_program("data T = A | B\nf A = B\nf B = A")
    assert prog.ctors["A"] == 0 and len(prog.rules) == 2


@pytest.mark.parametrize("text, needle", [
    ("f (C x x) = x", "non-linear"),
    ("f (S x x) = x", "non-linear"),
    ("f x = y", "unbound"),
    ("f x = g x", "unbound"),
    ("f x = x ?", "unexpected"),
    ("F x = x", "expected"),
])
def test_parse_errors_carry_location(text, needle):
    with pytest.raises(ParseError) as info:
        parse_program(text)
    assert needle in str(info.value)
    assert info.value.line == 1


def test_literal_sugar():
    e = parse_expr("[1, 0]", PEANO)
    assert e == expr_of_term(term_of_python((1, 0)))
    assert show_expr(e) == "(Cons 1 (Cons 0 Nil))"
    assert show_term(peano(3)) == "3"
    assert show_term(term_of_python([2, [1]])) == "[2,[1]]"


def test_bundled_programs_load_by_file_name():
    assert load_program("perm.core").functions == PERM.functions
    with pytest.raises(FileNotFoundError):
        load_program("nosuch")


# -- the four modes ----------------------------------------------------------------------

def test_double_choice_contrast():
    report = compare_semantics(PEANO, parse_expr("double (0 ? 1)", PEANO))
    sets = {m: sorted(report.results[m].shown_set()) for m in MODES}
    assert sets[CT, EAGER] == sets[CT, LAZY] == ["0", "2"]
    assert sets[RT, EAGER] == ["0", "2"]
    assert sets[RT, LAZY] == ["0", "1", "2"]
    assert report.calltime_within_runtime == {EAGER: True, LAZY: True}


def test_double_choice_in_unary_terms():
    r = run(PEANO, "double (0 ? S 0)", RT, LAZY)
    assert r.value_set == {peano(0), peano(1), peano(2)}


def test_lazy_failure_demo():
    results = eval_lazy_failure_demo()
    assert results[LAZY].shown() == ["0"] and results[LAZY].failed == 0
    assert results[EAGER].values == () and results[EAGER].failed >= 1


def test_head_of_total_list_under_both_strategies():
    for strategy in (EAGER, LAZY):
        assert run(LISTS, "head (Cons 0 Nil)", CT, strategy).shown() == ["0"]


def test_perm_agrees_across_modes():
    report = compare_semantics(PERM, parse_expr("perm [1,2]", PERM))
    assert report.all_equal
    assert sorted(report.results[CT, LAZY].shown_set()) == ["[1,2]", "[2,1]"]


CORPUS = [
    (PEANO, "double (0 ? 1)"), (PEANO, "double (eo 1)"), (PEANO, "even (double (eo 2))"),
    (PEANO, "add (0 ? 1) (0 ? 1)"), (PEANO, "let x = 0 ? 1 in add x x"), (PEANO, "choose 1 2"),
    (PEANO, "coin"), (PERM, "perm [1,2,3]"), (PERM, "minnd [2,0,1]"), (PERM, "ndinsert 0 [1,2]"),
    (PERM, "sort (perm [2,1])"), (LISTS, "head (Cons (0 ? 1) (tail Nil))"),
    (LISTS, "last [1,2,3]"), (LISTS, "append [0 ? 1] [2]"),
]


@pytest.mark.parametrize("program, text", CORPUS, ids=[t for _p, t in CORPUS])
def test_calltime_within_runtime(program, text):
    report = compare_semantics(program, parse_expr(text, program))
    assert all(report.calltime_within_runtime.values())


@given(st.integers(0, 6), st.integers(0, 6))
@settings(max_examples=25, deadline=None)
def test_choice_free_expressions_agree_in_all_modes(a, b):
    report = compare_semantics(PEANO, parse_expr(f"add (double {a}) {b}", PEANO))
    assert report.all_equal
    assert report.results[CT, LAZY].shown() == [str(2 * a + b)]


@given(st.lists(st.integers(0, 4), max_size=4))
@settings(max_examples=20, deadline=None)
def test_choice_free_sort_agrees_in_all_modes(xs):
    report = compare_semantics(PERM, FunApp("sort", (expr_of_term(term_of_python(xs)),)))
    assert report.all_equal
    assert report.results[RT, EAGER].shown() == [show_term(term_of_python(sorted(xs)))]


# -- cross-check against the tree encoding -------------------------------------------------

def _shown(values):
    return Counter(show_term(term_of_python(v)) for v in values)


@pytest.mark.parametrize("xs", [(), (1,), (1, 2), (2, 0, 1), (1, 1, 0)])
def test_calltime_eager_matches_tree_encoding(xs):
    arg = expr_of_term(term_of_python(xs))
    cfg = EvalConfig(CT, EAGER)
    cases = [
        (FunApp("perm", (arg,)), pg.perm_nd(xs)),
        (FunApp("ndinsert", (num(3), arg)), pg.ndinsert_nd(3, xs)),
    ]
    if xs:
        cases.append((FunApp("minnd", (arg,)), pg.min_nd(xs)))
    for expr, tree in cases:
        got = evaluate(PERM, expr, cfg)
        assert set(got.shown()) == set(_shown(nd.values(tree)))


@pytest.mark.parametrize("n", [0, 1, 4, 7])
def test_eo_matches_tree_encoding(n):
    got = evaluate(PEANO, FunApp("eo", (num(n),)), EvalConfig(CT, EAGER))
    assert Counter(got.shown()) == _shown(nd.values(pg.eo_nd(n)))


# -- fuel --------------------------------------------------------------------------------

def test_fuel_exhaustion_is_reported():
    r = run(PERM, "perm [1,2,3,4]", fuel=5)
    assert r.fuel_exhausted > 0
    with pytest.raises(ValueError):
        EvalConfig(fuel=0)


def _submultiset(a, b):
    return not (Counter(a) - Counter(b))


@given(st.integers(1, 120), st.integers(0, 200), st.sampled_from(CORPUS), st.sampled_from(MODES))
@settings(max_examples=40, deadline=None)
def test_fuel_monotonicity(f, extra, case, mode):
    program, text = case
    low = run(program, text, *mode, fuel=f)
    high = run(program, text, *mode, fuel=f + extra)
    assert _submultiset(low.values, high.values)
    if low.fuel_exhausted == 0:
        assert high == low
    # branches that finished with less fuel finish the same way with more
    assert low.failed <= high.failed


# -- pull-tab and value extraction ------------------------------------------------------------

def test_pull_tab_through_function():
    app = FunApp("even", (ChoiceExpr(num(0), num(1), 1),))
    assert pull_tab(app, 0) == ChoiceExpr(FunApp("even", (num(0),)), FunApp("even", (num(1),)), 1)


def test_pull_tab_through_constructor():
    app = CtorApp("Cons", (ChoiceExpr(num(0), num(1), 1), CtorApp("Nil")))
    pulled = pull_tab(app, 0)
    assert pulled.cid == 1
    assert pulled.left == CtorApp("Cons", (num(0), CtorApp("Nil")))
    assert pulled.right == CtorApp("Cons", (num(1), CtorApp("Nil")))


def test_pull_tab_rejects_non_choice_and_unlabelled():
    with pytest.raises(ValueError):
        pull_tab(FunApp("even", (num(0),)), 0)
    with pytest.raises(ValueError):
        pull_tab(FunApp("even", (ChoiceExpr(num(0), num(1)),)), 0)


def test_repeated_pull_of_one_id_never_mixes_sides():
    c = lambda a, b: ChoiceExpr(num(a), num(b), 1)
    expr = CtorApp("Cons", (c(0, 1), CtorApp("Cons", (c(2, 3), CtorApp("Nil")))))
    once = pull_tab(expr, 0)
    inner = lambda side: CtorApp("Cons", (side.args[0], pull_tab(side.args[1], 0)))
    twice = ChoiceExpr(inner(once.left), inner(once.right), 1)
    got = extract_values(result_tree_of(twice)).shown_set()
    # call-time oracle: both occurrences follow the single bit of id 1
    oracle = sorted(f"[{a},{b}]" for a, b in [(0, 2), (1, 3)])
    assert sorted(got) == oracle
    assert sorted(extract_values(result_tree_of(expr)).shown_set()) == oracle


def test_extract_values_examples():
    v = lambda n: RValue(peano(n))
    shared = RChoice(1, RChoice(1, v(0), v(1)), RChoice(1, v(2), v(3)))
    assert extract_values(shared).shown_set() == ["0", "3"]
    fresh = RChoice(1, RChoice(2, v(0), v(1)), RChoice(3, v(2), v(3)))
    assert extract_values(fresh).shown_set() == ["0", "1", "2", "3"]
    r = extract_values(RChoice(1, v(0), R_FAIL))
    assert r.shown() == ["0"] and r.failed == 1


def _as_rtree(t, ids):
    if isinstance(t, nd.Val):
        return RValue(peano(t.value))
    if isinstance(t, nd.Choice):
        return RChoice(next(ids), _as_rtree(t.left, ids), _as_rtree(t.right, ids))
    return R_FAIL


@given(trees())
def test_extract_with_fresh_ids_is_path_enumeration(t):
    r = extract_values(_as_rtree(t, itertools.count()))
    assert Counter(r.shown()) == Counter(str(v) for v in nd.values(t))


def test_result_set_printing():
    r = ResultSet((peano(0), peano(2)), failed=1, fuel_exhausted=0)
    assert str(r) == "[0, 2] failed=1 fuel_exhausted=0"
