import itertools
import json

import pytest
from hypothesis import given, strategies as st

from ndcurry import tree as nd
from ndcurry.programs import eo_nd, ndinsert_nd, perm_nd, double, even
from ndcurry.tree import Choice, Val, Witness

from strategies import int_funcs, nd_funcs, predicates, reference_paths, small_ints, trees

coin = nd.choice(nd.val(True), nd.val(False))


# -- construction and enumeration --------------------------------------------------

def test_val_holds_one_value():
    assert nd.values(nd.val(3)) == [3]
    assert nd.member(3, nd.val(3)) == Witness("")


def test_choice_concatenates_left_to_right():
    assert nd.values(coin) == [True, False]
    assert nd.values(nd.choice(nd.fail(), nd.val(1))) == [1]
    assert nd.values(nd.choice(nd.val(0), nd.choice(nd.val(1), nd.val(2)))) == [0, 1, 2]


def test_fail_has_no_values():
    assert nd.values(nd.fail()) == []
    assert nd.member(0, nd.fail()) is None
    assert nd.satisfy(nd.fail(), lambda x: False)


def test_choices_helper_builds_balanced_tree():
    assert nd.values(nd.choices(*map(nd.val, range(5)))) == list(range(5))
    assert nd.values(nd.choices()) == []


@given(trees())
def test_values_are_the_val_leaves_in_order(t):
    assert nd.values(t) == [v for _p, v in reference_paths(t)]


@given(trees())
def test_depth_and_size_are_finite_and_consistent(t):
    assert nd.size(t) >= len(nd.values(t))
    assert nd.depth(t) < nd.size(t) + 1


# -- map / bind --------------------------------------------------------------------

def test_map_examples():
    assert nd.values(nd.map_det(lambda x: x + 1, nd.choice(nd.val(1), nd.val(2)))) == [2, 3]
    mapped = nd.map_det(lambda ys: (2,) + ys, ndinsert_nd(1, (3,)))
    assert nd.values(mapped) == [(2, 1, 3), (2, 3, 1)]


def test_bind_examples():
    assert nd.values(nd.bind_nd(eo_nd, nd.val(0))) == [0, 1]
    perms = nd.values(nd.bind_nd(lambda ys: ndinsert_nd(1, ys), perm_nd((2, 3))))
    assert len(perms) == 6
    assert set(perms) == set(itertools.permutations((1, 2, 3)))


@given(trees(), int_funcs)
def test_map_preserves_shape_and_maps_values(t, f):
    m = nd.map_det(f, t)
    assert [p for p, _v in reference_paths(m)] == [p for p, _v in reference_paths(t)]
    assert nd.values(m) == [f(v) for v in nd.values(t)]
    assert nd.size(m) == nd.size(t)


@given(trees())
def test_map_identity_is_structural_identity(t):
    assert nd.map_det(lambda x: x, t) == t


@given(trees(), int_funcs, int_funcs)
def test_map_composition(t, f, g):
    assert nd.map_det(f, nd.map_det(g, t)) == nd.map_det(lambda x: f(g(x)), t)


@given(trees(), nd_funcs)
def test_bind_concatenates_in_order(t, g):
    expected = [y for x in nd.values(t) for y in nd.values(g(x))]
    assert nd.values(nd.bind_nd(g, t)) == expected


@given(trees())
def test_bind_with_val_is_identity(t):
    assert nd.bind_nd(nd.val, t) == t


# -- satisfy / always ----------------------------------------------------------------

def test_satisfy_examples():
    assert nd.satisfy(nd.choice(nd.val(0), nd.val(2)), even)
    assert not nd.satisfy(nd.choice(nd.val(0), nd.val(1)), even)
    assert nd.satisfy(nd.val(7), lambda x: x == 7)


def test_always_examples():
    assert nd.always(nd.choice(nd.val(True), nd.val(True)))
    assert not nd.always(coin)
    assert nd.always(nd.map_det(lambda x: even(double(x)), eo_nd(5)))


@given(trees(), predicates)
def test_satisfy_matches_all_values_oracle(t, p):
    assert nd.satisfy(t, p) == all(p(v) for v in nd.values(t))


@given(trees(), int_funcs, predicates)
def test_satisfy_after_map(t, f, p):
    assert nd.satisfy(nd.map_det(f, t), p) == nd.satisfy(t, lambda x: p(f(x)))


@given(trees(), nd_funcs, predicates)
def test_satisfy_after_bind(t, g, p):
    if all(nd.satisfy(g(y), p) for y in nd.values(t)):
        assert nd.satisfy(nd.bind_nd(g, t), p)


@given(trees(), predicates)
def test_always_after_map(t, p):
    if all(p(y) for y in nd.values(t)):
        assert nd.always(nd.map_det(p, t))


@given(trees(values=st.booleans()))
def test_always_is_satisfy_identity(t):
    assert nd.always(t) == nd.satisfy(t, lambda b: b)


# -- witnesses -----------------------------------------------------------------------

def test_member_on_coin():
    assert nd.member(True, coin) == Witness("L")
    assert nd.member(False, coin) == Witness("R")
    assert nd.member(2, nd.val(3)) is None
    assert nd.check_witness(True, coin, Witness("L"))
    assert not nd.check_witness(True, coin, Witness("R"))


def test_witness_rejects_other_letters():
    with pytest.raises(ValueError):
        Witness("LX")


def test_witness_constructors():
    w = Witness.left(Witness.right(Witness()))
    assert w.path == "LR" and len(w) == 2 and str(w) == "LR"


@given(trees(), small_ints)
def test_member_is_leftmost_and_complete(t, x):
    w = nd.member(x, t)
    hits = [p for p, v in reference_paths(t) if v == x]
    if hits:
        assert w is not None and w.path == hits[0]
        assert nd.check_witness(x, t, w)
    else:
        assert w is None


@given(trees(), st.text(alphabet="LR", max_size=6), small_ints)
def test_check_witness_matches_path_oracle(t, path, x):
    assert nd.check_witness(x, t, Witness(path)) == ((path, x) in reference_paths(t))


def test_map_witness_examples():
    t = nd.choice(nd.val(1), nd.val(2))
    succ = lambda v: v + 1
    w = nd.map_witness(succ, 1, t, Witness("L"))
    assert w == Witness("L") and nd.check_witness(2, nd.map_det(succ, t), w)
    t = ndinsert_nd(1, (3,))
    prepend = lambda ys: (2,) + ys
    w = nd.map_witness(prepend, (1, 3), t, nd.member((1, 3), t))
    assert w == nd.member((2, 1, 3), nd.map_det(prepend, t))


def test_map_witness_rejects_invalid_input():
    with pytest.raises(nd.InvalidWitness):
        nd.map_witness(lambda v: v, 2, nd.val(1), Witness())


@given(trees(), int_funcs)
def test_map_witness_valid_for_every_value(t, f):
    for path, x in reference_paths(t):
        w = nd.map_witness(f, x, t, Witness(path))
        assert nd.check_witness(f(x), nd.map_det(f, t), w)


def test_bind_witness_examples():
    w = nd.bind_witness(0, nd.val(0), lambda x: x, eo_nd, Witness(), Witness("L"))
    assert w == Witness("L") and nd.check_witness(0, nd.bind_nd(eo_nd, nd.val(0)), w)
    assert nd.bind_witness(1, nd.val(1), lambda x: x, nd.val, Witness(), Witness()) == Witness()
    with pytest.raises(nd.InvalidWitness):
        nd.bind_witness(0, nd.val(0), lambda x: x, eo_nd, Witness(), Witness("R"))


@given(trees(), nd_funcs)
def test_bind_witness_valid_for_every_pair(t, g):
    bound = nd.bind_nd(g, t)
    for po, x in reference_paths(t):
        for pi, y in reference_paths(g(x)):
            w = nd.bind_witness(x, t, lambda _x, y=y: y, g, Witness(po), Witness(pi))
            assert nd.check_witness(y, bound, w)


@given(trees(), st.booleans())
def test_if_intro_selects_valid_witness(t, c):
    found = reference_paths(t)
    for px, x in found[:3]:
        for py, y in found[:3]:
            w = nd.if_intro(c, x, y, t, Witness(px), Witness(py))
            assert nd.check_witness(x if c else y, t, w)


# -- serialization ---------------------------------------------------------------------

def test_golden_serialization():
    t = Choice(Val((1, 2)), Choice(nd.fail(), Val(3)))
    assert nd.dumps(t) == '{"l":{"val":[1,2]},"r":{"l":"fail","r":{"val":3}}}'
    assert nd.loads(nd.dumps(t)) == t
    assert json.loads(nd.dumps(nd.fail())) == "fail"


@given(trees(values=st.one_of(small_ints, st.lists(small_ints, max_size=3).map(tuple))))
def test_serialization_round_trip(t):
    assert nd.loads(nd.dumps(t)) == t


@pytest.mark.parametrize("bad", ['"nope"', '{"val":1,"l":2}', '{"l":"fail"}', "3"])
def test_from_data_rejects_garbage(bad):
    with pytest.raises(ValueError):
        nd.loads(bad)
