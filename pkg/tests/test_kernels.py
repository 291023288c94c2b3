import itertools
import os
import subprocess
import sys
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ndcurry import programs as pg
from ndcurry import tree as nd
from ndcurry._kernels import ckernel, pykernel
from ndcurry.laws import domains as dom
from ndcurry.plan import explore_plans

from strategies import trees

KERNELS = [pytest.param(pykernel, id="python"),
           pytest.param(ckernel, id="compiled",
                        marks=pytest.mark.skipif(ckernel is None, reason="extension not built"))]
needs_c = pytest.mark.skipif(ckernel is None, reason="extension not built")

PAIRS = dom.make_pairs(0, 32)


def _tree_laws(k, depth, start=0, stop=-1, mask=63, seed=12345, pairs=PAIRS):
    flat, offsets = dom.shapes(depth)
    return k.tree_laws(flat, offsets, seed, pairs.fmap, pairs.pred, pairs.qpred,
                       pairs.gk, pairs.gv, pairs.glen, start, stop, mask)


def test_splitmix_reference_vector():
    # first output of the reference generator seeded with 0
    assert pykernel.splitmix64(0) == 0xE220A8397B1DCDAF
    if ckernel is not None:
        for x in (0, 1, 2**63, 2**64 - 1, 123456789):
            assert ckernel.splitmix64(x) == pykernel.splitmix64(x)


def test_shape_counts():
    # t(d) = 1 + t(d-1)^2
    counts = [1]
    for _ in range(5):
        counts.append(1 + counts[-1] ** 2)
    assert [dom.shape_count(d) for d in range(6)] == counts
    assert counts[5] == 458_330


@needs_c
@pytest.mark.parametrize("index", [0, 1, 5, 300, 458_329])
def test_leaf_labels_match(index):
    shape = np.frombuffer(dom.shape_at(5, index), dtype=np.uint8)
    for pair in (0, 7, 31):
        ck, cv = ckernel.label_shape(shape, 12345, index, pair)
        pk, pv = pykernel.label_shape(shape, 12345, index, pair)
        assert np.array_equal(ck, pk) and np.array_equal(cv, pv)


def test_labelled_tree_matches_flat_labels():
    shape = dom.shape_at(4, 200)
    kinds, vals = pykernel.label_shape(np.frombuffer(shape, dtype=np.uint8), 7, 200, 3)
    t = dom.labelled_tree(4, 7, 200, 3)
    k2, v2 = dom.tree_to_flat(t)
    assert np.array_equal(kinds, k2)
    assert np.array_equal(vals * (kinds == pykernel.VAL), v2)


def test_label_frequencies():
    counts = np.zeros(5, dtype=np.int64)
    for leaf in range(4000):
        kind, v = pykernel.leaf_label(1, 2, 3, leaf)
        counts[4 if kind == pykernel.FAIL else v] += 1
    assert 350 < counts[4] < 650          # about one in eight fail
    assert all(counts[:4] > 700)


# -- the law engine: compiled == Python == object-level oracle --------------------------------

@needs_c
@pytest.mark.parametrize("mask", [63, 7, 56, 1, 2, 4, 8, 16, 32])
def test_compiled_matches_python_depth3(mask):
    assert np.array_equal(_tree_laws(ckernel, 3, mask=mask), _tree_laws(pykernel, 3, mask=mask))


@needs_c
@pytest.mark.parametrize("start", [0, 200_000, 458_300])
def test_compiled_matches_python_depth5_slices(start):
    for mask in (7, 56):
        c = _tree_laws(ckernel, 5, start, start + 25, mask)
        p = _tree_laws(pykernel, 5, start, start + 25, mask)
        assert np.array_equal(c, p)


def _object_stats(depth, pairs=PAIRS, seed=12345):
    premise_bind = premise_always = checks = 0
    for s in range(dom.shape_count(depth)):
        for k in range(len(pairs)):
            t = dom.labelled_tree(depth, seed, s, k)
            f, p, q, g = pairs.f(k), pairs.p(k), pairs.q(k), pairs.g(k)
            vs = nd.values(t)
            premise_bind += all(nd.satisfy(g(x), p) for x in vs)
            premise_always += all(q(x) for x in vs)
            present = set(vs)
            checks += sum(1 + len(set(nd.values(g(x)))) for x in present) + 2 * len(present) ** 2
    return premise_bind, premise_always, checks


@pytest.mark.parametrize("k", KERNELS)
def test_kernel_counters_match_object_oracle(k):
    stats = dict(zip(pykernel.STAT_FIELDS, _tree_laws(k, 3).tolist()))
    bind, always, checks = _object_stats(3)
    assert stats["cases"] == dom.shape_count(3) * 32
    assert (stats["bind_premise_true"], stats["always_premise_true"], stats["witness_checks"]) == \
        (bind, always, checks)
    for f in pykernel.STAT_FIELDS[1:9]:
        if f.endswith("_fail"):
            assert stats[f] == 0
    assert stats["first_fail_shape"] == -1


# -- flat primitives against the object library ------------------------------------------------

def _path_string(path, length):
    return "".join("R" if (path >> i) & 1 else "L" for i in range(length))


@pytest.mark.parametrize("k", KERNELS)
@given(t=trees(values=st.integers(0, 3), max_leaves=20), pair=st.integers(0, 31))
@settings(max_examples=60, deadline=None)
def test_flat_primitives_agree_with_object_ops(k, t, pair):
    kinds, vals = dom.tree_to_flat(t)
    f, p, g = PAIRS.f(pair), PAIRS.p(pair), PAIRS.g(pair)

    mk, mv = k.flat_map(kinds, vals, PAIRS.fmap[pair])
    assert dom.flat_to_tree(mk, mv) == nd.map_det(f, t)
    assert k.flat_satisfy(mk, mv, PAIRS.pred[pair]) == nd.satisfy(nd.map_det(f, t), p)

    bk, bv = k.flat_bind(kinds, vals, PAIRS.gk[pair], PAIRS.gv[pair], PAIRS.glen[pair])
    assert dom.flat_to_tree(bk, bv) == nd.bind_nd(g, t)

    for x in range(4):
        w = nd.member(x, t)
        got = k.flat_member(kinds, vals, x)
        if w is None:
            assert got is None
        else:
            assert _path_string(*got) == w.path
            node = k.flat_follow(kinds, *got)
            assert kinds[node] == pykernel.VAL and vals[node] == x


# -- packed permutations -----------------------------------------------------------------------------

@given(st.lists(st.integers(0, 14), max_size=15))
def test_pack_round_trip(xs):
    code = pykernel.pack(xs)
    assert pykernel.unpack(code) == tuple(xs)
    assert pykernel.packed_length(code) == len(xs)


def test_pack_rejects_out_of_range():
    with pytest.raises(ValueError):
        pykernel.pack([15])
    with pytest.raises(ValueError):
        pykernel.pack([0] * 16)


@pytest.mark.parametrize("k", KERNELS)
@pytest.mark.parametrize("xs", [(), (1,), (2, 0), (0, 1, 2), (3, 3, 1, 0), (4, 1, 3, 0, 2)])
def test_flat_perm_matches_object_perm(k, xs):
    kinds, codes = k.perm_nd_flat(xs)
    flat_vals = [pykernel.unpack(int(c)) for kd, c in zip(kinds, codes) if kd == pykernel.VAL]
    assert flat_vals == nd.values(pg.perm_nd(xs))
    assert nd.map_det(lambda c: pykernel.unpack(c), dom.flat_to_tree(kinds, codes)) == pg.perm_nd(xs)

    outputs, offsets, addrs, bits = k.perm_plan_explore(xs)
    explored = list(explore_plans(lambda p: pg.perm_plan(p, xs)))
    assert [pykernel.unpack(int(c)) for c in outputs] == [out for _p, out in explored]
    for i, (plan, _out) in enumerate(explored):
        chunk = range(offsets[i], offsets[i + 1])
        table = {bin(int(addrs[j]))[3:].replace("0", "L").replace("1", "R"): bool(bits[j])
                 for j in chunk}
        assert table == plan.bits


@pytest.mark.parametrize("k", KERNELS)
def test_perm_batch_against_permutation_oracle(k):
    lists = list(dom.lists_upto(4, range(3)))
    arr = np.zeros((len(lists), 4), dtype=np.int64)
    for i, xs in enumerate(lists):
        arr[i, :len(xs)] = xs
    rows = k.perm_batch(arr, np.array([len(xs) for xs in lists], dtype=np.int64))
    for xs, row in zip(lists, rows):
        nd_values, nd_ok, plan_runs, plan_ok, same = row.tolist()
        assert nd_values == plan_runs == factorial(len(xs))
        assert nd_ok == plan_ok == same == 1
        assert set(itertools.permutations(xs)) == set(nd.values(pg.perm_nd(xs)))


@needs_c
def test_perm_batch_compiled_equals_python():
    lists = list(dom.lists_upto(5, range(4)))
    arr = np.zeros((len(lists), 5), dtype=np.int64)
    for i, xs in enumerate(lists):
        arr[i, :len(xs)] = xs
    lengths = np.array([len(xs) for xs in lists], dtype=np.int64)
    assert np.array_equal(ckernel.perm_batch(arr, lengths), pykernel.perm_batch(arr, lengths))


# -- backend selection ----------------------------------------------------------------------------

def test_pure_python_fallback_is_selectable():
    env = {**os.environ, "NDCURRY_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", "import ndcurry; print(ndcurry.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
