"""Input domains for the law suite: tree shapes, seeded function tables, lists."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import tree as nd
from .._kernels import pykernel

LEAF, NODE = pykernel.LEAF_SHAPE, pykernel.CHOICE_SHAPE
FAIL, VAL, CHOICE = pykernel.FAIL, pykernel.VAL, pykernel.CHOICE

# g trees have depth <= 2, so at most 7 nodes
G_STRIDE = 7
T_VALUES = 4
F_VALUES = 8


@lru_cache(maxsize=None)
def _shape_list(depth: int) -> tuple[bytes, ...]:
    if depth == 0:
        return (bytes([LEAF]),)
    smaller = _shape_list(depth - 1)
    node = bytes([NODE])
    return (bytes([LEAF]),) + tuple(node + l + r for l in smaller for r in smaller)


def shape_count(depth: int) -> int:
    return len(_shape_list(depth))


@lru_cache(maxsize=4)
def shapes(depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Every binary shape of depth <= ``depth`` as concatenated preorder bytes plus offsets."""
    items = _shape_list(depth)
    lengths = np.fromiter((len(s) for s in items), dtype=np.int64, count=len(items))
    offsets = np.zeros(len(items) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    flat = np.frombuffer(b"".join(items), dtype=np.uint8)
    return flat, offsets


def shape_at(depth: int, index: int) -> bytes:
    return _shape_list(depth)[index]


@dataclass(frozen=True)
class Pairs:
    """Seeded function/predicate tables.

    Pair k supplies ``f = fmap[k]`` on 0..3, a predicate ``p = pred[k]`` on
    0..7, a predicate ``q = qpred[k]`` on 0..3 and one small tree ``g(x)`` per
    x in 0..3, flattened into ``gk/gv/glen``.
    """

    seed: int
    fmap: np.ndarray
    pred: np.ndarray
    qpred: np.ndarray
    gk: np.ndarray
    gv: np.ndarray
    glen: np.ndarray

    def __len__(self):
        return len(self.fmap)

    def f(self, k):
        table = self.fmap[k]
        return lambda x: int(table[x])

    def p(self, k):
        table = self.pred[k]
        return lambda x: bool(table[x])

    def q(self, k):
        table = self.qpred[k]
        return lambda x: bool(table[x])

    def g_tree(self, k, x) -> nd.NDTree:
        n = int(self.glen[k][x])
        return flat_to_tree(self.gk[k][x][:n], self.gv[k][x][:n])

    def g(self, k):
        trees = [self.g_tree(k, x) for x in range(T_VALUES)]
        return lambda x: trees[x]


def _random_flat(rng, depth, leaf_values):
    kinds, vals = [], []

    def go(d):
        if d and rng.random() < 0.5:
            kinds.append(CHOICE)
            vals.append(0)
            go(d - 1)
            go(d - 1)
        elif rng.random() < 0.125:
            kinds.append(FAIL)
            vals.append(0)
        else:
            kinds.append(VAL)
            vals.append(int(rng.integers(leaf_values)))

    go(depth)
    return kinds, vals


@lru_cache(maxsize=8)
def make_pairs(seed: int = 0, count: int = 32) -> Pairs:
    # a quarter of the predicates are constantly true so premises of the
    # implication-shaped lemmas are met often enough to matter
    rng = np.random.default_rng(seed)
    fmap = rng.integers(F_VALUES, size=(count, T_VALUES)).astype(np.int64)
    pred = (rng.random((count, F_VALUES)) < 0.75).astype(np.uint8)
    qpred = (rng.random((count, T_VALUES)) < 0.75).astype(np.uint8)
    pred[::4] = 1
    qpred[::4] = 1
    gk = np.zeros((count, T_VALUES, G_STRIDE), dtype=np.uint8)
    gv = np.zeros((count, T_VALUES, G_STRIDE), dtype=np.int64)
    glen = np.zeros((count, T_VALUES), dtype=np.int64)
    for k in range(count):
        for x in range(T_VALUES):
            kinds, vals = _random_flat(rng, 2, F_VALUES)
            glen[k, x] = len(kinds)
            gk[k, x, :len(kinds)] = kinds
            gv[k, x, :len(vals)] = vals
    for a in (fmap, pred, qpred, gk, gv, glen):
        a.setflags(write=False)
    return Pairs(seed, fmap, pred, qpred, gk, gv, glen)


# -- flat <-> object trees ------------------------------------------------------------

def flat_to_tree(kinds, vals) -> nd.NDTree:
    pos = 0

    def go():
        nonlocal pos
        k, v = int(kinds[pos]), int(vals[pos])
        pos += 1
        if k == CHOICE:
            left = go()
            return nd.choice(left, go())
        if k == VAL:
            return nd.val(v)
        return nd.fail()

    t = go()
    if pos != len(kinds):
        raise ValueError("trailing nodes after a complete tree")
    return t


def tree_to_flat(t: nd.NDTree):
    kinds, vals = [], []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, nd.Choice):
            kinds.append(CHOICE)
            vals.append(0)
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, nd.Val):
            kinds.append(VAL)
            vals.append(node.value)
        else:
            kinds.append(FAIL)
            vals.append(0)
    return np.array(kinds, dtype=np.uint8), np.array(vals, dtype=np.int64)


def labelled_tree(depth: int, seed: int, shape_index: int, pair: int) -> nd.NDTree:
    """The object tree the kernel builds for (shape, pair)."""
    shape = shape_at(depth, shape_index)
    kinds, vals = pykernel.label_shape(shape, seed, shape_index, pair)
    return flat_to_tree(kinds, vals)


def small_trees(depth: int, leaves=(None, 0, 1, 2, 3)) -> list[nd.NDTree]:
    """Every tree of depth <= ``depth`` over the given leaves (None is Fail)."""
    if depth == 0:
        return [nd.fail() if x is None else nd.val(x) for x in leaves]
    smaller = small_trees(depth - 1, leaves)
    return small_trees(0, leaves) + [nd.choice(l, r) for l in smaller for r in smaller]


def lists_upto(length: int, alphabet) -> itertools.chain:
    return itertools.chain.from_iterable(
        itertools.product(alphabet, repeat=n) for n in range(length + 1))


def random_lists(seed: int, trials: int, max_length: int, alphabet) -> list[tuple]:
    rng = np.random.default_rng(seed)
    alphabet = list(alphabet)
    out = []
    for _ in range(trials):
        n = int(rng.integers(max_length + 1))
        out.append(tuple(int(alphabet[i]) for i in rng.integers(len(alphabet), size=n)))
    return out
