"""Pure-Python kernels over flat tree encodings.

This module and ``_ckernel.pyx`` implement the same functions with the
same results; the compiled one is preferred at import time.

Flat trees are preorder arrays: ``kinds`` holds FAIL/VAL/CHOICE per node
and ``vals`` the payload of VAL nodes.  A witness is a bit path (bit i set
means "right" at step i) plus its length.

Lists in the permutation kernels are packed into one integer, one nibble
per element holding ``element + 1`` with the head in the lowest nibble,
so elements must lie in 0..14 and lists hold at most 15 of them.
"""

import numpy as np

FAIL, VAL, CHOICE = 0, 1, 2
LEAF_SHAPE, CHOICE_SHAPE = 1, 2

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
K_PAIR = 0xBF58476D1CE4E5B9
K_LEAF = 0x94D049BB133111EB

MAX_ELEMENT = 14
MAX_LIST = 15

BACKEND = "python"


def splitmix64(x):
    x = (x + GOLDEN) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


LEAVES_PER_WORD = 12


def leaf_label(seed, shape_index, pair, leaf):
    """(kind, value) of one leaf: FAIL one time in eight, else a value in 0..3.

    Each 64-bit hash supplies five bits to each of twelve consecutive leaves.
    """
    word, lane = divmod(leaf, LEAVES_PER_WORD)
    h = splitmix64((seed + shape_index * GOLDEN + pair * K_PAIR + word * K_LEAF) & MASK)
    bits = (h >> (5 * lane)) & 31
    if bits % 8 == 0:
        return FAIL, 0
    return VAL, bits >> 3


def label_shape(shape, seed, shape_index, pair):
    kinds = np.empty(len(shape), dtype=np.uint8)
    vals = np.zeros(len(shape), dtype=np.int64)
    leaf = 0
    for i, s in enumerate(shape):
        if s == CHOICE_SHAPE:
            kinds[i] = CHOICE
        else:
            kinds[i], vals[i] = leaf_label(seed, shape_index, pair, leaf)
            leaf += 1
    return kinds, vals


# -- flat tree primitives ---------------------------------------------------------------

def _ends(kinds, n):
    ends = [0] * n
    for i in range(n - 1, -1, -1):
        if kinds[i] == CHOICE:
            ends[i] = ends[ends[i + 1]]
        else:
            ends[i] = i + 1
    return ends


def subtree_ends(kinds):
    return np.array(_ends(kinds, len(kinds)), dtype=np.int64)


def flat_map(kinds, vals, table):
    out = np.array(vals, dtype=np.int64, copy=True)
    for i in range(len(kinds)):
        if kinds[i] == VAL:
            out[i] = table[vals[i]]
    return np.array(kinds, dtype=np.uint8, copy=True), out


def flat_satisfy(kinds, vals, pred):
    for i in range(len(kinds)):
        if kinds[i] == VAL and not pred[vals[i]]:
            return False
    return True


def _bind(kinds, vals, n, gk, gv, glen):
    ok, ov = [], []
    for i in range(n):
        if kinds[i] == VAL:
            x = vals[i]
            for j in range(glen[x]):
                ok.append(gk[x][j])
                ov.append(gv[x][j])
        else:
            ok.append(kinds[i])
            ov.append(vals[i])
    return ok, ov


def flat_bind(kinds, vals, gk, gv, glen):
    ok, ov = _bind(kinds, vals, len(kinds), gk, gv, glen)
    return np.array(ok, dtype=np.uint8), np.array(ov, dtype=np.int64)


def _first_paths(kinds, vals, n, nvalues):
    """Leftmost (path, length) for each value < nvalues; length -1 if absent."""
    paths = [0] * nvalues
    lens = [-1] * nvalues
    ends = _ends(kinds, n)
    stack = [(0, 0, 0)]
    while stack:
        i, path, depth = stack.pop()
        k = kinds[i]
        if k == CHOICE:
            stack.append((ends[i + 1], path | (1 << depth), depth + 1))
            stack.append((i + 1, path, depth + 1))
        elif k == VAL and lens[vals[i]] < 0:
            paths[vals[i]] = path
            lens[vals[i]] = depth
    return paths, lens


def flat_member(kinds, vals, value):
    """Leftmost witness of ``value`` as (path, length), or None."""
    n = len(kinds)
    ends = _ends(kinds, n)
    stack = [(0, 0, 0)]
    while stack:
        i, path, depth = stack.pop()
        if kinds[i] == CHOICE:
            stack.append((ends[i + 1], path | (1 << depth), depth + 1))
            stack.append((i + 1, path, depth + 1))
        elif kinds[i] == VAL and vals[i] == value:
            return path, depth
    return None


def _follow(kinds, ends, path, length):
    i = 0
    for step in range(length):
        if kinds[i] != CHOICE:
            return -1
        i = ends[i + 1] if (path >> step) & 1 else i + 1
    return i


def flat_follow(kinds, path, length):
    return _follow(kinds, _ends(kinds, len(kinds)), path, length)


def _witness_ok(kinds, vals, ends, path, length, value):
    i = _follow(kinds, ends, path, length)
    return i >= 0 and kinds[i] == VAL and vals[i] == value


# -- batch law engine -------------------------------------------------------------------

# stats layout shared with the compiled kernel
STAT_FIELDS = (
    "cases", "satisfy_map_fail", "satisfy_bind_fail", "always_map_fail",
    "bind_premise_true", "always_premise_true", "member_map_fail",
    "member_bind_fail", "if_intro_fail", "witness_checks",
    "first_fail_shape", "first_fail_pair", "first_fail_law",
)
LAW_CODES = {1: "satisfy-map", 2: "satisfy-bind", 3: "always-map",
             4: "member-map", 5: "member-bind", 6: "if-intro"}
# bit (code - 1) of ``mask`` enables law ``code``
ALL_LAWS = 63


def tree_laws(shapes, offsets, seed, fmap, pred, qpred, gk, gv, glen,
              shape_start=0, shape_stop=-1, mask=ALL_LAWS):
    """Check the combinator and membership laws on every (shape, pair).

    ``fmap[k]`` maps 0..3 to 0..7, ``pred[k]`` is a predicate on 0..7,
    ``qpred[k]`` a predicate on 0..3, and ``gk/gv/glen[k][x]`` the flat
    tree returned by the k-th non-deterministic function on x.
    """
    nshapes = len(offsets) - 1
    if shape_stop < 0:
        shape_stop = nshapes
    npairs = len(fmap)
    stats = [0] * len(STAT_FIELDS)
    stats[10] = stats[11] = stats[12] = -1

    def fail(code, s, k):
        stats[{1: 1, 2: 2, 3: 3, 4: 6, 5: 7, 6: 8}[code]] += 1
        if stats[12] < 0:
            stats[10], stats[11], stats[12] = s, k, code

    # leftmost witnesses inside each g tree
    gfirst = [[_first_paths(gk[k][x], gv[k][x], glen[k][x], 8) for x in range(4)]
              for k in range(npairs)]

    on = {code: bool(mask >> (code - 1) & 1) for code in LAW_CODES}
    for s in range(shape_start, shape_stop):
        shape = shapes[offsets[s]:offsets[s + 1]]
        n = len(shape)
        for k in range(npairs):
            stats[0] += 1
            kinds, vals = label_shape(shape, seed, s, k)
            kinds = kinds.tolist()
            vals = vals.tolist()
            f, p, q = fmap[k], pred[k], qpred[k]

            mk = list(kinds)
            mv = [f[v] if kinds[i] == VAL else v for i, v in enumerate(vals)]
            if on[1]:
                lhs = all(p[mv[i]] for i in range(n) if mk[i] == VAL)
                rhs = all(p[f[vals[i]]] for i in range(n) if kinds[i] == VAL)
                if lhs != rhs:
                    fail(1, s, k)

            bk, bv = _bind(kinds, vals, n, gk[k], gv[k], glen[k])
            if on[2]:
                lhs = all(p[bv[i]] for i in range(len(bk)) if bk[i] == VAL)
                premise = True
                for i in range(n):
                    if kinds[i] == VAL:
                        x = vals[i]
                        if not all(p[gv[k][x][j]] for j in range(glen[k][x]) if gk[k][x][j] == VAL):
                            premise = False
                if premise:
                    stats[4] += 1
                if premise and not lhs or lhs != premise:
                    fail(2, s, k)

            if on[3]:
                qv = [q[v] if kinds[i] == VAL else 0 for i, v in enumerate(vals)]
                always = all(qv[i] for i in range(n) if kinds[i] == VAL)
                premise = all(q[vals[i]] for i in range(n) if kinds[i] == VAL)
                if premise:
                    stats[5] += 1
                if premise and not always or always != premise:
                    fail(3, s, k)

            t_ends = _ends(kinds, n)
            m_ends = _ends(mk, n)
            b_ends = _ends(bk, len(bk))
            first, flen = _first_paths(kinds, vals, n, 4)
            present = [x for x in range(4) if flen[x] >= 0]
            for x in present:
                if on[4]:
                    stats[9] += 1
                    if not _witness_ok(mk, mv, m_ends, first[x], flen[x], f[x]):
                        fail(4, s, k)
                if not on[5]:
                    continue
                gp, gl = gfirst[k][x]
                for y in range(8):
                    if gl[y] < 0:
                        continue
                    stats[9] += 1
                    path = first[x] | (gp[y] << flen[x])
                    if not _witness_ok(bk, bv, b_ends, path, flen[x] + gl[y], y):
                        fail(5, s, k)
            if not on[6]:
                continue
            for x in present:
                for y in present:
                    for c in (0, 1):
                        stats[9] += 1
                        target = x if c else y
                        path, length = (first[x], flen[x]) if c else (first[y], flen[y])
                        if not _witness_ok(kinds, vals, t_ends, path, length, target):
                            fail(6, s, k)
    return np.array(stats, dtype=np.int64)


# -- packed lists ---------------------------------------------------------------------------

def pack(xs):
    if len(xs) > MAX_LIST:
        raise ValueError(f"lists longer than {MAX_LIST} cannot be packed")
    code = 0
    for x in reversed(xs):
        if not 0 <= x <= MAX_ELEMENT:
            raise ValueError(f"element {x} outside 0..{MAX_ELEMENT}")
        code = (code << 4) | (x + 1)
    return code


def unpack(code):
    out = []
    while code:
        out.append((code & 15) - 1)
        code >>= 4
    return tuple(out)


def packed_length(code):
    n = 0
    while code:
        n += 1
        code >>= 4
    return n


def _ndinsert_nd(x, ys, kinds, codes):
    if ys == 0:
        kinds.append(VAL)
        codes.append(x + 1)
        return
    kinds.append(CHOICE)
    codes.append(0)
    kinds.append(VAL)
    codes.append((ys << 4) | (x + 1))
    start = len(kinds)
    _ndinsert_nd(x, ys >> 4, kinds, codes)
    y = ys & 15
    for i in range(start, len(kinds)):
        if kinds[i] == VAL:
            codes[i] = (codes[i] << 4) | y


def _perm_nd(xs, i):
    if i == len(xs):
        return [VAL], [0]
    tk, tc = _perm_nd(xs, i + 1)
    kinds, codes = [], []
    for j in range(len(tk)):
        if tk[j] == VAL:
            _ndinsert_nd(xs[i], tc[j], kinds, codes)
        else:
            kinds.append(tk[j])
            codes.append(tc[j])
    return kinds, codes


def perm_nd_flat(xs):
    pack(xs)
    kinds, codes = _perm_nd(list(xs), 0)
    return np.array(kinds, dtype=np.uint8), np.array(codes, dtype=np.int64)


class _Explorer:
    def __init__(self):
        self.fixed = {}
        self.trail = []

    def choose(self, address):
        if address not in self.fixed:
            self.fixed[address] = 0
            self.trail.append(address)
        return self.fixed[address]

    def advance(self):
        while self.trail and self.fixed[self.trail[-1]]:
            del self.fixed[self.trail.pop()]
        if not self.trail:
            return False
        self.fixed[self.trail[-1]] = 1
        return True


def _ndinsert_plan(ex, address, x, ys):
    if ys == 0:
        return x + 1
    if ex.choose(address):
        return (ys << 4) | (x + 1)
    return (_ndinsert_plan(ex, 2 * address, x, ys >> 4) << 4) | (ys & 15)


def _perm_plan(ex, address, xs, i):
    if i == len(xs):
        return 0
    rest = _perm_plan(ex, 2 * address + 1, xs, i + 1)
    return _ndinsert_plan(ex, 2 * address, xs[i], rest)


def perm_plan_explore(xs):
    """Outputs of perm under every explored plan, plus each plan's consulted bits.

    Addresses are integers: the root is 1, lchoice doubles, rchoice doubles
    and adds one.  Returns (outputs, plan_offsets, plan_addresses, plan_bits).
    """
    pack(xs)
    xs = list(xs)
    ex = _Explorer()
    outputs, offsets, addrs, bits = [], [0], [], []
    while True:
        outputs.append(_perm_plan(ex, 1, xs, 0))
        for a in ex.trail:
            addrs.append(a)
            bits.append(ex.fixed[a])
        offsets.append(len(addrs))
        if not ex.advance():
            break
    return (np.array(outputs, dtype=np.int64), np.array(offsets, dtype=np.int64),
            np.array(addrs, dtype=np.int64), np.array(bits, dtype=np.uint8))


PERM_FIELDS = ("nd_values", "nd_length_ok", "plan_runs", "plan_length_ok", "sets_equal")


def perm_batch(lists, lengths):
    """Per list: value count and length check for both encodings, and set agreement."""
    rows = np.zeros((len(lengths), len(PERM_FIELDS)), dtype=np.int64)
    for r in range(len(lengths)):
        n = int(lengths[r])
        xs = [int(v) for v in lists[r][:n]]
        kinds, codes = perm_nd_flat(xs)
        nd_vals = [int(c) for k, c in zip(kinds, codes) if k == VAL]
        outputs = perm_plan_explore(xs)[0].tolist()
        rows[r, 0] = len(nd_vals)
        rows[r, 1] = all(packed_length(c) == n for c in nd_vals)
        rows[r, 2] = len(outputs)
        rows[r, 3] = all(packed_length(c) == n for c in outputs)
        rows[r, 4] = set(nd_vals) == set(outputs)
    return rows
