# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels over flat tree encodings; see ``_pykernel`` for the layout."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int8_t, uint8_t, int64_t, uint64_t
from libc.stdlib cimport malloc, free, qsort
from libc.string cimport memcpy, memset

cnp.import_array()

DEF FAIL = 0
DEF VAL = 1
DEF CHOICE = 2
DEF CHOICE_SHAPE = 2

DEF GOLDEN = 0x9E3779B97F4A7C15
DEF K_PAIR = 0xBF58476D1CE4E5B9
DEF K_LEAF = 0x94D049BB133111EB

DEF MAX_ELEMENT = 14
DEF MAX_LIST = 15

BACKEND = "cython"


cdef inline uint64_t _splitmix64(uint64_t x) noexcept nogil:
    x = x + <uint64_t>GOLDEN
    x = (x ^ (x >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    x = (x ^ (x >> 27)) * <uint64_t>0x94D049BB133111EB
    return x ^ (x >> 31)


def splitmix64(x):
    return _splitmix64(<uint64_t>x)


DEF LEAVES_PER_WORD = 12


cdef inline uint64_t _label_word(uint64_t seed, int64_t s, int64_t k, int64_t word) noexcept nogil:
    return _splitmix64(seed + <uint64_t>s * <uint64_t>GOLDEN + <uint64_t>k * <uint64_t>K_PAIR
                       + <uint64_t>word * <uint64_t>K_LEAF)


cdef inline void _label(uint64_t seed, int64_t s, int64_t k, int64_t leaf,
                        uint8_t* kind, int64_t* value) noexcept nogil:
    # five bits per leaf: FAIL when the low three are zero, else VAL carrying the top two
    cdef uint64_t bits = (_label_word(seed, s, k, leaf // LEAVES_PER_WORD)
                          >> (5 * (leaf % LEAVES_PER_WORD))) & 31
    cdef uint8_t isval = (bits & 7) != 0
    kind[0] = isval
    value[0] = <int64_t>(bits >> 3) * isval


def leaf_label(seed, shape_index, pair, leaf):
    cdef uint8_t kind
    cdef int64_t value
    _label(<uint64_t>seed, shape_index, pair, leaf, &kind, &value)
    return kind, value


def label_shape(shape, seed, shape_index, pair):
    cdef Py_ssize_t n = len(shape), i
    cdef int64_t leaf = 0
    kinds = np.empty(n, dtype=np.uint8)
    vals = np.zeros(n, dtype=np.int64)
    cdef uint8_t[:] kv = kinds
    cdef int64_t[:] vv = vals
    for i in range(n):
        if shape[i] == CHOICE_SHAPE:
            kv[i] = CHOICE
        else:
            _label(<uint64_t>seed, shape_index, pair, leaf, &kv[i], &vv[i])
            leaf += 1
    return kinds, vals


# -- flat tree primitives -------------------------------------------------------------

cdef inline void _ends(const uint8_t* kinds, Py_ssize_t n, int64_t* ends) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n - 1, -1, -1):
        if kinds[i] == CHOICE:
            ends[i] = ends[ends[i + 1]]
        else:
            ends[i] = i + 1


def subtree_ends(kinds):
    cdef const uint8_t[:] kv = np.ascontiguousarray(kinds, dtype=np.uint8)
    out = np.zeros(len(kv), dtype=np.int64)
    cdef int64_t[:] ov = out
    if len(kv):
        _ends(&kv[0], len(kv), &ov[0])
    return out


def flat_map(kinds, vals, table):
    cdef const uint8_t[:] kv = np.ascontiguousarray(kinds, dtype=np.uint8)
    cdef const int64_t[:] vv = np.ascontiguousarray(vals, dtype=np.int64)
    cdef const int64_t[:] tv = np.ascontiguousarray(table, dtype=np.int64)
    out = np.array(vv, dtype=np.int64)
    cdef int64_t[:] ov = out
    cdef Py_ssize_t i
    for i in range(len(kv)):
        if kv[i] == VAL:
            ov[i] = tv[vv[i]]
    return np.array(kv, dtype=np.uint8), out


def flat_satisfy(kinds, vals, pred):
    cdef const uint8_t[:] kv = np.ascontiguousarray(kinds, dtype=np.uint8)
    cdef const int64_t[:] vv = np.ascontiguousarray(vals, dtype=np.int64)
    cdef const uint8_t[:] pv = np.ascontiguousarray(pred, dtype=np.uint8)
    cdef Py_ssize_t i
    for i in range(len(kv)):
        if kv[i] == VAL and not pv[vv[i]]:
            return False
    return True


cdef Py_ssize_t _bind(const uint8_t* kinds, const int64_t* vals, Py_ssize_t n,
                      const uint8_t* gk, const int64_t* gv, const int64_t* glen,
                      Py_ssize_t gstride, uint8_t* ok, int64_t* ov) noexcept nogil:
    cdef Py_ssize_t i, j, m = 0
    cdef int64_t x
    for i in range(n):
        if kinds[i] == VAL:
            x = vals[i]
            for j in range(glen[x]):
                ok[m] = gk[x * gstride + j]
                ov[m] = gv[x * gstride + j]
                m += 1
        else:
            ok[m] = kinds[i]
            ov[m] = vals[i]
            m += 1
    return m


def flat_bind(kinds, vals, gk, gv, glen):
    cdef const uint8_t[:] kv = np.ascontiguousarray(kinds, dtype=np.uint8)
    cdef const int64_t[:] vv = np.ascontiguousarray(vals, dtype=np.int64)
    cdef const uint8_t[:, ::1] gkv = np.ascontiguousarray(gk, dtype=np.uint8)
    cdef const int64_t[:, ::1] gvv = np.ascontiguousarray(gv, dtype=np.int64)
    cdef const int64_t[:] glv = np.ascontiguousarray(glen, dtype=np.int64)
    cdef Py_ssize_t n = len(kv), cap = n * gkv.shape[1] + n
    ok = np.zeros(cap, dtype=np.uint8)
    ov = np.zeros(cap, dtype=np.int64)
    cdef uint8_t[:] okv = ok
    cdef int64_t[:] ovv = ov
    if n == 0:
        return ok[:0], ov[:0]
    cdef Py_ssize_t m = _bind(&kv[0], &vv[0], n, &gkv[0, 0], &gvv[0, 0], &glv[0],
                              gkv.shape[1], &okv[0], &ovv[0])
    return ok[:m], ov[:m]


cdef void _first_paths(const uint8_t* kinds, const int64_t* vals, Py_ssize_t n,
                       const int64_t* ends, int nvalues, int64_t* paths, int64_t* lens,
                       int64_t* stack) noexcept nogil:
    # stack holds (node, path, depth) triples
    cdef int v
    cdef Py_ssize_t top = 0
    cdef int64_t i, path, depth
    for v in range(nvalues):
        paths[v] = 0
        lens[v] = -1
    stack[0] = 0
    stack[1] = 0
    stack[2] = 0
    top = 1
    while top:
        top -= 1
        i = stack[3 * top]
        path = stack[3 * top + 1]
        depth = stack[3 * top + 2]
        if kinds[i] == CHOICE:
            stack[3 * top] = ends[i + 1]
            stack[3 * top + 1] = path | (<int64_t>1 << depth)
            stack[3 * top + 2] = depth + 1
            stack[3 * top + 3] = i + 1
            stack[3 * top + 4] = path
            stack[3 * top + 5] = depth + 1
            top += 2
        elif kinds[i] == VAL and vals[i] < nvalues and lens[vals[i]] < 0:
            paths[vals[i]] = path
            lens[vals[i]] = depth


def flat_member(kinds, vals, value):
    cdef const uint8_t[:] kv = np.ascontiguousarray(kinds, dtype=np.uint8)
    cdef const int64_t[:] vv = np.ascontiguousarray(vals, dtype=np.int64)
    cdef Py_ssize_t n = len(kv)
    if n == 0 or value < 0:
        return None
    cdef int nvalues = <int>max(vv) + 1 if n else 0
    if value >= nvalues:
        return None
    ends = np.zeros(n, dtype=np.int64)
    paths = np.zeros(nvalues, dtype=np.int64)
    lens = np.zeros(nvalues, dtype=np.int64)
    stack = np.zeros(3 * (n + 2), dtype=np.int64)
    cdef int64_t[:] ev = ends, pv = paths, lv = lens, sv = stack
    _ends(&kv[0], n, &ev[0])
    _first_paths(&kv[0], &vv[0], n, &ev[0], nvalues, &pv[0], &lv[0], &sv[0])
    if lv[value] < 0:
        return None
    return int(pv[value]), int(lv[value])


cdef inline int64_t _follow(const uint8_t* kinds, const int64_t* ends,
                            int64_t path, int64_t length) noexcept nogil:
    cdef int64_t i = 0, step
    for step in range(length):
        if kinds[i] != CHOICE:
            return -1
        if (path >> step) & 1:
            i = ends[i + 1]
        else:
            i = i + 1
    return i


def flat_follow(kinds, path, length):
    cdef const uint8_t[:] kv = np.ascontiguousarray(kinds, dtype=np.uint8)
    ends = np.zeros(len(kv), dtype=np.int64)
    cdef int64_t[:] ev = ends
    _ends(&kv[0], len(kv), &ev[0])
    return _follow(&kv[0], &ev[0], path, length)


cdef inline bint _witness_ok(const uint8_t* kinds, const int64_t* vals, const int64_t* ends,
                             int64_t path, int64_t length, int64_t value) noexcept nogil:
    cdef int64_t i = _follow(kinds, ends, path, length)
    return i >= 0 and kinds[i] == VAL and vals[i] == value


# -- batch law engine -----------------------------------------------------------------

STAT_FIELDS = (
    "cases", "satisfy_map_fail", "satisfy_bind_fail", "always_map_fail",
    "bind_premise_true", "always_premise_true", "member_map_fail",
    "member_bind_fail", "if_intro_fail", "witness_checks",
    "first_fail_shape", "first_fail_pair", "first_fail_law",
)
LAW_CODES = {1: "satisfy-map", 2: "satisfy-bind", 3: "always-map",
             4: "member-map", 5: "member-bind", 6: "if-intro"}

DEF LAW_BIT_1 = 1
DEF LAW_BIT_2 = 2
DEF LAW_BIT_3 = 4
DEF LAW_BIT_4 = 8
DEF LAW_BIT_5 = 16
DEF LAW_BIT_6 = 32
ALL_LAWS = 63


cdef inline int _slot(int code) noexcept nogil:
    return code if code <= 3 else code + 2


cdef inline void _fail(int64_t* stats, int code, int64_t s, int64_t k) noexcept nogil:
    stats[_slot(code)] += 1
    if stats[12] < 0:
        stats[10] = s
        stats[11] = k
        stats[12] = code


cdef inline bint _follow_ok(const uint8_t* kinds, const uint8_t* vals, const uint8_t* lsize,
                            int64_t start, int64_t path, int64_t length,
                            int64_t value) noexcept nogil:
    # walk from ``start``; a right step skips the left subtree
    cdef int64_t i = start, step, bit
    for step in range(length):
        if kinds[i] != CHOICE:
            return False
        bit = (path >> step) & 1
        i = i + 1 + (lsize[i] & -bit)
    return kinds[i] == VAL and vals[i] == value


cdef inline int64_t _walk(const uint8_t* kinds, const uint8_t* lsize,
                          int64_t path, int64_t length) noexcept nogil:
    cdef int64_t i = 0, step, bit
    for step in range(length):
        if kinds[i] != CHOICE:
            return -1
        bit = (path >> step) & 1
        i = i + 1 + (lsize[i] & -bit)
    return i


cdef inline void _walk4(const uint8_t* kinds, const uint8_t* lsize, int64_t start,
                        const int64_t* path, const int64_t* length, int64_t maxlen,
                        int64_t* out) noexcept nogil:
    # four walks in lockstep, branch-free; out[x] is -1 when walk x leaves the tree
    cdef int64_t pos0 = start, pos1 = start, pos2 = start, pos3 = start
    cdef int64_t ok0 = 1, ok1 = 1, ok2 = 1, ok3 = 1, step, act, ch
    for step in range(maxlen):
        act = step < length[0]
        ch = kinds[pos0] == CHOICE
        ok0 &= (act ^ 1) | ch
        pos0 += (act & ch) * (1 + (lsize[pos0] & -((path[0] >> step) & 1)))
        act = step < length[1]
        ch = kinds[pos1] == CHOICE
        ok1 &= (act ^ 1) | ch
        pos1 += (act & ch) * (1 + (lsize[pos1] & -((path[1] >> step) & 1)))
        act = step < length[2]
        ch = kinds[pos2] == CHOICE
        ok2 &= (act ^ 1) | ch
        pos2 += (act & ch) * (1 + (lsize[pos2] & -((path[2] >> step) & 1)))
        act = step < length[3]
        ch = kinds[pos3] == CHOICE
        ok3 &= (act ^ 1) | ch
        pos3 += (act & ch) * (1 + (lsize[pos3] & -((path[3] >> step) & 1)))
    out[0] = pos0 if ok0 else -1
    out[1] = pos1 if ok1 else -1
    out[2] = pos2 if ok2 else -1
    out[3] = pos3 if ok3 else -1


def tree_laws(shapes, offsets, seed, fmap, pred, qpred, gk, gv, glen,
              shape_start=0, shape_stop=-1, mask=ALL_LAWS):
    cdef const uint8_t[:] shv = np.ascontiguousarray(shapes, dtype=np.uint8)
    cdef const int64_t[:] offv = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const int64_t[:, ::1] fv = np.ascontiguousarray(fmap, dtype=np.int64)
    cdef const uint8_t[:, ::1] pv = np.ascontiguousarray(pred, dtype=np.uint8)
    cdef const uint8_t[:, ::1] qv = np.ascontiguousarray(qpred, dtype=np.uint8)
    cdef const uint8_t[:, :, ::1] gkv = np.ascontiguousarray(gk, dtype=np.uint8)
    cdef const int64_t[:, :, ::1] gvv = np.ascontiguousarray(gv, dtype=np.int64)
    cdef const int64_t[:, ::1] glv = np.ascontiguousarray(glen, dtype=np.int64)
    cdef uint64_t useed = <uint64_t>seed
    cdef Py_ssize_t nshapes = offv.shape[0] - 1
    cdef Py_ssize_t start = shape_start
    cdef Py_ssize_t stop = nshapes if shape_stop < 0 else shape_stop
    cdef Py_ssize_t npairs = fv.shape[0], gstride = gkv.shape[2]
    cdef Py_ssize_t maxn = 1, s, k, i, j, n, m, base, nleaf, nchoice, li
    for s in range(start, stop):
        maxn = max(maxn, offv[s + 1] - offv[s])
    cdef Py_ssize_t cap = maxn * (gstride + 1) + 1
    # subtree sizes of bind results are stored in bytes
    if ((maxn + 1) // 2) * gstride + maxn // 2 > 255:
        raise ValueError("tree shapes too large for the compiled law kernel")
    if gstride > 7:
        raise ValueError("g trees must have at most 7 nodes")

    stats_arr = np.zeros(len(STAT_FIELDS), dtype=np.int64)
    cdef int64_t[:] stv = stats_arr
    cdef int64_t* stats = &stv[0]
    stats[10] = -1
    stats[11] = -1
    stats[12] = -1

    # per pair tables.  Node blocks for bind are indexed by kind * 4 + value:
    # a VAL leaf expands to g(value), FAIL and CHOICE copy themselves.
    gpaths_arr = np.zeros((npairs, 4, 8), dtype=np.int64)
    glens_arr = np.zeros((npairs, 4, 8), dtype=np.int64)
    gys_arr = np.zeros((npairs, 4, 8), dtype=np.int64)
    gny_arr = np.zeros((npairs, 4), dtype=np.int64)
    gsat_arr = np.ones((npairs, 4), dtype=np.uint8)
    bk8_arr = np.zeros((npairs, 12), dtype=np.uint64)
    bv8_arr = np.zeros((npairs, 12), dtype=np.uint64)
    bl8_arr = np.zeros((npairs, 12), dtype=np.uint64)
    blen_arr = np.ones((npairs, 12), dtype=np.int64)
    bmask_arr = np.zeros((npairs, 4), dtype=np.uint64)
    gvalid_arr = np.ones((npairs, 4), dtype=np.uint8)
    cdef int64_t[:, :, ::1] gpaths = gpaths_arr, glens = glens_arr, gys = gys_arr
    cdef int64_t[:, ::1] gny = gny_arr, blen = blen_arr
    cdef uint8_t[:, ::1] gsat = gsat_arr
    cdef uint64_t[:, ::1] bk8 = bk8_arr, bv8 = bv8_arr, bl8 = bl8_arr, bmask = bmask_arr
    cdef uint8_t[:, ::1] gvalid = gvalid_arr
    cdef uint8_t* gbytes

    cdef int64_t lawmask = mask
    cdef bint need_bind = lawmask & (LAW_BIT_2 | LAW_BIT_5)
    cdef bint need_members = lawmask & (LAW_BIT_4 | LAW_BIT_5 | LAW_BIT_6)

    cdef uint8_t* kinds = <uint8_t*>malloc(cap + 8)
    cdef uint8_t* vals = <uint8_t*>malloc(cap + 8)
    cdef uint8_t* mv = <uint8_t*>malloc(cap + 8)
    cdef uint8_t* qm = <uint8_t*>malloc(cap + 8)
    cdef uint8_t* tls = <uint8_t*>malloc(cap + 8)
    cdef uint8_t* bk = <uint8_t*>malloc(cap + 8)
    cdef uint8_t* bv = <uint8_t*>malloc(cap + 8)
    cdef uint8_t* bls = <uint8_t*>malloc(cap + 8)
    cdef int64_t* bpos = <int64_t*>malloc((cap + 1) * sizeof(int64_t))
    cdef int64_t* t_ends = <int64_t*>malloc((cap + 1) * sizeof(int64_t))
    cdef int64_t* npath = <int64_t*>malloc((cap + 1) * sizeof(int64_t))
    cdef int64_t* ndepth = <int64_t*>malloc((cap + 1) * sizeof(int64_t))
    cdef int64_t* leaves = <int64_t*>malloc((cap + 1) * sizeof(int64_t))
    cdef int64_t* choices = <int64_t*>malloc((cap + 1) * sizeof(int64_t))
    cdef int64_t* stack = <int64_t*>malloc(3 * (cap + 2) * sizeof(int64_t))
    cdef int64_t* g_ends = <int64_t*>malloc(8 * sizeof(int64_t))
    cdef int64_t first[5]
    cdef int64_t wlen[4]
    cdef int64_t tnode[4]
    cdef int64_t bnode[4]
    cdef int64_t maxlen, present, invalid
    cdef int64_t flen[5]
    cdef bint tvalid[4]
    cdef int64_t leaf, x, y, c, path, v, isval, slot, node, idx, bad, bad2
    cdef uint64_t word, h = 0
    cdef uint8_t kind
    cdef int64_t value
    cdef bint lhs, rhs, premise, always, ok
    cdef const int64_t* f_row
    cdef const uint8_t* p_row
    cdef const uint8_t* q_row
    cdef const uint8_t* gsat_row
    cdef const uint64_t* bk_row
    cdef const uint64_t* bv_row
    cdef const uint64_t* bl_row
    cdef const int64_t* blen_row
    cdef int64_t cases = 0, checks = 0, bind_premises = 0, always_premises = 0
    try:
        for k in range(npairs):
            for x in range(4):
                n = glv[k, x]
                if n < 1 or n > 7:
                    raise ValueError("g trees must have between 1 and 7 nodes")
                _ends(&gkv[k, x, 0], n, g_ends)
                _first_paths(&gkv[k, x, 0], &gvv[k, x, 0], n, g_ends, 8,
                             &gpaths[k, x, 0], &glens[k, x, 0], stack)
                for y in range(8):
                    if glens[k, x, y] >= 0:
                        gys[k, x, gny[k, x]] = y
                        gny[k, x] += 1
                idx = VAL * 4 + x
                blen[k, idx] = n
                for j in range(n):
                    if gkv[k, x, j] == VAL and not pv[k, gvv[k, x, j]]:
                        gsat[k, x] = 0
                    if gvv[k, x, j] > 255 or gvv[k, x, j] < 0:
                        raise ValueError("g values must fit in a byte")
                    (<uint8_t*>&bk8[k, idx])[j] = gkv[k, x, j]
                    (<uint8_t*>&bv8[k, idx])[j] = <uint8_t>gvv[k, x, j]
                    if gkv[k, x, j] == CHOICE:
                        (<uint8_t*>&bl8[k, idx])[j] = <uint8_t>(g_ends[j + 1] - j - 1)
                # inner witnesses followed inside g(x)'s own block
                bmask[k, x] = (<uint64_t>1 << (8 * n)) - 1
                for j in range(gny[k, x]):
                    y = gys[k, x, j]
                    if not _follow_ok(<uint8_t*>&bk8[k, idx], <uint8_t*>&bv8[k, idx],
                                      <uint8_t*>&bl8[k, idx], 0, gpaths[k, x, y],
                                      glens[k, x, y], y):
                        gvalid[k, x] = 0
            (<uint8_t*>&bk8[k, FAIL * 4])[0] = FAIL
            (<uint8_t*>&bk8[k, CHOICE * 4])[0] = CHOICE

        with nogil:
            for s in range(start, stop):
                base = offv[s]
                n = offv[s + 1] - base
                # shape-level data shared by all pairs
                nleaf = 0
                nchoice = 0
                for i in range(n):
                    if shv[base + i] == CHOICE_SHAPE:
                        kinds[i] = CHOICE
                        choices[nchoice] = i
                        nchoice += 1
                    else:
                        kinds[i] = VAL
                        leaves[nleaf] = i
                        nleaf += 1
                    vals[i] = 0
                    mv[i] = 0
                    qm[i] = 0
                    tls[i] = 0
                _ends(kinds, n, t_ends)
                npath[0] = 0
                ndepth[0] = 0
                for li in range(nchoice):
                    i = choices[li]
                    tls[i] = <uint8_t>(t_ends[i + 1] - i - 1)
                    npath[i + 1] = npath[i]
                    ndepth[i + 1] = ndepth[i] + 1
                    npath[t_ends[i + 1]] = npath[i] | (<int64_t>1 << ndepth[i])
                    ndepth[t_ends[i + 1]] = ndepth[i] + 1

                for k in range(npairs):
                    cases += 1
                    f_row = &fv[k, 0]
                    p_row = &pv[k, 0]
                    q_row = &qv[k, 0]
                    gsat_row = &gsat[k, 0]
                    bk_row = &bk8[k, 0]
                    bv_row = &bv8[k, 0]
                    bl_row = &bl8[k, 0]
                    blen_row = &blen[k, 0]
                    for li in range(nleaf):
                        if li % LEAVES_PER_WORD == 0:
                            h = _label_word(useed, s, k, li // LEAVES_PER_WORD)
                        else:
                            h = h >> 5
                        i = leaves[li]
                        isval = (h & 7) != 0
                        kinds[i] = <uint8_t>isval
                        vals[i] = <uint8_t>(((h >> 3) & 3) * isval)
                    # map_det: VAL leaves take f, FAIL leaves keep payload 0
                    for li in range(nleaf):
                        i = leaves[li]
                        mv[i] = <uint8_t>(f_row[vals[i]] * kinds[i])
                    m = 0
                    if need_bind:
                        for i in range(n):
                            bpos[i] = m
                            idx = kinds[i] * 4 + vals[i]
                            # unaligned 8-byte stores (x86-64 and arm64 allow them)
                            (<uint64_t*>&bk[m])[0] = bk_row[idx]
                            (<uint64_t*>&bv[m])[0] = bv_row[idx]
                            (<uint64_t*>&bls[m])[0] = bl_row[idx]
                            m += blen_row[idx]
                        bpos[n] = m
                        for li in range(nchoice):
                            i = choices[li]
                            bls[bpos[i]] = <uint8_t>(bpos[t_ends[i + 1]] - bpos[i] - 1)

                    # satisfy-map: map, then satisfy; versus satisfy with p . f
                    if lawmask & LAW_BIT_1:
                        bad = 0
                        bad2 = 0
                        for li in range(nleaf):
                            i = leaves[li]
                            isval = kinds[i] == VAL
                            bad |= isval & (p_row[mv[i]] == 0)
                            bad2 |= isval & (p_row[f_row[vals[i]]] == 0)
                        if bad != bad2:
                            _fail(stats, 1, s, k)

                    # satisfy-bind
                    if lawmask & LAW_BIT_2:
                        bad = 0
                        for i in range(m):
                            bad |= (bk[i] == VAL) & (p_row[bv[i]] == 0)
                        bad2 = 0
                        for li in range(nleaf):
                            i = leaves[li]
                            bad2 |= (kinds[i] == VAL) & (gsat_row[vals[i]] == 0)
                        lhs = not bad
                        premise = not bad2
                        bind_premises += premise
                        if (premise & (lhs ^ 1)) | (lhs ^ premise):
                            _fail(stats, 2, s, k)

                    # always-map, over the mapped tree of booleans
                    if lawmask & LAW_BIT_3:
                        bad = 0
                        bad2 = 0
                        for li in range(nleaf):
                            i = leaves[li]
                            isval = kinds[i] == VAL
                            qm[i] = <uint8_t>(q_row[vals[i]] & isval)
                            bad |= isval & (qm[i] == 0)
                            bad2 |= isval & (q_row[vals[i]] == 0)
                        always = not bad
                        premise = not bad2
                        always_premises += premise
                        if (premise & (always ^ 1)) | (always ^ premise):
                            _fail(stats, 3, s, k)

                    if not need_members:
                        continue
                    # leftmost witness of each value: first VAL leaf in preorder;
                    # FAIL leaves write to the spare slot 4
                    for x in range(5):
                        flen[x] = -1
                    for li in range(nleaf - 1, -1, -1):
                        i = leaves[li]
                        # leaves are FAIL (0) or VAL (1)
                        slot = 4 - kinds[i] * (4 - vals[i])
                        first[slot] = npath[i]
                        flen[slot] = ndepth[i]
                    maxlen = 0
                    for x in range(4):
                        wlen[x] = flen[x] if flen[x] > 0 else 0
                        maxlen = maxlen if maxlen > wlen[x] else wlen[x]
                    _walk4(kinds, tls, 0, first, wlen, maxlen, tnode)
                    if lawmask & LAW_BIT_5:
                        _walk4(bk, bls, 0, first, wlen, maxlen, bnode)
                    for x in range(4):
                        if flen[x] < 0:
                            continue
                        # one walk serves member-map (mapped payloads) and if-intro
                        node = tnode[x]
                        if lawmask & LAW_BIT_4:
                            checks += 1
                            if node < 0 or kinds[node] != VAL or mv[node] != f_row[x]:
                                _fail(stats, 4, s, k)
                        if lawmask & LAW_BIT_6:
                            tvalid[x] = node >= 0 and kinds[node] == VAL and vals[node] == x
                        if not lawmask & LAW_BIT_5:
                            continue
                        # the outer part of every concatenated witness is shared
                        node = bnode[x]
                        checks += gny[k, x]
                        if node < 0:
                            if gny[k, x]:
                                _fail(stats, 5, s, k)
                            continue
                        # a byte-identical copy of g(x) gives the outcomes computed on g(x)
                        idx = VAL * 4 + x
                        word = bmask[k, x]
                        if ((((<uint64_t*>&bk[node])[0] ^ bk_row[idx])
                             | ((<uint64_t*>&bv[node])[0] ^ bv_row[idx])
                             | ((<uint64_t*>&bls[node])[0] ^ bl_row[idx])) & word) == 0:
                            if not gvalid[k, x]:
                                _fail(stats, 5, s, k)
                            continue
                        for j in range(gny[k, x]):
                            y = gys[k, x, j]
                            if not _follow_ok(bk, bv, bls, node, gpaths[k, x, y],
                                              glens[k, x, y], y):
                                _fail(stats, 5, s, k)
                    if not lawmask & LAW_BIT_6:
                        continue
                    # the selected witness is wx or wy, whose validity was just computed:
                    # over all (x, y, c) each invalid present value is picked 2 * present times
                    present = 0
                    invalid = 0
                    for x in range(4):
                        isval = flen[x] >= 0
                        present += isval
                        invalid += isval & (tvalid[x] == 0)
                    checks += 2 * present * present
                    if invalid:
                        stats[_slot(6)] += 2 * present * invalid - 1
                        _fail(stats, 6, s, k)
            stats[0] += cases
            stats[4] += bind_premises
            stats[5] += always_premises
            stats[9] += checks
    finally:
        free(kinds)
        free(vals)
        free(mv)
        free(qm)
        free(tls)
        free(bk)
        free(bv)
        free(bls)
        free(bpos)
        free(t_ends)
        free(npath)
        free(ndepth)
        free(leaves)
        free(choices)
        free(stack)
        free(g_ends)
    return stats_arr


# -- packed lists -----------------------------------------------------------------------

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


cdef inline int _plen(int64_t code) noexcept nogil:
    cdef int n = 0
    while code:
        n += 1
        code >>= 4
    return n


def packed_length(code):
    return _plen(code)


cdef struct Buf:
    uint8_t* kinds
    int64_t* codes
    Py_ssize_t n


cdef void _ndinsert_nd(int64_t x, int64_t ys, Buf* out) noexcept nogil:
    cdef Py_ssize_t start, i
    cdef int64_t y
    if ys == 0:
        out.kinds[out.n] = VAL
        out.codes[out.n] = x + 1
        out.n += 1
        return
    out.kinds[out.n] = CHOICE
    out.codes[out.n] = 0
    out.kinds[out.n + 1] = VAL
    out.codes[out.n + 1] = (ys << 4) | (x + 1)
    out.n += 2
    start = out.n
    _ndinsert_nd(x, ys >> 4, out)
    y = ys & 15
    for i in range(start, out.n):
        if out.kinds[i] == VAL:
            out.codes[i] = (out.codes[i] << 4) | y


cdef Py_ssize_t _perm_nodes(int n) noexcept nogil:
    # nodes of perm over n elements: 2 * n! - 1
    cdef Py_ssize_t f = 1
    cdef int i
    for i in range(2, n + 1):
        f *= i
    return 2 * f - 1


cdef void _perm_nd(const int64_t* xs, int n, int i, Buf* out, Buf* scratch) noexcept nogil:
    # result goes to out; scratch is a buffer of the same capacity
    cdef Py_ssize_t j
    cdef Buf tmp
    if i == n:
        out.kinds[0] = VAL
        out.codes[0] = 0
        out.n = 1
        return
    _perm_nd(xs, n, i + 1, scratch, out)
    tmp.kinds = out.kinds
    tmp.codes = out.codes
    tmp.n = 0
    for j in range(scratch.n):
        if scratch.kinds[j] == VAL:
            _ndinsert_nd(xs[i], scratch.codes[j], &tmp)
        else:
            tmp.kinds[tmp.n] = scratch.kinds[j]
            tmp.codes[tmp.n] = scratch.codes[j]
            tmp.n += 1
    out.n = tmp.n


cdef Py_ssize_t _perm_nd_into(const int64_t* xs, int n, Buf* out, Buf* scratch) noexcept nogil:
    _perm_nd(xs, n, 0, out, scratch)
    return out.n


def _check_list(xs):
    pack(xs)
    return np.ascontiguousarray([int(v) for v in xs] or [0], dtype=np.int64)


def perm_nd_flat(xs):
    cdef int n = len(xs)
    cdef const int64_t[:] xv = _check_list(xs)
    cdef Py_ssize_t cap = _perm_nodes(n)
    kinds = np.zeros(cap, dtype=np.uint8)
    codes = np.zeros(cap, dtype=np.int64)
    skinds = np.zeros(cap, dtype=np.uint8)
    scodes = np.zeros(cap, dtype=np.int64)
    cdef uint8_t[:] kv = kinds, skv = skinds
    cdef int64_t[:] cv = codes, scv = scodes
    cdef Buf out, scratch
    out.kinds = &kv[0]
    out.codes = &cv[0]
    out.n = 0
    scratch.kinds = &skv[0]
    scratch.codes = &scv[0]
    scratch.n = 0
    cdef Py_ssize_t m = _perm_nd_into(&xv[0], n, &out, &scratch)
    return kinds[:m], codes[:m]


cdef struct Explorer:
    int8_t* fixed
    int64_t* trail
    Py_ssize_t depth



cdef inline int _choose(Explorer* ex, int64_t address) noexcept nogil:
    if ex.fixed[address] < 0:
        ex.fixed[address] = 0
        ex.trail[ex.depth] = address
        ex.depth += 1
    return ex.fixed[address]


cdef inline bint _advance(Explorer* ex) noexcept nogil:
    while ex.depth and ex.fixed[ex.trail[ex.depth - 1]] == 1:
        ex.fixed[ex.trail[ex.depth - 1]] = -1
        ex.depth -= 1
    if ex.depth == 0:
        return False
    ex.fixed[ex.trail[ex.depth - 1]] = 1
    return True


cdef int64_t _ndinsert_plan(Explorer* ex, int64_t address, int64_t x, int64_t ys) noexcept nogil:
    if ys == 0:
        return x + 1
    if _choose(ex, address):
        return (ys << 4) | (x + 1)
    return (_ndinsert_plan(ex, 2 * address, x, ys >> 4) << 4) | (ys & 15)


cdef int64_t _perm_plan(Explorer* ex, int64_t address, const int64_t* xs, int n, int i) noexcept nogil:
    cdef int64_t rest
    if i == n:
        return 0
    rest = _perm_plan(ex, 2 * address + 1, xs, n, i + 1)
    return _ndinsert_plan(ex, 2 * address, xs[i], rest)


cdef Py_ssize_t _explore_perm(const int64_t* xs, int n, Explorer* ex, int64_t* outputs,
                              int64_t* offsets, int64_t* addrs, uint8_t* bits,
                              bint record) noexcept nogil:
    # returns the number of runs; records plans only when asked
    cdef Py_ssize_t runs = 0, used = 0, t
    if record:
        offsets[0] = 0
    while True:
        outputs[runs] = _perm_plan(ex, 1, xs, n, 0)
        runs += 1
        if record:
            for t in range(ex.depth):
                addrs[used] = ex.trail[t]
                bits[used] = ex.fixed[ex.trail[t]]
                used += 1
            offsets[runs] = used
        if not _advance(ex):
            break
    return runs


cdef Py_ssize_t _factorial(int n) noexcept nogil:
    cdef Py_ssize_t f = 1
    cdef int i
    for i in range(2, n + 1):
        f *= i
    return f


def perm_plan_explore(xs):
    cdef int n = len(xs)
    cdef const int64_t[:] xv = _check_list(xs)
    cdef Py_ssize_t runs_cap = _factorial(n), table = <Py_ssize_t>1 << (n + 2)
    cdef Py_ssize_t bits_cap = runs_cap * (n * n + 1)
    fixed = np.full(table, -1, dtype=np.int8)
    trail = np.zeros(n * n + 1, dtype=np.int64)
    outputs = np.zeros(runs_cap, dtype=np.int64)
    offsets = np.zeros(runs_cap + 1, dtype=np.int64)
    addrs = np.zeros(bits_cap, dtype=np.int64)
    bits = np.zeros(bits_cap, dtype=np.uint8)
    cdef int8_t[:] fv = fixed
    cdef int64_t[:] tv = trail, ov = outputs, offv = offsets, av = addrs
    cdef uint8_t[:] bv = bits
    cdef Explorer ex
    ex.fixed = &fv[0]
    ex.trail = &tv[0]
    ex.depth = 0
    cdef Py_ssize_t runs = _explore_perm(&xv[0], n, &ex, &ov[0], &offv[0], &av[0], &bv[0], True)
    used = offsets[runs]
    return outputs[:runs], offsets[:runs + 1], addrs[:used], bits[:used]


cdef int _cmp_int64(const void* a, const void* b) noexcept nogil:
    cdef int64_t x = (<const int64_t*>a)[0], y = (<const int64_t*>b)[0]
    return (x > y) - (x < y)


cdef Py_ssize_t _unique(int64_t* xs, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, m = 0
    if n == 0:
        return 0
    qsort(xs, n, sizeof(int64_t), _cmp_int64)
    for i in range(1, n):
        if xs[i] != xs[m]:
            m += 1
            xs[m] = xs[i]
    return m + 1


PERM_FIELDS = ("nd_values", "nd_length_ok", "plan_runs", "plan_length_ok", "sets_equal")


def perm_batch(lists, lengths):
    cdef const int64_t[:, ::1] lv = np.ascontiguousarray(lists, dtype=np.int64)
    cdef const int64_t[:] nv = np.ascontiguousarray(lengths, dtype=np.int64)
    cdef Py_ssize_t rows_n = nv.shape[0], r, j, nvals, runs, nu, pu
    cdef int n, maxn = 0
    for r in range(rows_n):
        if nv[r] > MAX_LIST:
            raise ValueError(f"lists longer than {MAX_LIST} cannot be packed")
        for j in range(nv[r]):
            if not 0 <= lv[r, j] <= MAX_ELEMENT:
                raise ValueError(f"element {lv[r, j]} outside 0..{MAX_ELEMENT}")
        maxn = max(maxn, <int>nv[r])
    if maxn > 10:
        raise ValueError("perm_batch handles lists of at most 10 elements")
    rows = np.zeros((rows_n, len(PERM_FIELDS)), dtype=np.int64)
    cdef int64_t[:, ::1] rv = rows
    cdef Py_ssize_t cap = _perm_nodes(maxn), runs_cap = _factorial(maxn)
    cdef Py_ssize_t table = <Py_ssize_t>1 << (maxn + 2)
    kinds = np.zeros(cap, dtype=np.uint8)
    skinds = np.zeros(cap, dtype=np.uint8)
    codes = np.zeros(cap, dtype=np.int64)
    scodes = np.zeros(cap, dtype=np.int64)
    ndvals = np.zeros(runs_cap, dtype=np.int64)
    outputs = np.zeros(runs_cap, dtype=np.int64)
    fixed = np.full(table, -1, dtype=np.int8)
    trail = np.zeros(maxn * maxn + 1, dtype=np.int64)
    cdef uint8_t[:] kv = kinds, skv = skinds
    cdef int64_t[:] cv = codes, scv = scodes, ndv = ndvals, ov = outputs, tv = trail
    cdef int8_t[:] fv = fixed
    cdef Buf out, scratch
    cdef Explorer ex
    cdef bint ok, equal
    with nogil:
        for r in range(rows_n):
            n = <int>nv[r]
            out.kinds = &kv[0]
            out.codes = &cv[0]
            out.n = 0
            scratch.kinds = &skv[0]
            scratch.codes = &scv[0]
            scratch.n = 0
            _perm_nd_into(&lv[r, 0], n, &out, &scratch)
            nvals = 0
            ok = True
            for j in range(out.n):
                if out.kinds[j] == VAL:
                    ndv[nvals] = out.codes[j]
                    nvals += 1
                    if _plen(out.codes[j]) != n:
                        ok = False
            rv[r, 0] = nvals
            rv[r, 1] = ok

            ex.fixed = &fv[0]
            ex.trail = &tv[0]
            ex.depth = 0
            runs = _explore_perm(&lv[r, 0], n, &ex, &ov[0], NULL, NULL, NULL, False)
            ok = True
            for j in range(runs):
                if _plen(ov[j]) != n:
                    ok = False
            rv[r, 2] = runs
            rv[r, 3] = ok

            nu = _unique(&ndv[0], nvals)
            pu = _unique(&ov[0], runs)
            equal = nu == pu
            if equal:
                for j in range(nu):
                    if ndv[j] != ov[j]:
                        equal = False
                        break
            rv[r, 4] = equal
    return rows
