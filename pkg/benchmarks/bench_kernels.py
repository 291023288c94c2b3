"""Compiled kernel versus the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row runs the same workload on both backends, checks that the outputs
agree, and prints the best wall time of N runs plus the speedup.
"""

import argparse
import time

import numpy as np

from ndcurry._kernels import ckernel, pykernel
from ndcurry.laws import domains as dom

PAIRS = dom.make_pairs(0, 32)


def tree_laws(depth, start, stop, mask):
    flat, offsets = dom.shapes(depth)

    def run(k):
        return k.tree_laws(flat, offsets, 12345, PAIRS.fmap, PAIRS.pred, PAIRS.qpred,
                           PAIRS.gk, PAIRS.gv, PAIRS.glen, start, stop, mask)
    return run


def perm_batch(length, alphabet):
    lists = list(dom.lists_upto(length, range(alphabet)))
    arr = np.zeros((len(lists), max(length, 1)), dtype=np.int64)
    for i, xs in enumerate(lists):
        arr[i, :len(xs)] = xs
    lengths = np.array([len(xs) for xs in lists], dtype=np.int64)
    return lambda k: k.perm_batch(arr, lengths)


WORKLOADS = [
    ("tree_laws depth 3, all laws", tree_laws(3, 0, -1, 63)),
    ("tree_laws depth 5, 200 shapes, mask 7", tree_laws(5, 200_000, 200_200, 7)),
    ("tree_laws depth 5, 200 shapes, mask 56", tree_laws(5, 200_000, 200_200, 56)),
    ("perm_batch lists <= 4 over 4 symbols", perm_batch(4, 4)),
    ("perm_batch lists <= 5 over 3 symbols", perm_batch(5, 3)),
]


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if ckernel is None:
        raise SystemExit("compiled extension not built; run: python3 setup.py build_ext --inplace")
    print(f"{'workload':42s} {'python s':>10s} {'compiled s':>11s} {'speedup':>9s}")
    for name, run in WORKLOADS:
        tp, outp = best(lambda: run(pykernel), args.repeat)
        tc, outc = best(lambda: run(ckernel), args.repeat)
        if not np.array_equal(outp, outc):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:42s} {tp:10.4f} {tc:11.5f} {tp / max(tc, 1e-9):8.0f}x")


if __name__ == "__main__":
    main()
