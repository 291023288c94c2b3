"""The law battery: registered laws, their domains, shrinking and replay.

Every law is a :class:`LawCase`.  Running one produces a :class:`LawReport`;
a failing report carries the smallest failing input found by structural
shrinking, encoded as plain JSON so it can be replayed later with
:func:`replay`.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Optional

import numpy as np

from .. import tree as nd
from .._kernels import BACKEND, kernel
from ..core import (
    Semantics, Strategy, compare_semantics, eval_lazy_failure_demo,
    load_program, parse_expr,
)
from ..plan import ChoicePlan, addresses, enumerate_plans, explore_plans, format_plan, parse_plan
from ..programs import Just, from_nat, to_nat
from . import domains as dom
from .ops import REFERENCE, Ops


class ConfigError(ValueError):
    """Bad bounds or an unknown law name; the CLI maps it to exit code 2."""


COMPILED = BACKEND != "python"


@dataclass(frozen=True)
class LawConfig:
    """Domain bounds.  Every field can be overridden with ``key=value``."""

    seed: int = 0
    label_seed: int = 12345
    pairs: int = 32
    # the pure-Python fallback cannot cover depth-5 shapes in reasonable time
    tree_depth: int = 5 if COMPILED else 3
    small_tree_depth: int = 2
    random_tree_depth: int = 8
    random_trees: int = 200
    membership_pairs: int = 8
    perm_length: int = 6 if COMPILED else 4
    perm_alphabet: int = 4
    object_perm_length: int = 4
    plan_trials: int = 200
    insert_length: int = 6
    insert_alphabet: int = 4
    sort_trials: int = 500
    sort_length: int = 7
    sort_values: int = 10
    sort_exhaustive_length: int = 5
    sort_exhaustive_alphabet: int = 3
    nat_max: int = 1000
    unary_max: int = 200
    last_length: int = 4
    last_alphabet: int = 5
    min_length: int = 6
    min_alphabet: int = 6
    fuel: int = 10_000
    kernel: bool = True

    def with_overrides(self, overrides: dict[str, Any]) -> "LawConfig":
        names = {f.name: f for f in dataclasses.fields(self)}
        changes = {}
        for key, raw in overrides.items():
            if key not in names:
                raise ConfigError(f"unknown bound {key!r}; known: {', '.join(sorted(names))}")
            changes[key] = _coerce(key, raw, type(getattr(self, key)))
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, int) and not isinstance(v, bool) and v < 0:
                raise ConfigError(f"{f.name} must be non-negative")
        if self.pairs < 1 or self.fuel < 1:
            raise ConfigError("pairs and fuel must be positive")
        if self.tree_depth > 5:
            raise ConfigError("tree_depth above 5 is not enumerable (shape count explodes)")
        if self.perm_length > 10 or self.perm_alphabet > 15:
            raise ConfigError("perm bounds exceed the packed-list kernel (length 10, alphabet 15)")
        if self.small_tree_depth > 3:
            raise ConfigError("small_tree_depth above 3 is too large to enumerate")

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(key, raw, kind):
    if not isinstance(raw, str):
        return kind(raw)
    try:
        if kind is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}") from None


# -- reports -----------------------------------------------------------------------------

@dataclass
class LawReport:
    name: str
    status: str                     # "pass" or "fail"
    cases: int
    counterexample: Optional[dict]
    millis: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self, timing: bool = True) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "cases": self.cases,
            "counterexample": self.counterexample,
            "millis": round(self.millis, 1) if timing else 0,
        }

    def summary(self) -> str:
        line = f"{self.status.upper():4} {self.name:22} cases={self.cases:<10} {self.millis:9.1f} ms"
        if self.counterexample is not None:
            line += f"  counterexample={self.counterexample}"
        return line


# -- cases: plain dicts, JSON-encodable once trees and tuples are converted ---------------

def encode_case(case: dict) -> dict:
    out = {}
    for key, v in case.items():
        if key == "tree":
            out[key] = nd.to_data(v)
        elif isinstance(v, tuple):
            out[key] = list(v)
        else:
            out[key] = v
    return out


def decode_case(data: dict) -> dict:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError(f"not a counterexample: {data!r}")
    out = {}
    for key, v in data.items():
        if key == "tree":
            out[key] = nd.from_data(v)
        elif isinstance(v, list):
            out[key] = tuple(v)
        else:
            out[key] = v
    return out


def shrink_int(n: int) -> Iterator[int]:
    seen = set()
    for m in (0, n // 2, n - 1):
        if 0 <= m < n and m not in seen:
            seen.add(m)
            yield m


def shrink_list(xs: tuple) -> Iterator[tuple]:
    for i in range(len(xs)):
        yield xs[:i] + xs[i + 1:]
    for i, v in enumerate(xs):
        for m in shrink_int(v):
            yield xs[:i] + (m,) + xs[i + 1:]


def shrink_tree(t: nd.NDTree) -> Iterator[nd.NDTree]:
    if type(t) is nd.Choice:
        yield t.left
        yield t.right
        for l in shrink_tree(t.left):
            yield nd.Choice(l, t.right)
        for r in shrink_tree(t.right):
            yield nd.Choice(t.left, r)
    elif type(t) is nd.Val:
        yield nd.fail()
        if isinstance(t.value, int):
            for m in shrink_int(t.value):
                yield nd.Val(m)


_SHRINKERS = {
    "tree": shrink_tree, "xs": shrink_list, "ys1": shrink_list, "ys2": shrink_list,
    "n": shrink_int, "y": shrink_int, "x1": shrink_int, "x2": shrink_int,
}


def shrink_case(case: dict) -> Iterator[dict]:
    """Structural shrink candidates, most drastic first."""
    for key, shrinker in _SHRINKERS.items():
        if key in case:
            for smaller in shrinker(case[key]):
                yield {**case, key: smaller}


# -- the law record and its runtime context ------------------------------------------------

class Context:
    """Per-run state: the operations under test, the bounds, shared kernel results."""

    def __init__(self, ops: Ops = REFERENCE, config: Optional[LawConfig] = None):
        self.ops = ops
        self.config = config or LawConfig()
        self._cache: dict = {}

    @property
    def use_kernel(self) -> bool:
        return self.ops.reference and self.config.kernel

    def cached(self, key, compute: Callable[[], Any]):
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    @property
    def pairs(self) -> dom.Pairs:
        return dom.make_pairs(self.config.seed, self.config.pairs)


@dataclass
class Outcome:
    cases: int = 0
    failure: Optional[dict] = None
    details: dict = field(default_factory=dict)

    def scan(self, check: Callable[[dict], bool], cases: Iterable[dict]) -> bool:
        """Check ``cases`` in order, stopping at the first failure; True if all held."""
        for case in cases:
            self.cases += 1
            if not _holds(check, case):
                self.failure = case
                return False
        return True


def _holds(check, case) -> bool:
    try:
        return bool(check(case))
    except RecursionError:
        raise
    except Exception:   # a crashing operation counts as a violation
        return False


@dataclass(frozen=True)
class LawCase:
    name: str
    statement: str
    domain: str
    oracle: str
    run: Callable[[Context], Outcome]
    check: Callable[[Context, dict], bool]
    shrink: Callable[[dict], Iterable[dict]] = shrink_case


REGISTRY: dict[str, LawCase] = {}


def law(name, statement, domain, check, oracle="exhaustive", shrink=shrink_case):
    """Register the decorated ``run`` function as a law."""
    def register(run):
        REGISTRY[name] = LawCase(name, statement, domain, oracle, run, check, shrink)
        return run
    return register


# -- tree laws -------------------------------------------------------------------------------

TREE_LAWS = ("satisfy-map", "satisfy-bind", "always-map", "member-map", "member-bind", "if-intro")
_KERNEL_CODE = {name: code for code, name in kernel.LAW_CODES.items()}
_STAT = {name: i for i, name in enumerate(kernel.STAT_FIELDS)}
_FAIL_FIELD = {"satisfy-map": "satisfy_map_fail", "satisfy-bind": "satisfy_bind_fail",
               "always-map": "always_map_fail", "member-map": "member_map_fail",
               "member-bind": "member_bind_fail", "if-intro": "if_intro_fail"}
# laws sharing one kernel pass
_GROUP_MASK = {name: 7 if _KERNEL_CODE[name] <= 3 else 56 for name in TREE_LAWS}


def random_tree(rng: np.random.Generator, depth: int, values: int = dom.T_VALUES) -> nd.NDTree:
    if depth and rng.random() < 0.62:
        left = random_tree(rng, depth - 1, values)
        return nd.Choice(left, random_tree(rng, depth - 1, values))
    if rng.random() < 0.125:
        return nd.fail()
    return nd.Val(int(rng.integers(values)))


def _object_cases(name: str, cfg: LawConfig) -> Iterator[dict]:
    # if-intro never looks at the pair; the membership laws are far costlier per case
    npairs = cfg.pairs
    if name in ("member-map", "member-bind"):
        npairs = min(npairs, cfg.membership_pairs)
    elif name == "if-intro":
        npairs = 1
    for t in dom.small_trees(cfg.small_tree_depth):
        for k in range(npairs):
            yield {"kind": "tree", "tree": t, "pair": k}
    # deep random trees, each paired with one pair in turn
    rng = np.random.default_rng(cfg.seed + 1)
    for i in range(cfg.random_trees):
        yield {"kind": "tree", "tree": random_tree(rng, cfg.random_tree_depth), "pair": i % npairs}


_PAIR_FUNCS: dict = {}


def _pair_funcs(pairs: dom.Pairs, k: int):
    key = (pairs.seed, len(pairs), k)
    if key not in _PAIR_FUNCS:
        _PAIR_FUNCS[key] = (pairs.f(k), pairs.p(k), pairs.q(k), pairs.g(k))
    return _PAIR_FUNCS[key]


def _tree_object_check(name: str, ops: Ops, pairs: dom.Pairs, t, k: int) -> bool:
    f, p, q, g = _pair_funcs(pairs, k)
    if name == "satisfy-map":
        return ops.satisfy(ops.map_det(f, t), p) == ops.satisfy(t, lambda x: p(f(x)))
    if name == "satisfy-bind":
        premise = all(ops.satisfy(g(x), p) for x in ops.values(t))
        lhs = ops.satisfy(ops.bind_nd(g, t), p)
        # the implication, and the exact characterisation behind it
        return (lhs or not premise) and lhs == premise
    if name == "always-map":
        premise = ops.satisfy(t, q)
        lhs = ops.always(ops.map_det(q, t))
        return (lhs or not premise) and lhs == premise
    present = sorted(set(ops.values(t)))
    if name == "member-map":
        mapped = ops.map_det(f, t)
        for x in range(dom.T_VALUES):
            w = ops.member(x, t)
            if (w is None) != (x not in present):
                return False
            if w is None:
                continue
            if not ops.check_witness(x, t, w):
                return False
            if not ops.check_witness(f(x), mapped, ops.map_witness(f, x, t, w)):
                return False
        return True
    if name == "member-bind":
        bound = ops.bind_nd(g, t)
        for x in present:
            wo = ops.member(x, t)
            gx = g(x)
            for y in sorted(set(ops.values(gx))):
                wi = ops.member(y, gx)
                w = ops.bind_witness(x, t, lambda _x, y=y: y, g, wo, wi)
                if not ops.check_witness(y, bound, w):
                    return False
        return True
    if name == "if-intro":
        for x in present:
            wx = ops.member(x, t)
            for y in present:
                wy = ops.member(y, t)
                for c in (False, True):
                    w = ops.if_intro(c, x, y, t, wx, wy)
                    if not ops.check_witness(x if c else y, t, w):
                        return False
        return True
    raise KeyError(name)


def _tree_kernel(ctx: Context, mask: int, start: int = 0, stop: int = -1) -> np.ndarray:
    cfg = ctx.config
    flat, offsets = dom.shapes(cfg.tree_depth)
    pr = ctx.pairs
    return kernel.tree_laws(flat, offsets, cfg.label_seed, pr.fmap, pr.pred, pr.qpred,
                            pr.gk, pr.gv, pr.glen, start, stop, mask)


def _tree_check(name):
    def check(ctx: Context, case: dict) -> bool:
        if case["kind"] == "shape":
            code = _KERNEL_CODE[name]
            s = case["shape"]
            stats = _tree_kernel(ctx, 1 << (code - 1), s, s + 1)
            return not (stats[_STAT[_FAIL_FIELD[name]]] and stats[_STAT["first_fail_pair"]] == case["pair"])
        return _tree_object_check(name, ctx.ops, ctx.pairs, case["tree"], case["pair"])
    return check


def _tree_shrink(case: dict) -> Iterator[dict]:
    if case["kind"] == "shape":
        # hand the kernel's tree to the object-level shrinker
        t = dom.labelled_tree(case["depth"], case["label_seed"], case["shape"], case["pair"])
        yield {"kind": "tree", "tree": t, "pair": case["pair"]}
        return
    yield from shrink_case(case)


def _tree_run(name):
    check = _tree_check(name)

    def run(ctx: Context) -> Outcome:
        cfg = ctx.config
        out = Outcome()
        if ctx.use_kernel:
            mask = _GROUP_MASK[name]
            stats = ctx.cached(("tree-kernel", mask), lambda: _tree_kernel(ctx, mask))
            out.cases += int(stats[_STAT["cases"]])
            out.details.update(kernel_backend=BACKEND, shapes=dom.shape_count(cfg.tree_depth),
                               pairs=cfg.pairs, tree_depth=cfg.tree_depth)
            if name == "satisfy-bind":
                out.details["premise_true"] = int(stats[_STAT["bind_premise_true"]])
            if name == "always-map":
                out.details["premise_true"] = int(stats[_STAT["always_premise_true"]])
            if mask == 56:
                out.details["witness_checks_in_pass"] = int(stats[_STAT["witness_checks"]])
            if stats[_STAT[_FAIL_FIELD[name]]]:
                own = _tree_kernel(ctx, 1 << (_KERNEL_CODE[name] - 1))
                out.failure = {"kind": "shape", "depth": cfg.tree_depth, "label_seed": cfg.label_seed,
                               "shape": int(own[_STAT["first_fail_shape"]]),
                               "pair": int(own[_STAT["first_fail_pair"]])}
                return out
        out.scan(lambda c: check(ctx, c), _object_cases(name, cfg))
        return out

    return run, check


_TREE_STATEMENTS = {
    "satisfy-map": "satisfy(map_det(f, t), p) == satisfy(t, p . f)",
    "satisfy-bind": "every g(x) satisfies p  ==>  satisfy(bind_nd(g, t), p)",
    "always-map": "satisfy(t, q)  ==>  always(map_det(q, t))",
    "member-map": "w : x in t  ==>  map_witness(w) : f(x) in map_det(f, t)",
    "member-bind": "x in t, y in g(x)  ==>  bind_witness : y in bind_nd(g, t)",
    "if-intro": "x in t, y in t  ==>  if_intro(c) : (x if c else y) in t, c in {False, True}",
}

for _name in TREE_LAWS:
    _run, _check = _tree_run(_name)
    REGISTRY[_name] = LawCase(
        _name, _TREE_STATEMENTS[_name],
        "all tree shapes up to tree_depth x pairs (seeded labels, flat kernel); "
        "all trees up to small_tree_depth over {Fail,0..3} x pairs (membership_pairs for "
        "member-map/member-bind, one for if-intro); random_trees trees up to random_tree_depth",
        "exhaustive + randomized", _run, _check, _tree_shrink)


# -- permutations and sorting -------------------------------------------------------------

def _perm_domain(cfg: LawConfig) -> tuple[list[tuple], np.ndarray, np.ndarray]:
    lists = list(dom.lists_upto(cfg.perm_length, range(cfg.perm_alphabet)))
    width = max(1, cfg.perm_length)
    arr = np.zeros((len(lists), width), dtype=np.int64)
    for i, xs in enumerate(lists):
        arr[i, :len(xs)] = xs
    return lists, arr, np.array([len(xs) for xs in lists], dtype=np.int64)


def _perm_rows(ctx: Context):
    def compute():
        lists, arr, lengths = _perm_domain(ctx.config)
        return lists, kernel.perm_batch(arr, lengths)
    return ctx.cached("perm-kernel", compute)


_PF = {name: i for i, name in enumerate(kernel.PERM_FIELDS)}


def _kernel_perm_row(xs: tuple) -> np.ndarray:
    arr = np.zeros((1, max(1, len(xs))), dtype=np.int64)
    arr[0, :len(xs)] = xs
    return kernel.perm_batch(arr, np.array([len(xs)], dtype=np.int64))[0]


def _explored(fn) -> list:
    return [out for _plan, out in explore_plans(fn)]


def _check_perm_nd(ctx: Context, case: dict) -> bool:
    ops, xs = ctx.ops, case["xs"]
    if ctx.use_kernel and len(xs) <= 10:
        row = _kernel_perm_row(xs)
        if not row[_PF["nd_length_ok"]] or row[_PF["nd_values"]] != math.factorial(len(xs)):
            return False
    if len(xs) > ctx.config.object_perm_length + 2:
        return True
    t = ops.perm_nd(xs)
    if not ops.satisfy(t, lambda ys: len(ys) == len(xs)):
        return False
    vals = ops.values(t)
    if len(vals) != math.factorial(len(xs)):
        return False
    if len(set(xs)) == len(xs) and set(vals) != set(itertools.permutations(xs)):
        return False
    return True


@law("perm-length-nd", "satisfy(perm_nd(xs), len(ys) == len(xs)); |values| == |xs|!",
     "all lists up to perm_length over 0..perm_alphabet-1 (kernel); object level up to object_perm_length",
     check=_check_perm_nd)
def _perm_nd_law(ctx: Context) -> Outcome:
    cfg, out = ctx.config, Outcome()
    check = lambda c: _check_perm_nd(ctx, c)
    if ctx.use_kernel:
        lists, rows = _perm_rows(ctx)
        out.details.update(kernel_backend=BACKEND, lists=len(lists),
                           nd_values=int(rows[:, _PF["nd_values"]].sum()))
        facts = np.array([math.factorial(len(xs)) for xs in lists])
        bad = np.flatnonzero((rows[:, _PF["nd_length_ok"]] == 0) | (rows[:, _PF["nd_values"]] != facts))
        out.cases += len(lists)
        if len(bad):
            out.failure = {"kind": "list", "xs": lists[bad[0]]}
            return out
    out.scan(check, ({"kind": "list", "xs": xs}
                     for xs in dom.lists_upto(cfg.object_perm_length, range(cfg.perm_alphabet))))
    return out



def _random_plan(rng: np.random.Generator, depth: int) -> ChoicePlan:
    bits = {}
    for addr in addresses(depth):
        if rng.random() < 0.5:
            bits[addr] = bool(rng.integers(2))
    return ChoicePlan(bits, bool(rng.integers(2)))


def _check_perm_plan(ctx: Context, case: dict) -> bool:
    ops, xs = ctx.ops, case["xs"]
    if case["kind"] == "plan":
        return len(ops.perm_plan(parse_plan(case["plan"]), xs)) == len(xs)
    if ctx.use_kernel and len(xs) <= 10:
        row = _kernel_perm_row(xs)
        if not row[_PF["plan_length_ok"]]:
            return False
    if len(xs) > ctx.config.object_perm_length + 2:
        return True
    return all(len(out) == len(xs) for out in _explored(lambda p: ops.perm_plan(p, xs)))


def _perm_plan_run(ctx: Context) -> Outcome:
    cfg, out = ctx.config, Outcome()
    check = lambda c: _check_perm_plan(ctx, c)
    if ctx.use_kernel:
        lists, rows = _perm_rows(ctx)
        out.details.update(kernel_backend=BACKEND, lists=len(lists),
                           plan_runs=int(rows[:, _PF["plan_runs"]].sum()))
        out.cases += len(lists)
        bad = np.flatnonzero(rows[:, _PF["plan_length_ok"]] == 0)
        if len(bad):
            out.failure = {"kind": "list", "xs": lists[bad[0]]}
            return out
    alphabet = range(cfg.perm_alphabet)
    if not out.scan(check, ({"kind": "list", "xs": xs}
                            for xs in dom.lists_upto(cfg.object_perm_length, alphabet))):
        return out
    # every plan over short addresses, both defaults, on short lists
    small = [xs for xs in dom.lists_upto(3, alphabet)]
    plans = [format_plan(p) for d in (False, True) for p in enumerate_plans(2, d)]
    if not out.scan(check, ({"kind": "plan", "plan": p, "xs": xs} for xs in small for p in plans)):
        return out
    rng = np.random.default_rng(cfg.seed + 2)
    lists = dom.random_lists(cfg.seed + 3, cfg.plan_trials, cfg.perm_length, alphabet)
    out.scan(check, ({"kind": "plan", "plan": format_plan(_random_plan(rng, max(0, len(xs) - 1))),
                      "xs": xs} for xs in lists))
    return out


REGISTRY["perm-length-plan"] = LawCase(
    "perm-length-plan", "len(perm_plan(p, xs)) == len(xs) for every plan p",
    "every explored plan for lists up to perm_length (kernel) and object_perm_length; "
    "all plans over addresses of length <= 2 on lists up to 3; plan_trials random plans",
    "exhaustive + randomized", _perm_plan_run, _check_perm_plan)


def _check_insert(ctx: Context, case: dict) -> bool:
    ops, y, xs = ctx.ops, case["y"], case["xs"]
    t = ops.ndinsert_nd(y, xs)
    v = ops.insert(y, xs)
    w = ops.member(v, t)
    return w is not None and ops.check_witness(v, t, w)


@law("insert-ndinsert", "member(insert(y, xs), ndinsert_nd(y, xs)) is a valid witness",
     "all y in 0..insert_alphabet-1 and lists up to insert_length over the same alphabet",
     check=_check_insert)
def _insert_law(ctx: Context) -> Outcome:
    cfg, out = ctx.config, Outcome()
    alphabet = range(cfg.insert_alphabet)
    out.scan(lambda c: _check_insert(ctx, c),
             ({"kind": "insert", "y": y, "xs": xs}
              for xs in dom.lists_upto(cfg.insert_length, alphabet) for y in alphabet))
    return out



def _check_sort(ctx: Context, case: dict) -> bool:
    ops, xs = ctx.ops, case["xs"]
    s = ops.sort(xs)
    t = ops.perm_nd(xs)
    w = ops.member(s, t)
    return w is not None and ops.check_witness(s, t, w)


def _sort_run(ctx: Context) -> Outcome:
    cfg, out = ctx.config, Outcome()
    check = lambda c: _check_sort(ctx, c)
    exhaustive = dom.lists_upto(cfg.sort_exhaustive_length, range(cfg.sort_exhaustive_alphabet))
    if not out.scan(check, ({"kind": "list", "xs": xs} for xs in exhaustive)):
        return out
    randomized = dom.random_lists(cfg.seed, cfg.sort_trials, cfg.sort_length, range(cfg.sort_values))
    out.details["random_trials"] = len(randomized)
    out.scan(check, ({"kind": "list", "xs": xs} for xs in randomized))
    return out


REGISTRY["sortPerm"] = LawCase(
    "sortPerm", "member(sort(xs), perm_nd(xs)) is a valid witness",
    "all lists up to sort_exhaustive_length over 0..sort_exhaustive_alphabet-1; "
    "sort_trials random lists up to sort_length over 0..sort_values-1",
    "exhaustive + randomized", _sort_run, _check_sort)


# -- even / double --------------------------------------------------------------------------

def _check_even_double(ctx: Context, case: dict) -> bool:
    ops, n = ctx.ops, case["n"]
    if not ops.even(ops.double(n)):
        return False
    if n <= ctx.config.unary_max:
        d = ops.double_nat(to_nat(n))
        return from_nat(d) == ops.double(n) and ops.even_nat(d)
    return True


@law("even-double", "even(double(x)); the unary versions agree with the integer ones",
     "x in 0..nat_max, unary agreement up to unary_max",
     check=_check_even_double)
def _even_double_law(ctx: Context) -> Outcome:
    out = Outcome()
    out.scan(lambda c: _check_even_double(ctx, c),
             ({"kind": "nat", "n": n} for n in range(ctx.config.nat_max + 1)))
    return out



def _check_eo_nd(ctx: Context, case: dict) -> bool:
    ops = ctx.ops
    return ops.always(ops.map_det(ops.even, ops.doubled_eo_nd(ops, case["n"])))


@law("even-double-eo-nd", "always(map_det(even, map_det(double, eo_nd(n))))", "n in 0..nat_max",
     check=_check_eo_nd)
def _eo_nd_law(ctx: Context) -> Outcome:
    out = Outcome()
    out.scan(lambda c: _check_eo_nd(ctx, c),
             ({"kind": "nat", "n": n} for n in range(ctx.config.nat_max + 1)))
    return out



def _check_eo_plan(ctx: Context, case: dict) -> bool:
    ops, n = ctx.ops, case["n"]
    if "plan" in case:
        return bool(ops.even(ops.doubled_eo_plan(ops, parse_plan(case["plan"]), n)))
    return all(ops.even(v) for v in _explored(lambda p: ops.doubled_eo_plan(ops, p, n)))


@law("even-double-eo-plan", "even(double(eo_plan(p, n))) for every plan p",
     "n in 0..nat_max; every explored plan plus every plan over addresses of length <= 1",
     check=_check_eo_plan)
def _eo_plan_law(ctx: Context) -> Outcome:
    out = Outcome()
    check = lambda c: _check_eo_plan(ctx, c)
    nats = range(ctx.config.nat_max + 1)
    if not out.scan(check, ({"kind": "nat", "n": n} for n in nats)):
        return out
    plans = [format_plan(p) for d in (False, True) for p in enumerate_plans(1, d)]
    out.scan(check, ({"kind": "nat-plan", "n": n, "plan": p} for n in nats for p in plans))
    return out



# -- last ----------------------------------------------------------------------------------

def _check_last(ctx: Context, case: dict) -> bool:
    if case["kind"] == "snoc":
        a = tuple(case["ys1"]) + (case["x1"],)
        b = tuple(case["ys2"]) + (case["x2"],)
        return a != b or case["x1"] == case["x2"]
    ops, xs = ctx.ops, case["xs"]
    vals = ops.values(ops.last_splits(xs))
    return vals == ([xs[-1]] if xs else [])


def _snoc_codes(cfg: LawConfig):
    # ys ++ [x] as a base-(alphabet+1) number with digits offset by one, so equal codes
    # mean equal lists
    base = cfg.last_alphabet + 1
    items = [(ys, x) for ys in dom.lists_upto(cfg.last_length, range(cfg.last_alphabet))
             for x in range(cfg.last_alphabet)]
    codes = np.empty(len(items), dtype=np.int64)
    lasts = np.empty(len(items), dtype=np.int64)
    for i, (ys, x) in enumerate(items):
        c = 0
        for v in ys + (x,):
            c = c * base + v + 1
        codes[i], lasts[i] = c, x
    return items, codes, lasts


def _last_run(ctx: Context) -> Outcome:
    cfg, out = ctx.config, Outcome()
    items, codes, lasts = _snoc_codes(cfg)
    n = len(items)
    out.cases += n * n
    bad = None
    for start in range(0, n, 1024):
        block = slice(start, start + 1024)
        equal = codes[block, None] == codes[None, :]
        hits = np.argwhere(equal & (lasts[block, None] != lasts[None, :]))
        if len(hits):
            bad = (start + int(hits[0][0]), int(hits[0][1]))
            break
    out.details["list_equal_pairs"] = int(sum(np.unique(codes, return_counts=True)[1] ** 2))
    if bad is not None:
        (ys1, x1), (ys2, x2) = items[bad[0]], items[bad[1]]
        out.failure = {"kind": "snoc", "ys1": ys1, "x1": x1, "ys2": ys2, "x2": x2}
        return out
    out.scan(lambda c: _check_last(ctx, c),
             ({"kind": "list", "xs": xs}
              for xs in dom.lists_upto(cfg.last_length + 1, range(cfg.last_alphabet))))
    return out


REGISTRY["last-det"] = LawCase(
    "last-det", "ys1 ++ [x1] == ys2 ++ [x2]  ==>  x1 == x2; last_splits(xs) has the single value xs[-1]",
    "all ys1, ys2 up to last_length and x1, x2 over 0..last_alphabet-1; "
    "last_splits on all lists up to last_length+1",
    "exhaustive", _last_run, _check_last)


# -- min -------------------------------------------------------------------------------------

def _check_min(ctx: Context, case: dict) -> bool:
    ops, xs = ctx.ops, case["xs"]
    m = ops.min_det(xs) if xs else None
    for out in _explored(lambda p: ops.min_plan(p, xs)):
        if isinstance(out, Just) and (m is None or out.value != m):
            return False
    return set(ops.values(ops.min_nd(xs))) <= ({m} if xs else set())


@law("min-theorem", "min_plan(p, xs) == Just(z)  ==>  z == min_det(xs); values(min_nd(xs)) <= {min_det(xs)}",
     "all lists up to min_length over 0..min_alphabet-1, every explored plan",
     check=_check_min)
def _min_law(ctx: Context) -> Outcome:
    cfg, out = ctx.config, Outcome()
    out.scan(lambda c: _check_min(ctx, c),
             ({"kind": "list", "xs": xs}
              for xs in dom.lists_upto(cfg.min_length, range(cfg.min_alphabet))))
    return out



# -- encodings agree -------------------------------------------------------------------------

def _check_agree(ctx: Context, case: dict) -> bool:
    ops, kind = ctx.ops, case["kind"]
    if kind == "perm":
        xs = case["xs"]
        if ctx.use_kernel and len(xs) <= 10 and not _kernel_perm_row(xs)[_PF["sets_equal"]]:
            return False
        if len(xs) > ctx.config.object_perm_length + 2:
            return True
        return set(ops.values(ops.perm_nd(xs))) == set(_explored(lambda p: ops.perm_plan(p, xs)))
    if kind == "eo":
        n = case["n"]
        return set(ops.values(ops.eo_nd(n))) == set(_explored(lambda p: ops.eo_plan(p, n)))
    if kind == "min":
        xs = case["xs"]
        planned = {out.value for out in _explored(lambda p: ops.min_plan(p, xs)) if isinstance(out, Just)}
        return set(ops.values(ops.min_nd(xs))) == planned
    raise ConfigError(f"unknown case kind {kind!r}")


def _agree_run(ctx: Context) -> Outcome:
    cfg, out = ctx.config, Outcome()
    check = lambda c: _check_agree(ctx, c)
    if ctx.use_kernel:
        lists, rows = _perm_rows(ctx)
        out.cases += len(lists)
        bad = np.flatnonzero(rows[:, _PF["sets_equal"]] == 0)
        if len(bad):
            out.failure = {"kind": "perm", "xs": lists[bad[0]]}
            return out
    cases = itertools.chain(
        ({"kind": "perm", "xs": xs}
         for xs in dom.lists_upto(cfg.object_perm_length, range(cfg.perm_alphabet))),
        ({"kind": "eo", "n": n} for n in range(cfg.nat_max + 1)),
        ({"kind": "min", "xs": xs} for xs in dom.lists_upto(cfg.min_length, range(cfg.min_alphabet))),
    )
    out.scan(check, cases)
    return out


REGISTRY["encodings-agree"] = LawCase(
    "encodings-agree", "set of plan outputs == set(values(nd tree)) for perm, eo and min",
    "perm: lists up to perm_length (kernel) and object_perm_length; eo: n in 0..nat_max; "
    "min: lists up to min_length over 0..min_alphabet-1",
    "exhaustive", _agree_run, _check_agree)


# -- evaluator laws --------------------------------------------------------------------------

_CONTRAST_EXPECTED = {
    (Semantics.CALL_TIME, Strategy.EAGER): ["0", "2"],
    (Semantics.CALL_TIME, Strategy.LAZY): ["0", "2"],
    (Semantics.RUN_TIME, Strategy.EAGER): ["0", "2"],
    (Semantics.RUN_TIME, Strategy.LAZY): ["0", "1", "2"],
}


def _mode_key(s: Semantics, t: Strategy) -> str:
    return f"{s.value}+{t.value}"


def _check_contrast(ctx: Context, case: dict) -> bool:
    program = load_program("peano")
    expr = parse_expr(case["expr"], program)
    report = compare_semantics(program, expr, ctx.config.fuel, ctx.ops.evaluator)
    for (s, t), expected in _CONTRAST_EXPECTED.items():
        if _mode_key(s, t) == case["mode"]:
            return report.results[s, t].shown_set() == expected
    raise ConfigError(f"unknown mode {case['mode']!r}")


def _contrast_run(ctx: Context) -> Outcome:
    out = Outcome()
    program = load_program("peano")
    text = "double (0 ? 1)"
    report = compare_semantics(program, parse_expr(text, program), ctx.config.fuel, ctx.ops.evaluator)
    out.details["value_sets"] = {_mode_key(s, t): r.shown_set() for (s, t), r in report.results.items()}
    for (s, t), expected in _CONTRAST_EXPECTED.items():
        out.cases += 1
        if report.results[s, t].shown_set() != expected:
            out.failure = {"kind": "eval", "expr": text, "mode": _mode_key(s, t)}
            return out
    return out


REGISTRY["semantics-contrast"] = LawCase(
    "semantics-contrast", "double (0 ? 1): call-time {0,2} both strategies, run-time lazy {0,1,2}, "
    "run-time eager {0,2}", "the four semantics/strategy combinations", "exhaustive",
    _contrast_run, _check_contrast, lambda case: ())


def _lazy_ok(results, strategy: Strategy) -> bool:
    r = results[strategy]
    if strategy is Strategy.LAZY:
        return r.shown_set() == ["0"] and r.failed == 0
    return not r.values and r.failed >= 1


def _check_laziness(ctx: Context, case: dict) -> bool:
    return _lazy_ok(eval_lazy_failure_demo(evaluator=ctx.ops.evaluator), Strategy(case["strategy"]))


def _laziness_run(ctx: Context) -> Outcome:
    out = Outcome()
    results = eval_lazy_failure_demo(evaluator=ctx.ops.evaluator)
    out.details["results"] = {t.value: {"values": r.shown(), "failed": r.failed}
                              for t, r in results.items()}
    for strategy in (Strategy.LAZY, Strategy.EAGER):
        out.cases += 1
        if not _lazy_ok(results, strategy):
            out.failure = {"kind": "eval", "expr": "head (Cons 0 (tail Nil))",
                           "strategy": strategy.value}
            return out
    return out


REGISTRY["laziness-failure"] = LawCase(
    "laziness-failure", "head (Cons 0 (tail Nil)): lazy gives {0} with no failures, "
    "eager gives no value and at least one failed branch", "both strategies under call-time choice",
    "exhaustive", _laziness_run, _check_laziness, lambda case: ())


# registration order doubles as report order
LAW_NAMES = (
    "satisfy-map", "satisfy-bind", "always-map", "member-map", "member-bind", "if-intro",
    "insert-ndinsert", "perm-length-nd", "perm-length-plan", "sortPerm", "even-double",
    "even-double-eo-nd", "even-double-eo-plan", "last-det", "min-theorem",
    "encodings-agree", "semantics-contrast", "laziness-failure",
)
assert set(LAW_NAMES) == set(REGISTRY), set(REGISTRY) ^ set(LAW_NAMES)


# -- running ---------------------------------------------------------------------------------

def shrink(law_case: LawCase, ctx: Context, case: dict, budget: int = 2000) -> dict:
    """Greedy structural shrinking: keep taking the first smaller case that still fails."""
    steps = 0
    improved = True
    while improved and steps < budget:
        improved = False
        for candidate in law_case.shrink(case):
            steps += 1
            if not _holds(lambda c: law_case.check(ctx, c), candidate):
                case, improved = candidate, True
                break
            if steps >= budget:
                break
    return case


def get_law(name: str) -> LawCase:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown law {name!r}; known: {', '.join(LAW_NAMES)}") from None


def run_law(name: str, ops: Ops = REFERENCE, config: Optional[LawConfig] = None,
            context: Optional[Context] = None) -> LawReport:
    law_case = get_law(name)
    ctx = context or Context(ops, config)
    start = time.perf_counter()
    outcome = law_case.run(ctx)
    counterexample = None
    if outcome.failure is not None:
        smallest = shrink(law_case, ctx, outcome.failure)
        counterexample = encode_case(smallest)
    millis = (time.perf_counter() - start) * 1000.0
    status = "pass" if counterexample is None else "fail"
    details = {"oracle": law_case.oracle, "ops": ctx.ops.name, **outcome.details}
    return LawReport(name, status, outcome.cases, counterexample, millis, details)


def select(filters: Optional[Iterable[str]] = None) -> list[str]:
    """Law names matching any filter (exact name, or substring); all when empty."""
    filters = [f for f in (filters or []) if f]
    if not filters:
        return list(LAW_NAMES)
    chosen = []
    for f in filters:
        hits = [n for n in LAW_NAMES if n == f] or [n for n in LAW_NAMES if f in n]
        if not hits:
            raise ConfigError(f"unknown law {f!r}; known: {', '.join(LAW_NAMES)}")
        chosen.extend(h for h in hits if h not in chosen)
    return [n for n in LAW_NAMES if n in chosen]


def run_all(names: Optional[Iterable[str]] = None, ops: Ops = REFERENCE,
            config: Optional[LawConfig] = None) -> list[LawReport]:
    ctx = Context(ops, config)
    names = list(LAW_NAMES if names is None else names)
    for n in names:
        get_law(n)
    return [run_law(n, context=ctx) for n in names]


def replay(name: str, counterexample: dict, ops: Ops = REFERENCE,
           config: Optional[LawConfig] = None) -> bool:
    """True when the recorded counterexample still violates the law."""
    law_case = get_law(name)
    case = decode_case(counterexample)
    return not _holds(lambda c: law_case.check(Context(ops, config), c), case)


def exit_code(reports: Iterable[LawReport]) -> int:
    return 0 if all(r.passed for r in reports) else 1
