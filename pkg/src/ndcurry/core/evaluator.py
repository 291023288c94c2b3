"""Evaluation of core programs under run-time or call-time choice.

Evaluation produces a *result tree*: choices labelled with choice ids
over ground values, failures and fuel-exhausted leaves.  Values are then
read off by :func:`extract_values`, which only follows paths that take
the same side of every occurrence of an id.

How the four modes differ:

* Lazy + call-time: arguments and let-bound expressions are shared
  thunks.  A thunk that reduces to a choice is overwritten with it, so
  every reference sees the same id, and pull-tab steps copy the id.
* Lazy + run-time: thunks are never overwritten.  Each demand re-reduces
  the expression and mints fresh ids, which is what textual copying of
  the argument does.
* Eager (either semantics): arguments and let-bound expressions are
  normalized before use, so a function body only ever sees values.
"""

from __future__ import annotations

import enum
import itertools
import sys
import threading
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

from .syntax import (
    ChoiceExpr, CoreExpr, CoreProgram, CtorApp, FailExpr, FunApp, Let,
    PVar, PWild, Term, Var, show_term,
)

DEFAULT_FUEL = 10_000


class Semantics(enum.Enum):
    RUN_TIME = "runtime"
    CALL_TIME = "calltime"


class Strategy(enum.Enum):
    EAGER = "eager"
    LAZY = "lazy"


@dataclass(frozen=True)
class EvalConfig:
    semantics: Semantics = Semantics.CALL_TIME
    strategy: Strategy = Strategy.LAZY
    fuel: int = DEFAULT_FUEL

    def __post_init__(self):
        if self.fuel <= 0:
            raise ValueError("fuel must be positive")


class EvalError(RuntimeError):
    pass


# -- result trees ---------------------------------------------------------------------

@dataclass(frozen=True)
class RValue:
    term: Term


@dataclass(frozen=True)
class RChoice:
    cid: int
    left: "RTree"
    right: "RTree"


@dataclass(frozen=True)
class RFail:
    pass


@dataclass(frozen=True)
class RExhausted:
    pass


RTree = Union[RValue, RChoice, RFail, RExhausted]
R_FAIL = RFail()
R_EXHAUSTED = RExhausted()


def graft(t: RTree, k: Callable[[Term], RTree],
          on_choice: Callable[[], bool] = lambda: True) -> RTree:
    """Replace each value leaf by ``k(value)``; choices keep their ids.

    ``on_choice`` is consulted at every choice crossed and may veto
    (fuel exhausted), which turns the subtree into an exhausted leaf.
    """
    if isinstance(t, RValue):
        return k(t.term)
    if isinstance(t, RChoice):
        if not on_choice():
            return R_EXHAUSTED
        return RChoice(t.cid, graft(t.left, k, on_choice), graft(t.right, k, on_choice))
    return t


def combine(ctor: str, trees: list, on_choice: Callable[[], bool] = lambda: True) -> RTree:
    """Build ``ctor(args)`` from result trees of its arguments, pulling choices up."""
    def go(i: int, done: tuple) -> RTree:
        if i == len(trees):
            return RValue(Term(ctor, done))
        return graft(trees[i], lambda v: go(i + 1, done + (v,)), on_choice)
    return go(0, ())


@dataclass(frozen=True)
class ResultSet:
    """Multiset of computed values plus counts of failed/exhausted branches."""

    values: tuple = ()
    failed: int = 0
    fuel_exhausted: int = 0

    @property
    def value_set(self) -> frozenset:
        return frozenset(self.values)

    def shown(self) -> list[str]:
        return [show_term(v) for v in self.values]

    def shown_set(self) -> list[str]:
        return sorted(set(self.shown()), key=_canonical_key)

    def __str__(self):
        return (f"[{', '.join(self.shown())}] failed={self.failed} "
                f"fuel_exhausted={self.fuel_exhausted}")


def _canonical_key(s: str):
    return (len(s), s)


def extract_values(tree: RTree) -> ResultSet:
    """Collect values along every path that resolves each id consistently."""
    found = []
    failed = exhausted = 0
    stack: list = [(tree, {})]
    while stack:
        node, taken = stack.pop()
        while isinstance(node, RChoice) and node.cid in taken:
            node = node.left if taken[node.cid] else node.right
        if isinstance(node, RChoice):
            stack.append((node.right, {**taken, node.cid: False}))
            stack.append((node.left, {**taken, node.cid: True}))
        elif isinstance(node, RValue):
            found.append(node.term)
        elif isinstance(node, RFail):
            failed += 1
        else:
            exhausted += 1
    found.sort(key=lambda t: _canonical_key(show_term(t)))
    return ResultSet(tuple(found), failed, exhausted)


# -- expression-level pull-tab ----------------------------------------------------------

def pull_tab(app: Union[FunApp, CtorApp], index: int) -> ChoiceExpr:
    """``f(.., c_id(a, b), ..)  ->  c_id(f(.., a, ..), f(.., b, ..))``."""
    arg = app.args[index]
    if not isinstance(arg, ChoiceExpr):
        raise ValueError(f"argument {index} is not a choice")
    if arg.cid is None:
        raise ValueError("only labelled choices can be pulled")
    args = list(app.args)
    args[index] = arg.left
    left = replace(app, args=tuple(args))
    args[index] = arg.right
    right = replace(app, args=tuple(args))
    return ChoiceExpr(left, right, arg.cid)


def result_tree_of(e: CoreExpr, ids: Optional[itertools.count] = None) -> RTree:
    """Read a ground expression of constructors, choices and failures as a result tree.

    Unlabelled choices get fresh negative ids.
    """
    ids = ids if ids is not None else itertools.count(-1, -1)
    if isinstance(e, CtorApp):
        return combine(e.ctor, [result_tree_of(a, ids) for a in e.args])
    if isinstance(e, ChoiceExpr):
        cid = e.cid if e.cid is not None else next(ids)
        return RChoice(cid, result_tree_of(e.left, ids), result_tree_of(e.right, ids))
    if isinstance(e, FailExpr):
        return R_FAIL
    raise ValueError(f"not a ground choice expression: {e!r}")


def _match_ground(p, v: Term, env: dict) -> bool:
    if isinstance(p, PVar):
        env[p.name] = v
        return True
    if isinstance(p, PWild):
        return True
    return p.ctor == v.ctor and all(_match_ground(sp, sv, env) for sp, sv in zip(p.args, v.args))


# -- lazy heap ---------------------------------------------------------------------------

@dataclass
class HCtor:
    ctor: str
    args: list


@dataclass
class HChoice:
    cid: int
    left: "Thunk"
    right: "Thunk"


class _HFail:
    pass


class _HExhausted:
    pass


H_FAIL = _HFail()
H_EXHAUSTED = _HExhausted()


class Thunk:
    __slots__ = ("compute", "value", "memo")

    def __init__(self, compute=None, memo=True, value=None):
        self.compute = compute
        self.memo = memo
        self.value = value

    def force(self):
        if self.value is not None:
            return self.value
        v = self.compute()
        if self.memo:
            self.value = v
            self.compute = None
        return v


@dataclass
class _Pull:
    cid: int
    left: Thunk
    right: Thunk


_NO = object()


class Evaluator:
    """One evaluation: owns the fuel counter and the choice-id supply."""

    def __init__(self, program: CoreProgram, config: EvalConfig):
        self.program = program
        self.config = config
        self.fuel = config.fuel
        self._ids = itertools.count(1)
        self._rules: dict = {}
        self._memo = config.semantics is Semantics.CALL_TIME

    # hooks -------------------------------------------------------------------------
    def fresh_id(self) -> int:
        return next(self._ids)

    def pulled_id(self, cid: int) -> int:
        """Id given to the choice created by a pull-tab step over ``cid``."""
        return cid

    def tick(self) -> bool:
        if self.fuel <= 0:
            return False
        self.fuel -= 1
        return True

    def rules(self, fun: str):
        if fun not in self._rules:
            rules = self.program.rules_for(fun)
            if not rules:
                raise EvalError(f"unbound function {fun}")
            self._rules[fun] = rules
        return self._rules[fun]

    def run(self, expr: CoreExpr) -> RTree:
        if self.config.strategy is Strategy.EAGER:
            return self.eager(expr, {})
        return self.normal_form(self.thunk(expr, {}))

    # eager ---------------------------------------------------------------------------
    def eager(self, e: CoreExpr, env: dict) -> RTree:
        if isinstance(e, Var):
            if e.name not in env:
                raise EvalError(f"unbound variable {e.name}")
            return RValue(env[e.name])
        if isinstance(e, CtorApp):
            return combine(e.ctor, [self.eager(a, env) for a in e.args], self.tick)
        if isinstance(e, ChoiceExpr):
            cid = e.cid if e.cid is not None else self.fresh_id()
            return RChoice(cid, self.eager(e.left, env), self.eager(e.right, env))
        if isinstance(e, FailExpr):
            return R_FAIL
        if isinstance(e, Let):
            bound = self.eager(e.bound, env)
            return graft(bound, lambda v: self.eager(e.body, {**env, e.name: v}), self.tick)
        if isinstance(e, FunApp):
            rules = self.rules(e.fun)
            args = [self.eager(a, env) for a in e.args]

            def call(i, done):
                if i == len(args):
                    return self.apply_ground(e.fun, rules, done)
                return graft(args[i], lambda v: call(i + 1, done + (v,)), self.tick)
            return call(0, ())
        raise EvalError(f"unknown expression {e!r}")

    def apply_ground(self, fun: str, rules, vals: tuple) -> RTree:
        if not self.tick():
            return R_EXHAUSTED
        branches = []
        for rule in rules:
            env: dict = {}
            if all(_match_ground(p, v, env) for p, v in zip(rule.patterns, vals)):
                branches.append((rule.rhs, env))
        if not branches:
            return R_FAIL
        trees = [self.eager(rhs, env) for rhs, env in branches]
        node = trees[-1]
        for t in reversed(trees[:-1]):
            node = RChoice(self.fresh_id(), t, node)
        return node

    # lazy ----------------------------------------------------------------------------
    def thunk(self, e: CoreExpr, env: dict) -> Thunk:
        if isinstance(e, Var) and e.name in env:
            return env[e.name]
        return Thunk(lambda: self.hnf(e, env), self._memo)

    def hnf(self, e: CoreExpr, env: dict):
        if isinstance(e, Var):
            if e.name not in env:
                raise EvalError(f"unbound variable {e.name}")
            return env[e.name].force()
        if isinstance(e, CtorApp):
            return HCtor(e.ctor, [self.thunk(a, env) for a in e.args])
        if isinstance(e, ChoiceExpr):
            cid = e.cid if e.cid is not None else self.fresh_id()
            return HChoice(cid, self.thunk(e.left, env), self.thunk(e.right, env))
        if isinstance(e, FailExpr):
            return H_FAIL
        if isinstance(e, Let):
            return self.hnf(e.body, {**env, e.name: self.thunk(e.bound, env)})
        if isinstance(e, FunApp):
            return self.call(e.fun, [self.thunk(a, env) for a in e.args])
        raise EvalError(f"unknown expression {e!r}")

    def call(self, fun: str, args: list):
        rules = self.rules(fun)
        if not self.tick():
            return H_EXHAUSTED
        matched = []
        for rule in rules:
            env: dict = {}
            for position, (p, t) in enumerate(zip(rule.patterns, args)):
                outcome = self.match(p, t, env)
                if outcome is not None:
                    break
            else:
                matched.append((rule.rhs, env))
                continue
            if isinstance(outcome, _Pull):
                return self.pull_tab(fun, args, position, outcome)
            if outcome is H_EXHAUSTED:
                return H_EXHAUSTED
            # _NO or H_FAIL: this rule does not apply
        if not matched:
            return H_FAIL
        if len(matched) == 1:
            rhs, env = matched[0]
            return self.hnf(rhs, env)
        # overlapping rules: every applicable one fires
        alts = [Thunk(lambda rhs=rhs, env=env: self.hnf(rhs, env), self._memo)
                for rhs, env in matched]
        node = alts[-1]
        for alt in reversed(alts[:-1]):
            node = Thunk(value=HChoice(self.fresh_id(), alt, node))
        return node.force()

    def match(self, p, t: Thunk, env: dict):
        """None on success (binding into env), else _NO, H_FAIL, H_EXHAUSTED or a _Pull."""
        if isinstance(p, PVar):
            env[p.name] = t
            return None
        if isinstance(p, PWild):
            return None
        h = t.force()
        if isinstance(h, HChoice):
            return _Pull(h.cid, h.left, h.right)
        if h is H_FAIL or h is H_EXHAUSTED:
            return h
        if h.ctor != p.ctor:
            return _NO
        for i, (sp, st) in enumerate(zip(p.args, h.args)):
            outcome = self.match(sp, st, env)
            if outcome is None:
                continue
            if isinstance(outcome, _Pull):
                # rebuild this constructor around each alternative
                left = list(h.args)
                right = list(h.args)
                left[i], right[i] = outcome.left, outcome.right
                return _Pull(outcome.cid, Thunk(value=HCtor(h.ctor, left)),
                             Thunk(value=HCtor(h.ctor, right)))
            return outcome
        return None

    def pull_tab(self, fun: str, args: list, position: int, pull: _Pull):
        if not self.tick():
            return H_EXHAUSTED
        left = list(args)
        right = list(args)
        left[position], right[position] = pull.left, pull.right
        return HChoice(self.pulled_id(pull.cid),
                       Thunk(lambda: self.call(fun, left), self._memo),
                       Thunk(lambda: self.call(fun, right), self._memo))

    def normal_form(self, t: Thunk) -> RTree:
        h = t.force()
        if isinstance(h, HCtor):
            return combine(h.ctor, [self.normal_form(a) for a in h.args])
        if isinstance(h, HChoice):
            return RChoice(h.cid, self.normal_form(h.left), self.normal_form(h.right))
        if h is H_FAIL:
            return R_FAIL
        return R_EXHAUSTED


# -- entry points ----------------------------------------------------------------------

_STACK_BYTES = 256 * 1024 * 1024
_RECURSION_LIMIT = 200_000


def _deep(fn):
    """Run ``fn`` on a thread with a large stack; evaluation recurses deeply."""
    box: dict = {}

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, _RECURSION_LIMIT))
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised on the caller's thread
            box["error"] = exc
        finally:
            sys.setrecursionlimit(old)

    previous = threading.stack_size(_STACK_BYTES)
    try:
        worker = threading.Thread(target=target, name="core-eval")
        worker.start()
        worker.join()
    finally:
        threading.stack_size(previous)
    if "error" in box:
        if isinstance(box["error"], RecursionError):
            raise EvalError("evaluation nested too deeply") from box["error"]
        raise box["error"]
    return box["value"]


def evaluate_tree(program: CoreProgram, expr: CoreExpr, config: EvalConfig,
                  evaluator: type = Evaluator) -> RTree:
    return _deep(lambda: evaluator(program, config).run(expr))


def evaluate(program: CoreProgram, expr: CoreExpr, config: EvalConfig = EvalConfig(),
             evaluator: type = Evaluator) -> ResultSet:
    """Evaluate a closed expression; the multiset of its values plus failure counts."""
    return _deep(lambda: extract_values(evaluator(program, config).run(expr)))


MODES = [(s, t) for s in Semantics for t in Strategy]


@dataclass
class SemanticsReport:
    results: dict

    def value_set(self, semantics: Semantics, strategy: Strategy) -> frozenset:
        return self.results[semantics, strategy].value_set

    @property
    def calltime_within_runtime(self) -> dict:
        return {t: self.value_set(Semantics.CALL_TIME, t) <= self.value_set(Semantics.RUN_TIME, t)
                for t in Strategy}

    @property
    def strategies_agree(self) -> dict:
        return {s: self.value_set(s, Strategy.EAGER) == self.value_set(s, Strategy.LAZY)
                for s in Semantics}

    @property
    def all_equal(self) -> bool:
        return len({self.value_set(s, t) for s, t in MODES}) == 1

    def as_dict(self) -> dict:
        return {
            "modes": {f"{s.value}+{t.value}": {
                "values": r.shown(), "failed": r.failed, "fuel_exhausted": r.fuel_exhausted}
                for (s, t), r in self.results.items()},
            "calltime_within_runtime": {t.value: v for t, v in self.calltime_within_runtime.items()},
            "strategies_agree": {s.value: v for s, v in self.strategies_agree.items()},
            "all_equal": self.all_equal,
        }


def compare_semantics(program: CoreProgram, expr: CoreExpr,
                      fuel: int = DEFAULT_FUEL, evaluator: type = Evaluator) -> SemanticsReport:
    return SemanticsReport({
        (s, t): evaluate(program, expr, EvalConfig(s, t, fuel), evaluator) for s, t in MODES})


def eval_lazy_failure_demo(program: Optional[CoreProgram] = None,
                           evaluator: type = Evaluator) -> dict:
    """``head (Cons 0 (tail Nil))`` under call-time choice, per strategy."""
    from .library import load_program
    from .parser import parse_expr
    program = program or load_program("lists")
    expr = parse_expr("head (Cons 0 (tail Nil))", program)
    return {t: evaluate(program, expr, EvalConfig(Semantics.CALL_TIME, t), evaluator)
            for t in Strategy}
