"""Deliberately broken variants of the library, used to show the laws have teeth."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .. import tree as nd
from ..core.evaluator import Evaluator
from ..plan import lchoice, rchoice
from .ops import REFERENCE, Ops
from .suite import LawConfig, LawReport, replay, run_all


def _map_drop_right(f, t):
    if type(t) is nd.Val:
        return nd.Val(f(t.value))
    if type(t) is nd.Choice:
        return nd.Choice(_map_drop_right(f, t.left), nd.fail())
    return t


class _FreshPullIds(Evaluator):
    """Pull-tab steps mint a new id instead of keeping the pulled choice's."""

    def pulled_id(self, cid):
        return self.fresh_id()


class _EagerOnly(Evaluator):
    def run(self, expr):
        return self.eager(expr, {})


def _insert_drops_last(x, xs):
    xs = tuple(xs)
    if not xs:
        return ()
    y = xs[0]
    if x < y:
        return (x,) + xs
    return (y,) + _insert_drops_last(x, xs[1:])


def _sort_with(insert):
    def sort(xs):
        out = ()
        for x in reversed(tuple(xs)):
            out = insert(x, out)
        return out
    return sort


def _unshared_eo_nd(ops, n):
    # double a = a + a with each occurrence of a drawing its own choice
    return ops.bind_nd(lambda a: ops.map_det(lambda b: a + b, ops.eo_nd(n)), ops.eo_nd(n))


def _unshared_eo_plan(ops, p, n):
    return ops.eo_plan(lchoice(p), n) + ops.eo_plan(rchoice(p), n)


@dataclass(frozen=True)
class Mutant:
    name: str
    description: str
    build: Callable[[Ops], Ops]
    # laws expected to notice; the battery runs exactly these
    targets: tuple[str, ...]

    def ops(self, base: Ops = REFERENCE) -> Ops:
        return self.build(base)


MUTANTS: dict[str, Mutant] = {m.name: m for m in [
    Mutant("drop-right-branch-map", "map_det replaces every right branch by Fail",
           lambda o: o.mutate("drop-right-branch-map", map_det=_map_drop_right),
           ("satisfy-map", "member-map")),
    Mutant("inconsistent-choice-ids", "pull-tab gives the pulled choice a fresh id",
           lambda o: o.mutate("inconsistent-choice-ids", evaluator=_FreshPullIds),
           ("semantics-contrast",)),
    Mutant("eager-only-evaluator", "the lazy strategy runs the eager evaluator",
           lambda o: o.mutate("eager-only-evaluator", evaluator=_EagerOnly),
           ("laziness-failure", "semantics-contrast")),
    Mutant("off-by-one-insert", "insert x [] = [] drops an element that belongs at the end",
           lambda o: o.mutate("off-by-one-insert", insert=_insert_drops_last,
                              sort=_sort_with(_insert_drops_last)),
           ("insert-ndinsert", "sortPerm")),
    Mutant("unshared-double", "double over eo draws an independent choice per use of its argument",
           lambda o: o.mutate("unshared-double", doubled_eo_nd=_unshared_eo_nd,
                              doubled_eo_plan=_unshared_eo_plan),
           ("even-double-eo-nd", "even-double-eo-plan")),
]}


@dataclass
class MutantResult:
    mutant: str
    reports: list[LawReport]
    # per failing law: does the recorded counterexample fail again on replay?
    replayed: dict[str, bool]

    @property
    def killed(self) -> bool:
        return any(not r.passed and self.replayed.get(r.name) for r in self.reports)

    def as_dict(self) -> dict:
        return {"mutant": self.mutant, "killed": self.killed,
                "laws": [r.as_dict() for r in self.reports], "replayed": self.replayed}


def run_mutant(name: str, config: Optional[LawConfig] = None,
               laws: Optional[tuple[str, ...]] = None) -> MutantResult:
    mutant = MUTANTS[name]
    ops = mutant.ops()
    names = laws or mutant.targets
    reports = run_all(names, ops=ops, config=config)
    replayed = {r.name: replay(r.name, r.counterexample, ops=ops, config=config)
                for r in reports if not r.passed}
    return MutantResult(name, reports, replayed)


def run_battery(config: Optional[LawConfig] = None) -> list[MutantResult]:
    return [run_mutant(name, config) for name in MUTANTS]
