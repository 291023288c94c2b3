"""The operations a law exercises, bundled so a mutant can swap any of them."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable

from .. import programs as pg
from .. import tree as nd
from ..core import evaluator as ev


def _doubled_eo_nd(ops: "Ops", n: int) -> nd.NDTree:
    return ops.map_det(ops.double, ops.eo_nd(n))


def _doubled_eo_plan(ops: "Ops", p, n: int) -> int:
    return ops.double(ops.eo_plan(p, n))


@dataclass(frozen=True)
class Ops:
    name: str = "reference"
    # False once anything is swapped out; the flat kernels only model the reference
    reference: bool = True

    map_det: Callable = nd.map_det
    bind_nd: Callable = nd.bind_nd
    satisfy: Callable = nd.satisfy
    always: Callable = nd.always
    values: Callable = nd.values
    member: Callable = nd.member
    check_witness: Callable = nd.check_witness
    map_witness: Callable = nd.map_witness
    bind_witness: Callable = nd.bind_witness
    if_intro: Callable = nd.if_intro

    ndinsert_nd: Callable = pg.ndinsert_nd
    perm_nd: Callable = pg.perm_nd
    perm_plan: Callable = pg.perm_plan
    insert: Callable = pg.insert
    sort: Callable = pg.sort

    eo_nd: Callable = pg.eo_nd
    eo_plan: Callable = pg.eo_plan
    double: Callable = pg.double
    even: Callable = pg.even
    double_nat: Callable = pg.double_nat
    even_nat: Callable = pg.even_nat
    doubled_eo_nd: Callable[["Ops", int], Any] = _doubled_eo_nd
    doubled_eo_plan: Callable[["Ops", Any, int], Any] = _doubled_eo_plan

    min_nd: Callable = pg.min_nd
    min_plan: Callable = pg.min_plan
    min_det: Callable = pg.min_det
    last_splits: Callable = pg.last_splits

    evaluator: type = ev.Evaluator

    def mutate(self, name: str, **changes) -> "Ops":
        return replace(self, name=name, reference=False, **changes)


REFERENCE = Ops()
