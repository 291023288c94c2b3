"""The example programs, each in both encodings, plus deterministic versions.

Lists are tuples so that values can be compared and hashed structurally.
Free variables and functional patterns are replaced by explicit
enumeration of the finitely many splits/positions of the list at hand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence, Union

from .plan import ChoicePlan, choose, lchoice, rchoice
from .tree import NDTree, Val, Choice, bind_nd, choices, fail, map_det


# -- unary naturals ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Zero:
    def __int__(self):
        return 0


@dataclass(frozen=True, slots=True)
class Succ:
    pred: "Nat"

    def __int__(self):
        n, k = self, 0
        while isinstance(n, Succ):
            n, k = n.pred, k + 1
        return k


Nat = Union[Zero, Succ]
Z = Zero()


def to_nat(n: int) -> Nat:
    if n < 0:
        raise ValueError("naturals are non-negative")
    result: Nat = Z
    for _ in range(n):
        result = Succ(result)
    return result


def from_nat(n: Nat) -> int:
    return int(n)


def add_nat(x: Nat, y: Nat) -> Nat:
    # x + y by recursion on x
    stack = 0
    while isinstance(x, Succ):
        x, stack = x.pred, stack + 1
    for _ in range(stack):
        y = Succ(y)
    return y


def double_nat(x: Nat) -> Nat:
    return add_nat(x, x)


def even_nat(x: Nat) -> bool:
    while True:
        if isinstance(x, Zero):
            return True
        if isinstance(x.pred, Zero):
            return False
        x = x.pred.pred


def double(x: int) -> int:
    return x + x


def even(x: int) -> bool:
    return x % 2 == 0


# -- Maybe ------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Just:
    value: Any


@dataclass(frozen=True, slots=True)
class Nothing:
    pass


MaybeValue = Union[Just, Nothing]
NOTHING = Nothing()


# -- permutations -------------------------------------------------------------------

def ndinsert_nd(x, xs: Sequence) -> NDTree:
    xs = tuple(xs)
    if not xs:
        return Val((x,))
    y = xs[0]
    return Choice(Val((x,) + xs), map_det(lambda ys: (y,) + ys, ndinsert_nd(x, xs[1:])))


def perm_nd(xs: Sequence) -> NDTree:
    xs = tuple(xs)
    if not xs:
        return Val(())
    x = xs[0]
    return bind_nd(lambda ys: ndinsert_nd(x, ys), perm_nd(xs[1:]))


def ndinsert_plan(p: ChoicePlan, x, xs: Sequence) -> tuple:
    xs = tuple(xs)
    if not xs:
        return (x,)
    if choose(p):
        return (x,) + xs
    return (xs[0],) + ndinsert_plan(lchoice(p), x, xs[1:])


def perm_plan(p: ChoicePlan, xs: Sequence) -> tuple:
    xs = tuple(xs)
    if not xs:
        return ()
    return ndinsert_plan(lchoice(p), xs[0], perm_plan(rchoice(p), xs[1:]))


def splits(xs: Sequence) -> list[tuple[tuple, tuple]]:
    """All (ys, zs) with ys + zs == xs: the instances of two free list variables."""
    xs = tuple(xs)
    return [(xs[:i], xs[i:]) for i in range(len(xs) + 1)]


def ndins_split_nd(x, xs: Sequence) -> NDTree:
    return choices(*(Val(ys + (x,) + zs) for ys, zs in splits(xs)))


# -- even / double / eo -----------------------------------------------------------

def eo_nd(n: int) -> NDTree:
    return Choice(Val(n), Val(n + 1))


def eo_plan(p: ChoicePlan, n: int) -> int:
    return n if choose(p) else n + 1


# -- insertion sort ---------------------------------------------------------------

def insert(x: int, xs: Sequence[int]) -> tuple:
    xs = tuple(xs)
    if not xs:
        return (x,)
    y = xs[0]
    if x < y:
        return (x,) + xs
    return (y,) + insert(x, xs[1:])


def sort(xs: Sequence[int]) -> tuple:
    xs = tuple(xs)
    if not xs:
        return ()
    return insert(xs[0], sort(xs[1:]))


# -- partial functions: minimum and last -----------------------------------------

def min_nd(xs: Sequence[int]) -> NDTree:
    """One leaf per element position: Val if that element is minimal, else Fail."""
    xs = tuple(xs)
    if not xs:
        return fail()
    return choices(*(Val(x) if all(x <= y for y in xs) else fail() for x in xs))


def _pick(p: ChoicePlan, xs: tuple):
    if len(xs) == 1 or choose(p):
        return xs[0]
    return _pick(lchoice(p), xs[1:])


def min_plan(p: ChoicePlan, xs: Sequence[int]) -> MaybeValue:
    xs = tuple(xs)
    if not xs:
        return NOTHING
    x = _pick(p, xs)
    return Just(x) if all(x <= y for y in xs) else NOTHING


class EmptyListError(ValueError):
    pass


def min_det(xs: Sequence[int]) -> int:
    xs = tuple(xs)
    if not xs:
        raise EmptyListError("min_det needs a non-empty list")
    if len(xs) == 1:
        return xs[0]
    z = min_det(xs[1:])
    return xs[0] if xs[0] <= z else z


def last_splits(xs: Sequence) -> NDTree:
    """``last xs | ys ++ [x] == xs = x`` with ys, x ranging over the splits of xs.

    Each split (ys, rest) proposes ys as the prefix and, when rest is
    non-empty, its head as x; the guard then keeps only consistent ones.
    """
    xs = tuple(xs)
    leaves = []
    for ys, rest in splits(xs):
        if rest and ys + (rest[0],) == xs:
            leaves.append(Val(rest[0]))
        else:
            leaves.append(fail())
    return choices(*leaves)


# -- registry ---------------------------------------------------------------------

@dataclass(frozen=True)
class Example:
    """A registered example: how to parse CLI arguments and run each encoding."""

    name: str
    arity: int
    nd: Callable[..., NDTree]
    plan: Optional[Callable[..., Any]]
    doc: str
    # successful plan outputs, unwrapped; None marks a failed run
    plan_value: Callable[[Any], Any] = lambda v: v


def _unwrap(m):
    return m.value if isinstance(m, Just) else None


def _double_even_nd(n: int) -> NDTree:
    return map_det(lambda k: even(double(k)), eo_nd(n))


def _double_even_plan(p: ChoicePlan, n: int) -> bool:
    return even(double(eo_plan(p, n)))


def _sort_nd(xs) -> NDTree:
    return Val(sort(xs))


REGISTRY: dict[str, Example] = {
    e.name: e for e in [
        Example("perm", 1, perm_nd, perm_plan, "all permutations of a list"),
        Example("ndinsert", 2, ndinsert_nd, ndinsert_plan,
                "insert an element anywhere in a list"),
        Example("ndins", 2, ndins_split_nd, None,
                "insertion via free-variable list splits"),
        Example("eo", 1, eo_nd, eo_plan, "n or n+1"),
        Example("double-even", 1, _double_even_nd, _double_even_plan,
                "even (double (eo n))"),
        Example("sort", 1, _sort_nd, None, "insertion sort (deterministic)"),
        Example("min", 1, min_nd, min_plan, "a minimal element, via positions",
                plan_value=_unwrap),
        Example("last", 1, last_splits, None, "last element, via splits"),
    ]
}
