"""Choice trees: the set-of-values encoding of non-deterministic results.

A tree is built from three node kinds:

    Val(x)          a single computed value
    Choice(l, r)    either the values of ``l`` or those of ``r``
    Fail()          no value at all

Trees are immutable.  Every combinator returns a fresh tree and never
touches its input, so structural equality (``==``) is the equality used
throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Optional, Union


@dataclass(frozen=True, slots=True)
class Val:
    value: Any


@dataclass(frozen=True, slots=True)
class Choice:
    left: "NDTree"
    right: "NDTree"


@dataclass(frozen=True, slots=True)
class Fail:
    pass


NDTree = Union[Val, Choice, Fail]

_FAIL = Fail()


def val(x) -> Val:
    return Val(x)


def choice(left: NDTree, right: NDTree) -> Choice:
    return Choice(left, right)


def fail() -> Fail:
    return _FAIL


def choices(*trees: NDTree) -> NDTree:
    """Right-nested choice over ``trees``; an empty call is a failure."""
    if not trees:
        return _FAIL
    result = trees[-1]
    for t in reversed(trees[:-1]):
        result = Choice(t, result)
    return result


def map_det(f: Callable, t: NDTree) -> NDTree:
    """Apply a deterministic function to every value, keeping the shape."""
    if type(t) is Val:
        return Val(f(t.value))
    if type(t) is Choice:
        return Choice(map_det(f, t.left), map_det(f, t.right))
    return t


def bind_nd(f: Callable[[Any], NDTree], t: NDTree) -> NDTree:
    """Replace every ``Val(x)`` leaf by the tree ``f(x)``."""
    if type(t) is Val:
        return f(t.value)
    if type(t) is Choice:
        return Choice(bind_nd(f, t.left), bind_nd(f, t.right))
    return t


def iter_values(t: NDTree) -> Iterator:
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is Val:
            yield node.value
        elif type(node) is Choice:
            stack.append(node.right)
            stack.append(node.left)


def values(t: NDTree) -> list:
    """Val payloads in left-to-right order."""
    return list(iter_values(t))


def satisfy(t: NDTree, p: Callable[[Any], bool]) -> bool:
    # vacuously true on Fail
    return all(p(x) for x in iter_values(t))


def always(t: NDTree) -> bool:
    return all(iter_values(t))


def depth(t: NDTree) -> int:
    if type(t) is Choice:
        return 1 + max(depth(t.left), depth(t.right))
    return 0


def size(t: NDTree) -> int:
    if type(t) is Choice:
        return 1 + size(t.left) + size(t.right)
    return 1


# -- membership witnesses ---------------------------------------------------

LEFT = "L"
RIGHT = "R"


class InvalidWitness(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Witness:
    """Path from the root of a tree to a ``Val`` leaf.

    ``Witness()`` is the reflexivity witness for ``x in Val(x)``; ``left``
    and ``right`` extend a witness for a subtree to its parent choice.
    """

    path: str = ""

    def __post_init__(self):
        if self.path.strip(LEFT + RIGHT):
            raise ValueError(f"witness path must be over L/R: {self.path!r}")

    @classmethod
    def left(cls, inner: "Witness") -> "Witness":
        return cls(LEFT + inner.path)

    @classmethod
    def right(cls, inner: "Witness") -> "Witness":
        return cls(RIGHT + inner.path)

    def __add__(self, other: "Witness") -> "Witness":
        return Witness(self.path + other.path)

    def __len__(self) -> int:
        return len(self.path)

    def __str__(self) -> str:
        return self.path


def member(x, t: NDTree) -> Optional[Witness]:
    """Leftmost witness of ``x`` among the values of ``t``, or None."""
    stack = [(t, "")]
    while stack:
        node, path = stack.pop()
        if type(node) is Val:
            if node.value == x:
                return Witness(path)
        elif type(node) is Choice:
            stack.append((node.right, path + RIGHT))
            stack.append((node.left, path + LEFT))
    return None


def follow(t: NDTree, w: Witness) -> Optional[NDTree]:
    """Node reached by walking ``w`` from the root; None if the walk leaves the tree."""
    node = t
    for step in w.path:
        if type(node) is not Choice:
            return None
        node = node.left if step == LEFT else node.right
    return node


def check_witness(x, t: NDTree, w: Witness) -> bool:
    node = follow(t, w)
    return type(node) is Val and node.value == x


def _require(x, t, w, what):
    if not check_witness(x, t, w):
        raise InvalidWitness(f"{what}: {str(w)!r} does not locate {x!r}")


def map_witness(f: Callable, x, t: NDTree, w: Witness) -> Witness:
    """Witness for ``f(x)`` in ``map_det(f, t)`` given one for ``x`` in ``t``.

    ``map_det`` keeps the tree shape, so the path is reused verbatim.
    """
    _require(x, t, w, "map_witness")
    return w


def bind_witness(x, t: NDTree, f_det: Callable, f_nd: Callable[[Any], NDTree],
                 w_outer: Witness, w_inner: Witness) -> Witness:
    """Witness for ``f_det(x)`` in ``bind_nd(f_nd, t)``.

    ``w_outer`` locates ``x`` in ``t`` and ``w_inner`` locates ``f_det(x)``
    in ``f_nd(x)``.  The leaf reached by ``w_outer`` is exactly where
    ``f_nd(x)`` gets grafted, so the two paths concatenate.
    """
    _require(x, t, w_outer, "bind_witness (outer)")
    _require(f_det(x), f_nd(x), w_inner, "bind_witness (inner)")
    return w_outer + w_inner


def if_intro(c: bool, x, y, t: NDTree, wx: Witness, wy: Witness) -> Witness:
    """Witness for ``x if c else y`` given witnesses for both branches."""
    _require(x, t, wx, "if_intro (then)")
    _require(y, t, wy, "if_intro (else)")
    return wx if c else wy


# -- serialization ------------------------------------------------------------

def _plain(x):
    if isinstance(x, tuple):
        return [_plain(v) for v in x]
    return x


def _frozen(x):
    if isinstance(x, list):
        return tuple(_frozen(v) for v in x)
    return x


def to_data(t: NDTree):
    """JSON-compatible form: {"val": v}, {"l": .., "r": ..} or "fail"."""
    if type(t) is Val:
        return {"val": _plain(t.value)}
    if type(t) is Choice:
        return {"l": to_data(t.left), "r": to_data(t.right)}
    return "fail"


def from_data(data) -> NDTree:
    if data == "fail":
        return _FAIL
    if isinstance(data, dict):
        if set(data) == {"val"}:
            return Val(_frozen(data["val"]))
        if set(data) == {"l", "r"}:
            return Choice(from_data(data["l"]), from_data(data["r"]))
    raise ValueError(f"not a serialized tree: {data!r}")


def dumps(t: NDTree) -> str:
    return json.dumps(to_data(t), separators=(",", ":"))


def loads(text: str) -> NDTree:
    return from_data(json.loads(text))
