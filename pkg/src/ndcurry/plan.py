"""Planned choices: a deterministic oracle consulted at every choice point.

A plan is a table of bits indexed by *addresses*, strings over ``L``/``R``,
plus a default bit for addresses the table does not list.  A plan also
sits at a current address; ``choose`` reads the bit there, and ``lchoice``
/ ``rchoice`` move to the child addresses so that two sub-computations
never consult the same bit.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterator, Mapping, Optional

MAX_ENUMERATED_ADDRESSES = 20


class PlanBudgetError(ValueError):
    pass


class PlanSyntaxError(ValueError):
    pass


class ChoicePlan:
    __slots__ = ("_bits", "default", "current", "_log")

    def __init__(self, bits: Optional[Mapping[str, bool]] = None,
                 default: bool = False, current: str = "", log=None):
        bits = dict(bits or {})
        for address in bits:
            if address.strip("LR"):
                raise ValueError(f"bad plan address {address!r}")
        self._bits = bits
        self.default = bool(default)
        self.current = current
        # consulted addresses, shared by every plan derived from this one
        self._log = log

    @property
    def bits(self) -> Mapping[str, bool]:
        return dict(self._bits)

    def _derive(self, step: str) -> "ChoicePlan":
        p = ChoicePlan.__new__(ChoicePlan)
        p._bits = self._bits
        p.default = self.default
        p.current = self.current + step
        p._log = self._log
        return p

    def _read(self) -> bool:
        if self._log is not None:
            self._log.append(self.current)
        return self._bits.get(self.current, self.default)

    def traced(self) -> tuple["ChoicePlan", list]:
        """A copy of this plan that records every consulted address."""
        log: list = []
        return ChoicePlan(self._bits, self.default, self.current, log), log

    def __eq__(self, other):
        if not isinstance(other, ChoicePlan):
            return NotImplemented
        return (self._bits, self.default, self.current) == \
            (other._bits, other.default, other.current)

    def __hash__(self):
        return hash((frozenset(self._bits.items()), self.default, self.current))

    def __repr__(self):
        return f"ChoicePlan({format_plan(self)!r})"


def choose(p: ChoicePlan) -> bool:
    return p._read()


def lchoice(p: ChoicePlan) -> ChoicePlan:
    return p._derive("L")


def rchoice(p: ChoicePlan) -> ChoicePlan:
    return p._derive("R")


# -- literal syntax -------------------------------------------------------------

def parse_plan(text: str) -> ChoicePlan:
    """Parse ``"=1,L=0,RL=1,default=0"``; the root address is spelled ``=``."""
    bits: dict[str, bool] = {}
    default = False
    for item in filter(None, (part.strip() for part in text.split(","))):
        address, sep, bit = item.rpartition("=")
        if not sep or bit not in ("0", "1"):
            raise PlanSyntaxError(f"bad plan entry {item!r}")
        if address == "default":
            default = bit == "1"
            continue
        if address.strip("LR"):
            raise PlanSyntaxError(f"bad plan address {address!r}")
        if address in bits:
            raise PlanSyntaxError(f"address {address or '='!r} given twice")
        bits[address] = bit == "1"
    return ChoicePlan(bits, default)


def format_plan(p: ChoicePlan) -> str:
    items = [f"{a}={int(b)}" for a, b in sorted(p._bits.items(), key=lambda kv: (len(kv[0]), kv[0]))]
    items.append(f"default={int(p.default)}")
    return ",".join(items)


# -- enumeration ------------------------------------------------------------------

def addresses(depth: int) -> list[str]:
    """All addresses of length <= depth, shortest first."""
    out = []
    for n in range(depth + 1):
        out.extend("".join(bits) for bits in itertools.product("LR", repeat=n))
    return out


def enumerate_plans(depth: int, default: bool = False) -> Iterator[ChoicePlan]:
    """Every assignment of the addresses of length <= ``depth``."""
    if depth < 0:
        raise PlanBudgetError("depth must be non-negative")
    addrs = addresses(depth)
    if len(addrs) > MAX_ENUMERATED_ADDRESSES:
        raise PlanBudgetError(
            f"depth {depth} spans {len(addrs)} addresses "
            f"(limit {MAX_ENUMERATED_ADDRESSES})")
    for bits in itertools.product((False, True), repeat=len(addrs)):
        yield ChoicePlan(dict(zip(addrs, bits)), default)


def closure_depth(fn: Callable[[ChoicePlan], object], max_depth: int = 3) -> int:
    """Smallest depth whose full enumeration covers every consulted address.

    Raises PlanBudgetError if the consulted set is not closed by ``max_depth``.
    """
    for depth in range(max_depth + 1):
        longest = 0
        for plan in enumerate_plans(depth):
            traced, log = plan.traced()
            fn(traced)
            longest = max([longest, *map(len, log)])
        if longest <= depth:
            return depth
    raise PlanBudgetError(f"consulted addresses not closed at depth {max_depth}")


def explore_plans(fn: Callable[[ChoicePlan], object],
                  limit: int = 1 << 20) -> Iterator[tuple[ChoicePlan, object]]:
    """Run ``fn`` once per distinct path through its choice points.

    Only consulted addresses are branched on, so a function with ``k``
    reachable execution paths costs ``k`` runs however many addresses it
    reads.  Yields ``(plan, fn(plan))``; each plan lists exactly the bits
    that run consulted.  Unconsulted addresses read the default (False).
    """
    fixed: dict[str, bool] = {}
    trail: list[str] = []
    runs = 0
    while True:
        runs += 1
        if runs > limit:
            raise PlanBudgetError(f"more than {limit} execution paths")
        plan = _ExplorePlan(fixed, trail)
        result = fn(plan)
        yield ChoicePlan({a: fixed[a] for a in trail}), result
        while trail and fixed[trail[-1]]:
            del fixed[trail.pop()]
        if not trail:
            return
        fixed[trail[-1]] = True


class _ExplorePlan(ChoicePlan):
    """Plan whose first read of an unassigned address fixes it to False."""

    __slots__ = ()

    def __init__(self, fixed, trail):
        self._bits = fixed
        self.default = False
        self.current = ""
        self._log = trail

    def _derive(self, step):
        p = _ExplorePlan.__new__(_ExplorePlan)
        p._bits = self._bits
        p.default = False
        p.current = self.current + step
        p._log = self._log
        return p

    def _read(self):
        bits = self._bits
        if self.current not in bits:
            bits[self.current] = False
            self._log.append(self.current)
        return bits[self.current]
