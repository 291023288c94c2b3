"""Abstract syntax of the core language and its ground values."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


# -- expressions ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class CtorApp:
    ctor: str
    args: tuple = ()


@dataclass(frozen=True)
class FunApp:
    fun: str
    args: tuple = ()


@dataclass(frozen=True)
class ChoiceExpr:
    left: "CoreExpr"
    right: "CoreExpr"
    # set once the choice has been reduced and labelled
    cid: Optional[int] = None


@dataclass(frozen=True)
class FailExpr:
    pass


@dataclass(frozen=True)
class Let:
    name: str
    bound: "CoreExpr"
    body: "CoreExpr"


CoreExpr = Union[Var, CtorApp, FunApp, ChoiceExpr, FailExpr, Let]


# -- patterns and programs --------------------------------------------------------

@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PWild:
    pass


@dataclass(frozen=True)
class PCtor:
    ctor: str
    args: tuple = ()


Pattern = Union[PVar, PWild, PCtor]


@dataclass(frozen=True)
class CoreRule:
    fun: str
    patterns: tuple
    rhs: CoreExpr
    line: int = 0


@dataclass
class CoreProgram:
    ctors: dict[str, int] = field(default_factory=dict)
    rules: list[CoreRule] = field(default_factory=list)

    def arity(self, fun: str) -> int:
        for rule in self.rules:
            if rule.fun == fun:
                return len(rule.patterns)
        raise KeyError(fun)

    def rules_for(self, fun: str) -> list[CoreRule]:
        return [r for r in self.rules if r.fun == fun]

    @property
    def functions(self) -> set[str]:
        return {r.fun for r in self.rules}


PRELUDE_CTORS = {"Z": 0, "S": 1, "False": 0, "True": 0, "Nil": 0, "Cons": 2}


def pattern_vars(p: Pattern) -> list[str]:
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, PCtor):
        return [v for a in p.args for v in pattern_vars(a)]
    return []


# -- ground values ------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    ctor: str
    args: tuple = ()

    def __str__(self):
        return show_term(self)


def peano(n: int) -> Term:
    t = Term("Z")
    for _ in range(n):
        t = Term("S", (t,))
    return t


def numeral(e) -> Optional[int]:
    n = 0
    while isinstance(e, (Term, CtorApp)):
        name = e.ctor
        if name == "Z" and not e.args:
            return n
        if name == "S" and len(e.args) == 1:
            n, e = n + 1, e.args[0]
            continue
        return None
    return None


def list_items(t: Term) -> Optional[list]:
    items = []
    while t.ctor == "Cons" and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    return items if t.ctor == "Nil" and not t.args else None


def show_term(t: Term) -> str:
    n = numeral(t)
    if n is not None:
        return str(n)
    items = list_items(t)
    if items is not None:
        return "[" + ",".join(show_term(x) for x in items) + "]"
    if not t.args:
        return t.ctor
    parts = [t.ctor]
    for a in t.args:
        s = show_term(a)
        simple = not a.args or numeral(a) is not None or list_items(a) is not None
        parts.append(s if simple else f"({s})")
    return " ".join(parts)


def term_of_python(x) -> Term:
    """Integers become numerals, bools become True/False, sequences become lists."""
    if isinstance(x, bool):
        return Term("True" if x else "False")
    if isinstance(x, int):
        return peano(x)
    if isinstance(x, (list, tuple)):
        t = Term("Nil")
        for item in reversed(x):
            t = Term("Cons", (term_of_python(item), t))
        return t
    raise TypeError(f"no core term for {x!r}")


def expr_of_term(t: Term) -> CoreExpr:
    return CtorApp(t.ctor, tuple(expr_of_term(a) for a in t.args))


def show_expr(e: CoreExpr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, FailExpr):
        return "fail"
    if isinstance(e, ChoiceExpr):
        op = "?" if e.cid is None else f"?{e.cid}"
        return f"({show_expr(e.left)} {op} {show_expr(e.right)})"
    if isinstance(e, Let):
        return f"(let {e.name} = {show_expr(e.bound)} in {show_expr(e.body)})"
    if isinstance(e, CtorApp):
        n = numeral(e)
        if n is not None:
            return str(n)
        head = e.ctor
    else:
        head = e.fun
    if not e.args:
        return head
    return "(" + " ".join([head, *(show_expr(a) for a in e.args)]) + ")"
