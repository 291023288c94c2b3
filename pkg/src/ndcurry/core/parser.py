"""Parser for the core language.

One declaration per line::

    -- comment
    data Tree a = Leaf | Node (Tree a) a (Tree a)
    double x = add x x
    coin = True ? False
    f x = let y = g x in Pair y y

Constructors are capitalized, functions and variables are lowercase.
``?`` is right-associative choice, ``fail`` is failure, integer literals
are Peano numerals over the built-in ``Z``/``S``, and ``[a, b]`` is sugar
for ``Cons a (Cons b Nil)``.
"""

from __future__ import annotations

import re
from typing import Optional

from .syntax import (
    PRELUDE_CTORS, ChoiceExpr, CoreExpr, CoreProgram, CoreRule, CtorApp,
    FailExpr, FunApp, Let, PCtor, PVar, PWild, Pattern, Var, pattern_vars,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


KEYWORDS = {"data", "let", "in", "fail"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<comment>--.*)
  | (?P<int>\d+)
  | (?P<ctor>[A-Z][A-Za-z0-9_']*)
  | (?P<ident>[a-z][A-Za-z0-9_']*)
  | (?P<sym>[()\[\],=?|_])
""", re.VERBOSE)


class _Tokens:
    def __init__(self, text: str, line: int):
        self.line = line
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                value = m.group()
                if kind == "ident" and value in KEYWORDS:
                    kind = "kw"
                self.items.append((kind, value, pos + 1))
            pos = m.end()
        self.i = 0

    def peek(self) -> Optional[tuple[str, str, int]]:
        return self.items[self.i] if self.i < len(self.items) else None

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[1] == value and tok[0] in ("sym", "kw")

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of line")
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.peek()
        if tok is None or tok[1] != value:
            raise self.error(f"expected {value!r}")
        self.i += 1

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        col = tok[2] if tok else (self.items[-1][2] + len(self.items[-1][1]) if self.items else 1)
        found = f", found {tok[1]!r}" if tok else ""
        return ParseError(message + found, self.line, col)

    def done(self) -> bool:
        return self.i >= len(self.items)


def _peano_pattern(n: int) -> Pattern:
    p: Pattern = PCtor("Z")
    for _ in range(n):
        p = PCtor("S", (p,))
    return p


def _peano_expr(n: int) -> CoreExpr:
    e: CoreExpr = CtorApp("Z")
    for _ in range(n):
        e = CtorApp("S", (e,))
    return e


def _list_expr(items: list) -> CoreExpr:
    e: CoreExpr = CtorApp("Nil")
    for item in reversed(items):
        e = CtorApp("Cons", (item, e))
    return e


# -- patterns -----------------------------------------------------------------------

def _pattern(toks: _Tokens, nested: bool) -> Pattern:
    kind, value, _ = toks.next()
    if kind == "ident":
        return PVar(value)
    if value == "_":
        return PWild()
    if kind == "int":
        return _peano_pattern(int(value))
    if kind == "ctor":
        args = []
        if nested:
            while (tok := toks.peek()) and not toks.at(")") and not toks.at(","):
                args.append(_pattern(toks, nested=False))
        return PCtor(value, tuple(args))
    if value == "(":
        p = _pattern(toks, nested=True)
        toks.expect(")")
        return p
    if value == "[":
        items = []
        if not toks.at("]"):
            items.append(_pattern(toks, nested=True))
            while toks.at(","):
                toks.next()
                items.append(_pattern(toks, nested=True))
        toks.expect("]")
        p: Pattern = PCtor("Nil")
        for item in reversed(items):
            p = PCtor("Cons", (item, p))
        return p
    toks.i -= 1
    raise toks.error("expected a pattern")


# -- expressions ----------------------------------------------------------------------

def _expr(toks: _Tokens) -> CoreExpr:
    if toks.at("let"):
        toks.next()
        kind, name, _ = toks.next()
        if kind != "ident":
            toks.i -= 1
            raise toks.error("expected a variable after 'let'")
        toks.expect("=")
        bound = _expr(toks)
        toks.expect("in")
        return Let(name, bound, _expr(toks))
    left = _app(toks)
    if toks.at("?"):
        toks.next()
        return ChoiceExpr(left, _expr(toks))
    return left


def _starts_atom(toks: _Tokens) -> bool:
    tok = toks.peek()
    if tok is None:
        return False
    kind, value, _ = tok
    return kind in ("ident", "ctor", "int") or value in ("(", "[", "fail")


def _app(toks: _Tokens) -> CoreExpr:
    kind, value, _ = toks.peek() or ("", "", 0)
    if kind in ("ident", "ctor"):
        toks.next()
        args = []
        while _starts_atom(toks):
            args.append(_atom(toks))
        if kind == "ctor":
            return CtorApp(value, tuple(args))
        # variables and functions are told apart during scope checking
        return FunApp(value, tuple(args))
    return _atom(toks)


def _atom(toks: _Tokens) -> CoreExpr:
    kind, value, _ = toks.next()
    if kind == "ident":
        return FunApp(value)
    if kind == "ctor":
        return CtorApp(value)
    if kind == "int":
        return _peano_expr(int(value))
    if value == "fail":
        return FailExpr()
    if value == "(":
        e = _expr(toks)
        toks.expect(")")
        return e
    if value == "[":
        items = []
        if not toks.at("]"):
            items.append(_expr(toks))
            while toks.at(","):
                toks.next()
                items.append(_expr(toks))
        toks.expect("]")
        return _list_expr(items)
    toks.i -= 1
    raise toks.error("expected an expression")


# -- declarations ---------------------------------------------------------------------

def _data(toks: _Tokens, ctors: dict[str, int], line: int) -> None:
    kind, _, _ = toks.next()
    if kind != "ctor":
        toks.i -= 1
        raise toks.error("expected a type name")
    while (tok := toks.peek()) and tok[0] == "ident":
        toks.next()
    toks.expect("=")
    while True:
        kind, name, col = toks.next()
        if kind != "ctor":
            toks.i -= 1
            raise toks.error("expected a constructor")
        arity = 0
        while not toks.done() and not toks.at("|"):
            kind, value, _ = toks.next()
            if value == "(":
                depth = 1
                while depth:
                    value = toks.next()[1]
                    depth += {"(": 1, ")": -1}.get(value, 0)
            elif kind not in ("ident", "ctor"):
                toks.i -= 1
                raise toks.error("expected a constructor argument type")
            arity += 1
        if name in ctors and ctors[name] != arity:
            raise ParseError(f"constructor {name} redeclared with arity {arity}", line, col)
        ctors[name] = arity
        if toks.done():
            return
        toks.expect("|")


def _rule(toks: _Tokens, line: int) -> CoreRule:
    _, fun, _ = toks.next()
    patterns = []
    while not toks.at("="):
        if toks.done():
            raise toks.error("expected '='")
        patterns.append(_pattern(toks, nested=False))
    seen: set[str] = set()
    for p in patterns:
        for v in pattern_vars(p):
            if v in seen:
                raise ParseError(f"non-linear pattern: variable {v!r} occurs twice in rule for {fun}", line, 1)
            seen.add(v)
    toks.expect("=")
    rhs = _expr(toks)
    if not toks.done():
        raise toks.error("unexpected token after rule")
    return CoreRule(fun, tuple(patterns), rhs, line)


def parse_program(text: str) -> CoreProgram:
    """Parse and validate a program; raises ParseError with a line/column."""
    ctors = dict(PRELUDE_CTORS)
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _Tokens(raw, lineno)
        if toks.done():
            continue
        kind, value, _ = toks.peek()
        if kind == "kw" and value == "data":
            toks.next()
            _data(toks, ctors, lineno)
        elif kind == "ident":
            rules.append(_rule(toks, lineno))
        else:
            raise toks.error("expected a rule or data declaration")
    program = CoreProgram(ctors, [])
    arities: dict[str, tuple[int, int]] = {}
    for rule in rules:
        if rule.fun in ctors:
            raise ParseError(f"{rule.fun} is a constructor", rule.line, 1)
        known = arities.setdefault(rule.fun, (len(rule.patterns), rule.line))
        if known[0] != len(rule.patterns):
            raise ParseError(
                f"{rule.fun} has {len(rule.patterns)} arguments here but "
                f"{known[0]} on line {known[1]}", rule.line, 1)
    program.rules = [_check_rule(rule, program.ctors, arities) for rule in rules]
    return program


def _check_pattern(p: Pattern, ctors: dict[str, int], line: int) -> None:
    if isinstance(p, PCtor):
        if p.ctor not in ctors:
            raise ParseError(f"unbound constructor {p.ctor}", line, 1)
        if len(p.args) != ctors[p.ctor]:
            raise ParseError(f"constructor {p.ctor} expects {ctors[p.ctor]} arguments, got {len(p.args)}", line, 1)
        for a in p.args:
            _check_pattern(a, ctors, line)


def _check_rule(rule: CoreRule, ctors, arities) -> CoreRule:
    for p in rule.patterns:
        _check_pattern(p, ctors, rule.line)
    scope = {v for p in rule.patterns for v in pattern_vars(p)}
    rhs = _resolve(rule.rhs, scope, ctors, arities, rule.line)
    return CoreRule(rule.fun, rule.patterns, rhs, rule.line)


def _resolve(e: CoreExpr, scope: set, ctors, arities, line: int) -> CoreExpr:
    """Turn bound names into Var, check arities, and reject unbound names."""
    if isinstance(e, FunApp):
        if e.fun in scope:
            if e.args:
                raise ParseError(f"variable {e.fun} cannot be applied", line, 1)
            return Var(e.fun)
        if e.fun not in arities:
            raise ParseError(f"unbound identifier {e.fun}", line, 1)
        want = arities[e.fun][0]
        if len(e.args) != want:
            raise ParseError(f"function {e.fun} expects {want} arguments, got {len(e.args)}", line, 1)
        return FunApp(e.fun, tuple(_resolve(a, scope, ctors, arities, line) for a in e.args))
    if isinstance(e, CtorApp):
        if e.ctor not in ctors:
            raise ParseError(f"unbound constructor {e.ctor}", line, 1)
        if len(e.args) != ctors[e.ctor]:
            raise ParseError(f"constructor {e.ctor} expects {ctors[e.ctor]} arguments, got {len(e.args)}", line, 1)
        return CtorApp(e.ctor, tuple(_resolve(a, scope, ctors, arities, line) for a in e.args))
    if isinstance(e, ChoiceExpr):
        return ChoiceExpr(_resolve(e.left, scope, ctors, arities, line),
                          _resolve(e.right, scope, ctors, arities, line), e.cid)
    if isinstance(e, Let):
        bound = _resolve(e.bound, scope, ctors, arities, line)
        return Let(e.name, bound, _resolve(e.body, scope | {e.name}, ctors, arities, line))
    return e


def parse_expr(text: str, program: CoreProgram) -> CoreExpr:
    """Parse a closed expression against the functions of ``program``."""
    toks = _Tokens(text, 1)
    e = _expr(toks)
    if not toks.done():
        raise toks.error("unexpected token after expression")
    arities = {f: (program.arity(f), 0) for f in program.functions}
    return _resolve(e, set(), program.ctors, arities, 1)
