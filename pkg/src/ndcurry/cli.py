"""Command-line front end: ``values``, ``eval``, ``laws`` and ``plans``.

Exit codes: 0 success; 1 a law failed, or ``--expect-values`` saw no value;
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional, Sequence

from . import tree as nd
from .core import EvalConfig, ParseError, Semantics, Strategy, evaluate, load_program, parse_expr
from .core.evaluator import DEFAULT_FUEL, EvalError, _canonical_key
from .laws import mutants as mut
from .laws import suite
from .plan import (
    PlanBudgetError, PlanSyntaxError, enumerate_plans, explore_plans, format_plan, parse_plan,
)
from .programs import REGISTRY, Example

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument and value formatting ----------------------------------------------------

def parse_arg(text: str) -> Any:
    """``"[1,2,3]"`` becomes a tuple of ints, ``"4"`` an int."""
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise UsageError(f"unterminated list literal {text!r}")
        body = text[1:-1].strip()
        if not body:
            return ()
        try:
            return tuple(int(part) for part in body.split(","))
        except ValueError:
            raise UsageError(f"bad list literal {text!r}") from None
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"expected an integer or a [..] list, got {text!r}") from None


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def show(v) -> str:
    return json.dumps(_plain(v), separators=(",", ":"))


def canonical(values) -> list:
    # lexicographic on the serialized form
    return sorted(values, key=show)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# -- subcommands ----------------------------------------------------------------------

def _example(name: str, args: Sequence[str]) -> tuple[Example, tuple]:
    if name not in REGISTRY:
        raise UsageError(f"unknown example {name!r}; known: {', '.join(REGISTRY)}")
    ex = REGISTRY[name]
    if len(args) != ex.arity:
        raise UsageError(f"{name} takes {ex.arity} argument(s), got {len(args)}")
    parsed = tuple(parse_arg(a) for a in args)
    if any(isinstance(a, int) and a < 0 for a in parsed):
        raise UsageError("arguments must be non-negative")
    return ex, parsed


def _plan_runs(ex: Example, parsed: tuple, depth: Optional[int]):
    """(plan, raw output) for every plan: the full table at ``depth``, else explored."""
    fn = lambda p: ex.plan(p, *parsed)
    if depth is None:
        return list(explore_plans(fn))
    return [(p, fn(p)) for p in enumerate_plans(depth)]


def _check_plan_flags(opts) -> None:
    if opts.encoding != "plan" and (opts.plan is not None or opts.depth is not None):
        raise UsageError("--plan and --depth need --encoding plan")
    if opts.plan is not None and opts.depth is not None:
        raise UsageError("--plan and --depth are exclusive")


def cmd_values(opts) -> int:
    _check_plan_flags(opts)
    ex, parsed = _example(opts.example, opts.args)
    result: dict = {"example": ex.name, "args": [_plain(a) for a in parsed],
                    "encoding": opts.encoding}
    if opts.encoding == "nd":
        values = nd.values(ex.nd(*parsed))
    else:
        if ex.plan is None:
            raise UsageError(f"{ex.name} has no planned-choice encoding")
        if opts.plan is not None:
            plan = parse_plan(opts.plan)
            runs = [(plan, ex.plan(plan, *parsed))]
            result["plan"] = format_plan(plan)
        else:
            runs = _plan_runs(ex, parsed, opts.depth)
            result["plans"] = len(runs)
        outs = [ex.plan_value(out) for _p, out in runs]
        values = [v for v in outs if v is not None]
        if opts.plan is None:
            values = list(dict.fromkeys(values))
    values = canonical(values)
    if opts.format == "json":
        result["values"] = [_plain(v) for v in values]
        print(_dump(result))
    else:
        for v in values:
            print(show(v))
        if not values:
            print("(no values)")
    return EXIT_FAIL if opts.expect_values and not values else EXIT_OK


def cmd_plans(opts) -> int:
    ex, parsed = _example(opts.example, opts.args)
    if ex.plan is None:
        raise UsageError(f"{ex.name} has no planned-choice encoding")
    runs = _plan_runs(ex, parsed, opts.depth)
    rows = []
    for plan, out in runs:
        v = ex.plan_value(out)
        rows.append({"plan": format_plan(plan), "output": None if v is None else _plain(v)})
    if opts.format == "json":
        print(_dump({"example": ex.name, "args": [_plain(a) for a in parsed],
                     "mode": "explore" if opts.depth is None else f"depth {opts.depth}",
                     "plans": rows}))
    else:
        width = max((len(r["plan"]) for r in rows), default=0)
        for r in rows:
            out = "no value" if r["output"] is None else show(r["output"])
            print(f"{r['plan']:<{width}}  ->  {out}")
    return EXIT_OK


def cmd_eval(opts) -> int:
    if opts.fuel < 1:
        raise UsageError("--fuel must be positive")
    try:
        program = load_program(opts.program)
    except FileNotFoundError as e:
        raise UsageError(str(e)) from None
    except ParseError as e:
        raise UsageError(f"{opts.program}:{e}") from None
    try:
        expr = parse_expr(opts.expr, program)
    except ParseError as e:
        raise UsageError(f"expression: {e}") from None
    config = EvalConfig(Semantics(opts.semantics), Strategy(opts.strategy), opts.fuel)
    try:
        r = evaluate(program, expr, config)
    except EvalError as e:
        raise UsageError(str(e)) from None
    shown = sorted(r.shown(), key=_canonical_key)
    if opts.format == "json":
        print(_dump({"program": opts.program, "expr": opts.expr, "semantics": opts.semantics,
                     "strategy": opts.strategy, "fuel": opts.fuel, "values": shown,
                     "value_set": sorted(set(shown), key=_canonical_key),
                     "failed": r.failed, "fuel_exhausted": r.fuel_exhausted}))
    else:
        print(f"[{', '.join(shown)}] failed={r.failed} fuel_exhausted={r.fuel_exhausted}")
    return EXIT_FAIL if opts.expect_values and not r.values else EXIT_OK


def _bounds(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--bound wants key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def cmd_laws(opts) -> int:
    overrides = _bounds(opts.bound)
    if opts.seed is not None:
        overrides["seed"] = str(opts.seed)
    config = suite.LawConfig().with_overrides(overrides)
    names = suite.select(opts.filter)
    if opts.mutant is not None:
        if opts.mutant not in mut.MUTANTS:
            raise UsageError(f"unknown mutant {opts.mutant!r}; known: {', '.join(mut.MUTANTS)}")
        ops = mut.MUTANTS[opts.mutant].ops()
    else:
        ops = suite.REFERENCE
    reports = suite.run_all(names, ops=ops, config=config)
    timing = not opts.no_timing
    if opts.format == "json":
        print(json.dumps([r.as_dict(timing) for r in reports], sort_keys=True, indent=2))
    else:
        for r in reports:
            print(r.summary() if timing else r.summary().replace(f"{r.millis:9.1f} ms", ""))
        failed = sum(not r.passed for r in reports)
        print(f"{len(reports) - failed}/{len(reports)} laws pass")
    return suite.exit_code(reports)


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ndcurry", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    v = sub.add_parser("values", help="values of a registered example")
    v.add_argument("example")
    v.add_argument("args", nargs="*")
    v.add_argument("--encoding", choices=("nd", "plan"), default="nd")
    v.add_argument("--plan", help='plan literal such as "=1,L=0,default=0"')
    v.add_argument("--depth", type=int, help="enumerate every plan over addresses up to this length")
    v.add_argument("--expect-values", action="store_true")
    common(v)
    v.set_defaults(run=cmd_values)

    e = sub.add_parser("eval", help="evaluate a core-language expression")
    e.add_argument("program", help="program file, or a bundled name: peano, lists, perm")
    e.add_argument("expr")
    e.add_argument("--semantics", choices=[s.value for s in Semantics], default="calltime")
    e.add_argument("--strategy", choices=[s.value for s in Strategy], default="lazy")
    e.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    e.add_argument("--expect-values", action="store_true")
    common(e)
    e.set_defaults(run=cmd_eval)

    law = sub.add_parser("laws", help="run the law suite")
    law.add_argument("--filter", action="append", default=[],
                     help="law name or substring; repeatable")
    law.add_argument("--bound", action="append", default=[], metavar="KEY=VALUE",
                     help="override a domain bound; repeatable")
    law.add_argument("--seed", type=int)
    law.add_argument("--mutant", help="run against a deliberately broken library")
    law.add_argument("--no-timing", action="store_true",
                     help="report millis as 0 so output is byte-stable")
    common(law)
    law.set_defaults(run=cmd_laws)

    pl = sub.add_parser("plans", help="table of plans and outputs for an example")
    pl.add_argument("example")
    pl.add_argument("args", nargs="*")
    pl.add_argument("--depth", type=int)
    common(pl)
    pl.set_defaults(run=cmd_plans)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        opts = build_parser().parse_args(argv)
        if getattr(opts, "depth", None) is not None and opts.depth < 0:
            raise UsageError("--depth must be non-negative")
        return opts.run(opts)
    except (UsageError, suite.ConfigError, PlanSyntaxError, PlanBudgetError) as e:
        print(f"ndcurry: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
