"""A first-order functional-logic core language with two choice semantics."""

from .evaluator import (
    DEFAULT_FUEL, EvalConfig, EvalError, Evaluator, RChoice, RExhausted, RFail,
    RValue, ResultSet, SemanticsReport, Semantics, Strategy, compare_semantics,
    eval_lazy_failure_demo, evaluate, evaluate_tree, extract_values, pull_tab,
    result_tree_of,
)
from .library import load_program
from .parser import ParseError, parse_expr, parse_program
from .syntax import (
    ChoiceExpr, CoreExpr, CoreProgram, CoreRule, CtorApp, FailExpr, FunApp, Let,
    Term, Var, peano, show_expr, show_term, term_of_python,
)

__all__ = [
    "DEFAULT_FUEL", "EvalConfig", "EvalError", "Evaluator", "RChoice", "RExhausted",
    "RFail", "RValue", "ResultSet", "SemanticsReport", "Semantics", "Strategy",
    "compare_semantics", "eval_lazy_failure_demo", "evaluate", "evaluate_tree",
    "extract_values", "pull_tab", "result_tree_of", "load_program", "ParseError",
    "parse_expr", "parse_program", "ChoiceExpr", "CoreExpr", "CoreProgram",
    "CoreRule", "CtorApp", "FailExpr", "FunApp", "Let", "Term", "Var", "peano",
    "show_expr", "show_term", "term_of_python",
]
