"""Set-of-values and planned-choice encodings of non-determinism, with a core evaluator and law suite."""

from ._kernels import BACKEND
from .plan import (
    ChoicePlan, PlanBudgetError, PlanSyntaxError, choose, closure_depth, enumerate_plans,
    explore_plans, format_plan, lchoice, parse_plan, rchoice,
)
from .tree import (
    Choice, Fail, InvalidWitness, NDTree, Val, Witness, always, bind_nd, bind_witness,
    check_witness, choice, choices, fail, if_intro, map_det, map_witness, member, satisfy, val,
    values,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChoicePlan", "PlanBudgetError", "PlanSyntaxError", "choose", "closure_depth",
    "enumerate_plans", "explore_plans", "format_plan", "lchoice", "parse_plan", "rchoice",
    "Choice", "Fail", "InvalidWitness", "NDTree", "Val", "Witness", "always", "bind_nd",
    "bind_witness", "check_witness", "choice", "choices", "fail", "if_intro", "map_det",
    "map_witness", "member", "satisfy", "val", "values",
]
