"""Executable law battery with shrinking, replay and a mutant harness."""

from .ops import REFERENCE, Ops
from .suite import (
    LAW_NAMES, REGISTRY, ConfigError, LawCase, LawConfig, LawReport, replay, run_all, run_law,
)

__all__ = ["REFERENCE", "Ops", "LAW_NAMES", "REGISTRY", "ConfigError", "LawCase", "LawConfig",
           "LawReport", "replay", "run_all", "run_law"]
