"""Bundled example programs, loadable by name or path."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .parser import parse_program
from .syntax import CoreProgram

BUNDLED = ("peano", "lists", "perm")


def program_text(name_or_path: str) -> str:
    path = Path(name_or_path)
    if path.is_file():
        return path.read_text()
    stem = path.name[:-len(".core")] if path.name.endswith(".core") else path.name
    if stem in BUNDLED:
        return resources.files(__package__).joinpath("programs", f"{stem}.core").read_text()
    raise FileNotFoundError(f"no program file or bundled program named {name_or_path!r}")


def load_program(name_or_path: str) -> CoreProgram:
    return parse_program(program_text(name_or_path))
