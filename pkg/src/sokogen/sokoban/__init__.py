"""Sokoban maze model, level I/O and move generation."""

from .domain import SokobanAbstraction, SokobanDomain
from .maze import (
    DIRECTIONS,
    CellKind,
    CountMismatch,
    Direction,
    LevelEntry,
    Maze,
    MultipleMen,
    NoMan,
    ParseError,
    SokobanState,
    emit_xsb,
    load_levels,
    parse_xsb,
    split_collection,
)
from .moves import (
    NoFreeCell,
    PullMove,
    PushMove,
    apply_push,
    canonical,
    dead_squares,
    goal_states,
    is_solved,
    legal_pulls,
    legal_pushes,
    man_region,
)

__all__ = [
    "DIRECTIONS", "CellKind", "CountMismatch", "Direction", "LevelEntry", "Maze",
    "MultipleMen", "NoFreeCell", "NoMan", "ParseError", "PullMove", "PushMove",
    "SokobanAbstraction", "SokobanDomain", "SokobanState", "apply_push", "canonical",
    "dead_squares", "emit_xsb", "goal_states", "is_solved", "legal_pulls",
    "legal_pushes", "load_levels", "man_region", "parse_xsb", "split_collection",
]
