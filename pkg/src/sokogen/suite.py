"""Bundled desk-scale maze suite (22 mazes, at most 10x10, 1-4 boxes)."""

from __future__ import annotations

from importlib import resources

from .sokoban import Maze, SokobanState, parse_xsb, split_collection


def desk_suite() -> list[tuple[str, Maze, SokobanState]]:
    text = resources.files("sokogen").joinpath("data/desk_suite.xsb").read_text(encoding="utf-8")
    out = []
    for entry in split_collection(text):
        maze, state = parse_xsb(entry.text)
        out.append((entry.title, maze, state))
    return out


def desk_suite_path():
    return resources.files("sokogen").joinpath("data/desk_suite.xsb")
