"""Sokoban as a search domain, plus its box-subset abstractions."""

from __future__ import annotations

from functools import lru_cache
from math import comb

from .maze import Maze, SokobanState
from .moves import (
    abstract_goal_states,
    box_mask,
    fill,
    goal_states,
    lowest_cell,
    pulls,
    pushes,
)


class SokobanDomain:
    """Push semantics with unit cost per push; man walking is free.

    A state has one variable per box plus one for the man. Boxes are
    indistinguishable, so pattern "variables" are slots into the sorted box tuple.
    """

    def __init__(self, maze: Maze):
        self.maze = maze
        self.num_pattern_vars = len(maze.goals)
        self.num_vars = self.num_pattern_vars + 1
        self._spaces: dict[int, SokobanAbstraction] = {}

    def __repr__(self) -> str:
        return f"SokobanDomain({self.maze!r})"

    def goal_states(self) -> list[SokobanState]:
        return goal_states(self.maze)

    def is_goal(self, state: SokobanState) -> bool:
        return state.boxes == self.maze.goals

    def successors(self, state: SokobanState) -> list[SokobanState]:
        return [SokobanState(b, m) for b, m, _ in pushes(self.maze, state.boxes, state.man)]

    def predecessors(self, state: SokobanState) -> set[SokobanState]:
        return {SokobanState(b, m) for b, m, _ in pulls(self.maze, state.boxes, state.man)}

    def facts(self, state: SokobanState) -> tuple[int, ...]:
        # box occupancy as the cell id, the man's region as its negated id - 1
        return state.boxes + (-1 - state.man,)

    def abstract_space(self, pattern: tuple[int, ...]) -> SokobanAbstraction:
        n = len(pattern)
        space = self._spaces.get(n)
        if space is None:
            space = self._spaces[n] = SokobanAbstraction(self.maze, n)
        return space

    def fingerprint(self) -> str:
        return f"sokoban:{self.maze.digest}"


@lru_cache(maxsize=None)
def _comb_table(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(comb(a, j) for a in range(n + 1)) for j in range(k + 2))


class SokobanAbstraction:
    """Maze with only ``n_boxes`` boxes; the abstract goal is every box on some goal.

    Abstract states are :class:`SokobanState` values with ``n_boxes`` boxes and
    the man's region recomputed without the dropped boxes.
    """

    def __init__(self, maze: Maze, n_boxes: int):
        self.maze = maze
        self.n_boxes = n_boxes
        self.table_key = ("sokoban", n_boxes)
        self._goal_mask = maze.goal_mask
        self._floor = len(maze.floor_cells)
        self._comb = _comb_table(self._floor, n_boxes)

    def project(self, state: SokobanState, pattern: tuple[int, ...]) -> SokobanState:
        if len(pattern) == len(state.boxes):
            return state
        boxes = tuple(state.boxes[i] for i in pattern)
        free = self.maze.floor_mask & ~box_mask(boxes)
        return SokobanState(boxes, lowest_cell(fill(1 << state.man, free, self.maze.width)))

    def goal_states(self) -> list[SokobanState]:
        return abstract_goal_states(self.maze, self.n_boxes)

    def is_goal(self, abstract: SokobanState) -> bool:
        return box_mask(abstract.boxes) & ~self._goal_mask == 0

    def successors(self, abstract: SokobanState) -> list[SokobanState]:
        return [SokobanState(b, m) for b, m, _ in pushes(self.maze, abstract.boxes, abstract.man)]

    def predecessors(self, abstract: SokobanState) -> list[SokobanState]:
        return [SokobanState(b, m) for b, m, _ in pulls(self.maze, abstract.boxes, abstract.man)]

    def size(self) -> int:
        return comb(self._floor, self.n_boxes) * self._floor

    def index(self, abstract: SokobanState) -> int:
        fid = self.maze.floor_id
        rank = 0
        for j, b in enumerate(abstract.boxes):
            rank += self._comb[j + 1][fid[b]]
        return rank * self._floor + fid[abstract.man]

    def unindex(self, i: int) -> SokobanState:
        rank, man = divmod(i, self._floor)
        ids = []
        for j in range(self.n_boxes, 0, -1):
            row = self._comb[j]
            a = j - 1
            while a + 1 <= self._floor and row[a + 1] <= rank:
                a += 1
            ids.append(a)
            rank -= row[a]
        cells = self.maze.floor_cells
        return SokobanState(tuple(cells[a] for a in reversed(ids)), cells[man])
