"""Man reachability, push/pull generation, goal states and dead squares.

Regions are Python ints used as bitsets over cell ids; the wall border of a
maze guarantees shifts by one column never wrap onto another row's floor.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import NamedTuple

from .maze import DIRECTIONS, Direction, Maze, SokobanState


class NoFreeCell(ValueError):
    pass


class PushMove(NamedTuple):
    box: int
    direction: Direction


class PullMove(NamedTuple):
    box: int
    direction: Direction


def fill(seed: int, free: int, width: int) -> int:
    """Flood fill of bitset ``free`` from the bit(s) in ``seed``."""
    region = seed & free
    while True:
        grown = (region | region << 1 | region >> 1 | region << width | region >> width) & free
        if grown == region:
            return region
        region = grown


def lowest_cell(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def box_mask(boxes) -> int:
    m = 0
    for b in boxes:
        m |= 1 << b
    return m


def cells_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def man_region(maze: Maze, boxes, man_cell: int) -> tuple[frozenset[int], int]:
    """The 4-connected free cells reachable from ``man_cell`` and their minimum."""
    free = maze.floor_mask & ~box_mask(boxes)
    if not free >> man_cell & 1:
        raise ValueError(f"man cell {man_cell} is not free floor")
    region = fill(1 << man_cell, free, maze.width)
    return frozenset(cells_of(region)), lowest_cell(region)


def canonical(maze: Maze, boxes, man_cell: int) -> SokobanState:
    boxes = tuple(sorted(boxes))
    free = maze.floor_mask & ~box_mask(boxes)
    return SokobanState(boxes, lowest_cell(fill(1 << man_cell, free, maze.width)))


def _replace(boxes: tuple[int, ...], old: int, new: int) -> tuple[int, ...]:
    return tuple(sorted(new if b == old else b for b in boxes))


def pushes(maze: Maze, boxes: tuple[int, ...], man: int, dead: frozenset[int] | None = None):
    """Yield (boxes', man', PushMove) for every legal single push."""
    width = maze.width
    bmask = box_mask(boxes)
    free = maze.floor_mask & ~bmask
    region = fill(1 << man, free, width)
    for b in boxes:
        for direction in DIRECTIONS:
            d = maze.offsets[direction]
            dest = b + d
            if not (free >> dest & 1 and region >> (b - d) & 1):
                continue
            if dead is not None and dest in dead:
                continue
            new_mask = bmask ^ (1 << b) ^ (1 << dest)
            new_man = lowest_cell(fill(1 << b, maze.floor_mask & ~new_mask, width))
            yield _replace(boxes, b, dest), new_man, PushMove(b, direction)


def pulls(maze: Maze, boxes: tuple[int, ...], man: int):
    """Yield (boxes', man', PullMove): box c -> m = c+d, man m -> m+d."""
    width = maze.width
    bmask = box_mask(boxes)
    free = maze.floor_mask & ~bmask
    region = fill(1 << man, free, width)
    for c in boxes:
        for direction in DIRECTIONS:
            d = maze.offsets[direction]
            m = c + d
            if not (region >> m & 1 and free >> (m + d) & 1):
                continue
            new_mask = bmask ^ (1 << c) ^ (1 << m)
            new_man = lowest_cell(fill(1 << (m + d), maze.floor_mask & ~new_mask, width))
            yield _replace(boxes, c, m), new_man, PullMove(c, direction)


def legal_pushes(maze: Maze, state: SokobanState, prune_dead: bool = False) -> list[tuple[SokobanState, PushMove]]:
    dead = maze.dead_squares if prune_dead else None
    return [
        (SokobanState(b, m), move) for b, m, move in pushes(maze, state.boxes, state.man, dead)
    ]


def legal_pulls(maze: Maze, state: SokobanState) -> list[tuple[SokobanState, PullMove]]:
    return [(SokobanState(b, m), move) for b, m, move in pulls(maze, state.boxes, state.man)]


def apply_push(maze: Maze, state: SokobanState, move: PushMove) -> SokobanState:
    """Apply one push after checking it is legal."""
    for nxt, legal in legal_pushes(maze, state):
        if legal == move:
            return nxt
    raise ValueError(f"illegal push {move} in {state}")


def components(maze: Maze, free: int) -> list[int]:
    """Connected components of ``free`` as bitsets, ordered by lowest cell."""
    out = []
    while free:
        comp = fill(free & -free, free, maze.width)
        out.append(comp)
        free &= ~comp
    return out


def goal_states(maze: Maze) -> list[SokobanState]:
    """One state per connected free component with every goal covered by a box."""
    return abstract_goal_states(maze, len(maze.goals))


def abstract_goal_states(maze: Maze, n_boxes: int) -> list[SokobanState]:
    """States with ``n_boxes`` boxes placed on any ``n_boxes`` of the goals."""
    out = []
    for placed in combinations(maze.goals, n_boxes):
        free = maze.floor_mask & ~box_mask(placed)
        comps = components(maze, free)
        if not comps and n_boxes == len(maze.goals):
            raise NoFreeCell("boxes on every goal leave no free cell for the man")
        out.extend(SokobanState(placed, lowest_cell(comp)) for comp in comps)
    return out


def is_solved(maze: Maze, state: SokobanState) -> bool:
    return state.boxes == maze.goals


def dead_squares(maze: Maze) -> frozenset[int]:
    """Floor cells a lone box can never be pulled to from any goal."""
    live = set(maze.goals)
    todo = deque(maze.goals)
    floor = maze.floor_mask
    while todo:
        c = todo.popleft()
        for direction in DIRECTIONS:
            d = maze.offsets[direction]
            m = c + d
            if m not in live and floor >> m & 1 and floor >> (m + d) & 1:
                live.add(m)
                todo.append(m)
    return frozenset(c for c in maze.floor_cells if c not in live)
