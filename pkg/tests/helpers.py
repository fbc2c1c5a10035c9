"""Fixtures and independent oracles shared by the test modules.

The oracles here deliberately avoid the package's bitset move generator:
they walk the man one cell at a time over plain Python sets.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations

from sokogen.sokoban import Maze, SokobanState, parse_xsb

# Reconstruction of the three-box example: box C2 is one push from goal B2,
# boxes D3/D4 are two pushes each on their own, but together one of them must
# first go two cells right (1 + 6 + 2 = 9 pushes).
TRAP = """\
########
#.$@####
#. $   #
#. $   #
########"""

CORRIDOR = """\
#######
#.  $@#
#######"""

EMPTY_4x4_ONE_BOX = """\
######
#.   #
#    #
#  $ #
#   @#
######"""

DEAD_CORNER = """\
#####
#$ .#
#  @#
#####"""

ONE_PUSH = """\
#####
#.$@#
#####"""


def level(text: str) -> tuple[Maze, SokobanState]:
    return parse_xsb(text)


def _neighbors(maze: Maze, cell: int):
    w = maze.width
    for d in (-w, w, -1, 1):
        yield d, cell + d


def flood(maze: Maze, blocked: set[int], start: int) -> set[int]:
    seen = {start}
    todo = [start]
    while todo:
        c = todo.pop()
        for _, n in _neighbors(maze, c):
            if n not in seen and n not in blocked and maze.is_floor(n):
                seen.add(n)
                todo.append(n)
    return seen


def oracle_push_distance(maze: Maze, boxes, man: int, goal_cells=None, cap: int = 2_000_000) -> int | None:
    """Minimum pushes to put every box on a goal, by 0-1 BFS over raw man moves.

    ``goal_cells`` defaults to the maze goals; boxes may end on any of them.
    """
    goals = set(maze.goals if goal_cells is None else goal_cells)
    start = (frozenset(boxes), man)
    dist = {start: 0}
    dq = deque([start])
    while dq:
        state = dq.popleft()
        bx, m = state
        d = dist[state]
        if bx <= goals:
            return d
        for off, n in _neighbors(maze, m):
            if not maze.is_floor(n):
                continue
            if n in bx:
                beyond = n + off
                if not maze.is_floor(beyond) or beyond in bx:
                    continue
                nxt, cost = (bx - {n} | {beyond}, n), 1
            else:
                nxt, cost = (bx, n), 0
            nd = d + cost
            if nxt not in dist or dist[nxt] > nd:
                dist[nxt] = nd
                if len(dist) > cap:
                    raise RuntimeError("oracle cap exceeded")
                if cost == 0:
                    dq.appendleft(nxt)
                else:
                    dq.append(nxt)
    return None


def all_states(maze: Maze, n_boxes: int) -> list[SokobanState]:
    """Every (box placement, man region) pair, canonical man = min cell."""
    out = []
    for boxes in combinations(maze.floor_cells, n_boxes):
        free = [c for c in maze.floor_cells if c not in boxes]
        left = set(free)
        while left:
            region = flood(maze, set(boxes), min(left))
            out.append(SokobanState(tuple(boxes), min(region)))
            left -= region
    return out


def oracle_dead_squares(maze: Maze) -> set[int]:
    """Cells from which a lone box cannot be pushed onto any goal (man anywhere)."""
    dead = set()
    for cell in maze.floor_cells:
        best = None
        for man in maze.floor_cells:
            if man == cell:
                continue
            d = oracle_push_distance(maze, [cell], man)
            if d is not None:
                best = d
                break
        if best is None:
            dead.add(cell)
    return dead
