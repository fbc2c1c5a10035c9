"""Reference solver for hardness evaluation, and an exact push-optimal oracle."""

from __future__ import annotations

import enum
import heapq
import time
from collections import deque
from dataclasses import dataclass, field

from .generator import Budget
from .pdb import UNREACHABLE, MaxPdbHeuristic, PdbStore
from .sokoban.domain import SokobanDomain
from .sokoban.maze import DIRECTIONS, Maze, SokobanState
from .sokoban.moves import PushMove, apply_push, box_mask, is_solved, pushes
from .state_space import OracleCapExceeded


class SolveStatus(enum.Enum):
    SOLVED = "solved"
    EXHAUSTED = "exhausted"
    TIMED_OUT = "timed_out"
    MEMORY_OUT = "memory_out"


@dataclass
class SolveOutcome:
    status: SolveStatus
    plan: list[PushMove] = field(default_factory=list)
    expansions: int = 0
    wall_time: float = 0.0

    @property
    def solved(self) -> bool:
        return self.status is SolveStatus.SOLVED

    @property
    def pushes(self) -> int | None:
        return len(self.plan) if self.solved else None


def replay(maze: Maze, s0: SokobanState, plan: list[PushMove]) -> SokobanState:
    state = s0
    for move in plan:
        state = apply_push(maze, state, move)
    return state


def _plan(parents: dict, state: SokobanState) -> list[PushMove]:
    plan = []
    while True:
        parent, move = parents[state]
        if parent is None:
            break
        plan.append(move)
        state = parent
    plan.reverse()
    return plan


def gbfs_solve(
    maze: Maze,
    s0: SokobanState,
    heuristic: MaxPdbHeuristic | None = None,
    budget: Budget = Budget(max_expansions=100_000),
    prune_dead: bool = True,
    seed: int = 0,
) -> SolveOutcome:
    """Greedy best-first search over pushes, lowest heuristic value first."""
    start = time.perf_counter()
    if heuristic is None:
        heuristic = MaxPdbHeuristic.sample(PdbStore(SokobanDomain(maze)), 1, seed)
    parents: dict[SokobanState, tuple] = {s0: (None, None)}
    if is_solved(maze, s0):
        return SolveOutcome(SolveStatus.SOLVED, [], 0, time.perf_counter() - start)
    dead = maze.dead_squares if prune_dead else None
    if dead and any(b in dead for b in s0.boxes):
        return SolveOutcome(SolveStatus.EXHAUSTED, [], 0, time.perf_counter() - start)

    heap = [(heuristic.value(s0), 0, s0)]
    gen = 1
    expansions = 0
    status = SolveStatus.EXHAUSTED
    while heap:
        if budget.max_expansions is not None and expansions >= budget.max_expansions:
            status = SolveStatus.TIMED_OUT
            break
        if budget.time_limit is not None and time.perf_counter() - start >= budget.time_limit:
            status = SolveStatus.TIMED_OUT
            break
        if budget.mem_limit is not None and len(parents) * budget.state_bytes >= budget.mem_limit:
            status = SolveStatus.MEMORY_OUT
            break
        _, _, state = heapq.heappop(heap)
        expansions += 1
        for boxes, man, move in pushes(maze, state.boxes, state.man, dead):
            nxt = SokobanState(boxes, man)
            if nxt in parents:
                continue
            parents[nxt] = (state, move)
            if boxes == maze.goals:
                plan = _plan(parents, nxt)
                if not is_solved(maze, replay(maze, s0, plan)):
                    raise AssertionError("solver produced a plan that does not solve the level")
                return SolveOutcome(SolveStatus.SOLVED, plan, expansions, time.perf_counter() - start)
            h = heuristic.value(nxt)
            if h == UNREACHABLE:
                continue
            heapq.heappush(heap, (h, gen, nxt))
            gen += 1
    return SolveOutcome(status, [], expansions, time.perf_counter() - start)


def optimal_push_count(maze: Maze, s0: SokobanState, cap: int = 10**7, prune_dead: bool = False) -> int | None:
    """Minimum number of pushes by breadth-first search; None when unsolvable.

    Raises :class:`OracleCapExceeded` past ``cap`` visited states.
    """
    if is_solved(maze, s0):
        return 0
    dead = maze.dead_squares if prune_dead else None
    seen = {s0}
    frontier = deque([(s0, 0)])
    while frontier:
        state, depth = frontier.popleft()
        for boxes, man, _ in pushes(maze, state.boxes, state.man, dead):
            if boxes == maze.goals:
                return depth + 1
            nxt = SokobanState(boxes, man)
            if nxt in seen:
                continue
            seen.add(nxt)
            if len(seen) > cap:
                raise OracleCapExceeded(f"more than {cap} states")
            frontier.append((nxt, depth + 1))
    return None


def _walk(maze: Maze, blocked: int, start: int, target: int) -> str:
    if start == target:
        return ""
    free = maze.floor_mask & ~blocked
    prev = {start: None}
    todo = deque([start])
    while todo:
        cell = todo.popleft()
        for direction in DIRECTIONS:
            nxt = cell + maze.offsets[direction]
            if nxt in prev or not free >> nxt & 1:
                continue
            prev[nxt] = (cell, direction.letter)
            if nxt == target:
                path = []
                while prev[nxt] is not None:
                    nxt, letter = prev[nxt]
                    path.append(letter)
                return "".join(reversed(path))
            todo.append(nxt)
    raise ValueError(f"man cannot walk from {start} to {target}")


def plan_to_lurd(maze: Maze, s0: SokobanState, plan: list[PushMove], man: int | None = None) -> str:
    """Expand pushes into man moves: lowercase walks, uppercase pushes."""
    man = s0.man if man is None else man
    boxes = set(s0.boxes)
    out = []
    for move in plan:
        d = maze.offsets[move.direction]
        out.append(_walk(maze, box_mask(boxes), man, move.box - d))
        out.append(move.direction.letter.upper())
        boxes.remove(move.box)
        boxes.add(move.box + d)
        man = move.box
    return "".join(out)


def replay_lurd(maze: Maze, boxes, man: int, moves: str) -> tuple[tuple[int, ...], int]:
    """Execute a LURD string; returns the final (sorted boxes, man cell)."""
    letters = {d.letter: d for d in DIRECTIONS}
    boxes = set(boxes)
    for ch in moves:
        direction = letters[ch.lower()]
        d = maze.offsets[direction]
        nxt = man + d
        if not maze.is_floor(nxt):
            raise ValueError(f"move {ch} walks into a wall")
        if nxt in boxes:
            beyond = nxt + d
            if not ch.isupper() or not maze.is_floor(beyond) or beyond in boxes:
                raise ValueError(f"illegal push {ch}")
            boxes.remove(nxt)
            boxes.add(beyond)
        elif ch.isupper():
            raise ValueError(f"push {ch} without a box")
        man = nxt
    return tuple(sorted(boxes)), man
