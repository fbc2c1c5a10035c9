"""Maze model and XSB level text I/O.

Cells are addressed by their row-major index ``row * width + col`` in the
(cropped, wall-bordered) grid. Dense floor ids follow the same order, so the
minimum cell id and the minimum floor id of a region coincide.
"""

from __future__ import annotations

import enum
import hashlib
from collections import deque
from functools import cached_property
from typing import NamedTuple


class ParseError(ValueError):
    pass


class CountMismatch(ParseError):
    pass


class NoMan(ParseError):
    pass


class MultipleMen(ParseError):
    pass


class CellKind(enum.Enum):
    WALL = "#"
    FLOOR = " "
    GOAL = "."


class Direction(enum.Enum):
    UP = (-1, 0, "u")
    DOWN = (1, 0, "d")
    LEFT = (0, -1, "l")
    RIGHT = (0, 1, "r")

    @property
    def letter(self) -> str:
        return self.value[2]

    @property
    def opposite(self) -> Direction:
        return _OPPOSITE[self]


_OPPOSITE = {
    Direction.UP: Direction.DOWN,
    Direction.DOWN: Direction.UP,
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
}

DIRECTIONS = (Direction.UP, Direction.DOWN, Direction.LEFT, Direction.RIGHT)


class SokobanState(NamedTuple):
    """Sorted box cells plus the man's canonical cell (lowest id in the man's region)."""

    boxes: tuple[int, ...]
    man: int


class Maze:
    """Immutable grid of walls, floors and goals.

    ``rows`` holds one string per row using only ``#``, `` `` and ``.``.
    """

    def __init__(self, rows: tuple[str, ...] | list[str]):
        rows = tuple(rows)
        if not rows:
            raise ParseError("empty maze")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ParseError("ragged maze rows")
        self.width = width
        self.height = len(rows)
        self.rows = rows
        floor, goals = [], []
        for r, line in enumerate(rows):
            for c, ch in enumerate(line):
                if ch == "#":
                    continue
                if ch not in " .":
                    raise ParseError(f"bad maze cell {ch!r}")
                if r in (0, self.height - 1) or c in (0, width - 1):
                    raise ParseError("maze boundary must be walls")
                cell = r * width + c
                floor.append(cell)
                if ch == ".":
                    goals.append(cell)
        self.floor_cells = tuple(floor)
        self.floor_id = {cell: i for i, cell in enumerate(floor)}
        self.goals = tuple(goals)
        self.floor_mask = sum(1 << c for c in floor)
        self.goal_mask = sum(1 << c for c in goals)
        self.offsets = {
            Direction.UP: -width,
            Direction.DOWN: width,
            Direction.LEFT: -1,
            Direction.RIGHT: 1,
        }

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Maze) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Maze({self.width}x{self.height}, floor={len(self.floor_cells)}, goals={len(self.goals)})"

    def kind(self, cell: int) -> CellKind:
        r, c = divmod(cell, self.width)
        return CellKind(self.rows[r][c])

    def is_floor(self, cell: int) -> bool:
        return bool(self.floor_mask >> cell & 1)

    def cell(self, row: int, col: int) -> int:
        return row * self.width + col

    def coords(self, cell: int) -> tuple[int, int]:
        return divmod(cell, self.width)

    @property
    def num_boxes(self) -> int:
        return len(self.goals)

    @cached_property
    def dead_squares(self) -> frozenset[int]:
        from .moves import dead_squares

        return dead_squares(self)

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256("\n".join(self.rows).encode()).hexdigest()[:16]


_CHARS = set("# .$*@+")


def _split_lines(text: str) -> list[str]:
    lines = [line.rstrip("\r") for line in text.split("\n")]
    while lines and not lines[-1].strip():
        lines.pop()
    while lines and not lines[0].strip():
        lines.pop(0)
    return lines


def parse_xsb(text: str) -> tuple[Maze, SokobanState]:
    """Parse one level. Cells the man cannot reach (ignoring boxes) become walls."""
    from .moves import man_region

    lines = _split_lines(text)
    if not lines:
        raise ParseError("empty level")
    width = max(len(line) for line in lines) + 2
    grid = ["#" * width] + ["#" + line.ljust(width - 2) + "#" for line in lines] + ["#" * width]
    # raw grid is wrapped in a wall ring so flood fill never leaves it
    men, boxes, goals = [], set(), set()
    for r, line in enumerate(grid):
        for c, ch in enumerate(line):
            if ch not in _CHARS:
                raise ParseError(f"unknown character {ch!r} at line {r}, column {c}")
            cell = r * width + c
            if ch in "@+":
                men.append(cell)
            if ch in "$*":
                boxes.add(cell)
            if ch in ".*+":
                goals.add(cell)
    if not men:
        raise NoMan("level has no man")
    if len(men) > 1:
        raise MultipleMen(f"level has {len(men)} men")
    if len(boxes) != len(goals):
        raise CountMismatch(f"{len(boxes)} boxes but {len(goals)} goals")

    inside = {men[0]}
    todo = deque([men[0]])
    while todo:
        cell = todo.popleft()
        for d in (-width, width, -1, 1):
            nxt = cell + d
            if nxt not in inside and grid[nxt // width][nxt % width] != "#":
                inside.add(nxt)
                todo.append(nxt)
    stray = (boxes | goals) - inside
    if stray:
        r, c = divmod(min(stray), width)
        raise ParseError(f"box or goal outside the man's area at line {r - 1}, column {c - 1}")

    rows_in = [c // width for c in inside]
    cols_in = [c % width for c in inside]
    r0, r1 = min(rows_in) - 1, max(rows_in) + 1
    c0, c1 = min(cols_in) - 1, max(cols_in) + 1
    new_width = c1 - c0 + 1

    def remap(cell: int) -> int:
        r, c = divmod(cell, width)
        return (r - r0) * new_width + (c - c0)

    out_rows = []
    for r in range(r0, r1 + 1):
        row = []
        for c in range(c0, c1 + 1):
            cell = r * width + c
            if cell not in inside:
                row.append("#")
            else:
                row.append("." if cell in goals else " ")
        out_rows.append("".join(row))
    maze = Maze(out_rows)
    box_cells = tuple(sorted(remap(b) for b in boxes))
    _, canon = man_region(maze, box_cells, remap(men[0]))
    return maze, SokobanState(box_cells, canon)


def _is_exterior(maze: Maze, r: int, c: int) -> bool:
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            rr, cc = r + dr, c + dc
            if 0 <= rr < maze.height and 0 <= cc < maze.width and maze.rows[rr][cc] != "#":
                return False
    return True


def emit_xsb(maze: Maze, state: SokobanState) -> str:
    """Render a level; walls that touch no floor cell are written as spaces."""
    boxes = set(state.boxes)
    out = []
    for r, line in enumerate(maze.rows):
        row = []
        for c, ch in enumerate(line):
            cell = r * maze.width + c
            if ch == "#":
                row.append(" " if _is_exterior(maze, r, c) else "#")
            elif cell in boxes:
                row.append("*" if ch == "." else "$")
            elif cell == state.man:
                row.append("+" if ch == "." else "@")
            else:
                row.append(ch)
        out.append("".join(row).rstrip())
    return "\n".join(out)


class LevelEntry(NamedTuple):
    title: str
    text: str


def split_collection(text: str) -> list[LevelEntry]:
    """Split a multi-level XSB file on blank lines.

    Lines starting with ``;`` (and other non-board lines) are comments; the first
    comment preceding a level's board becomes its title.
    """
    entries: list[LevelEntry] = []
    board: list[str] = []
    title: str | None = None

    def flush() -> None:
        nonlocal board, title
        if board:
            name = title if title is not None else str(len(entries) + 1)
            entries.append(LevelEntry(name, "\n".join(board)))
        board, title = [], None

    for raw in text.splitlines():
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped:
            flush()
        elif stripped.startswith(";"):
            if board:
                flush()
            if title is None:
                title = stripped.lstrip(";").strip()
        elif set(line) <= _CHARS and "#" in line:
            board.append(line.rstrip())
        else:
            if board:
                flush()
            if title is None:
                title = stripped
    flush()
    return entries


def load_levels(path) -> list[tuple[str, Maze, SokobanState]]:
    """Parse every level in an XSB file; errors carry the level index."""
    with open(path, encoding="utf-8") as fh:
        entries = split_collection(fh.read())
    out = []
    for i, entry in enumerate(entries):
        try:
            maze, state = parse_xsb(entry.text)
        except ParseError as exc:
            raise ParseError(f"{path}: level {i} ({entry.title}): {exc}") from exc
        out.append((entry.title, maze, state))
    return out
