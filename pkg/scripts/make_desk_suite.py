"""Write the frozen desk-scale maze suite used by the tests and examples.

Mazes are random rooms (interior at most 8x8, so at most 10x10 with walls)
with scattered inner walls; every level is stored solved (boxes on goals).
"""

import random
import sys
from pathlib import Path

from sokogen.sokoban import Maze, SokobanDomain, SokobanState, emit_xsb
from sokogen.sokoban.moves import components, goal_states
from sokogen.state_space import backward_reachable

OUT = Path(__file__).resolve().parents[1] / "src" / "sokogen" / "data" / "desk_suite.xsb"
PLAN = [1] * 4 + [2] * 5 + [3] * 6 + [4] * 7
# per box count: (min backward-reachable states, min backward depth)
THRESHOLDS = {1: (12, 5), 2: (90, 8), 3: (400, 10), 4: (1500, 12)}


def room(rng: random.Random, n_boxes: int) -> Maze | None:
    h, w = rng.randint(4, 7), rng.randint(4, 8)
    grid = [["#"] * (w + 2) for _ in range(h + 2)]
    for r in range(1, h + 1):
        for c in range(1, w + 1):
            grid[r][c] = "#" if rng.random() < 0.12 else " "
    rows = ["".join(r) for r in grid]
    maze = Maze(rows)
    comps = components(maze, maze.floor_mask)
    if not comps:
        return None
    keep = max(comps, key=int.bit_count)
    cells = [c for c in maze.floor_cells if keep >> c & 1]
    if not 14 <= len(cells) <= 28:
        return None
    goals = set(rng.sample(cells, n_boxes))
    out = []
    for r in range(h + 2):
        line = []
        for c in range(w + 2):
            cell = r * (w + 2) + c
            line.append("." if cell in goals else (" " if cell in cells else "#"))
        out.append("".join(line))
    return Maze(out)


def main() -> None:
    rng = random.Random(20190810)
    levels = []
    for i, k in enumerate(PLAN):
        while True:
            maze = room(rng, k)
            if maze is None:
                continue
            dom = SokobanDomain(maze)
            try:
                space = backward_reachable(dom, cap=150_000)
            except Exception:
                continue
            min_states, min_depth = THRESHOLDS[k]
            if len(space) < min_states or max(space.values()) < min_depth:
                continue
            break
        g = goal_states(maze)[0]
        levels.append((f"desk{i + 1:02d}", maze, g, len(space), max(space.values())))
        print(f"desk{i + 1:02d} k={k} floor={len(maze.floor_cells)} states={len(space)} "
              f"depth={max(space.values())}", file=sys.stderr)
    text = "\n\n".join(f"; {name}\n{emit_xsb(m, s)}" for name, m, s, _, _ in levels)
    OUT.write_text(text + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
