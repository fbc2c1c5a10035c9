"""Command-line entry point: ``sokogen generate | metrics | evaluate``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .generator import (
    Budget,
    GenerationResult,
    MetricSuite,
    OrderingError,
    OrderingSpec,
    aggregate,
    baseline_bfs,
    baseline_random_walk,
    beta_search,
)
from .pdb import DEFAULT_CAP, PdbStore
from .solver import gbfs_solve, plan_to_lurd
from .sokoban import Maze, ParseError, SokobanDomain, SokobanState, emit_xsb, load_levels
from .state_space import toy_pe_problem

log = logging.getLogger("sokogen")

CSV_FIELDS = [
    "level_id", "method", "expansions",
    "h_pdb1", "h_pdb2", "h_pdb3", "h_pdb4",
    "c2", "c3", "c4",
    "solved", "plan_pushes", "wall_ms", "seed",
]
EVAL_FIELDS = ["level_id", "status", "solved", "plan_pushes", "expansions", "wall_ms"]
ORDERS = (1, 2, 3, 4)

_SEED_RE = re.compile(r"\bseed=(-?\d+)\b")


@dataclass
class RunConfig:
    command: str
    inputs: list[Path] = field(default_factory=list)
    ordering: OrderingSpec | None = None
    selection: OrderingSpec | None = None
    orders: tuple[int, ...] = ORDERS
    novelty_arity: int = 2
    budget: Budget = Budget()
    aggregate: int = 0
    seed: int | None = None
    method: str = "beta"
    rw_length: int = 100
    pdb_cache: Path | None = None
    pdb_cap: int = DEFAULT_CAP
    jobs: int = 1
    evaluate: bool = False
    solver_budget: Budget = Budget(max_expansions=100_000)
    timing: bool = True
    csv_path: Path | None = None
    out_levels: Path | None = None
    plans: Path | None = None
    toy_pe: bool = False

    @property
    def base_seed(self) -> int:
        return 0 if self.seed is None else self.seed


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        if v.is_integer():
            return str(int(v))
    return str(v)


def metric_cells(h: dict, c: dict, n_vars: int, orders: Sequence[int]) -> dict[str, str]:
    """Table columns; orders above the number of pattern variables stay blank."""
    out = {}
    for k in ORDERS:
        ok = k in orders and k <= max(n_vars, 1)
        out[f"h_pdb{k}"] = _fmt(h.get(k)) if ok else ""
        if k >= 2:
            out[f"c{k}"] = _fmt(c.get(k)) if ok and k - 1 in orders else ""
    return out


def _store(domain, cfg: RunConfig) -> PdbStore:
    return PdbStore(domain, cap=cfg.pdb_cap, cache_dir=cfg.pdb_cache)


def _wall(cfg: RunConfig, seconds: float) -> str:
    return f"{seconds * 1000:.1f}" if cfg.timing else ""


def _level_id(title: str) -> str:
    return title.split()[0] if title.split() else title


def generate_one(level_id: str, maze: Maze, cfg: RunConfig) -> tuple[str, dict]:
    domain = SokobanDomain(maze)
    store = _store(domain, cfg)
    seed = cfg.base_seed
    if cfg.method == "rw":
        res = baseline_random_walk(domain, cfg.rw_length, seed, store, cfg.orders)
    elif cfg.method == "bfs":
        res = baseline_bfs(domain, cfg.budget, seed, store, cfg.orders)
    elif cfg.aggregate > 0:
        res = aggregate(domain, cfg.aggregate, cfg.ordering, cfg.selection, cfg.budget, seed,
                        cfg.novelty_arity, store, cfg.orders)
    else:
        res = beta_search(domain, cfg.ordering, cfg.selection, cfg.budget, seed,
                          cfg.novelty_arity, store, cfg.orders)
    row = result_row(level_id, res, domain.num_pattern_vars, cfg)
    if cfg.evaluate:
        out = gbfs_solve(maze, res.state, budget=cfg.solver_budget, seed=res.seed)
        row["solved"] = "1" if out.solved else "0"
        row["plan_pushes"] = _fmt(out.pushes)
    header = f"; {level_id} seed={res.seed} method={res.method} run={res.run_index}"
    return header + "\n" + emit_xsb(maze, res.state), row


def result_row(level_id: str, res: GenerationResult, n_vars: int, cfg: RunConfig) -> dict:
    row = dict.fromkeys(CSV_FIELDS, "")
    row.update(level_id=level_id, method=res.method, expansions=str(res.expansions),
               wall_ms=_wall(cfg, res.wall_time), seed=str(res.seed))
    row.update(metric_cells(res.h, res.conflicts, n_vars, cfg.orders))
    return row


def metrics_one(title: str, maze: Maze, state: SokobanState, cfg: RunConfig) -> dict:
    domain = SokobanDomain(maze)
    seed = cfg.seed
    if seed is None:
        m = _SEED_RE.search(title)
        seed = int(m.group(1)) if m else 0
    suite = MetricSuite(domain, seed, _store(domain, cfg))
    hs, cs = suite.metrics(state, cfg.orders)
    row = dict.fromkeys(CSV_FIELDS, "")
    row.update(level_id=_level_id(title), method="input", seed=str(seed))
    row.update(metric_cells(hs, cs, domain.num_pattern_vars, cfg.orders))
    return row


def evaluate_one(title: str, maze: Maze, state: SokobanState, cfg: RunConfig) -> tuple[dict, str]:
    out = gbfs_solve(maze, state, budget=cfg.solver_budget, seed=cfg.base_seed)
    row = {
        "level_id": _level_id(title),
        "status": out.status.value,
        "solved": "1" if out.solved else "0",
        "plan_pushes": _fmt(out.pushes),
        "expansions": str(out.expansions),
        "wall_ms": _wall(cfg, out.wall_time),
    }
    lurd = plan_to_lurd(maze, state, out.plan) if out.solved else ""
    return row, lurd


def _levels(cfg: RunConfig) -> list[tuple[str, Maze, SokobanState]]:
    out = []
    for path in cfg.inputs:
        out.extend(load_levels(path))
    return out


def _job(args):
    kind, title, maze, state, cfg = args
    if kind == "generate":
        return generate_one(_level_id(title), maze, cfg)
    if kind == "metrics":
        return metrics_one(title, maze, state, cfg)
    return evaluate_one(title, maze, state, cfg)


def _run_jobs(kind: str, levels, cfg: RunConfig) -> list:
    tasks = [(kind, title, maze, state, cfg) for title, maze, state in levels]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_job, tasks))
    return [_job(t) for t in tasks]


def _write_csv(rows: list[dict], fields: list[str], path: Path | None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")
    return text


def cmd_generate(cfg: RunConfig) -> list[dict]:
    results = _run_jobs("generate", _levels(cfg), cfg)
    texts = [t for t, _ in results]
    rows = [r for _, r in results]
    if cfg.out_levels is not None:
        cfg.out_levels.write_text("\n\n".join(texts) + "\n", encoding="utf-8")
    else:
        sys.stderr.write("\n\n".join(texts) + "\n")
    _write_csv(rows, CSV_FIELDS, cfg.csv_path)
    return rows


def cmd_metrics(cfg: RunConfig) -> list[dict]:
    if cfg.toy_pe:
        domain = toy_pe_problem()
        suite = MetricSuite(domain, cfg.base_seed)
        hs, cs = suite.metrics(domain.initial, cfg.orders)
        row = dict.fromkeys(CSV_FIELDS, "")
        row.update(level_id="P_e", method="toy", seed=str(cfg.base_seed))
        row.update(metric_cells(hs, cs, domain.num_pattern_vars, cfg.orders))
        rows = [row]
    else:
        rows = _run_jobs("metrics", _levels(cfg), cfg)
    _write_csv(rows, CSV_FIELDS, cfg.csv_path)
    return rows


def cmd_evaluate(cfg: RunConfig) -> list[dict]:
    results = _run_jobs("evaluate", _levels(cfg), cfg)
    rows = [r for r, _ in results]
    solved = sum(r["solved"] == "1" for r in rows)
    summary = {
        "level_id": "TOTAL", "status": f"{solved}/{len(rows)}", "solved": str(solved),
        "plan_pushes": "", "expansions": str(sum(int(r["expansions"]) for r in rows)), "wall_ms": "",
    }
    _write_csv(rows + [summary], EVAL_FIELDS, cfg.csv_path)
    if cfg.plans is not None:
        lines = [f"{r['level_id']}\t{lurd}" for r, lurd in results]
        cfg.plans.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return rows


def _parse_orders(text: str) -> tuple[int, ...]:
    orders = tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    if not orders or any(k not in ORDERS for k in orders):
        raise argparse.ArgumentTypeError("--k takes orders from 1..4, e.g. 1,2,3,4")
    return orders


def _ordering(text: str) -> OrderingSpec:
    try:
        return OrderingSpec.parse(text)
    except OrderingError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sokogen", description="Generate and evaluate hard Sokoban initial states.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, inputs: bool = True) -> None:
        if inputs:
            p.add_argument("inputs", nargs="*", type=Path, help="XSB level files")
        p.add_argument("--csv", dest="csv_path", type=Path, help="CSV output path (default stdout)")
        p.add_argument("--k", dest="orders", type=_parse_orders, default=ORDERS, help="PDB orders, e.g. 1,2,3,4")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--pdb-cache", type=Path, default=None)
        p.add_argument("--pdb-cap", type=int, default=DEFAULT_CAP, help="abstract-state cap before lazy mode")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--no-timing", dest="timing", action="store_false", help="leave wall_ms empty")

    def limits(p: argparse.ArgumentParser, prefix: str = "") -> None:
        p.add_argument(f"--{prefix}expansions", type=int, default=None)
        p.add_argument(f"--{prefix}time-limit", type=float, default=None, help="seconds")
        p.add_argument(f"--{prefix}mem-limit", type=float, default=None, help="megabytes")

    g = sub.add_parser("generate", help="generate one initial state per input maze")
    common(g)
    limits(g)
    g.add_argument("--ordering", type=_ordering, default=OrderingSpec.parse("w(pdb4),4C,pdb4"))
    g.add_argument("--selection", type=_ordering, default=None)
    g.add_argument("--novelty-arity", type=int, default=2)
    g.add_argument("--aggregate", type=int, default=0, metavar="N")
    g.add_argument("--method", choices=("beta", "rw", "bfs"), default="beta")
    g.add_argument("--rw-length", type=int, default=100)
    g.add_argument("--out-levels", type=Path, default=None)
    g.add_argument("--evaluate", action="store_true", help="also run the reference solver")
    limits(g, "solver-")

    m = sub.add_parser("metrics", help="PDB heuristic and conflict values of given initial states")
    common(m)
    m.add_argument("--toy-pe", action="store_true", help="report the built-in three-variable toy problem")

    e = sub.add_parser("evaluate", help="run the reference solver on given levels")
    common(e)
    limits(e)
    e.add_argument("--plans", type=Path, default=None, help="write LURD plans here")
    return parser


def _budget(ns, prefix: str = "", default_exp: int | None = None) -> Budget:
    exp = getattr(ns, f"{prefix}expansions", None)
    mem = getattr(ns, f"{prefix}mem_limit", None)
    return Budget(
        max_expansions=exp if exp is not None else default_exp,
        time_limit=getattr(ns, f"{prefix}time_limit", None),
        mem_limit=int(mem * 1024 * 1024) if mem is not None else None,
    )


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command, inputs=list(getattr(ns, "inputs", [])), orders=ns.orders,
        seed=ns.seed, pdb_cache=ns.pdb_cache, pdb_cap=ns.pdb_cap, jobs=ns.jobs,
        timing=ns.timing, csv_path=ns.csv_path,
    )
    if ns.command == "generate":
        cfg.ordering = ns.ordering
        cfg.selection = ns.selection if ns.selection is not None else ns.ordering.without_novelty()
        if cfg.selection.novelty is not None:
            raise OrderingError("--selection must not contain novelty")
        need = cfg.ordering.orders() | cfg.selection.orders()
        cfg.orders = tuple(sorted(set(cfg.orders) | need))
        cfg.novelty_arity = ns.novelty_arity
        cfg.budget = _budget(ns)
        cfg.aggregate = ns.aggregate
        cfg.method = ns.method
        cfg.rw_length = ns.rw_length
        cfg.out_levels = ns.out_levels
        cfg.evaluate = ns.evaluate
        cfg.solver_budget = _budget(ns, "solver_", 100_000)
    elif ns.command == "metrics":
        cfg.toy_pe = ns.toy_pe
    else:
        cfg.solver_budget = _budget(ns, "", 100_000)
        cfg.plans = ns.plans
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
        if cfg.command != "metrics" or not cfg.toy_pe:
            if not cfg.inputs:
                parser.error("no input level files given")
        {"generate": cmd_generate, "metrics": cmd_metrics, "evaluate": cmd_evaluate}[cfg.command](cfg)
    except (ParseError, OrderingError, OSError) as exc:
        print(f"sokogen: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
