"""Hard, guaranteed-solvable Sokoban initial states by backward best-first search."""

from .generator import (
    GRID_ORDERINGS,
    Budget,
    GenerationResult,
    MetricSuite,
    ObjectiveVector,
    OrderingSpec,
    aggregate,
    baseline_bfs,
    baseline_random_walk,
    beta_search,
    compare,
)
from .novelty import NOVELTY_MIN, NoveltyTable, evaluate_and_record
from .pdb import (
    UNREACHABLE,
    AdditivePdb,
    MaxPdbHeuristic,
    PatternCollection,
    PatternDatabase,
    PdbStore,
    conflicts,
    h_value,
    sample_pattern_collections,
)
from .solver import SolveOutcome, SolveStatus, gbfs_solve, optimal_push_count, plan_to_lurd
from .state_space import ActionDef, FactoredDomain, apply_action, toy_pe_problem

__version__ = "0.1.0"
