"""Novelty of generated states, partitioned by heuristic value.

A state's novelty is ``|V| - n + 1`` where ``n`` is the size of the smallest
set of its facts never seen together in an earlier state with the same
heuristic value. Only sets of size up to ``arity`` are tracked; a state with
nothing new at that size gets :data:`NOVELTY_MIN`.
"""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Hashable, Sequence

NOVELTY_MIN = 0


class NoveltyTable:
    def __init__(self, num_vars: int, facts: Callable[[Hashable], Sequence[Hashable]], arity: int = 2):
        if arity < 1:
            raise ValueError("novelty arity must be >= 1")
        self.num_vars = num_vars
        self.arity = arity
        self.facts = facts
        self._seen: dict[Hashable, list[set[tuple]]] = {}

    @classmethod
    def for_domain(cls, domain, arity: int = 2) -> NoveltyTable:
        return cls(domain.num_vars, domain.facts, arity)

    def __len__(self) -> int:
        return sum(len(s) for tables in self._seen.values() for s in tables)

    def evaluate(self, state: Hashable, h: Hashable) -> int:
        """Novelty of ``state`` for heuristic value ``h``; records its fact tuples."""
        facts = sorted(self.facts(state))
        tables = self._seen.get(h)
        if tables is None:
            tables = self._seen[h] = [set() for _ in range(self.arity)]
        w = NOVELTY_MIN
        for size in range(1, min(self.arity, len(facts)) + 1):
            seen = tables[size - 1]
            fresh = False
            for combo in combinations(facts, size):
                if combo not in seen:
                    seen.add(combo)
                    fresh = True
            if fresh and w == NOVELTY_MIN:
                w = self.num_vars - size + 1
        return w

    def reset(self) -> None:
        self._seen.clear()


def evaluate_and_record(table: NoveltyTable, state: Hashable, h: Hashable) -> int:
    return table.evaluate(state, h)


def reset(table: NoveltyTable) -> NoveltyTable:
    table.reset()
    return table
