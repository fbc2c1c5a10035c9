"""Generic state-space contract shared by the toy domain and Sokoban.

A state is a complete assignment over a finite set of variables. Actions are
pairs of partial assignments (preconditions, postconditions); every action has
an inverse, which is what the backward generator relies on.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Protocol, Sequence

Assignment = tuple[int, ...]
State = Hashable


class NotApplicable(ValueError):
    """Raised when an action's preconditions do not hold in a state."""


class OracleCapExceeded(RuntimeError):
    """Raised when an exhaustive search runs past its state cap."""


@dataclass(frozen=True)
class ActionDef:
    """A ground action. ``pre`` and ``post`` map variable index to value."""

    name: str
    pre: tuple[tuple[int, int], ...]
    post: tuple[tuple[int, int], ...]
    cost: int = 1

    @classmethod
    def make(cls, name: str, pre: dict[int, int], post: dict[int, int], cost: int = 1) -> ActionDef:
        return cls(name, tuple(sorted(pre.items())), tuple(sorted(post.items())), cost)

    def applicable(self, state: Assignment) -> bool:
        return all(state[var] == val for var, val in self.pre)

    def inverse(self) -> ActionDef:
        """Algebraic inverse: requires every post variable to be fixed by pre."""
        pre = dict(self.pre)
        post = dict(self.post)
        if not post.keys() <= pre.keys():
            raise ValueError(f"{self.name}: inverse undefined, post variables not fixed by pre")
        inv_pre = {var: val for var, val in pre.items() if var not in post}
        inv_pre.update(post)
        inv_post = {var: pre[var] for var in post}
        return ActionDef.make(f"{self.name}^-1", inv_pre, inv_post, self.cost)

    def restrict(self, pattern: Sequence[int]) -> ActionDef | None:
        """Project onto ``pattern`` (positions re-indexed to the pattern order).

        Returns None when the action has no effect on any pattern variable.
        """
        pos = {var: i for i, var in enumerate(pattern)}
        post = {pos[v]: x for v, x in self.post if v in pos}
        if not post:
            return None
        pre = {pos[v]: x for v, x in self.pre if v in pos}
        return ActionDef.make(self.name, pre, post, self.cost)


def apply_action(state: Assignment, action: ActionDef) -> Assignment:
    if not action.applicable(state):
        raise NotApplicable(f"{action.name} not applicable to {state}")
    if not action.post:
        return state
    out = list(state)
    for var, val in action.post:
        out[var] = val
    return tuple(out)


class AbstractSpace(Protocol):
    """Abstract state space induced by a pattern.

    ``table_key`` identifies spaces whose distance tables are interchangeable
    (e.g. all Sokoban patterns with the same number of boxes).
    """

    table_key: Hashable

    def project(self, state: State, pattern: tuple[int, ...]) -> Hashable: ...
    def goal_states(self) -> Iterable[Hashable]: ...
    def is_goal(self, abstract: Hashable) -> bool: ...
    def successors(self, abstract: Hashable) -> Iterable[Hashable]: ...
    def predecessors(self, abstract: Hashable) -> Iterable[Hashable]: ...
    def size(self) -> int: ...
    def index(self, abstract: Hashable) -> int: ...
    def unindex(self, i: int) -> Hashable: ...


class SearchDomain(Protocol):
    """What the PDB, novelty and generator code needs from a domain.

    ``num_vars`` is |V| as used by the novelty formula, ``num_pattern_vars``
    the number of variables that get partitioned into patterns.
    """

    num_vars: int
    num_pattern_vars: int

    def goal_states(self) -> list[State]: ...
    def is_goal(self, state: State) -> bool: ...
    def successors(self, state: State) -> Iterable[State]: ...
    def predecessors(self, state: State) -> set[State]: ...
    def facts(self, state: State) -> Sequence[Hashable]: ...
    def abstract_space(self, pattern: tuple[int, ...]) -> AbstractSpace: ...
    def fingerprint(self) -> str: ...


@dataclass(frozen=True)
class FactoredDomain:
    """Explicitly grounded multi-valued planning task with unit-cost actions."""

    name: str
    domain_sizes: tuple[int, ...]
    actions: tuple[ActionDef, ...]
    goal: tuple[tuple[int, int], ...]
    initial: Assignment | None = None
    _inverses: tuple[ActionDef, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_inverses", tuple(a.inverse() for a in self.actions))

    @property
    def num_vars(self) -> int:
        return len(self.domain_sizes)

    @property
    def num_pattern_vars(self) -> int:
        return len(self.domain_sizes)

    def validate(self, state: Assignment) -> None:
        if len(state) != self.num_vars:
            raise ValueError(f"expected {self.num_vars} values, got {len(state)}")
        for var, (val, size) in enumerate(zip(state, self.domain_sizes)):
            if not 0 <= val < size:
                raise ValueError(f"value {val} outside domain of variable {var}")

    def goal_states(self) -> list[Assignment]:
        fixed = dict(self.goal)
        choices = [
            (fixed[v],) if v in fixed else range(size)
            for v, size in enumerate(self.domain_sizes)
        ]
        return [tuple(s) for s in itertools.product(*choices)]

    def is_goal(self, state: Assignment) -> bool:
        return all(state[v] == x for v, x in self.goal)

    def applicable_actions(self, state: Assignment) -> list[ActionDef]:
        return [a for a in self.actions if a.applicable(state)]

    def successors(self, state: Assignment) -> list[Assignment]:
        out = {apply_action(state, a) for a in self.actions if a.applicable(state)}
        out.discard(state)
        return sorted(out)

    def predecessors(self, state: Assignment) -> set[Assignment]:
        out = {apply_action(state, a) for a in self._inverses if a.applicable(state)}
        out.discard(state)
        return out

    def facts(self, state: Assignment) -> tuple[tuple[int, int], ...]:
        return tuple(enumerate(state))

    def abstract_space(self, pattern: tuple[int, ...]) -> FactoredAbstraction:
        return FactoredAbstraction(self, tuple(pattern))

    def fingerprint(self) -> str:
        return f"factored:{self.name}:{self.domain_sizes}:{len(self.actions)}"


class FactoredAbstraction:
    """Projection of a :class:`FactoredDomain` onto a subset of its variables."""

    def __init__(self, domain: FactoredDomain, pattern: tuple[int, ...]):
        self.pattern = pattern
        self.table_key = ("factored", pattern)
        self.sizes = tuple(domain.domain_sizes[v] for v in pattern)
        actions = [a.restrict(pattern) for a in domain.actions]
        self.actions = tuple(a for a in actions if a is not None)
        self.inverses = tuple(a.inverse() for a in self.actions)
        pos = {var: i for i, var in enumerate(pattern)}
        self.goal = tuple((pos[v], x) for v, x in domain.goal if v in pos)

    def project(self, state: Assignment, pattern: tuple[int, ...]) -> Assignment:
        return tuple(state[v] for v in pattern)

    def goal_states(self) -> list[Assignment]:
        fixed = dict(self.goal)
        choices = [(fixed[i],) if i in fixed else range(n) for i, n in enumerate(self.sizes)]
        return [tuple(s) for s in itertools.product(*choices)]

    def is_goal(self, abstract: Assignment) -> bool:
        return all(abstract[i] == x for i, x in self.goal)

    def successors(self, abstract: Assignment) -> set[Assignment]:
        out = {apply_action(abstract, a) for a in self.actions if a.applicable(abstract)}
        out.discard(abstract)
        return out

    def predecessors(self, abstract: Assignment) -> set[Assignment]:
        out = {apply_action(abstract, a) for a in self.inverses if a.applicable(abstract)}
        out.discard(abstract)
        return out

    def size(self) -> int:
        n = 1
        for s in self.sizes:
            n *= s
        return n

    def index(self, abstract: Assignment) -> int:
        i = 0
        for val, size in zip(abstract, self.sizes):
            i = i * size + val
        return i

    def unindex(self, i: int) -> Assignment:
        out = []
        for size in reversed(self.sizes):
            i, val = divmod(i, size)
            out.append(val)
        return tuple(reversed(out))


def toy_pe_problem() -> FactoredDomain:
    """Three variables over {0..4}; ``inc`` steps a variable from x to x+1
    (x in 0..2), ``jump`` sets a variable from 0 to 3 when all the others are 4.

    The single goal is all-three, the initial state all-zero.
    """
    n, top = 3, 4
    actions = []
    for v in range(n):
        for x in range(3):
            actions.append(ActionDef.make(f"inc[v{v + 1}={x}]", {v: x}, {v: x + 1}))
    for v in range(n):
        pre = {u: top for u in range(n) if u != v}
        pre[v] = 0
        actions.append(ActionDef.make(f"jump[v{v + 1}]", pre, {v: 3}))
    return FactoredDomain(
        name="P_e",
        domain_sizes=(top + 1,) * n,
        actions=tuple(actions),
        goal=tuple((v, 3) for v in range(n)),
        initial=(0,) * n,
    )


def shortest_path_length(domain: SearchDomain, start: State, cap: int = 10**7) -> int | None:
    """Forward breadth-first search; None if no goal is reachable."""
    if domain.is_goal(start):
        return 0
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        state, depth = frontier.popleft()
        for nxt in domain.successors(state):
            if nxt in seen:
                continue
            if domain.is_goal(nxt):
                return depth + 1
            seen.add(nxt)
            if len(seen) > cap:
                raise OracleCapExceeded(f"more than {cap} states")
            frontier.append((nxt, depth + 1))
    return None


def backward_reachable(domain: SearchDomain, cap: int = 10**7) -> dict[State, int]:
    """All states that reach a goal, mapped to their backward BFS depth."""
    depth: dict[State, int] = {}
    frontier: deque[State] = deque()
    for g in domain.goal_states():
        if g not in depth:
            depth[g] = 0
            frontier.append(g)
    while frontier:
        state = frontier.popleft()
        d = depth[state] + 1
        for prev in domain.predecessors(state):
            if prev not in depth:
                depth[prev] = d
                if len(depth) > cap:
                    raise OracleCapExceeded(f"more than {cap} states")
                frontier.append(prev)
    return depth
