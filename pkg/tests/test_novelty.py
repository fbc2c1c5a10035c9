from itertools import combinations

from hypothesis import given, settings
from hypothesis import strategies as st

from sokogen.novelty import NOVELTY_MIN, NoveltyTable, evaluate_and_record, reset
from sokogen.sokoban import SokobanDomain
from sokogen.state_space import backward_reachable, toy_pe_problem

from helpers import TRAP, level

PE = toy_pe_problem()
TRACE = [
    ((3, 3, 3), 3),
    ((2, 3, 3), 3),
    ((3, 2, 3), 3),
    ((3, 3, 2), 3),
    ((1, 3, 3), 3),
    ((2, 2, 3), 2),
    ((2, 3, 2), 2),
]


def table(arity=3):
    return NoveltyTable.for_domain(PE, arity)


def replay(t):
    return [evaluate_and_record(t, s, 0) for s, _ in TRACE]


def test_worked_trace():
    assert replay(table()) == [w for _, w in TRACE]


def test_reset_restores_first_state_behaviour():
    t = table()
    assert evaluate_and_record(t, (0, 0, 0), 0) == 3
    reset(t)
    assert evaluate_and_record(t, (0, 0, 0), 0) == 3
    reset(reset(t))
    assert len(t) == 0
    assert replay(t) == [w for _, w in TRACE]


def test_first_state_always_maximal():
    for s in [(0, 0, 0), (4, 1, 2), (3, 3, 3)]:
        assert table().evaluate(s, 5) == PE.num_vars


def test_repeat_evaluation_is_not_novel():
    t = table()
    t.evaluate((1, 2, 3), 0)
    assert t.evaluate((1, 2, 3), 0) == NOVELTY_MIN < PE.num_vars


def test_partitioned_by_h():
    t = table()
    assert t.evaluate((1, 2, 3), 0) == 3
    assert t.evaluate((1, 2, 3), 1) == 3
    assert t.evaluate((1, 2, 3), 0) == NOVELTY_MIN


def test_arity_bound():
    t = table(arity=1)
    t.evaluate((1, 2, 3), 0)
    t.evaluate((0, 0, 0), 0)
    # (1, 0, 3) has a new pair but no new single fact
    assert t.evaluate((1, 0, 3), 0) == NOVELTY_MIN


def brute_force(history, state):
    facts = list(enumerate(state))
    for n in range(1, len(facts) + 1):
        for subset in combinations(facts, n):
            if not any(all(prev[v] == x for v, x in subset) for prev in history):
                return len(facts) - n + 1
    return NOVELTY_MIN


states = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))


@settings(max_examples=200)
@given(st.lists(st.tuples(states, st.integers(0, 1)), max_size=25))
def test_matches_brute_force(sequence):
    t = table()
    history: dict[int, list] = {}
    for s, h in sequence:
        want = brute_force(history.setdefault(h, []), s)
        assert t.evaluate(s, h) == want
        history[h].append(s)


def test_brute_force_over_toy_backward_order():
    t = table()
    history = []
    for s in sorted(backward_reachable(PE)):
        assert t.evaluate(s, 0) == brute_force(history, s)
        history.append(s)


def test_sokoban_facts():
    maze, s0 = level(TRAP)
    dom = SokobanDomain(maze)
    assert len(dom.facts(s0)) == dom.num_vars == 4
    t = NoveltyTable.for_domain(dom)
    goal = dom.goal_states()[0]
    assert t.evaluate(goal, 0) == 4
    moved = min(dom.predecessors(goal))
    assert t.evaluate(moved, 0) == 4  # a box on a brand-new cell
