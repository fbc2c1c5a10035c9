import itertools

import pytest

from sokogen.state_space import (
    ActionDef,
    FactoredDomain,
    NotApplicable,
    apply_action,
    backward_reachable,
    shortest_path_length,
    toy_pe_problem,
)

PE = toy_pe_problem()
ALL_PE = list(itertools.product(range(5), repeat=3))


def action(name):
    return next(a for a in PE.actions if a.name == name)


def test_apply_action_examples():
    assert apply_action((0, 0, 0), action("inc[v1=0]")) == (1, 0, 0)
    assert apply_action((0, 4, 4), action("jump[v1]")) == (3, 4, 4)
    noop = ActionDef.make("noop", {0: 1}, {})
    assert apply_action((1, 2, 3), noop) == (1, 2, 3)


def test_apply_action_not_applicable():
    with pytest.raises(NotApplicable):
        apply_action((0, 3, 4), action("jump[v1]"))
    with pytest.raises(NotApplicable):
        apply_action((1, 0, 0), action("inc[v1=0]"))


def test_inverse_round_trip_exhaustive():
    for state in ALL_PE:
        for a in PE.actions:
            if a.applicable(state):
                nxt = apply_action(state, a)
                assert apply_action(nxt, a.inverse()) == state


def test_predecessor_examples():
    assert PE.predecessors((3, 3, 3)) == {(2, 3, 3), (3, 2, 3), (3, 3, 2)}
    assert PE.predecessors((0, 0, 0)) == set()
    assert PE.predecessors((3, 4, 4)) == {(2, 4, 4), (0, 4, 4)}


def test_duality_exhaustive():
    succ = {s: set(PE.successors(s)) for s in ALL_PE}
    for s in ALL_PE:
        for p in PE.predecessors(s):
            assert s in succ[p]
        for t in succ[s]:
            assert s in PE.predecessors(t)


def test_forward_oracle_values():
    assert shortest_path_length(PE, PE.initial) == 9
    assert shortest_path_length(PE, (3, 3, 3)) == 0
    assert shortest_path_length(PE, (4, 0, 0)) is None
    assert shortest_path_length(PE, (0, 4, 4)) is None
    assert shortest_path_length(PE, (0, 3, 3)) == 3


def test_backward_reachable_states_are_solvable():
    depth = backward_reachable(PE)
    assert len(depth) == 64
    for state, d in depth.items():
        assert shortest_path_length(PE, state) == d


def test_abstraction_index_round_trip():
    space = PE.abstract_space((0, 2))
    seen = set()
    for i in range(space.size()):
        a = space.unindex(i)
        assert space.index(a) == i
        seen.add(a)
    assert len(seen) == 25


def test_restrict_drops_irrelevant_actions():
    a = action("inc[v1=0]")
    assert a.restrict((1, 2)) is None
    r = action("jump[v2]").restrict((1, 2))
    assert r.pre == ((0, 0), (1, 4)) and r.post == ((0, 3),)


def test_validate_rejects_out_of_range():
    bad = FactoredDomain(
        name="bad", domain_sizes=(2,), actions=(), goal=((0, 1),), initial=(0,)
    )
    with pytest.raises(ValueError):
        bad.validate((2,))
