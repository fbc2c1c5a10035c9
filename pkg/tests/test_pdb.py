import random
import threading
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import EMPTY_4x4_ONE_BOX, TRAP, all_states, level, oracle_push_distance
from sokogen.pdb import (
    UNREACHABLE,
    AdditivePdb,
    BudgetExceeded,
    CacheMismatch,
    InvalidK,
    MaxPdbHeuristic,
    PatternCollection,
    PatternDatabase,
    PdbStore,
    conflict_count,
    conflicts,
    h_value,
    sample_pattern_collections,
)
from sokogen.sokoban import SokobanDomain
from sokogen.state_space import backward_reachable, toy_pe_problem

PE = toy_pe_problem()
S0 = (0, 0, 0)


def shape(c: PatternCollection):
    return frozenset(frozenset(p) for p in c.patterns)


def fixed(store, k, *collections):
    return MaxPdbHeuristic(store, k, [PatternCollection(tuple(map(tuple, c)), k) for c in collections])


# -- sampling -----------------------------------------------------------------

def test_k1_has_one_partition():
    cs = sample_pattern_collections(4, 1, 10, seed=3)
    assert {shape(c) for c in cs} == {frozenset(frozenset([v]) for v in range(4))}


def test_k_covering_everything_gives_one_pattern():
    for c in sample_pattern_collections(3, 3, 5, seed=0):
        assert c.patterns == ((0, 1, 2),)


def test_partitions_are_uniform_chi_square():
    n = 3000
    counts = Counter(shape(c) for c in sample_pattern_collections(3, 2, n, seed=12345))
    assert len(counts) == 3
    expected = n / 3
    chi2 = sum((obs - expected) ** 2 / expected for obs in counts.values())
    assert chi2 < 13.82  # 2 degrees of freedom, p = 0.001


def test_trailing_block_is_remainder():
    for c in sample_pattern_collections(5, 4, 20, seed=1):
        assert sorted(len(p) for p in c.patterns) == [1, 4]
        assert c.variables == [0, 1, 2, 3, 4]


def test_invalid_k():
    with pytest.raises(InvalidK):
        sample_pattern_collections(3, 0, 1, seed=0)
    store = PdbStore(PE)
    with pytest.raises(InvalidK):
        conflicts(S0, 1, MaxPdbHeuristic.sample(store, 1, 0), MaxPdbHeuristic.sample(store, 1, 0))


def test_sampling_is_deterministic():
    a = sample_pattern_collections(6, 2, 7, seed=99)
    b = sample_pattern_collections(6, 2, 7, seed=99)
    assert a == b
    assert a != sample_pattern_collections(6, 2, 7, seed=100)


def test_default_number_of_collections():
    h = MaxPdbHeuristic.sample(PdbStore(PE), 2, seed=0)
    assert len(h.collections) == PE.num_pattern_vars + 1


# -- toy problem values ---------------------------------------------------------

def test_toy_pattern_distances():
    store = PdbStore(PE)
    assert store.database((0,)).distance((0,)) == 1
    assert store.database((1, 2)).distance((0, 0)) == 6
    assert AdditivePdb(PatternCollection(((0,), (1, 2)), 2), store).value(S0) == 7


def test_toy_heuristic_values():
    store = PdbStore(PE)
    h1 = MaxPdbHeuristic.sample(store, 1, seed=0)
    h2 = fixed(store, 2, [[0], [1, 2]], [[1], [0, 2]], [[2], [0, 1]])
    h3 = MaxPdbHeuristic.sample(store, 3, seed=0)
    assert (h1(S0), h2(S0), h3(S0)) == (3, 7, 9)
    # every 2-partition of the symmetric toy gives the same value
    assert MaxPdbHeuristic.sample(store, 2, seed=41)(S0) == 7
    assert conflicts(S0, 2, h2, h1) == 4
    assert conflicts(S0, 3, h3, h2) == 2
    assert h_value(h3, (3, 3, 3)) == 0


def test_toy_unreachable_propagates():
    store = PdbStore(PE)
    h3 = MaxPdbHeuristic.sample(store, 3, seed=0)
    h1 = MaxPdbHeuristic.sample(store, 1, seed=0)
    assert h3((4, 0, 0)) == UNREACHABLE
    assert h1((4, 0, 0)) == UNREACHABLE
    assert conflicts((4, 0, 0), 3, h3, h1) == 0


def test_full_pattern_is_exact_on_toy():
    store = PdbStore(PE)
    h3 = MaxPdbHeuristic.sample(store, 3, seed=0)
    for state, d in backward_reachable(PE).items():
        assert h3(state) == d


# -- sokoban tables --------------------------------------------------------------

def test_one_box_table_matches_move_oracle():
    maze, _ = level(EMPTY_4x4_ONE_BOX)
    store = PdbStore(SokobanDomain(maze))
    db = store.database((0,))
    for state in all_states(maze, 1):
        want = oracle_push_distance(maze, state.boxes, state.man)
        assert db.distance(state) == (UNREACHABLE if want is None else want)


def test_full_pattern_is_exact_on_trap():
    maze, s0 = level(TRAP)
    dom = SokobanDomain(maze)
    h3 = MaxPdbHeuristic.sample(PdbStore(dom), 3, seed=0)
    depth = backward_reachable(dom)
    for state, d in depth.items():
        assert h3(state) == d
    assert h3(s0) == 9
    for state in all_states(maze, 3):
        if state not in depth:
            assert h3(state) == UNREACHABLE


def test_trap_collections():
    maze, s0 = level(TRAP)
    store = PdbStore(SokobanDomain(maze))
    # slots index the sorted box tuple: 0 = C2, 1 = D3, 2 = D4
    assert fixed(store, 1, [[0], [1], [2]])(s0) == 5
    assert fixed(store, 2, [[0], [1, 2]])(s0) == 9
    assert fixed(store, 2, [[1], [0, 2]])(s0) == 5
    assert fixed(store, 2, [[2], [0, 1]])(s0) == 5


def test_max_is_monotone_under_adding_collections():
    maze, _ = level(TRAP)
    dom = SokobanDomain(maze)
    store = PdbStore(dom)
    states = list(backward_reachable(dom))
    h = fixed(store, 2, [[1], [0, 2]])
    before = [h(s) for s in states]
    h.add_collection(PatternCollection(((0,), (1, 2)), 2))
    after = [h(s) for s in states]
    assert all(b <= a for b, a in zip(before, after))
    assert any(b < a for b, a in zip(before, after))


def test_heuristic_is_admissible_on_trap():
    maze, _ = level(TRAP)
    dom = SokobanDomain(maze)
    store = PdbStore(dom)
    hs = [MaxPdbHeuristic.sample(store, k, seed=k) for k in (1, 2)]
    for state, d in backward_reachable(dom).items():
        assert all(h(state) <= d for h in hs)


def test_goal_states_have_zero_conflicts():
    maze, _ = level(TRAP)
    dom = SokobanDomain(maze)
    store = PdbStore(dom)
    hs = {k: MaxPdbHeuristic.sample(store, k, seed=7) for k in (1, 2, 3)}
    for g in dom.goal_states():
        assert conflicts(g, 2, hs[2], hs[1]) == 0
        assert conflicts(g, 3, hs[3], hs[2]) == 0


@given(st.integers(0, 50), st.integers(0, 50))
def test_conflict_count_clamps(a, b):
    c = conflict_count(a, b)
    assert c >= 0
    assert c == (a - b if a > b else 0)


def test_conflict_count_unreachable():
    assert conflict_count(UNREACHABLE, 3) == UNREACHABLE
    assert conflict_count(UNREACHABLE, UNREACHABLE) == 0


# -- lazy tables, budgets and caching ---------------------------------------------

def test_lazy_mode_matches_full_tables():
    maze, _ = level(TRAP)
    dom = SokobanDomain(maze)
    full = PdbStore(dom)
    lazy = PdbStore(dom, cap=10)
    assert lazy.database((0, 1)).lazy and not full.database((0, 1)).lazy
    for k in (1, 2, 3):
        hf = MaxPdbHeuristic.sample(full, k, seed=5)
        hl = MaxPdbHeuristic.sample(lazy, k, seed=5)
        for state in all_states(maze, 3)[::7]:
            assert hf(state) == hl(state)


def test_budget_exceeded_without_fallback():
    store = PdbStore(PE, cap=5, lazy_fallback=False)
    with pytest.raises(BudgetExceeded):
        store.database((0, 1, 2))


def test_lazy_lookups_are_thread_safe():
    maze, _ = level(TRAP)
    dom = SokobanDomain(maze)
    states = all_states(maze, 3)
    want = [MaxPdbHeuristic.sample(PdbStore(dom), 2, seed=1)(s) for s in states]
    lazy = MaxPdbHeuristic.sample(PdbStore(dom, cap=10), 2, seed=1)
    got = [None] * len(states)

    def work(offset):
        for i in range(offset, len(states), 4):
            got[i] = lazy(states[i])

    threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert got == want


def test_cache_round_trip_is_bit_identical(tmp_path):
    maze, _ = level(TRAP)
    dom = SokobanDomain(maze)
    first = PdbStore(dom, cache_dir=tmp_path)
    db = first.database((0, 1))
    files = list(tmp_path.glob("*.pdb"))
    assert len(files) == 1
    second = PdbStore(dom, cache_dir=tmp_path)
    loaded = second.database((1, 2))  # same pattern size shares the table
    assert dict(loaded.items()) == dict(db.items())
    key = first.cache_key(dom.abstract_space((0, 1)))
    rebuilt = PatternDatabase.build(dom.abstract_space((0, 1)))
    assert rebuilt.to_bytes(key) == files[0].read_bytes()


def test_cache_rejects_foreign_tables(tmp_path):
    maze, _ = level(TRAP)
    other, _ = level(EMPTY_4x4_ONE_BOX)
    dom, dom2 = SokobanDomain(maze), SokobanDomain(other)
    blob = PatternDatabase.build(dom.abstract_space((0,))).to_bytes(PdbStore(dom).cache_key(dom.abstract_space((0,))))
    with pytest.raises(CacheMismatch):
        PatternDatabase.from_bytes(dom2.abstract_space((0,)), blob, PdbStore(dom2).cache_key(dom2.abstract_space((0,))))
    with pytest.raises(CacheMismatch):
        PatternDatabase.from_bytes(dom.abstract_space((0,)), b"junk" + blob, {})


def test_corrupt_cache_file_is_rebuilt(tmp_path):
    maze, s0 = level(TRAP)
    dom = SokobanDomain(maze)
    PdbStore(dom, cache_dir=tmp_path).database((0,))
    (path,) = tmp_path.glob("*.pdb")
    path.write_bytes(b"garbage")
    h = MaxPdbHeuristic.sample(PdbStore(dom, cache_dir=tmp_path), 1, seed=0)
    assert h(s0) == 5


def test_toy_tables_cache(tmp_path):
    store = PdbStore(PE, cache_dir=tmp_path)
    h = MaxPdbHeuristic.sample(store, 2, seed=3)
    again = MaxPdbHeuristic.sample(PdbStore(PE, cache_dir=tmp_path), 2, seed=3)
    rng = random.Random(0)
    for _ in range(50):
        s = tuple(rng.randrange(5) for _ in range(3))
        assert h(s) == again(s)
