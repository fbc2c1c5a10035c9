"""Pattern databases over any :class:`~sokogen.state_space.SearchDomain`.

``h^PDBk`` is the maximum over several additive collections whose patterns
hold ``k`` variables each (the last one possibly fewer). ``kC`` conflicts are
the positive part of ``h^PDBk - h^PDB(k-1)``.
"""

from __future__ import annotations

import json
import logging
import math
import random
import struct
import threading
from array import array
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from .state_space import AbstractSpace, SearchDomain, State

log = logging.getLogger(__name__)

UNREACHABLE = math.inf
DEFAULT_CAP = 50_000_000

_MAGIC = b"SKPDB\x00"
_VERSION = 1
_NO_ENTRY = 0xFFFF


class InvalidK(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class CacheMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PatternCollection:
    """Disjoint patterns covering every pattern variable exactly once."""

    patterns: tuple[tuple[int, ...], ...]
    size: int

    def __post_init__(self) -> None:
        if any(not p for p in self.patterns):
            raise ValueError("patterns must be non-empty")

    @property
    def variables(self) -> list[int]:
        return sorted(v for p in self.patterns for v in p)


def partition(order: Sequence[int], k: int) -> PatternCollection:
    blocks = tuple(tuple(sorted(order[i:i + k])) for i in range(0, len(order), k))
    return PatternCollection(blocks, k)


def sample_pattern_collections(num_vars: int, k: int, n: int, seed: int) -> list[PatternCollection]:
    """Draw ``n`` random partitions by picking ``k`` variables at a time without replacement."""
    if k < 1:
        raise InvalidK(f"pattern size must be >= 1, got {k}")
    if n < 1:
        raise ValueError(f"need at least one collection, got {n}")
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        order = list(range(num_vars))
        rng.shuffle(order)
        out.append(partition(order, k))
    return out


def conflict_count(h_k: float, h_prev: float) -> float:
    if h_k == UNREACHABLE:
        return 0 if h_prev == UNREACHABLE else UNREACHABLE
    n = h_k - h_prev
    return n if n > 0 else 0


class PatternDatabase:
    """Exact goal distances in one abstract space.

    Built eagerly by breadth-first search backwards from the abstract goals. If
    the space holds more than ``cap`` states the table is dropped and distances
    are found on demand by forward search, memoized.
    """

    def __init__(self, space: AbstractSpace, distances: dict[Hashable, int] | None):
        self.space = space
        self.lazy = distances is None
        self._table: dict[Hashable, int] = {} if distances is None else distances
        self._lock = threading.Lock()

    @classmethod
    def build(cls, space: AbstractSpace, cap: int = DEFAULT_CAP, lazy_fallback: bool = True) -> PatternDatabase:
        dist: dict[Hashable, int] = {}
        frontier: deque = deque()
        for g in space.goal_states():
            if g not in dist:
                dist[g] = 0
                frontier.append(g)
        while frontier:
            a = frontier.popleft()
            d = dist[a] + 1
            for prev in space.predecessors(a):
                if prev not in dist:
                    dist[prev] = d
                    frontier.append(prev)
            if len(dist) > cap:
                if not lazy_fallback:
                    raise BudgetExceeded(f"abstract space {space.table_key} exceeds {cap} states")
                log.info("abstract space %s exceeds %d states, switching to lazy mode", space.table_key, cap)
                return cls(space, None)
        return cls(space, dist)

    def __len__(self) -> int:
        return len(self._table)

    def distance(self, abstract: Hashable) -> float:
        if not self.lazy:
            return self._table.get(abstract, UNREACHABLE)
        d = self._table.get(abstract)
        if d is None:
            d = self._search(abstract)
            with self._lock:
                self._table.setdefault(abstract, d)
        return d

    def _search(self, start: Hashable) -> float:
        space = self.space
        if space.is_goal(start):
            return 0
        seen = {start}
        frontier = deque([(start, 0)])
        while frontier:
            a, depth = frontier.popleft()
            for nxt in space.successors(a):
                if nxt in seen:
                    continue
                if space.is_goal(nxt):
                    return depth + 1
                seen.add(nxt)
                frontier.append((nxt, depth + 1))
        return UNREACHABLE

    def items(self) -> Iterable[tuple[Hashable, int]]:
        return self._table.items()

    # on-disk format: magic, version, key length, JSON key, entry count, uint16 LE array
    def to_bytes(self, key: dict) -> bytes:
        if self.lazy:
            raise ValueError("lazy tables are not cached")
        size = self.space.size()
        flat = array("H", [_NO_ENTRY]) * size
        for a, d in self._table.items():
            if d >= _NO_ENTRY:
                raise ValueError("distance does not fit the cache format")
            flat[self.space.index(a)] = d
        if flat.itemsize != 2:
            raise RuntimeError("unsigned short is not 16 bits on this platform")
        if struct.pack("=H", 1) != struct.pack("<H", 1):
            flat.byteswap()
        key_bytes = json.dumps(key, sort_keys=True).encode()
        header = _MAGIC + struct.pack("<HI", _VERSION, len(key_bytes)) + key_bytes + struct.pack("<Q", size)
        return header + flat.tobytes()

    @classmethod
    def from_bytes(cls, space: AbstractSpace, blob: bytes, key: dict) -> PatternDatabase:
        if not blob.startswith(_MAGIC):
            raise CacheMismatch("bad magic")
        off = len(_MAGIC)
        version, key_len = struct.unpack_from("<HI", blob, off)
        off += 6
        if version != _VERSION:
            raise CacheMismatch(f"unsupported cache version {version}")
        stored = json.loads(blob[off:off + key_len])
        off += key_len
        if stored != json.loads(json.dumps(key, sort_keys=True)):
            raise CacheMismatch(f"cache key {stored} does not match {key}")
        (size,) = struct.unpack_from("<Q", blob, off)
        off += 8
        if size != space.size():
            raise CacheMismatch("cache size does not match the abstract space")
        flat = array("H")
        flat.frombytes(blob[off:off + 2 * size])
        if struct.pack("=H", 1) != struct.pack("<H", 1):
            flat.byteswap()
        dist = {space.unindex(i): d for i, d in enumerate(flat) if d != _NO_ENTRY}
        return cls(space, dist)


class PdbStore:
    """Builds and shares pattern databases for one domain.

    Spaces with equal ``table_key`` share one table. With ``cache_dir`` set,
    tables are loaded from / saved to disk.
    """

    def __init__(self, domain: SearchDomain, cap: int = DEFAULT_CAP, cache_dir: str | Path | None = None,
                 lazy_fallback: bool = True, max_cache_bytes: int = 1 << 28):
        self.domain = domain
        self.cap = cap
        self.lazy_fallback = lazy_fallback
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self.max_cache_bytes = max_cache_bytes
        self._dbs: dict[Hashable, PatternDatabase] = {}
        self._lock = threading.Lock()

    def cache_key(self, space: AbstractSpace) -> dict:
        return {"domain": self.domain.fingerprint(), "table": list(_jsonable(space.table_key))}

    def _path(self, key: dict) -> Path:
        import hashlib

        name = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:24]
        assert self.cache_dir is not None
        return self.cache_dir / f"{name}.pdb"

    def database(self, pattern: tuple[int, ...]) -> PatternDatabase:
        space = self.domain.abstract_space(pattern)
        db = self._dbs.get(space.table_key)
        if db is not None:
            return db
        with self._lock:
            db = self._dbs.get(space.table_key)
            if db is None:
                db = self._load_or_build(space)
                self._dbs[space.table_key] = db
        return db

    def _load_or_build(self, space: AbstractSpace) -> PatternDatabase:
        if self.cache_dir is None:
            return PatternDatabase.build(space, self.cap, self.lazy_fallback)
        key = self.cache_key(space)
        path = self._path(key)
        if path.exists():
            try:
                return PatternDatabase.from_bytes(space, path.read_bytes(), key)
            except CacheMismatch as exc:
                log.warning("ignoring PDB cache %s: %s", path, exc)
        db = PatternDatabase.build(space, self.cap, self.lazy_fallback)
        if not db.lazy and 2 * space.size() <= self.max_cache_bytes:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(db.to_bytes(key))
            tmp.replace(path)
        return db


def _jsonable(key: Hashable):
    if isinstance(key, tuple):
        return [_jsonable(k) for k in key]
    return key


class AdditivePdb:
    """Sum of pattern database values over one pattern collection."""

    def __init__(self, collection: PatternCollection, store: PdbStore):
        self.collection = collection
        self.parts = [
            (p, store.domain.abstract_space(p), store.database(p)) for p in collection.patterns
        ]

    def value(self, state: State, memo: dict | None = None) -> float:
        total = 0
        for pattern, space, db in self.parts:
            if memo is not None:
                d = memo.get(pattern)
                if d is None:
                    d = memo[pattern] = db.distance(space.project(state, pattern))
            else:
                d = db.distance(space.project(state, pattern))
            total += d
        return total


class MaxPdbHeuristic:
    """Maximum over additive collections that share one pattern size ``k``."""

    def __init__(self, store: PdbStore, k: int, collections: Sequence[PatternCollection], seed: int | None = None):
        self.store = store
        self.k = k
        self.seed = seed
        self.additive = [AdditivePdb(c, store) for c in collections]

    @classmethod
    def sample(cls, store: PdbStore, k: int, seed: int, n_collections: int | None = None) -> MaxPdbHeuristic:
        nvars = store.domain.num_pattern_vars
        n = n_collections if n_collections is not None else nvars + 1
        return cls(store, k, sample_pattern_collections(nvars, k, n, seed), seed)

    @property
    def collections(self) -> list[PatternCollection]:
        return [a.collection for a in self.additive]

    def add_collection(self, collection: PatternCollection) -> None:
        self.additive.append(AdditivePdb(collection, self.store))

    def value(self, state: State, memo: dict | None = None) -> float:
        if memo is None:
            memo = {}
        best = 0
        for add in self.additive:
            v = add.value(state, memo)
            if v > best:
                best = v
        return best

    __call__ = value


def h_value(h: MaxPdbHeuristic, state: State) -> float:
    return h.value(state)


def conflicts(state: State, k: int, h_k: MaxPdbHeuristic, h_prev: MaxPdbHeuristic) -> float:
    if k < 2:
        raise InvalidK(f"conflicts need order >= 2, got {k}")
    return conflict_count(h_k.value(state), h_prev.value(state))
