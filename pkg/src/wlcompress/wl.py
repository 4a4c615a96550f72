"""The k-dimensional Weisfeiler-Leman refinement on colored graphs.

Colorings of k-tuples are numpy arrays of shape ``(n,) * k`` flattened in C
order, so tuple ``(u_1, ..., u_k)`` sits at ``ravel_multi_index``. A run may
cover one or two graphs; color ids are dense and canonical across the run:
ids are ranks of the refinement keys in sorted order, so they depend only on
the keys and never on tuple enumeration order or chunking.

Each round computes, for every tuple, its old color and the multiset over
``w`` of the k-vectors ``(chi(u[w/1]), ..., chi(u[w/k]))``. A k-vector is
packed into one int64; a multiset is the row of packed values sorted along
``w``. Rows are bucketed by a 64-bit hash and every row is then compared
entry by entry with its bucket's representative, so a hash collision can
never merge two different multisets.
"""

from __future__ import annotations

import itertools
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graphs import ColoredGraph

DEFAULT_TUPLE_CAP = 4_000_000
CAP_ENV = "WLCOMPRESS_TUPLE_CAP"
# entries of the (tuples x w) key block materialized at once
CHUNK_ELEMENTS = 1 << 23


class TupleCapExceeded(RuntimeError):
    pass


def tuple_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_TUPLE_CAP


def check_cap(graphs: Sequence[ColoredGraph], k: int, cap: int | None) -> None:
    cap = tuple_cap() if cap is None else cap
    total = sum(G.n ** k for G in graphs)
    if total > cap:
        sizes = ", ".join(str(G.n) for G in graphs)
        raise TupleCapExceeded(
            f"{k}-WL on graphs with {sizes} vertices needs {total} tuples, above the cap of {cap} "
            f"(raise it with --tuple-cap or {CAP_ENV})"
        )


def atomic_type(G: ColoredGraph, tup: Sequence[int], k: int | None = None) -> tuple:
    """Isomorphism type of the tuple: equalities, colors, adjacencies, class pattern."""
    if k is not None and len(tup) != k:
        raise ValueError(f"expected a {k}-tuple, got {len(tup)} entries")
    pairs = list(itertools.combinations(range(len(tup)), 2))
    eq = tuple(tup[i] == tup[j] for i, j in pairs)
    colors = tuple(G.colors[v] for v in tup)
    adj = tuple(G.has_edge(tup[i], tup[j]) for i, j in pairs)
    rel = tuple(G.same_class(tup[i], tup[j]) for i, j in pairs) if G.classes is not None else ()
    return (colors, eq, adj, rel)


@dataclass
class TupleColoring:
    k: int
    round: int
    sizes: tuple[int, ...]
    colors: list[np.ndarray]
    num_colors: int
    counts: list[int] = field(default_factory=list)  # distinct colors per graph

    def histogram(self, g: int = 0) -> Counter:
        ids, cnt = np.unique(self.colors[g], return_counts=True)
        return Counter(dict(zip(ids.tolist(), cnt.tolist())))

    def bincounts(self) -> list[np.ndarray]:
        return [np.bincount(c, minlength=self.num_colors) for c in self.colors]

    def histograms_differ(self) -> bool:
        if len(self.colors) < 2:
            return False
        a, b = self.bincounts()[:2]
        return not np.array_equal(a, b)

    def color_of(self, g: int, tup: Sequence[int]) -> int:
        n = self.sizes[g]
        return int(self.colors[g][np.ravel_multi_index(tuple(tup), (n,) * self.k)])


def _dense(columns: list[np.ndarray]) -> tuple[np.ndarray, int]:
    """Canonical dense ids for rows of stacked integer columns (lexicographic rank)."""
    if len(columns) == 1:
        uniq, inv = np.unique(columns[0], return_inverse=True)
        return inv.astype(np.int64).ravel(), len(uniq)
    radix = [int(c.max()) + 1 if c.size else 1 for c in columns]
    total = 1
    for r in radix:
        total *= r
    if total < 2 ** 62:
        code = np.zeros(columns[0].shape, dtype=np.int64)
        for c, r in zip(columns, radix):
            code = code * r + c
        uniq, inv = np.unique(code, return_inverse=True)
        return inv.astype(np.int64).ravel(), len(uniq)
    stacked = np.stack(columns, axis=1)
    uniq, inv = np.unique(stacked, axis=0, return_inverse=True)
    return inv.astype(np.int64).ravel(), len(uniq)


def _class_counts(colors: list[np.ndarray]) -> list[int]:
    return [len(np.unique(c)) for c in colors]


def initial_coloring(graphs: Sequence[ColoredGraph], k: int, cap: int | None = None) -> TupleColoring:
    if k < 2:
        raise ValueError("k-WL needs k >= 2")
    check_cap(graphs, k, cap)
    palette = sorted(set().union(*(set(G.colors) for G in graphs)))
    dense = {c: i for i, c in enumerate(palette)}
    pairs = list(itertools.combinations(range(k), 2))
    per_graph: list[list[np.ndarray]] = []
    for G in graphs:
        n = G.n
        axes = [np.arange(n).reshape([n if a == i else 1 for a in range(k)]) for i in range(k)]
        shape = (n,) * k
        col = np.array([dense[c] for c in G.colors], dtype=np.int64)
        adj = np.zeros((n, n), dtype=np.int64)
        for u, v in G.edges():
            adj[u, v] = adj[v, u] = 1
        if G.classes is not None:
            cls = np.array(G.classes)
            rel = (cls[:, None] == cls[None, :]).astype(np.int64)
        else:
            rel = np.eye(n, dtype=np.int64)
        feats = [np.broadcast_to(col[axes[i]], shape) for i in range(k)]
        for i, j in pairs:
            eq = (axes[i] == axes[j]).astype(np.int64)
            # pack the three pair bits into one small column
            bits = eq * 4 + adj[axes[i], axes[j]] * 2 + rel[axes[i], axes[j]]
            feats.append(np.broadcast_to(bits, shape))
        per_graph.append([f.reshape(-1) for f in feats])
    columns = [np.concatenate([feats[c] for feats in per_graph]) for c in range(len(per_graph[0]))]
    ids, num = _dense(columns)
    colors = _split(ids, [G.n ** k for G in graphs])
    return TupleColoring(k, 0, tuple(G.n for G in graphs), colors, num, _class_counts(colors))


def _split(flat: np.ndarray, lengths: Sequence[int]) -> list[np.ndarray]:
    out, start = [], 0
    for length in lengths:
        out.append(flat[start:start + length])
        start += length
    return out


_MIX = np.uint64(0x9E3779B97F4A7C15)


def _row_hash(rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
    x = rows.astype(np.uint64)
    x = (x ^ (x >> np.uint64(29))) * _MIX
    with np.errstate(over="ignore"):
        return (x * weights[None, :]).sum(axis=1, dtype=np.uint64)


class _MultisetTable:
    """Assigns provisional ids to sorted rows; exact despite hashing."""

    def __init__(self) -> None:
        self.by_hash: dict[tuple[int, int], int] = {}
        self.exact: dict[bytes, int] = {}
        self.rows: list[np.ndarray] = []

    def _new(self, row: np.ndarray) -> int:
        self.rows.append(row.copy())
        return len(self.rows) - 1

    def ids(self, rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
        h = _row_hash(rows, weights)
        width = rows.shape[1]
        uniq, first, inv = np.unique(h, return_index=True, return_inverse=True)
        bucket = np.empty(len(uniq), dtype=np.int64)
        for t, (hv, fi) in enumerate(zip(uniq.tolist(), first.tolist())):
            got = self.by_hash.get((width, hv))
            if got is None:
                got = self.by_hash[(width, hv)] = self._new(rows[fi])
            bucket[t] = got
        ids = bucket[inv.ravel()]
        reps = np.stack([self.rows[i] for i in bucket.tolist()])
        bad = np.nonzero((reps[inv.ravel()] != rows).any(axis=1))[0]
        for r in bad.tolist():
            key = rows[r].tobytes()
            got = self.exact.get(key)
            if got is None:
                got = self.exact[key] = self._new(rows[r])
            ids[r] = got
        return ids

    def canonical_ranks(self) -> np.ndarray:
        """Rank of every provisional id in the sorted order of its row (shorter rows first)."""
        # big-endian bytes of non-negative int64 sort numerically
        keys = [(len(row), row.astype(">i8").tobytes()) for row in self.rows]
        order = sorted(range(len(keys)), key=keys.__getitem__)
        rank = np.empty(len(self.rows), dtype=np.int64)
        # identical rows may reach the table through both dicts; they share a rank
        prev, r = None, -1
        for i in order:
            key = keys[i]
            if key != prev:
                r += 1
                prev = key
            rank[i] = r
        return rank


def wl_round(state: TupleColoring) -> TupleColoring:
    """One refinement step, applied jointly to every graph of the run."""
    k, C = state.k, state.num_colors
    if C ** k >= 2 ** 63:
        raise TupleCapExceeded(
            f"{C} colors cannot be packed exactly into 64-bit keys for k = {k}; shrink the instance"
        )
    weights = np.random.default_rng(0x5EED).integers(1, 2 ** 63, size=max(state.sizes), dtype=np.uint64)
    weights |= np.uint64(1)
    table = _MultisetTable()
    provisional: list[np.ndarray] = []
    for g, n in enumerate(state.sizes):
        chi = state.colors[g].reshape((n,) * k)
        subs = [np.expand_dims(np.moveaxis(chi, i, -1), i) for i in range(k)]
        rest = n ** (k - 1)
        block = max(1, CHUNK_ELEMENTS // max(1, rest * n))
        out = np.empty(n ** k, dtype=np.int64)
        w = weights[:n]
        for a in range(0, n, block):
            b = min(n, a + block)
            key = np.zeros((b - a,) + (n,) * k, dtype=np.int64)
            for i, s in enumerate(subs):
                part = s if i == 0 else s[a:b]
                key = key * C + part
            rows = np.sort(key.reshape(-1, n), axis=1)
            out[a * rest:b * rest] = table.ids(rows, w)
        provisional.append(out)
    rank = table.canonical_ranks()
    old = np.concatenate(state.colors)
    new = rank[np.concatenate(provisional)]
    ids, num = _dense([old, new])
    colors = _split(ids, [len(c) for c in state.colors])
    return TupleColoring(k, state.round + 1, state.sizes, colors, num, _class_counts(colors))


def same_partition(a: TupleColoring, b: TupleColoring, g: int | None = None) -> bool:
    """Whether two colorings of the same run induce the same partition (per graph or jointly)."""
    if g is not None:
        return _partition_equal(a.colors[g], b.colors[g])
    return _partition_equal(np.concatenate(a.colors), np.concatenate(b.colors))


def _partition_equal(x: np.ndarray, y: np.ndarray) -> bool:
    pairs = np.unique(np.stack([x, y], axis=1), axis=0)
    return len(pairs) == len(np.unique(x)) == len(np.unique(y))


def wl_stabilize(
    G: ColoredGraph, k: int, max_rounds: int | None = None, cap: int | None = None
) -> tuple[TupleColoring, int]:
    """Run until the partition stops changing; returns the stable coloring and
    the first round ``r`` with partition(r) == partition(r + 1)."""
    state = initial_coloring([G], k, cap)
    limit = max_rounds if max_rounds is not None else G.n ** k
    while state.round < limit:
        nxt = wl_round(state)
        # each round refines the last, so equal class counts mean equal partitions
        if nxt.num_colors == state.num_colors:
            return state, state.round
        state = nxt
    raise TupleCapExceeded(f"no stabilization within {limit} rounds")


@dataclass
class DistinguishResult:
    k: int
    round: int | None  # first round with differing histograms, None if never
    stable_rounds: tuple[int | None, int | None]
    rounds_run: int
    class_counts: list[tuple[int, int]]  # per round, distinct colors in each graph

    @property
    def distinguished(self) -> bool:
        return self.round is not None

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "distinguishing_round": self.round,
            "stable_rounds": list(self.stable_rounds),
            "rounds_run": self.rounds_run,
            "class_counts": [list(c) for c in self.class_counts],
        }


def wl_distinguish(
    G: ColoredGraph,
    H: ColoredGraph,
    k: int,
    max_rounds: int | None = None,
    cap: int | None = None,
    stop_when_distinguished: bool = True,
) -> DistinguishResult:
    """Joint k-WL run on ``G`` and ``H``.

    Reports the least round (round 0 included) at which some color has
    different tuple counts in the two graphs. Per-graph stabilization rounds
    are filled in when reached; with ``stop_when_distinguished`` the run ends
    at the distinguishing round and unreached stabilization rounds stay None.
    """
    state = initial_coloring([G, H], k, cap)
    limit = max_rounds if max_rounds is not None else max(G.n, H.n) ** k
    found = 0 if state.histograms_differ() else None
    stable: list[int | None] = [None, None]
    counts = [tuple(state.counts)]
    while True:
        if found is not None and (stop_when_distinguished or None not in stable):
            break
        if state.round >= limit:
            break
        nxt = wl_round(state)
        for g in range(2):
            if stable[g] is None and nxt.counts[g] == state.counts[g]:
                stable[g] = state.round
        joint_stable = nxt.num_colors == state.num_colors
        state = nxt
        counts.append(tuple(state.counts))
        if found is None and state.histograms_differ():
            found = state.round
        if joint_stable and found is None:
            break
        if joint_stable and None not in stable:
            break
    return DistinguishResult(k, found, (stable[0], stable[1]), state.round, counts)
