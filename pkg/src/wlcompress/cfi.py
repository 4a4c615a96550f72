"""CFI graphs over ordered base graphs, twistings, and isomorphism tests.

A CFI vertex is keyed by ``(origin, mask)`` where ``mask`` is an even-weight
bitmask over the origin's neighbor positions: bit ``i - 1`` is the coordinate
belonging to the ``i``-th neighbor in color order. Two CFI graphs over the
same base graph therefore share one vertex universe.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import f2
from .base_graphs import OrderedBaseGraph, edge_key, neighbor_index
from .graphs import ColoredGraph

Edge = tuple[int, int]
Arc = tuple[int, int]


@dataclass(frozen=True)
class EdgeAssignment:
    """A function ``E(G) -> F2``, stored as the set of edges mapped to 1."""

    domain: frozenset[Edge]
    ones: frozenset[Edge]

    @classmethod
    def zero(cls, G: OrderedBaseGraph) -> EdgeAssignment:
        return cls(frozenset(G.edges()), frozenset())

    @classmethod
    def from_ones(cls, G: OrderedBaseGraph, ones: Iterable[Edge]) -> EdgeAssignment:
        domain = frozenset(G.edges())
        ones = frozenset(edge_key(u, v) for u, v in ones)
        if not ones <= domain:
            raise ValueError(f"not base edges: {sorted(ones - domain)}")
        return cls(domain, ones)

    @classmethod
    def from_mapping(cls, G: OrderedBaseGraph, values: Mapping[Edge, int]) -> EdgeAssignment:
        domain = frozenset(G.edges())
        keyed = {edge_key(u, v): int(b) & 1 for (u, v), b in values.items()}
        if set(keyed) != domain:
            raise ValueError("assignment domain must be exactly E(G)")
        return cls(domain, frozenset(e for e, b in keyed.items() if b))

    def __call__(self, u: int, v: int) -> int:
        e = edge_key(u, v)
        if e not in self.domain:
            raise KeyError(f"{e} is not a base edge")
        return int(e in self.ones)

    def __add__(self, other: EdgeAssignment) -> EdgeAssignment:
        if self.domain != other.domain:
            raise ValueError("assignments over different edge sets")
        return EdgeAssignment(self.domain, self.ones ^ other.ones)

    def parity(self) -> int:
        return len(self.ones) & 1

    def check_domain(self, G: OrderedBaseGraph) -> None:
        if self.domain != frozenset(G.edges()):
            raise ValueError("assignment domain does not match the base graph")


@dataclass(frozen=True)
class Twisting:
    """A set of arcs ``(u, v)`` with an even number of arcs leaving each vertex."""

    arcs: frozenset[Arc]

    @classmethod
    def of(cls, arcs: Iterable[Arc] = ()) -> Twisting:
        return cls(frozenset((int(u), int(v)) for u, v in arcs))

    def __xor__(self, other: Twisting) -> Twisting:
        # g is linear in T, so composing isomorphisms is symmetric difference
        return Twisting(self.arcs ^ other.arcs)

    def __len__(self) -> int:
        return len(self.arcs)

    def out_arcs(self, u: int) -> list[int]:
        return sorted(v for a, v in self.arcs if a == u)

    def fixes(self, u: int) -> bool:
        return all(a != u for a, _ in self.arcs)

    def moved_vertices(self) -> set[int]:
        return {u for u, _ in self.arcs}

    def twisted_edges(self) -> set[Edge]:
        """Edges with exactly one of their two directions in the twisting."""
        out = set()
        for u, v in self.arcs:
            if (v, u) not in self.arcs:
                out.add(edge_key(u, v))
        return out

    def is_valid(self, G: OrderedBaseGraph) -> bool:
        counts: dict[int, int] = {}
        for u, v in self.arcs:
            if not (0 <= u < G.n and 0 <= v < G.n) or v not in G.neighbors[u]:
                return False
            counts[u] = counts.get(u, 0) + 1
        return all(c % 2 == 0 for c in counts.values())

    def g(self, G: OrderedBaseGraph) -> EdgeAssignment:
        return EdgeAssignment.from_ones(G, self.twisted_edges())


def apply_twisting(f: EdgeAssignment, T: Twisting) -> EdgeAssignment:
    """``f + g_T``."""
    ones = set(f.ones)
    ones ^= T.twisted_edges()
    if not ones <= f.domain:
        raise ValueError("twisting uses arcs outside the assignment's edge set")
    return EdgeAssignment(f.domain, frozenset(ones))


def even_masks(d: int) -> list[int]:
    return [a for a in range(1 << d) if a.bit_count() % 2 == 0]


def gadget_size(d: int) -> int:
    return 1 << (d - 1) if d > 0 else 1


@dataclass(frozen=True)
class CFIGraph:
    base: OrderedBaseGraph
    f: EdgeAssignment
    keys: tuple[tuple[int, int], ...]
    graph: ColoredGraph

    def index(self, key: tuple[int, int]) -> int:
        return self._index()[key]

    def _index(self) -> dict:
        cached = self.__dict__.get("_idx")
        if cached is None:
            cached = {k: i for i, k in enumerate(self.keys)}
            object.__setattr__(self, "_idx", cached)
        return cached

    def origin(self, x: int) -> int:
        return self.keys[x][0]

    def gadget(self, u: int) -> list[int]:
        idx = self._index()
        return [idx[(u, a)] for a in even_masks(self.base.degree(u))]

    @property
    def n(self) -> int:
        return len(self.keys)


def cfi_vertex_keys(G: OrderedBaseGraph) -> list[tuple[int, int]]:
    return [(u, a) for u in range(G.n) for a in even_masks(G.degree(u))]


def cfi_edge_keys(G: OrderedBaseGraph, f: EdgeAssignment) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All CFI edges as pairs of vertex keys, origins in increasing order."""
    out = []
    for u, v in G.edges():
        j = neighbor_index(G, u, v) - 1
        i = neighbor_index(G, v, u) - 1
        fe = f(u, v)
        a_masks = even_masks(G.degree(u))
        b_masks = even_masks(G.degree(v))
        for a in a_masks:
            need = ((a >> j) & 1) ^ fe
            for b in b_masks:
                if (b >> i) & 1 == need:
                    out.append(((u, a), (v, b)))
    return out


def build_cfi(G: OrderedBaseGraph, f: EdgeAssignment) -> CFIGraph:
    f.check_domain(G)
    keys = cfi_vertex_keys(G)
    index = {k: x for x, k in enumerate(keys)}
    edges = [(index[p], index[q]) for p, q in cfi_edge_keys(G, f)]
    colors = [G.color(u) for u, _ in keys]
    graph = ColoredGraph.from_edges(colors, edges, labels=keys)
    return CFIGraph(G, f, tuple(keys), graph)


def twisting_to_isomorphism(G: OrderedBaseGraph, f: EdgeAssignment, T: Twisting) -> dict:
    """Key map ``(u, a) -> (u, a ^ delta_u)`` from CFI(G, f) onto CFI(G, f + g_T).

    ``delta_u`` has bit ``i - 1`` set iff ``(u, v_i)`` is in ``T``.
    """
    if not T.is_valid(G):
        raise ValueError("not a valid twisting")
    delta = [0] * G.n
    for u, v in T.arcs:
        delta[u] |= 1 << (neighbor_index(G, u, v) - 1)
    return {(u, a): (u, a ^ delta[u]) for u, a in cfi_vertex_keys(G)}


def cfi_isomorphic(G: OrderedBaseGraph, f: EdgeAssignment, g: EdgeAssignment) -> bool:
    if f.domain != g.domain:
        raise ValueError("assignments over different edge sets")
    return f.parity() == g.parity()


def twisting_system(
    G: OrderedBaseGraph,
    f: EdgeAssignment,
    g: EdgeAssignment,
    fixed: Iterable[int] = (),
    var_of: Sequence[int] | None = None,
) -> tuple[list[tuple[int, int]], list[Arc]]:
    """Rows of the F2 system whose solutions are twistings T with f = g + g_T.

    Variables are the arcs in (tail color, head color) order. ``var_of`` may
    redirect arcs onto shared variables (used for tied, compressible
    twistings); by default every arc is its own variable.
    """
    arcs = G.arcs()
    pos = {a: i for i, a in enumerate(arcs)}
    var = list(range(len(arcs))) if var_of is None else list(var_of)
    diff = f + g
    rows = []
    for u, v in G.edges():
        rows.append(((1 << var[pos[(u, v)]]) ^ (1 << var[pos[(v, u)]]), diff(u, v)))
    for u in range(G.n):
        mask = 0
        for v in G.neighbors[u]:
            mask ^= 1 << var[pos[(u, v)]]
        rows.append((mask, 0))
    for u in set(fixed):
        for v in G.neighbors[u]:
            rows.append((1 << var[pos[(u, v)]], 0))
    return rows, arcs


def find_twisting(
    G: OrderedBaseGraph, f: EdgeAssignment, g: EdgeAssignment, fixed: Iterable[int] = ()
) -> Twisting | None:
    """Lex-first twisting T with ``f = g + g_T`` fixing every vertex of ``fixed``."""
    rows, arcs = twisting_system(G, f, g, fixed)
    x = f2.solve(rows, len(arcs))
    if x is None:
        return None
    return Twisting.of(a for i, a in enumerate(arcs) if (x >> i) & 1)


def random_twisting(G: OrderedBaseGraph, rng: random.Random, fixed: Iterable[int] = ()) -> Twisting:
    """A uniform random twisting: an independent even subset of out-arcs per vertex."""
    fixed = set(fixed)
    arcs = []
    for u in range(G.n):
        if u in fixed:
            continue
        nbrs = list(G.neighbors[u])
        chosen = [v for v in nbrs if rng.random() < 0.5]
        if len(chosen) % 2:
            last = nbrs[-1]
            chosen = [v for v in chosen if v != last] if last in chosen else chosen + [last]
        arcs.extend((u, v) for v in chosen)
    return Twisting.of(arcs)


def random_assignment(G: OrderedBaseGraph, rng: random.Random) -> EdgeAssignment:
    return EdgeAssignment.from_ones(G, [e for e in G.edges() if rng.random() < 0.5])


class SizeCapExceeded(RuntimeError):
    pass


def _refine(A: ColoredGraph, B: ColoredGraph) -> tuple[list[int], list[int]]:
    """Joint color refinement, also counting class-mates, as a pruning filter."""
    mem_a = A.class_members() if A.classes is not None else None
    mem_b = B.class_members() if B.classes is not None else None
    ca = [(A.colors[v], 0 if mem_a is None else len(mem_a[A.classes[v]])) for v in range(A.n)]
    cb = [(B.colors[v], 0 if mem_b is None else len(mem_b[B.classes[v]])) for v in range(B.n)]
    while True:
        table = {k: i for i, k in enumerate(sorted(set(ca) | set(cb)))}
        ia = [table[k] for k in ca]
        ib = [table[k] for k in cb]

        def sig(G, col, mem, v):
            nb = tuple(sorted(col[x] for x in G.adjacency[v]))
            cm = () if mem is None else tuple(sorted(col[x] for x in mem[G.classes[v]] if x != v))
            return (col[v], nb, cm)

        na = [sig(A, ia, mem_a, v) for v in range(A.n)]
        nb = [sig(B, ib, mem_b, v) for v in range(B.n)]
        if len(set(na) | set(nb)) == len(table):
            return ia, ib
        ca, cb = na, nb


def brute_force_isomorphic(
    A: ColoredGraph,
    B: ColoredGraph,
    *,
    pinned: Mapping[int, int] | None = None,
    cap: int = 40,
) -> bool:
    """Exact isomorphism test by backtracking over color-preserving bijections.

    Respects the attached equivalence relations (a pair is in the same class
    in A iff its image is in the same class in B). ``pinned`` forces some
    images in advance.
    """
    if max(A.n, B.n) > cap:
        raise SizeCapExceeded(f"{max(A.n, B.n)} vertices exceeds the cap of {cap}")
    if A.n != B.n or A.edge_count() != B.edge_count():
        return False
    ca, cb = _refine(A, B)
    if sorted(ca) != sorted(cb):
        return False
    pinned = dict(pinned or {})
    for x, y in pinned.items():
        if ca[x] != cb[y]:
            return False
    # static order: repeatedly take the vertex with most already-ordered neighbors
    order: list[int] = [x for x in sorted(pinned)]
    placed = set(order)
    while len(order) < A.n:
        best = max(
            (x for x in range(A.n) if x not in placed),
            key=lambda x: (sum(1 for y in A.adjacency[x] if y in placed), -ca.count(ca[x]), -x),
        )
        order.append(best)
        placed.add(best)
    by_color: dict[int, list[int]] = {}
    for y in range(B.n):
        by_color.setdefault(cb[y], []).append(y)

    image: dict[int, int] = {}
    used: set[int] = set()

    def consistent(x: int, y: int) -> bool:
        for x2, y2 in image.items():
            if (x2 in A.adjacency[x]) != (y2 in B.adjacency[y]):
                return False
            if A.same_class(x, x2) != B.same_class(y, y2):
                return False
        return True

    def extend(t: int) -> bool:
        if t == len(order):
            return True
        x = order[t]
        cands = [pinned[x]] if x in pinned else by_color[ca[x]]
        for y in cands:
            if y in used or not consistent(x, y):
                continue
            image[x] = y
            used.add(y)
            if extend(t + 1):
                return True
            del image[x]
            used.discard(y)
        return False

    return extend(0)
