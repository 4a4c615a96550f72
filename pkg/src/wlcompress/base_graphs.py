"""Ordered base graphs: grids, cylindrical grids, toroidal grids, and the
period/width parameters of the compressed-grid construction.

A base graph has vertices ``0..n-1`` and vertex ``v`` carries color ``v + 1``,
so the color order and the index order coincide. Grid-family graphs are laid
out row-major, i.e. lexicographically by ``(row, column)``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

Coord = tuple[int, int]
VertexRef = Union[int, Coord]


@dataclass(frozen=True)
class OrderedBaseGraph:
    neighbors: tuple[tuple[int, ...], ...]
    coords: tuple[Coord, ...] | None = None
    name: str = ""
    _coord_index: dict = field(default=None, compare=False, repr=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        coords: Sequence[Coord] | None = None,
        name: str = "",
    ) -> OrderedBaseGraph:
        if n < 1:
            raise ValueError("base graph needs at least one vertex")
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if v in adj[u]:
                raise ValueError(f"multi-edge {{{u}, {v}}}")
            adj[u].add(v)
            adj[v].add(u)
        if not _connected(adj):
            raise ValueError("base graph must be connected")
        index = None
        if coords is not None:
            coords = tuple(tuple(c) for c in coords)
            if len(coords) != n or len(set(coords)) != n:
                raise ValueError("coordinates must be distinct, one per vertex")
            index = {c: v for v, c in enumerate(coords)}
        return cls(tuple(tuple(sorted(a)) for a in adj), coords, name, index)

    @property
    def n(self) -> int:
        return len(self.neighbors)

    def color(self, v: int) -> int:
        return v + 1

    def degree(self, v: VertexRef) -> int:
        return len(self.neighbors[self.vertex(v)])

    def max_degree(self) -> int:
        return max(len(a) for a in self.neighbors)

    def vertex(self, ref: VertexRef) -> int:
        if isinstance(ref, tuple):
            if self._coord_index is None:
                raise ValueError(f"{self.name or 'graph'} has no coordinates")
            try:
                return self._coord_index[ref]
            except KeyError:
                raise ValueError(f"no vertex at {ref}") from None
        if not 0 <= ref < self.n:
            raise ValueError(f"vertex {ref} out of range")
        return ref

    def coord(self, v: int) -> Coord:
        if self.coords is None:
            raise ValueError("graph has no coordinates")
        return self.coords[v]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.neighbors[u] if u < v]

    def edge_count(self) -> int:
        return sum(len(a) for a in self.neighbors) // 2

    def has_edge(self, u: VertexRef, v: VertexRef) -> bool:
        u, v = self.vertex(u), self.vertex(v)
        return v in self.neighbors[u]

    def arcs(self) -> list[tuple[int, int]]:
        """Directed edges ordered by (tail color, head color)."""
        return [(u, v) for u in range(self.n) for v in self.neighbors[u]]

    def as_colored_graph(self):
        from .graphs import ColoredGraph

        return ColoredGraph.from_edges([v + 1 for v in range(self.n)], self.edges())


def _connected(adj: Sequence[set[int]]) -> bool:
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(adj)


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def neighbor_index(G: OrderedBaseGraph, u: VertexRef, v: VertexRef) -> int:
    """1-based position of ``v`` in the color-ordered neighbor list of ``u``."""
    u, v = G.vertex(u), G.vertex(v)
    nbrs = G.neighbors[u]
    # neighbor lists are sorted, so bisect would do; degrees are tiny
    for i, x in enumerate(nbrs):
        if x == v:
            return i + 1
    raise ValueError(f"{u} and {v} are not adjacent")


def neighbor_at(G: OrderedBaseGraph, u: VertexRef, i: int) -> int:
    """The ``i``-th neighbor (1-based) of ``u``; inverse of :func:`neighbor_index`."""
    u = G.vertex(u)
    nbrs = G.neighbors[u]
    if not 1 <= i <= len(nbrs):
        raise ValueError(f"vertex {u} has no neighbor number {i}")
    return nbrs[i - 1]


def _grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return edges


def _coords(rows: int, cols: int) -> list[Coord]:
    return [(i, j) for i in range(rows) for j in range(cols)]


def make_grid(k: int, n: int) -> OrderedBaseGraph:
    """The ``k x n`` grid: ``k`` rows, ``n`` columns."""
    if k < 1 or n < 1 or k * n < 2:
        raise ValueError(f"grid {k}x{n} needs k, n >= 1 and at least two vertices")
    return OrderedBaseGraph.from_edges(k * n, _grid_edges(k, n), _coords(k, n), f"grid{k}x{n}")


def make_cylinder(k: int, length: int) -> OrderedBaseGraph:
    """Grid with every column closed into a cycle via {(0, j), (k-1, j)}."""
    if k < 3:
        raise ValueError("cylinder needs k >= 3 rows (the wrap edge would duplicate a grid edge)")
    if length < 2:
        raise ValueError("cylinder needs at least 2 columns")
    edges = _grid_edges(k, length)
    edges += [(j, (k - 1) * length + j) for j in range(length)]
    return OrderedBaseGraph.from_edges(k * length, edges, _coords(k, length), f"cylinder{k}x{length}")


def make_torus(k: int, length: int) -> OrderedBaseGraph:
    """Cylinder with every row closed into a cycle as well; 4-regular."""
    if k < 3 or length < 3:
        raise ValueError("torus needs k >= 3 rows and at least 3 columns")
    edges = _grid_edges(k, length)
    edges += [(j, (k - 1) * length + j) for j in range(length)]
    edges += [(i * length, i * length + length - 1) for i in range(k)]
    return OrderedBaseGraph.from_edges(k * length, edges, _coords(k, length), f"torus{k}x{length}")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def _is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = next(d for d in range(2, q + 1) if q % d == 0)
    while q % p == 0:
        q //= p
    return q == 1


def _pairwise_coprime(values: Sequence[int]) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in itertools.combinations(values, 2))


def choose_periods(k: int, w: int) -> list[int]:
    """Pick ``k`` pairwise coprime integers in ``(w/2, w]``, ascending.

    Primes are taken greedily from the top of the range. If there are fewer
    than ``k`` of them, the remaining slots are filled from the composite
    prime powers in range by exhaustive search, taking the combination with
    the smallest product (products of coprime prime powers never tie).
    """
    if k < 1 or w < 2:
        raise ValueError("need k >= 1 and w >= 2")
    candidates = [p for p in range(w, 0, -1) if 2 * p > w]
    primes = [p for p in candidates if _is_prime(p)]
    if len(primes) >= k:
        return sorted(primes[:k])
    extra = [q for q in candidates if _is_prime_power(q) and not _is_prime(q)]
    need = k - len(primes)
    best: tuple[int, ...] | None = None
    for combo in itertools.combinations(extra, need):
        if not _pairwise_coprime(list(combo) + primes):
            continue
        if best is None or math.prod(combo) < math.prod(best):
            best = combo
    if best is None:
        raise ValueError(f"no {k} pairwise coprime prime powers in ({w / 2}, {w}]")
    return sorted(primes + list(best))


def f_of_k(k: int) -> int:
    return 2 * k + 2


@dataclass(frozen=True)
class GridParams:
    k: int
    w: int
    fk: int
    periods: tuple[int, ...]
    J_len: int
    Jstar_len: int
    lambdas: tuple[int, ...]
    toy: bool = False

    def period(self, i: int) -> int:
        return self.periods[i % self.k]

    def class_period(self, i: int) -> int:
        """Column period of the compression in row ``i``: fk * p_i * p_{i+1}."""
        return self.fk * self.period(i) * self.period(i + 1)

    def pair_period(self, i: int) -> int:
        """Closure period for the row pair (i, i+1): fk * p_{i+1}."""
        return self.fk * self.period(i + 1)

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "w": self.w,
            "fk": self.fk,
            "periods": list(self.periods),
            "J_len": self.J_len,
            "Jstar_len": self.Jstar_len,
            "lambdas": list(self.lambdas),
            "toy": self.toy,
        }


def build_params(
    k: int, w: int, *, toy: bool = False, periods: Sequence[int] | None = None
) -> GridParams:
    """Parameters of the compressed cylindrical grid.

    ``toy=True`` drops the ``w >= 2 f(k)`` requirement (and allows explicit
    ``periods``) so that exhaustive oracles can run on narrow grids. Every
    formula stays literal.
    """
    if k < 3:
        raise ValueError("the grid construction needs k >= 3")
    fk = f_of_k(k)
    if not toy and w < 2 * fk:
        raise ValueError(f"w = {w} is below 2 f(k) = {2 * fk}")
    if periods is not None:
        if not toy:
            raise ValueError("explicit periods are only accepted in toy mode")
        periods = [int(p) for p in periods]
        if len(periods) != k:
            raise ValueError(f"need exactly {k} periods")
        if not all(2 * p > w and p <= w for p in periods):
            raise ValueError(f"periods must lie in ({w / 2}, {w}]")
        if not _pairwise_coprime(periods):
            raise ValueError("periods must be pairwise coprime")
    else:
        periods = choose_periods(k, w)
    prod = math.prod(periods)
    if (fk * prod) % 2:
        raise ValueError("fk * prod(periods) must be even")
    J_len = fk * prod // 2
    lambdas = []
    for i in range(k):
        m = fk * periods[i] * periods[(i + 1) % k]
        lambdas.append(J_len // m - 1)
    return GridParams(k, w, fk, tuple(periods), J_len, 2 * J_len, tuple(lambdas), toy)
