"""Plain colored graphs, optionally carrying an equivalence relation on vertices.

This is the common currency between the CFI builders, the WL engine, the
pebble-game solver and the serializers. Vertices are ``0..n-1``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence


@dataclass(frozen=True)
class ColoredGraph:
    colors: tuple[int, ...]
    adjacency: tuple[frozenset[int], ...]
    # class id per vertex; None means the relation is equality
    classes: tuple[int, ...] | None = None
    labels: tuple[Hashable, ...] | None = field(default=None, compare=False)

    @classmethod
    def from_edges(
        cls,
        colors: Sequence[int],
        edges: Iterable[tuple[int, int]],
        classes: Sequence[int] | None = None,
        labels: Sequence[Hashable] | None = None,
    ) -> ColoredGraph:
        n = len(colors)
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            adj[u].add(v)
            adj[v].add(u)
        if classes is not None and len(classes) != n:
            raise ValueError("class map length does not match vertex count")
        return cls(
            tuple(int(c) for c in colors),
            tuple(frozenset(a) for a in adj),
            None if classes is None else tuple(int(c) for c in classes),
            None if labels is None else tuple(labels),
        )

    @property
    def n(self) -> int:
        return len(self.colors)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def same_class(self, u: int, v: int) -> bool:
        if self.classes is None:
            return u == v
        return self.classes[u] == self.classes[v]

    def color_histogram(self) -> Counter:
        return Counter(self.colors)

    def class_members(self) -> dict[int, list[int]]:
        members: dict[int, list[int]] = {}
        keys = self.classes if self.classes is not None else range(self.n)
        for v, c in enumerate(keys):
            members.setdefault(c, []).append(v)
        return members

    def permuted(self, perm: Sequence[int]) -> ColoredGraph:
        """Return the image of this graph under ``v -> perm[v]``."""
        n = self.n
        if sorted(perm) != list(range(n)):
            raise ValueError("not a permutation")
        colors = [0] * n
        for v in range(n):
            colors[perm[v]] = self.colors[v]
        classes = None
        if self.classes is not None:
            cl = [0] * n
            for v in range(n):
                cl[perm[v]] = self.classes[v]
            classes = cl
        return ColoredGraph.from_edges(colors, ((perm[u], perm[v]) for u, v in self.edges()), classes)

    def without_relation(self) -> ColoredGraph:
        return ColoredGraph(self.colors, self.adjacency, None, self.labels)
