"""Seeded random instances: small base graphs, compressions, assignments."""

from __future__ import annotations

import random

from .base_graphs import OrderedBaseGraph, edge_key
from .cfi import EdgeAssignment
from .compression import Compression


def random_base_graph(rng: random.Random, n: int, p: float = 0.5, max_degree: int = 3) -> OrderedBaseGraph:
    """Rejection-sample a connected simple graph on ``n`` vertices."""
    if n < 2:
        raise ValueError("need at least two vertices")
    while True:
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        try:
            G = OrderedBaseGraph.from_edges(n, edges, name=f"random{n}")
        except ValueError:
            continue
        if G.max_degree() <= max_degree:
            return G


def random_compression(rng: random.Random, G: OrderedBaseGraph, merges: int | None = None) -> Compression:
    """Merge random pairs of classes while classes stay independent and degree-uniform."""
    labels = list(range(G.n))
    for _ in range(G.n if merges is None else merges):
        u, v = rng.sample(range(G.n), 2)
        if labels[u] == labels[v]:
            continue
        merged = [x for x in range(G.n) if labels[x] in (labels[u], labels[v])]
        if len({G.degree(x) for x in merged}) != 1:
            continue
        if any(G.has_edge(a, b) for a in merged for b in merged if a < b):
            continue
        old = labels[v]
        labels = [labels[u] if lab == old else lab for lab in labels]
    return Compression.from_labels(labels)


def random_compressible_assignment(rng: random.Random, G: OrderedBaseGraph, comp: Compression) -> EdgeAssignment:
    """Equal values on edges joining the same pair of classes."""
    value: dict[tuple[int, int], bool] = {}
    ones = []
    for u, v in G.edges():
        key = edge_key(comp.class_of[u], comp.class_of[v])
        if key not in value:
            value[key] = rng.random() < 0.5
        if value[key]:
            ones.append((u, v))
    return EdgeAssignment.from_ones(G, ones)


def odd_partner(rng: random.Random, G: OrderedBaseGraph, comp: Compression, f: EdgeAssignment) -> EdgeAssignment | None:
    """A compressible assignment of the opposite parity to ``f``, if one exists.

    Flips the value on one class-pair of edges; that changes the parity iff
    the class pair holds an odd number of edges.
    """
    groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for u, v in G.edges():
        groups.setdefault(edge_key(comp.class_of[u], comp.class_of[v]), []).append((u, v))
    odd = [es for es in groups.values() if len(es) % 2]
    if not odd:
        return None
    flip = set(rng.choice(odd))
    ones = set(f.ones) ^ flip
    return EdgeAssignment.from_ones(G, ones)
