"""Compressions of base graphs and the precompressed / compressed CFI graphs.

A compression is an equivalence relation on base vertices whose classes are
independent sets of equal-degree vertices. It lifts to CFI vertices by
``(u, a) ~ (v, b)`` iff ``u ~ v`` and ``a == b``; contracting the lifted
classes gives the compressed CFI graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import f2
from .base_graphs import OrderedBaseGraph, edge_key, neighbor_at, neighbor_index
from .cfi import (
    CFIGraph,
    EdgeAssignment,
    Twisting,
    build_cfi,
    cfi_edge_keys,
    even_masks,
    gadget_size,
    twisting_system,
)
from .graphs import ColoredGraph


@dataclass(frozen=True)
class Compression:
    """``class_of[v]`` is the smallest vertex of ``v``'s class (its least color)."""

    class_of: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> Compression:
        return cls(tuple(range(n)))

    @classmethod
    def from_labels(cls, labels: Sequence) -> Compression:
        first: dict = {}
        for v, lab in enumerate(labels):
            first.setdefault(lab, v)
        return cls(tuple(first[lab] for lab in labels))

    @classmethod
    def from_partition(cls, n: int, parts: Iterable[Iterable[int]]) -> Compression:
        labels = [-1] * n
        for idx, part in enumerate(parts):
            for v in part:
                if not 0 <= v < n:
                    raise ValueError(f"vertex {v} out of range")
                if labels[v] != -1:
                    raise ValueError(f"vertex {v} appears in two classes")
                labels[v] = idx
        if -1 in labels:
            raise ValueError("partition does not cover every vertex")
        return cls.from_labels(labels)

    @property
    def n(self) -> int:
        return len(self.class_of)

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.class_of):
            out.setdefault(c, []).append(v)
        return out

    def class_count(self) -> int:
        return len(set(self.class_of))

    def same(self, u: int, v: int) -> bool:
        return self.class_of[u] == self.class_of[v]

    def closure(self, W: Iterable[int]) -> set[int]:
        """``[W]``: union of the classes meeting ``W``."""
        hit = {self.class_of[w] for w in W}
        return {v for v, c in enumerate(self.class_of) if c in hit}

    def is_identity(self) -> bool:
        return all(c == v for v, c in enumerate(self.class_of))


def validate_compression(G: OrderedBaseGraph, comp: Compression | Iterable[Iterable[int]]) -> bool:
    if not isinstance(comp, Compression):
        comp = Compression.from_partition(G.n, comp)
    if comp.n != G.n:
        raise ValueError("compression does not cover the base graph")
    for members in comp.classes().values():
        deg = G.degree(members[0])
        for idx, u in enumerate(members):
            if G.degree(u) != deg:
                return False
            for v in members[idx + 1:]:
                if v in G.neighbors[u]:
                    return False
    return True


def is_compressible_assignment(G: OrderedBaseGraph, comp: Compression, f: EdgeAssignment) -> bool:
    seen: dict[tuple[int, int], int] = {}
    for u, v in G.edges():
        key = edge_key(comp.class_of[u], comp.class_of[v])
        val = f(u, v)
        if seen.setdefault(key, val) != val:
            return False
    return True


def is_compressible_twisting(G: OrderedBaseGraph, comp: Compression, T: Twisting) -> bool:
    """Class members agree on which neighbor positions carry an arc."""
    masks: dict[int, int] = {}
    for u, v in T.arcs:
        masks[u] = masks.get(u, 0) | (1 << (neighbor_index(G, u, v) - 1))
    pattern: dict[int, int] = {}
    for u in range(G.n):
        mask = masks.get(u, 0)
        if pattern.setdefault(comp.class_of[u], mask) != mask:
            return False
    return True


def is_position_consistent(G: OrderedBaseGraph, comp: Compression) -> bool:
    """Class-parallel edges sit at the same neighbor positions on both ends.

    That is: whenever ``u ~ u'``, ``v ~ v'`` and both ``uv`` and ``u'v'`` are
    edges, ``v`` and ``v'`` have the same position among the neighbors of
    ``u`` and ``u'``. Grid compressions built from column shifts have this
    property.
    """
    seen: dict[tuple[int, int], int] = {}
    for u in range(G.n):
        for v in G.neighbors[u]:
            key = (comp.class_of[u], comp.class_of[v])
            pos = neighbor_index(G, u, v)
            if seen.setdefault(key, pos) != pos:
                return False
    return True


def _check_inputs(G: OrderedBaseGraph, comp: Compression, f: EdgeAssignment) -> None:
    f.check_domain(G)
    if not validate_compression(G, comp):
        raise ValueError("not a compression: classes must be independent and degree-uniform")
    if not is_compressible_assignment(G, comp, f):
        raise ValueError("edge assignment is not compressible")


@dataclass(frozen=True)
class PrecompressedCFI:
    cfi: CFIGraph
    compression: Compression
    graph: ColoredGraph  # CFI graph with the lifted classes attached


def lifted_class_id(comp: Compression, key: tuple[int, int]) -> tuple[int, int]:
    u, a = key
    return (comp.class_of[u], a)


def build_precompressed(G: OrderedBaseGraph, f: EdgeAssignment, comp: Compression) -> PrecompressedCFI:
    _check_inputs(G, comp, f)
    cfi = build_cfi(G, f)
    ids = sorted({lifted_class_id(comp, key) for key in cfi.keys})
    number = {c: i for i, c in enumerate(ids)}
    classes = [number[lifted_class_id(comp, key)] for key in cfi.keys]
    g = cfi.graph
    return PrecompressedCFI(cfi, comp, ColoredGraph(g.colors, g.adjacency, tuple(classes), g.labels))


@dataclass(frozen=True)
class CompressedCFI:
    base: OrderedBaseGraph
    compression: Compression
    f: EdgeAssignment
    keys: tuple[tuple[int, int], ...]  # (class id, mask), sorted
    graph: ColoredGraph

    def members(self, x: int) -> list[tuple[int, int]]:
        """CFI vertex keys contracted into compressed vertex ``x``."""
        c, a = self.keys[x]
        return [(u, a) for u in self.compression.classes()[c]]

    def membership(self) -> dict[tuple[int, int], list[tuple[int, int]]]:
        classes = self.compression.classes()
        return {(c, a): [(u, a) for u in classes[c]] for c, a in self.keys}

    @property
    def n(self) -> int:
        return len(self.keys)


def compressed_vertex_count(G: OrderedBaseGraph, comp: Compression) -> int:
    return sum(gadget_size(G.degree(c)) for c in comp.classes())


def build_compressed(G: OrderedBaseGraph, f: EdgeAssignment, comp: Compression) -> CompressedCFI:
    """Contract every lifted class; colors are the least member color."""
    _check_inputs(G, comp, f)
    reps = sorted(comp.classes())
    keys = [(c, a) for c in reps for a in even_masks(G.degree(c))]
    index = {k: x for x, k in enumerate(keys)}
    cls = comp.class_of
    edges = set()
    for (u, a), (v, b) in cfi_edge_keys(G, f):
        x, y = index[(cls[u], a)], index[(cls[v], b)]
        edges.add((x, y) if x < y else (y, x))
    colors = [G.color(c) for c, _ in keys]
    graph = ColoredGraph.from_edges(colors, sorted(edges), labels=keys)
    return CompressedCFI(G, comp, f, tuple(keys), graph)


def tied_variables(G: OrderedBaseGraph, comp: Compression) -> list[int]:
    """Map each arc variable to the variable of the same position at the class representative."""
    arcs = G.arcs()
    pos = {a: i for i, a in enumerate(arcs)}
    var = []
    for u, v in arcs:
        rep = comp.class_of[u]
        i = neighbor_index(G, u, v)
        var.append(pos[(rep, neighbor_at(G, rep, i))])
    return var


def compressed_isomorphic_fixing(
    G: OrderedBaseGraph,
    comp: Compression,
    f: EdgeAssignment,
    g: EdgeAssignment,
    fixed: Iterable[int] = (),
) -> Twisting | None:
    """Lex-first compressible twisting T with ``f = g + g_T`` fixing ``fixed``.

    Same system as for plain twistings, with arcs at equal positions of
    equivalent vertices sharing one variable.
    """
    var = tied_variables(G, comp)
    rows, arcs = twisting_system(G, f, g, fixed, var_of=var)
    x = f2.solve(rows, len(arcs))
    if x is None:
        return None
    return Twisting.of(a for i, a in enumerate(arcs) if (x >> var[i]) & 1)
