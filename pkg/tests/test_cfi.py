from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import permutation_isomorphic
from wlcompress import sampling
from wlcompress.base_graphs import OrderedBaseGraph, make_grid, neighbor_index
from wlcompress.cfi import (
    EdgeAssignment,
    SizeCapExceeded,
    Twisting,
    apply_twisting,
    brute_force_isomorphic,
    build_cfi,
    cfi_isomorphic,
    find_twisting,
    gadget_size,
    random_twisting,
    twisting_to_isomorphism,
)
from wlcompress.graphs import ColoredGraph

seeds = st.integers(0, 2**32 - 1)


def path3():
    return OrderedBaseGraph.from_edges(3, [(0, 1), (1, 2)])


def test_single_edge():
    G = OrderedBaseGraph.from_edges(2, [(0, 1)])
    zero = build_cfi(G, EdgeAssignment.zero(G))
    one = build_cfi(G, EdgeAssignment.from_ones(G, [(0, 1)]))
    assert zero.n == one.n == 2
    assert zero.graph.edge_count() == 1 and one.graph.edge_count() == 0


def test_fig1_grid_size():
    G = make_grid(2, 4)
    X = build_cfi(G, EdgeAssignment.zero(G))
    assert X.n == 24
    assert X.n == sum(gadget_size(G.degree(u)) for u in range(G.n))


def _cross_edges(G, f, u, v):
    A, B = set(build_cfi(G, f).gadget(u)), set(build_cfi(G, f).gadget(v))
    return sum(1 for x, y in build_cfi(G, f).graph.edges() if {x, y} <= A | B and (x in A) != (y in A))


def test_degree3_cross_edges():
    # two adjacent degree-3 vertices: 4 x 4 pairs, half of them satisfy the parity rule
    G = make_grid(2, 3)
    u, v = G.vertex((0, 1)), G.vertex((1, 1))
    assert G.degree(u) == G.degree(v) == 3
    for f in (EdgeAssignment.zero(G), EdgeAssignment.from_ones(G, [(u, v)])):
        X = build_cfi(G, f)
        keys = X.keys
        want = 0
        j, i = neighbor_index(G, u, v) - 1, neighbor_index(G, v, u) - 1
        for a in (k for k in keys if k[0] == u):
            for b in (k for k in keys if k[0] == v):
                want += ((a[1] >> j) & 1) ^ ((b[1] >> i) & 1) == f(u, v)
        assert want == 8 == _cross_edges(G, f, u, v)


@given(seeds)
def test_cfi_structure(seed):
    rng = random.Random(seed)
    G = sampling.random_base_graph(rng, rng.randint(2, 7), 0.5, max_degree=4)
    f = sampling.random_compressible_assignment(rng, G, sampling.Compression.identity(G.n))
    X = build_cfi(G, f)
    for u in range(G.n):
        assert len(X.gadget(u)) == gadget_size(G.degree(u))
    assert all(a.bit_count() % 2 == 0 for _, a in X.keys)
    for x, y in X.graph.edges():
        assert G.has_edge(X.origin(x), X.origin(y))
    assert [X.graph.colors[x] for x in range(X.n)] == [G.color(u) for u, _ in X.keys]


def test_domain_mismatch():
    G, H = make_grid(2, 3), make_grid(2, 4)
    with pytest.raises(ValueError):
        build_cfi(G, EdgeAssignment.zero(H))


def test_apply_twisting_examples():
    G = path3()
    f = EdgeAssignment.zero(G)
    assert apply_twisting(f, Twisting.of()) == f
    T = Twisting.of([(1, 0), (1, 2)])
    assert apply_twisting(f, T).ones == {(0, 1), (1, 2)}
    assert apply_twisting(apply_twisting(f, T), T) == f


@given(seeds)
def test_twisting_laws(seed):
    rng = random.Random(seed)
    G = sampling.random_base_graph(rng, rng.randint(2, 7), 0.5, max_degree=4)
    f = sampling.random_compressible_assignment(rng, G, sampling.Compression.identity(G.n))
    T = random_twisting(G, rng)
    assert T.is_valid(G)
    assert len(T.twisted_edges()) % 2 == 0
    assert apply_twisting(apply_twisting(f, T), T) == f


def _is_iso(A: ColoredGraph, B: ColoredGraph, phi: dict) -> bool:
    return (
        sorted(phi.values()) == list(range(B.n))
        and all(A.colors[x] == B.colors[phi[x]] for x in range(A.n))
        and A.edge_count() == B.edge_count()
        and all(B.has_edge(phi[x], phi[y]) for x, y in A.edges())
    )


def test_twisting_to_isomorphism_examples():
    G = path3()
    f = EdgeAssignment.zero(G)
    assert all(k == v for k, v in twisting_to_isomorphism(G, f, Twisting.of()).items())
    T = Twisting.of([(1, 0), (1, 2)])
    keymap = twisting_to_isomorphism(G, f, T)
    assert keymap[(1, 0)] == (1, 0b11)
    A, B = build_cfi(G, f), build_cfi(G, apply_twisting(f, T))
    assert _is_iso(A.graph, B.graph, {A.index(a): B.index(b) for a, b in keymap.items()})


@given(seeds)
def test_twisting_to_isomorphism_on_small_grid(seed):
    rng = random.Random(seed)
    G = make_grid(2, 3)
    f = sampling.random_compressible_assignment(rng, G, sampling.Compression.identity(G.n))
    T = random_twisting(G, rng)
    A, B = build_cfi(G, f), build_cfi(G, apply_twisting(f, T))
    keymap = twisting_to_isomorphism(G, f, T)
    phi = {A.index(a): B.index(b) for a, b in keymap.items()}
    assert _is_iso(A.graph, B.graph, phi)
    for u in range(G.n):
        if T.fixes(u):
            assert all(phi[x] == x for x in A.gadget(u))


def test_cfi_isomorphic_examples():
    G = make_grid(2, 4)
    f = EdgeAssignment.zero(G)
    assert cfi_isomorphic(G, f, f)
    e = (G.vertex((0, 0)), G.vertex((1, 0)))
    assert not cfi_isomorphic(G, f, EdgeAssignment.from_ones(G, [e]))
    assert cfi_isomorphic(G, f, EdgeAssignment.from_ones(G, [e, (G.vertex((0, 2)), G.vertex((0, 3)))]))


def test_find_twisting_examples():
    G = path3()
    f = EdgeAssignment.zero(G)
    assert find_twisting(G, f, f) == Twisting.of()
    assert find_twisting(G, f, EdgeAssignment.from_ones(G, [(0, 1)])) is None
    tri = OrderedBaseGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    g = EdgeAssignment.from_ones(tri, [(0, 1), (1, 2)])
    T = find_twisting(tri, EdgeAssignment.zero(tri), g)
    assert T is not None and T.is_valid(tri)
    assert apply_twisting(g, T) == EdgeAssignment.zero(tri)


@given(seeds)
def test_find_twisting_fixing(seed):
    rng = random.Random(seed)
    G = sampling.random_base_graph(rng, rng.randint(2, 6), 0.6, max_degree=3)
    ident = sampling.Compression.identity(G.n)
    f = sampling.random_compressible_assignment(rng, G, ident)
    g = sampling.random_compressible_assignment(rng, G, ident)
    W = [u for u in range(G.n) if rng.random() < 0.3]
    T = find_twisting(G, f, g, W)
    if T is not None:
        assert T.is_valid(G) and all(T.fixes(u) for u in W)
        assert apply_twisting(g, T) == f
    A, B = build_cfi(G, f), build_cfi(G, g)
    pin = {A.index((w, 0)): B.index((w, 0)) for w in W}
    if A.n <= 8:
        assert (T is not None) == permutation_isomorphic(B.graph, A.graph, pin) == brute_force_isomorphic(B.graph, A.graph, pinned=pin)
    else:
        assert (T is not None) == brute_force_isomorphic(B.graph, A.graph, pinned=pin)


def test_brute_force_examples():
    G = make_grid(2, 3)
    A = build_cfi(G, EdgeAssignment.zero(G)).graph
    B = build_cfi(G, EdgeAssignment.from_ones(G, [(0, 3)])).graph
    assert brute_force_isomorphic(A, A)
    assert not brute_force_isomorphic(A, B)
    assert not cfi_isomorphic(G, EdgeAssignment.zero(G), EdgeAssignment.from_ones(G, [(0, 3)]))
    C = ColoredGraph.from_edges([1, 2], [(0, 1)])
    D = ColoredGraph.from_edges([1, 1], [(0, 1)])
    assert not brute_force_isomorphic(C, D)
    with pytest.raises(SizeCapExceeded):
        brute_force_isomorphic(A, A, cap=10)


@given(seeds)
def test_brute_force_matches_permutations(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 7)
    colors = [rng.randint(1, 2) for _ in range(n)]
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
    classes = [rng.randint(0, 2) for _ in range(n)] if rng.random() < 0.5 else None
    A = ColoredGraph.from_edges(colors, edges, classes)
    perm = list(range(n))
    rng.shuffle(perm)
    B = A.permuted(perm)
    if rng.random() < 0.5 and n >= 2:
        u, v = rng.sample(range(n), 2)
        adj = {tuple(sorted(e)) for e in B.edges()} ^ {(min(u, v), max(u, v))}
        B = ColoredGraph.from_edges(B.colors, sorted(adj), B.classes)
    assert brute_force_isomorphic(A, B) == permutation_isomorphic(A, B)
