from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wlcompress import sampling
from wlcompress.base_graphs import OrderedBaseGraph, make_cylinder, make_grid
from wlcompress.cfi import EdgeAssignment, Twisting, brute_force_isomorphic, build_cfi, find_twisting, gadget_size
from wlcompress.compression import (
    Compression,
    build_compressed,
    build_precompressed,
    compressed_isomorphic_fixing,
    compressed_vertex_count,
    is_compressible_assignment,
    is_compressible_twisting,
    validate_compression,
)

seeds = st.integers(0, 2**32 - 1)


def c4():
    return OrderedBaseGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


def fig4():
    """2 x 4 grid with the gadgets of (0, 1) and (1, 2) identified."""
    G = make_grid(2, 4)
    return G, Compression.from_partition(G.n, [[G.vertex((0, 1)), G.vertex((1, 2))]] + [[v] for v in range(G.n) if v not in (1, 6)])


def test_validate_compression_examples():
    G = c4()
    assert validate_compression(G, Compression.identity(4))
    assert not validate_compression(G, [[0, 1], [2], [3]])
    P = OrderedBaseGraph.from_edges(3, [(0, 1), (1, 2)])
    assert validate_compression(P, [[0, 2], [1]])
    star = OrderedBaseGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert validate_compression(star, [[1, 2], [0], [3]])
    G2 = make_grid(2, 3)
    # (0, 0) has degree 2, (1, 1) has degree 3
    assert not validate_compression(G2, [[0, 4], [1], [2], [3], [5]])
    with pytest.raises(ValueError):
        validate_compression(G, [[0, 1]])


def test_compressible_assignment_examples():
    G = c4()
    assert is_compressible_assignment(G, Compression.identity(4), EdgeAssignment.from_ones(G, [(0, 1)]))
    opp = Compression.from_partition(4, [[0, 2], [1], [3]])
    assert is_compressible_assignment(G, opp, EdgeAssignment.zero(G))
    # (0, 1) and (2, 1) join the same class pair
    assert not is_compressible_assignment(G, opp, EdgeAssignment.from_ones(G, [(0, 1)]))
    assert is_compressible_assignment(G, opp, EdgeAssignment.from_ones(G, [(0, 1), (1, 2)]))


def test_compressible_twisting_examples():
    G = c4()
    opp = Compression.from_partition(4, [[0, 2], [1], [3]])
    assert is_compressible_twisting(G, Compression.identity(4), Twisting.of([(0, 1), (0, 3)]))
    assert is_compressible_twisting(G, opp, Twisting.of())
    assert not is_compressible_twisting(G, opp, Twisting.of([(0, 1), (0, 3)]))
    assert is_compressible_twisting(G, opp, Twisting.of([(0, 1), (0, 3), (2, 1), (2, 3)]))


def test_identity_precompressed_is_equality():
    G = make_grid(2, 3)
    P = build_precompressed(G, EdgeAssignment.zero(G), Compression.identity(G.n))
    assert len(set(P.graph.classes)) == P.graph.n


def test_fig4_classes():
    G, comp = fig4()
    P = build_precompressed(G, EdgeAssignment.zero(G), comp)
    members = P.graph.class_members()
    big = [m for m in members.values() if len(m) > 1]
    assert len(big) == 4 and all(len(m) == 2 for m in big)
    for m in big:
        assert {P.cfi.origin(x) for x in m} == {1, 6}
    expected = sum(gadget_size(G.degree(c)) for c in comp.classes())
    assert len(members) == expected
    X = build_compressed(G, EdgeAssignment.zero(G), comp)
    assert X.n == expected == P.graph.n - 4
    merged = [x for x in range(X.n) if len(X.members(x)) == 2]
    assert len(merged) == 4


def test_compressed_is_loop_free_and_colored_by_min():
    G, comp = fig4()
    X = build_compressed(G, EdgeAssignment.zero(G), comp)
    assert all(x not in X.graph.adjacency[x] for x in range(X.n))
    for x in range(X.n):
        assert X.graph.colors[x] == min(G.color(u) for u, _ in X.members(x))


def test_identity_compressed_equals_cfi():
    G = make_grid(2, 4)
    f = EdgeAssignment.from_ones(G, [(0, 4)])
    X = build_compressed(G, f, Compression.identity(G.n))
    Y = build_cfi(G, f)
    assert list(X.keys) == list(Y.keys)
    assert X.graph.edges() == Y.graph.edges()


def test_lemma10_bound_on_cylinder():
    G = make_cylinder(3, 10)
    labels = []
    for v in range(G.n):
        i, j = G.coord(v)
        labels.append(("merged", i, j % 3) if 2 <= j < 8 else ("single", i, j))
    comp = Compression.from_labels(labels)
    assert validate_compression(G, comp)
    X = build_compressed(G, EdgeAssignment.zero(G), comp)
    assert X.n <= 8 * comp.class_count()
    assert X.n == compressed_vertex_count(G, comp)


@given(seeds)
def test_membership_reproduces_precompressed(seed):
    rng = random.Random(seed)
    G = sampling.random_base_graph(rng, rng.randint(3, 8), 0.4, max_degree=4)
    comp = sampling.random_compression(rng, G)
    f = sampling.random_compressible_assignment(rng, G, comp)
    X = build_compressed(G, f, comp)
    P = build_precompressed(G, f, comp)
    expanded = sorted(key for x in range(X.n) for key in X.members(x))
    assert expanded == sorted(P.cfi.keys)
    # classes of the precompressed graph are exactly the fibres of the contraction
    by_class: dict = {}
    for x, key in enumerate(P.cfi.keys):
        by_class.setdefault(P.graph.classes[x], set()).add(key)
    assert sorted(map(sorted, by_class.values())) == sorted(sorted(X.members(x)) for x in range(X.n))
    assert all(len({u for u, _ in keys}) == len(keys) for keys in by_class.values())
    # the vertex-count bound is tight when every degree is equal
    if len({G.degree(v) for v in range(G.n)}) == 1:
        assert X.n == 2 ** (G.degree(0) - 1) * comp.class_count()


def test_builders_reject_bad_inputs():
    G = c4()
    with pytest.raises(ValueError):
        build_compressed(G, EdgeAssignment.zero(G), Compression.from_partition(4, [[0, 1], [2], [3]]))
    opp = Compression.from_partition(4, [[0, 2], [1], [3]])
    with pytest.raises(ValueError):
        build_precompressed(G, EdgeAssignment.from_ones(G, [(0, 1)]), opp)


def test_fixing_examples():
    G, comp = fig4()
    f = EdgeAssignment.zero(G)
    assert compressed_isomorphic_fixing(G, comp, f, f) == Twisting.of()
    ident = Compression.identity(G.n)
    rng = random.Random(3)
    for _ in range(30):
        a = sampling.random_compressible_assignment(rng, G, ident)
        b = sampling.random_compressible_assignment(rng, G, ident)
        W = [u for u in range(G.n) if rng.random() < 0.3]
        assert compressed_isomorphic_fixing(G, ident, a, b, W) == find_twisting(G, a, b, W)


def test_compressible_twisting_can_be_missing():
    """6-cycle with opposite vertices 0 and 3 identified; f = 0 and g twists
    {0,1} and {3,4}. Even parity gives a plain twisting, but the tied arc
    variables force x_34 = a and x_34 = a + 1 at once."""
    G = OrderedBaseGraph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    comp = Compression.from_partition(6, [[0, 3], [1], [2], [4], [5]])
    f = EdgeAssignment.zero(G)
    g = EdgeAssignment.from_ones(G, [(0, 1), (3, 4)])
    assert is_compressible_assignment(G, comp, g)
    assert find_twisting(G, f, g) is not None
    assert compressed_isomorphic_fixing(G, comp, f, g) is None
    A, B = build_compressed(G, f, comp).graph, build_compressed(G, g, comp).graph
    assert A.n == 10
    assert not brute_force_isomorphic(A, B)
    P, Q = build_precompressed(G, f, comp).graph, build_precompressed(G, g, comp).graph
    assert not brute_force_isomorphic(P, Q)
    assert brute_force_isomorphic(build_cfi(G, f).graph, build_cfi(G, g).graph)


@given(seeds)
def test_fixing_result_is_valid(seed):
    rng = random.Random(seed)
    G = sampling.random_base_graph(rng, rng.randint(3, 8), 0.4, max_degree=4)
    comp = sampling.random_compression(rng, G)
    f = sampling.random_compressible_assignment(rng, G, comp)
    g = sampling.random_compressible_assignment(rng, G, comp)
    W = [u for u in range(G.n) if rng.random() < 0.25]
    T = compressed_isomorphic_fixing(G, comp, f, g, W)
    if T is not None:
        assert T.is_valid(G) and is_compressible_twisting(G, comp, T)
        assert all(T.fixes(u) for u in W)
        assert EdgeAssignment(f.domain, g.ones ^ T.twisted_edges()) == f
