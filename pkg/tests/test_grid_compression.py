from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlcompress import grid_compression as gcm
from wlcompress.base_graphs import build_params
from wlcompress.cfi import Twisting
from wlcompress.compression import validate_compression
from wlcompress.verify import exhaustive_separators, random_cop_positions, toy_params

P16 = build_params(3, 16)
GC = gcm.grid(P16)
TOY = gcm.grid(toy_params())
MID = gcm.grid(toy_params("mid"))
seeds = st.integers(0, 2**32 - 1)


# ---- equivalences ----------------------------------------------------------


def test_equiv_star_examples():
    assert gcm.equiv_star(P16, (0, 7), (0, 7))
    assert not gcm.equiv_star(P16, (0, 7), (1, 7))
    assert gcm.equiv_star(P16, (0, 100), (0, 892))
    assert not gcm.equiv_star(P16, (0, 100), (0, 893))
    with pytest.raises(ValueError):
        gcm.equiv_star(P16, (3, 0), (0, 0))
    with pytest.raises(ValueError):
        gcm.equiv_star(P16, (0, GC.Jstar), (0, 0))


def test_equiv_examples():
    assert gcm.equiv(P16, (0, 800), (0, 1592))
    assert gcm.equiv(P16, (0, 1592), (0, 800))
    assert not gcm.equiv(P16, (0, 100), (0, 892))
    with pytest.raises(ValueError):
        gcm.equiv(P16, (0, GC.J), (0, 0))
    fk = P16.fk
    for i in range(3):
        for j in list(range(fk)) + list(range(GC.J - fk, GC.J)):
            assert GC.is_singleton((i, j))


def test_approx_examples():
    assert gcm.approx(8, (0, 0), (0, 16))
    assert not gcm.approx(8, (0, 0), (1, 16))
    assert all(not gcm.approx(GC.Jstar, (1, 3), (1, c)) for c in range(GC.Jstar) if c != 3)
    with pytest.raises(ValueError):
        gcm.approx(1, (0, 0), (0, 0))


def _census_oracle(p) -> list[int]:
    """Count classes from the pairwise definition: j < j' merge when the gap
    is a multiple of the row period, j is past the leading singletons and j'
    is before the cutoff."""
    counts = []
    for i in range(p.k):
        m = p.class_period(i)
        j = np.arange(p.J_len)
        a, b = j[:, None], j[None, :]
        rel = (a < b) & ((b - a) % m == 0) & (a >= m) & (b < p.lambdas[i] * m)
        counts.append(int((~rel.any(axis=0)).sum()))
    return counts


# DERIVED: per-row counts from the pairwise-definition oracle above, frozen
CENSUS_W16 = [2772, 4004, 3276]


def test_class_census():
    assert _census_oracle(P16) == CENSUS_W16
    assert gcm.class_census(P16) == CENSUS_W16
    for i, c in enumerate(CENSUS_W16):
        m = P16.class_period(i)
        assert 3 * m <= c <= 4 * m
    sizes = [len(GC.class_members(GC.coord(v))) for v in range(GC.base.n) if GC.compression.class_of[v] == v]
    assert sum(sizes) == GC.J * GC.k
    assert GC.compression.class_count() == sum(CENSUS_W16)
    for params in (toy_params(), toy_params("mid")):
        assert gcm.class_census(params) == _census_oracle(params)


@pytest.mark.parametrize("which", ["w16", "mid"])
def test_equiv_matches_definition_on_random_pairs(which):
    gc = {"w16": GC, "mid": MID}[which]
    p = gc.params
    rng = random.Random(3)
    for _ in range(3000):
        i = rng.randrange(p.k)
        m = p.class_period(i)
        j = rng.randrange(gc.J)
        # half the pairs are period-aligned so both answers occur
        j2 = (j + m * rng.randint(-4, 4)) if rng.random() < 0.5 else rng.randrange(gc.J)
        if not 0 <= j2 < gc.J:
            continue
        a, b = sorted((j, j2))
        expected = a == b or ((b - a) % m == 0 and a >= m and b < p.lambdas[i] * m)
        assert gcm.equiv(gc, (i, j), (i, j2)) == expected


@pytest.mark.parametrize("w", [16, 17, 19, 23])
def test_compression_is_valid_k3(w):
    gc = gcm.GridCompression(build_params(3, w))
    assert validate_compression(gc.base, gc.compression)


@pytest.mark.slow
@pytest.mark.parametrize("w", [20, 22, 23])
def test_compression_is_valid_k4(w):
    gc = gcm.GridCompression(build_params(4, w))
    assert validate_compression(gc.base, gc.compression)


# ---- separators ------------------------------------------------------------


def test_vertical_separator_examples():
    col = [(i, 50) for i in range(3)]
    assert gcm.is_vertical_separator(GC, col).separates
    empty = gcm.is_vertical_separator(GC, [], witness=True)
    assert not empty.separates
    assert empty.witness[0][1] == 0 and empty.witness[-1][1] == GC.J - 1
    assert len(empty.witness) == GC.J
    assert not gcm.is_vertical_separator(GC, [(0, 50), (1, 50), (0, 51)]).separates
    # a fully deleted end column separates vacuously
    assert gcm.is_vertical_separator(GC, [(i, 0) for i in range(3)]).separates


def test_vertical_separator_diagonal_with_wrap():
    # rows 0 and 2 are adjacent, so a staircase closes only if row 2 meets row 0
    stair = [(0, 40), (1, 41), (2, 42)]
    assert not gcm.is_vertical_separator(GC, stair).separates
    closed = [(0, 40), (1, 40), (2, 41)]
    assert gcm.is_vertical_separator(GC, closed).separates


def test_toroidal_separator_examples():
    col = [(i, 50) for i in range(3)]
    assert gcm.is_toroidal_vertical_separator(GC, col) == (True, 0)
    assert gcm.is_toroidal_vertical_separator(GC, []) == (False, None)
    far = [(i, GC.J + 5) for i in range(3)]
    ok, z = gcm.is_toroidal_vertical_separator(GC, far)
    # DERIVED: least shift bringing column J+5 back into C is Jstar - (J+5)
    assert ok and z == GC.Jstar - GC.J - 5
    assert {(c + z) % GC.Jstar for _, c in far} == {0}


def test_toroidal_batch_matches_single():
    rng = random.Random(5)
    sets = random_cop_positions(TOY, rng, 40)
    flags = gcm.toroidal_separator_flags(TOY, sets)
    assert flags == [gcm.is_toroidal_vertical_separator(TOY, S)[0] for S in sets]


@given(seeds)
@settings(max_examples=40)
def test_batch_ends_connected_matches_single(seed):
    rng = np.random.default_rng(seed)
    stack = rng.random((6, 3, 30)) < rng.uniform(0.1, 0.5)
    got = gcm.ends_connected_batch(stack)
    assert got.tolist() == [gcm.ends_connected(s, wrap_rows=True) for s in stack]


def test_pairwise_examples():
    assert not gcm.is_pairwise_separator(GC, [])
    assert not gcm.is_pairwise_separator(GC, [(0, 100), (1, 100)])
    W = [(0, 2000), (1, 2001), (2, 2000)]
    assert gcm.pairwise_separates_rows(GC, W, 0)
    assert gcm.is_pairwise_separator(GC, W)
    far = [(0, 2000), (1, 2005), (2, 2000)]
    assert not gcm.pairwise_separates_rows(GC, far, 0)


def test_pseudo_examples():
    assert not gcm.is_pseudo_separator(GC, [])
    deep = [(i, 2500) for i in range(3)]
    assert gcm.is_pseudo_separator(GC, deep)
    rep = gcm.separator_report(GC, [(i, 3) for i in range(3)])
    assert rep.is_vertical and (not rep.is_pseudo or rep.is_pairwise)
    d = rep.as_dict()
    assert d["shift"] == 0 and d["witness"] is None


@given(seeds, st.sampled_from(["w16", "toy", "mid"]))
@settings(max_examples=60)
def test_structural_matches_literal(seed, which):
    gc = {"w16": GC, "toy": TOY, "mid": MID}[which]
    rng = random.Random(seed)
    for W in random_cop_positions(gc, rng, 4):
        W = [(i, j % gc.J) for i, j in W]
        W = list(dict.fromkeys(W))
        pseudo = gcm.is_pseudo_separator(gc, W)
        assert gcm.pseudo_separator_structural(gc, W) == pseudo
        assert not pseudo or gcm.is_pairwise_separator(gc, W)


def test_structural_rejects_large_sets():
    with pytest.raises(ValueError):
        gcm.pseudo_separator_structural(GC, [(0, 1), (1, 1), (2, 1), (0, 5)])


# ---- unique k-vertex separators -------------------------------------------


def test_unique_separator_examples():
    col = [(i, 2500) for i in range(3)]
    S = gcm.unique_toroidal_separator(GC, col)
    assert S == col
    assert gcm.unique_toroidal_separator(GC, [(0, 10), (1, 10)]) is None
    with pytest.raises(ValueError):
        gcm.unique_toroidal_separator(GC, [(0, 1), (1, 1), (2, 1), (0, 2)])


def test_unique_separator_agrees_with_exhaustive():
    rng = random.Random(11)
    for W in random_cop_positions(TOY, rng, 30):
        found = exhaustive_separators(TOY, W)
        assert len(found) <= 1
        S = gcm.unique_toroidal_separator(TOY, W)
        assert (S is None) == (not found)
        if S is not None:
            assert sorted(S) == found[0]


def _torus_distance(gc, u, v) -> int:
    di = abs(u[0] - v[0])
    dj = abs(u[1] - v[1]) % gc.Jstar
    return min(di, gc.k - di) + min(dj, gc.Jstar - dj)


def _pseudo_with_separator(gc, rng, tries=400):
    for W in random_cop_positions(gc, rng, tries):
        W = [(i, j % gc.J) for i, j in W]
        if len(W) == gc.k and gcm.is_pseudo_separator(gc, W):
            S = gcm.unique_toroidal_separator(gc, W)
            if S is not None:
                return W, S
    raise AssertionError("no pseudo-separator with a toroidal separator found")


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_separator_stability_under_one_exchange(seed):
    gc = TOY
    rng = random.Random(seed)
    W, S = _pseudo_with_separator(gc, rng)
    neighbours = 0
    for i in range(gc.k):
        for c in range(gc.J):
            W2 = [u if u[0] != i else (i, c) for u in W]
            if W2 == W or not gcm.is_pseudo_separator(gc, W2):
                continue
            neighbours += 1
            S2 = gcm.unique_toroidal_separator(gc, W2)
            assert S2 is not None
            assert len(set(S) & set(S2)) >= gc.k - 1
            assert all(min(_torus_distance(gc, u, v) for v in S) <= 2 for u in S2)
    assert neighbours > 0


def test_distance_to_end():
    S = [(i, 10) for i in range(3)]
    assert gcm.distance_to_end(GC, S, "first") == 10
    assert gcm.distance_to_end(GC, S, "last") == GC.J - 1 - 10
    assert gcm.distance_to_end(GC, [(0, GC.Jstar - 2)], "first") == 2
    with pytest.raises(ValueError):
        gcm.distance_to_end(GC, [], "first")


# ---- periodic paths and end-to-end twistings --------------------------------


def _first_last(gc, T):
    tw = T.twisted_edges()
    return (
        [e for e in tw if gcm.column_edge(gc, e, 0)],
        [e for e in tw if gcm.column_edge(gc, e, gc.J - 1)],
        tw,
    )


@pytest.mark.parametrize("i", [0, 1, 2])
def test_row_path_twisting(i):
    path = gcm.end_path(GC, gcm._row_path(GC, i))
    q = GC.period(i)
    assert gcm.path_problems(GC, gcm.PeriodicPath(path, q)) == []
    T = gcm.periodic_path_twisting(GC, gcm.PeriodicPath(path, q))
    first, last, tw = _first_last(GC, T)
    assert len(first) == len(last) == 1 and len(tw) == 2
    assert gcm.grid_twisting_compressible(GC, T)
    assert T.is_valid(GC.base)


def test_weave_path_is_periodic():
    i, j = 0, 2005
    core = gcm._weave_path(GC, i, j)
    full = gcm.end_path(GC, core)
    q = P16.pair_period(i)
    assert q == gcm.rows_period(GC, [0, 1])
    assert gcm.path_problems(GC, gcm.PeriodicPath(full, q)) == []
    T = gcm.periodic_path_twisting(GC, gcm.PeriodicPath(full, q))
    assert gcm.grid_twisting_compressible(GC, T)
    first, last, tw = _first_last(GC, T)
    assert len(first) == len(last) == 1 and len(tw) == 2
    # the weave never touches a column q-congruent to j in row i
    assert all(not (r == i and (c - j) % q == 0) for r, c in full)


def test_path_problems_rejects_bad_paths():
    assert gcm.path_problems(GC, gcm.PeriodicPath([(0, 0)], 8))
    bad_edge = [(0, 0), (0, 2)]
    assert any("not an edge" in s for s in gcm.path_problems(GC, gcm.PeriodicPath(bad_edge, 8)))
    inner = [(0, c) for c in range(900, 905)]
    assert any("singleton" in s for s in gcm.path_problems(GC, gcm.PeriodicPath(inner, 8)))
    with pytest.raises(ValueError):
        gcm.periodic_path_twisting(GC, gcm.PeriodicPath(inner, 8))
    # entering the merged class of (0, 800) without visiting its other members
    hook = [(0, c) for c in range(780, 801)] + [(1, c) for c in range(800, 779, -1)]
    assert any("not followed" in s for s in gcm.path_problems(GC, gcm.PeriodicPath(hook, 792)))


def test_end_to_end_examples():
    e = gcm.end_to_end_twisting(GC, [])
    assert e.branch == "row" and {u[0] for u in e.path[1:-1]} == {0}
    assert gcm.end_to_end_problems(GC, [], e.twisting) == []
    W = [(0, 2000), (1, 2005), (2, 2000)]
    e = gcm.end_to_end_twisting(GC, W)
    assert e.branch == "weave"
    assert gcm.end_to_end_problems(GC, W, e.twisting) == []
    pseudo = [(i, 2500) for i in range(3)]
    assert gcm.end_to_end_twisting(GC, pseudo) is None
    with pytest.raises(ValueError):
        gcm.end_to_end_twisting(GC, [(0, 1), (1, 1), (2, 1), (0, 2)])


def test_end_to_end_edges_reported():
    W = [(1, 300)]
    e = gcm.end_to_end_twisting(GC, W)
    assert set(e.twisting.twisted_edges()) == {e.first_edge, e.last_edge}


@given(seeds, st.sampled_from(["w16", "mid"]))
@settings(max_examples=40)
def test_end_to_end_iff_not_pseudo(seed, which):
    gc = {"w16": GC, "mid": MID}[which]
    rng = random.Random(seed)
    for W in random_cop_positions(gc, rng, 4):
        W = list(dict.fromkeys((i, j % gc.J) for i, j in W))
        e = gcm.end_to_end_twisting(gc, W)
        assert (e is None) == gcm.is_pseudo_separator(gc, W)
        if e is not None:
            assert e.branch in ("row", "weave")
            assert gcm.end_to_end_problems(gc, W, e.twisting) == []


def test_shifted_chain_on_larger_sets():
    # two vertices per row leave the fk-closure open; only the chain branch applies
    W = [(0, 3000), (0, 3100), (1, 3003), (1, 3050), (2, 3007), (2, 3090)]
    assert gcm.ends_connected(gcm.approx_closure_mask(GC, P16.fk, W), wrap_rows=True)
    e = gcm.shifted_chain_twisting(GC, W)
    assert e is not None and e.branch == "shifted"
    first, last, tw = _first_last(GC, e.twisting)
    assert len(first) == len(last) == 1 and len(tw) == 2
    assert e.twisting.is_valid(GC.base)
    blocked = {GC.index(u) for u in gcm.mask_coords(gcm.approx_closure_mask(GC, P16.fk, W))}
    assert not (e.twisting.moved_vertices() & blocked)
    closed = [(i, c) for i in range(3) for c in (3000,)]
    assert gcm.shifted_chain_twisting(GC, closed) is None


def test_end_to_end_problems_flags_damage():
    e = gcm.end_to_end_twisting(GC, [])
    guarded = [GC.coord(next(iter(e.twisting.moved_vertices())))]
    assert any("guarded" in s for s in gcm.end_to_end_problems(GC, guarded, e.twisting))
    # dropping one arc leaves a vertex with odd out-degree
    arc = (GC.index((0, 2000)), GC.index((0, 2001)))
    assert arc in e.twisting.arcs
    bad = Twisting.of(sorted(e.twisting.arcs - {arc}))
    assert any("not a twisting" in s for s in gcm.end_to_end_problems(GC, [], bad))
