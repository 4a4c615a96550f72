from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlcompress import io
from wlcompress.experiments import build_pair
from wlcompress.graphs import ColoredGraph


@st.composite
def colored_graphs(draw):
    n = draw(st.integers(0, 12))
    colors = draw(st.lists(st.integers(1, 4), min_size=n, max_size=n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = [e for e in pairs if draw(st.booleans())] if pairs else []
    classes = None
    if n and draw(st.booleans()):
        classes = draw(st.lists(st.integers(0, 5), min_size=n, max_size=n))
    labels = None
    if n and draw(st.booleans()):
        labels = [(v, f"x{v}") for v in range(n)]
    return ColoredGraph.from_edges(colors, edges, classes, labels)


@given(colored_graphs())
@settings(max_examples=1000)
def test_json_round_trip(G):
    text = io.export_graph(G, "json")
    H = io.import_graph(text, "json")
    assert H == G
    assert H.labels == G.labels


@given(colored_graphs())
@settings(max_examples=1000)
def test_dimacs_round_trip(G):
    H = io.import_graph(io.export_graph(G, "dimacs"), "dimacs")
    assert H == G


def test_graph6_refuses_colored_graphs():
    G = ColoredGraph.from_edges([1, 2], [(0, 1)])
    with pytest.raises(io.LossyExport):
        io.export_graph(G, "graph6")
    with pytest.raises(io.LossyExport):
        io.to_graph6(ColoredGraph.from_edges([1, 1], [], [0, 0]))
    bare = io.import_graph(io.export_graph(G, "graph6", force=True), "graph6")
    assert bare.edges() == G.edges() and set(bare.colors) == {1}


def test_graph6_round_trip_plain():
    G = ColoredGraph.from_edges([1] * 5, [(0, 1), (1, 2), (3, 4)])
    assert io.import_graph(io.export_graph(G, "graph6"), "graph6") == G


def test_json_rejects_bad_documents():
    with pytest.raises(ValueError):
        io.graph_from_json({"format": "other"})
    with pytest.raises(ValueError):
        io.graph_from_json({"format": io.FORMAT, "version": 99})
    doc = io.graph_to_json(ColoredGraph.from_edges([1, 1], [(0, 1)], [0, 1]))
    doc["classes"] = [[0]]
    doc["class_ids"] = [0]
    with pytest.raises(ValueError):
        io.graph_from_json(doc)
    doc = io.graph_to_json(ColoredGraph.from_edges([1, 1], []))
    doc["vertices"][1]["id"] = 5
    with pytest.raises(ValueError):
        io.graph_from_json(doc)


def test_dimacs_requires_problem_line():
    with pytest.raises(ValueError):
        io.from_dimacs("e 1 2\n")


def test_unknown_format():
    G = ColoredGraph.from_edges([1], [])
    with pytest.raises(ValueError):
        io.export_graph(G, "gml")
    with pytest.raises(ValueError):
        io.import_graph("", "gml")


def test_fig1_pair_dimacs_manifest(tmp_path):
    A, B, info = build_pair({"family": "grid", "shape": "2x4", "twist": "first-column"})
    truth = "isomorphic" if info["isomorphic"] else "non-isomorphic"
    manifest = io.export_pair(A, B, tmp_path, "dimacs", truth)
    assert manifest["ground_truth"] == "non-isomorphic"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["G.dimacs", "H.dimacs", "manifest.json"]
    assert json.loads((tmp_path / "manifest.json").read_text()) == manifest
    assert io.from_dimacs((tmp_path / "G.dimacs").read_text()) == A
    assert io.from_dimacs((tmp_path / "H.dimacs").read_text()) == B


def test_write_read_json(tmp_path):
    G = ColoredGraph.from_edges([1, 2, 1], [(0, 1)], [0, 1, 0])
    path = tmp_path / "sub" / "g.json"
    path.parent.mkdir()
    io.write_json(G, path, meta={"note": "x"})
    assert io.read_json(path) == G
    assert json.loads(path.read_text())["meta"] == {"note": "x"}
    assert [p.name for p in path.parent.iterdir()] == ["g.json"]
