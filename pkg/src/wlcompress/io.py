"""Graph serialization: JSON (canonical), DIMACS with color lines, graph6.

JSON layout::

    {"format": "wlcompress-graph", "version": 1,
     "vertices": [{"id": 0, "color": 1, "label": [...]}, ...],
     "edges": [[0, 1], ...],
     "classes": [[0, 4], [1], ...], "class_ids": [0, 1, ...],
     "meta": {...}}

Vertex ids are the internal ids ``0..n-1``. ``classes`` lists member ids in
ascending order, one list per class, ordered by class id. DIMACS uses
1-based ids, ``n <v> <color>`` lines and ``c class <id> <members>`` comments.
graph6 keeps only the bare graph.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any

import networkx as nx

from .graphs import ColoredGraph

log = logging.getLogger(__name__)

FORMAT = "wlcompress-graph"
VERSION = 1


class LossyExport(ValueError):
    pass


def _tupleize(x: Any) -> Any:
    if isinstance(x, list):
        return tuple(_tupleize(y) for y in x)
    return x


def _listify(x: Any) -> Any:
    if isinstance(x, tuple):
        return [_listify(y) for y in x]
    return x


def graph_to_json(G: ColoredGraph, meta: dict | None = None) -> dict:
    vertices = []
    for v in range(G.n):
        entry: dict[str, Any] = {"id": v, "color": G.colors[v]}
        if G.labels is not None:
            entry["label"] = _listify(G.labels[v])
        vertices.append(entry)
    out: dict[str, Any] = {
        "format": FORMAT,
        "version": VERSION,
        "vertices": vertices,
        "edges": [list(e) for e in G.edges()],
    }
    if G.classes is not None:
        members = G.class_members()
        ids = sorted(members)
        out["classes"] = [sorted(members[c]) for c in ids]
        out["class_ids"] = ids
    if meta:
        out["meta"] = meta
    return out


def graph_from_json(data: dict) -> ColoredGraph:
    if data.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    if data.get("version") != VERSION:
        raise ValueError(f"unsupported version {data.get('version')}")
    verts = sorted(data["vertices"], key=lambda d: d["id"])
    if [d["id"] for d in verts] != list(range(len(verts))):
        raise ValueError("vertex ids must be 0..n-1")
    colors = [d["color"] for d in verts]
    labels = None
    if verts and all("label" in d for d in verts):
        labels = [_tupleize(d["label"]) for d in verts]
    classes = None
    if "classes" in data:
        classes = [-1] * len(verts)
        ids = data.get("class_ids", list(range(len(data["classes"]))))
        for cid, members in zip(ids, data["classes"]):
            for v in members:
                classes[v] = cid
        if -1 in classes:
            raise ValueError("class map does not cover every vertex")
    return ColoredGraph.from_edges(colors, [tuple(e) for e in data["edges"]], classes, labels)


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_json(G: ColoredGraph, path: str | os.PathLike, meta: dict | None = None) -> None:
    atomic_write(path, dumps_json(graph_to_json(G, meta)))


def read_json(path: str | os.PathLike) -> ColoredGraph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))


def to_dimacs(G: ColoredGraph) -> str:
    lines = ["c wlcompress colored graph", f"p edge {G.n} {G.edge_count()}"]
    lines += [f"n {v + 1} {c}" for v, c in enumerate(G.colors)]
    if G.classes is not None:
        members = G.class_members()
        for cid in sorted(members):
            lines.append("c class " + " ".join(str(x) for x in [cid] + [v + 1 for v in sorted(members[cid])]))
    lines += [f"e {u + 1} {v + 1}" for u, v in G.edges()]
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> ColoredGraph:
    n = None
    colors: dict[int, int] = {}
    edges = []
    class_lines = []
    for raw in text.splitlines():
        parts = raw.split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "p":
            n = int(parts[2])
        elif tag == "n":
            colors[int(parts[1]) - 1] = int(parts[2])
        elif tag == "e":
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        elif tag == "c" and len(parts) > 1 and parts[1] == "class":
            class_lines.append([int(x) for x in parts[2:]])
    if n is None:
        raise ValueError("missing problem line")
    classes = None
    if class_lines:
        classes = [-1] * n
        for cid, *members in class_lines:
            for v in members:
                classes[v - 1] = cid
    return ColoredGraph.from_edges([colors.get(v, 1) for v in range(n)], edges, classes)


def to_graph6(G: ColoredGraph, force: bool = False) -> str:
    lossy = len(set(G.colors)) > 1 or G.classes is not None
    if lossy:
        if not force:
            raise LossyExport("graph6 cannot store colors or classes; pass force to drop them")
        log.warning("graph6 export drops vertex colors and classes")
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges())
    return nx.to_graph6_bytes(H, header=False).decode().strip() + "\n"


def from_graph6(text: str) -> ColoredGraph:
    H = nx.from_graph6_bytes(text.strip().encode())
    return ColoredGraph.from_edges([1] * H.number_of_nodes(), H.edges())


def export_graph(G: ColoredGraph, fmt: str, force: bool = False, meta: dict | None = None) -> str:
    if fmt == "json":
        return dumps_json(graph_to_json(G, meta))
    if fmt == "dimacs":
        return to_dimacs(G)
    if fmt == "graph6":
        return to_graph6(G, force)
    raise ValueError(f"unknown format {fmt!r}")


def import_graph(text: str, fmt: str) -> ColoredGraph:
    if fmt == "json":
        return graph_from_json(json.loads(text))
    if fmt == "dimacs":
        return from_dimacs(text)
    if fmt == "graph6":
        return from_graph6(text)
    raise ValueError(f"unknown format {fmt!r}")


def export_pair(A: ColoredGraph, B: ColoredGraph, outdir: str | os.PathLike, fmt: str, truth: str, meta: dict | None = None, force: bool = False) -> dict:
    """Write a graph pair plus a manifest carrying the ground-truth label."""
    outdir = Path(outdir)
    ext = {"json": "json", "dimacs": "dimacs", "graph6": "g6"}[fmt]
    names = [f"G.{ext}", f"H.{ext}"]
    for name, X in zip(names, (A, B)):
        atomic_write(outdir / name, export_graph(X, fmt, force))
    manifest = {"files": names, "format": fmt, "ground_truth": truth, "meta": meta or {}}
    atomic_write(outdir / "manifest.json", dumps_json(manifest))
    return manifest
