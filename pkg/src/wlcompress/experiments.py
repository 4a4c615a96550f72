"""Instance descriptors and self-describing experiment records.

A descriptor is a plain dict; :func:`build_pair` turns it into the two
graphs it names. Records contain only the descriptor, the engine settings
and deterministic results, so re-running a record reproduces it byte for
byte. Wall-clock timings are reported separately.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from . import games
from . import grid_compression as gcm
from .base_graphs import OrderedBaseGraph, build_params, edge_key, make_cylinder, make_grid, make_torus
from .cfi import EdgeAssignment, build_cfi
from .compression import build_compressed, build_precompressed
from .graphs import ColoredGraph
from .wl import wl_distinguish, wl_stabilize

FAMILIES = ("grid", "cylinder", "torus")


@dataclass
class ExperimentRecord:
    kind: str
    instance: dict
    engine: dict
    results: dict
    artifact_version: str = __version__
    timing: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        """The reproducible part of the record (timings excluded)."""
        return {
            "artifact_version": self.artifact_version,
            "kind": self.kind,
            "instance": self.instance,
            "engine": self.engine,
            "results": self.results,
        }


def parse_shape(text: str) -> tuple[int, int]:
    try:
        rows, cols = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"shape must look like ROWSxCOLS, got {text!r}") from None
    return rows, cols


def base_graph(family: str, rows: int, cols: int) -> OrderedBaseGraph:
    if family == "grid":
        return make_grid(rows, cols)
    if family == "cylinder":
        return make_cylinder(rows, cols)
    if family == "torus":
        return make_torus(rows, cols)
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")


def first_column_edge(G: OrderedBaseGraph) -> tuple[int, int]:
    """The vertical edge between rows 0 and 1 of column 0."""
    return edge_key(G.vertex((0, 0)), G.vertex((1, 0)))


def twist_edges(G: OrderedBaseGraph, twist: str | list) -> list[tuple[int, int]]:
    if twist == "first-column":
        return [first_column_edge(G)]
    if twist == "none":
        return []
    edges = []
    for e in twist:
        u, v = (G.vertex(tuple(x)) if isinstance(x, (list, tuple)) else int(x) for x in e)
        if not G.has_edge(u, v):
            raise ValueError(f"{e} is not a base edge")
        edges.append(edge_key(u, v))
    return edges


def grid_params(desc: dict):
    if desc.get("periods") is not None:
        return build_params(desc["k"], desc["w"], toy=True, periods=desc["periods"])
    return build_params(desc["k"], desc["w"], toy=bool(desc.get("toy", False)))


def build_pair(desc: dict) -> tuple[ColoredGraph, ColoredGraph, dict]:
    """Build ``(G, H, info)`` for a descriptor.

    ``{"family": "grid"|"cylinder"|"torus", "shape": "2x4", "twist": ...,
    "variant": "cfi"}`` gives a CFI pair over that base graph;
    ``{"family": "compressed", "k": 3, "w": 16, "variant":
    "compressed"|"precompressed"|"cfi"}`` gives the pair over the compressed
    cylinder with a single first-column twist.
    """
    variant = desc.get("variant", "cfi")
    if desc["family"] == "compressed":
        gc = gcm.grid(grid_params(desc))
        G, comp = gc.base, gc.compression
    else:
        rows, cols = parse_shape(desc["shape"])
        G = base_graph(desc["family"], rows, cols)
        comp = None
    f = EdgeAssignment.zero(G)
    g = EdgeAssignment.from_ones(G, twist_edges(G, desc.get("twist", "first-column")))
    info: dict[str, Any] = {"base_vertices": G.n, "base_edges": G.edge_count()}
    if variant == "cfi":
        A, B = build_cfi(G, f).graph, build_cfi(G, g).graph
    elif comp is None:
        raise ValueError(f"variant {variant!r} needs the compressed family")
    elif variant == "precompressed":
        A, B = build_precompressed(G, f, comp).graph, build_precompressed(G, g, comp).graph
    elif variant == "compressed":
        A, B = build_compressed(G, f, comp).graph, build_compressed(G, g, comp).graph
        info["classes"] = comp.class_count()
    else:
        raise ValueError(f"unknown variant {variant!r}")
    info["vertices"] = A.n
    info["isomorphic"] = f.parity() == g.parity()
    return A, B, info


def run_distinguish(desc: dict, k: int, max_rounds: int | None = None, cap: int | None = None) -> ExperimentRecord:
    start = time.perf_counter()
    A, B, info = build_pair(desc)
    res = wl_distinguish(A, B, k, max_rounds=max_rounds, cap=cap)
    results = dict(info)
    results.update(res.as_dict())
    return ExperimentRecord(
        "distinguish",
        desc,
        {"wl_dimension": k, "max_rounds": max_rounds, "tuple_cap": cap},
        results,
        timing={"seconds": round(time.perf_counter() - start, 3)},
    )


def run_wl(G: ColoredGraph, k: int, max_rounds: int | None = None, cap: int | None = None, desc: dict | None = None) -> ExperimentRecord:
    start = time.perf_counter()
    state, rounds = wl_stabilize(G, k, max_rounds=max_rounds, cap=cap)
    hist = sorted(state.histogram(0).values(), reverse=True)
    return ExperimentRecord(
        "wl",
        desc or {"vertices": G.n, "edges": G.edge_count()},
        {"wl_dimension": k, "max_rounds": max_rounds, "tuple_cap": cap},
        {"stable_round": rounds, "colors": state.num_colors, "class_sizes": hist},
        timing={"seconds": round(time.perf_counter() - start, 3)},
    )


def furer_curve(ns: list[int], k: int = 2, cap: int | None = None) -> list[ExperimentRecord]:
    """Distinguishing rounds of k-WL on the single-twist CFI pairs over 2 x n grids."""
    return [run_distinguish({"family": "grid", "shape": f"2x{n}", "twist": "first-column"}, k, cap=cap) for n in ns]


def run_game_solve(family: str, shape: str, cops: int, round_budget: int | None = None) -> ExperimentRecord:
    start = time.perf_counter()
    rows, cols = parse_shape(shape)
    G = base_graph(family, rows, cols)
    sol = games.solve_cops_robber(G, cops, round_budget)
    return ExperimentRecord(
        "game-solve",
        {"family": family, "shape": shape},
        {"cops": cops, "round_budget": round_budget},
        sol.as_dict(),
        timing={"seconds": round(time.perf_counter() - start, 3)},
    )


def run_game_sim(desc: dict, strategy: str | Any, seed: int, rounds: int | None = None) -> tuple[ExperimentRecord, games.GameTranscript]:
    start = time.perf_counter()
    gc = gcm.grid(grid_params(desc))
    strat = games.make_strategy(strategy, gc, seed) if isinstance(strategy, str) else strategy
    tr = games.simulate_compressed_game(gc, strat, max_rounds=rounds)
    rec = ExperimentRecord(
        "game-sim",
        desc,
        {"strategy": getattr(strat, "name", "custom"), "seed": seed, "rounds": rounds if rounds is not None else games.lemma_round_count(gc)},
        tr.summary(),
        timing={"seconds": round(time.perf_counter() - start, 3)},
    )
    return rec, tr
