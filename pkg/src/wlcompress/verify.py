"""Property suites checking the construction's claims on sampled instances.

Each suite compares two independent routes (a constructive algorithm and a
brute-force or literal-definition check) and counts disagreements.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from . import games
from . import grid_compression as gcm
from . import sampling
from .base_graphs import OrderedBaseGraph, build_params, make_grid
from .cfi import EdgeAssignment, brute_force_isomorphic, build_cfi, cfi_isomorphic, find_twisting, twisting_to_isomorphism
from .compression import (
    Compression,
    build_compressed,
    build_precompressed,
    compressed_isomorphic_fixing,
    compressed_vertex_count,
)
from .wl import wl_distinguish


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: int = 0
    examples: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checked > 0

    def fail(self, detail) -> None:
        self.failures += 1
        if len(self.examples) < 5:
            self.examples.append(detail)

    def as_dict(self) -> dict:
        return {
            "suite": self.name,
            "checked": self.checked,
            "failures": self.failures,
            "passed": self.passed,
            "examples": [repr(x) for x in self.examples],
            "stats": self.stats,
        }


def _is_isomorphism(A, B, phi: dict) -> bool:
    if sorted(phi.values()) != list(range(B.n)):
        return False
    if any(A.colors[x] != B.colors[phi[x]] for x in range(A.n)):
        return False
    return all(B.has_edge(phi[x], phi[y]) for x, y in A.edges()) and A.edge_count() == B.edge_count()


def suite_lemma4(seed: int = 0, count: int = 200) -> SuiteReport:
    """Twisting found by the F2 solver iff brute force finds a CFI isomorphism."""
    rng = random.Random(seed)
    rep = SuiteReport("lemma4")
    iso = 0
    while rep.checked < count:
        G = sampling.random_base_graph(rng, rng.randint(2, 6), 0.5)
        ident = Compression.identity(G.n)
        f = sampling.random_compressible_assignment(rng, G, ident)
        g = sampling.random_compressible_assignment(rng, G, ident)
        A, B = build_cfi(G, f), build_cfi(G, g)
        T = find_twisting(G, f, g)
        brute = brute_force_isomorphic(A.graph, B.graph)
        rep.checked += 1
        iso += brute
        if (T is not None) != brute or (T is not None) != cfi_isomorphic(G, f, g):
            rep.fail((G.edges(), sorted(f.ones), sorted(g.ones)))
            continue
        if T is not None:
            # f = g + g_T, so the twisting maps CFI(G, g) onto CFI(G, f)
            keymap = twisting_to_isomorphism(G, g, T)
            phi = {B.index(a): A.index(b) for a, b in keymap.items()}
            if not _is_isomorphism(B.graph, A.graph, phi):
                rep.fail(("isomorphism check", G.edges()))
    rep.stats = {"isomorphic": iso}
    return rep


def compressed_corpus(seed: int = 0, count: int = 60) -> list[tuple[OrderedBaseGraph, Compression, EdgeAssignment]]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        G = sampling.random_base_graph(rng, rng.randint(2, 8), 0.45, max_degree=4)
        comp = sampling.random_compression(rng, G)
        out.append((G, comp, sampling.random_compressible_assignment(rng, G, comp)))
    for p in ([3, 4, 5], [7, 8, 9]):
        gc = gcm.grid(build_params(3, p[-1], toy=True, periods=p))
        out.append((gc.base, gc.compression, EdgeAssignment.zero(gc.base)))
    return out


def suite_lemma10(seed: int = 0, count: int = 60, full: bool = False) -> SuiteReport:
    """Compressed vertex count equals the sum of gadget sizes and respects 2^(d-1) per class."""
    rep = SuiteReport("lemma10")
    corpus = compressed_corpus(seed, count)
    if full:
        gc = gcm.grid(build_params(3, 16))
        corpus.append((gc.base, gc.compression, EdgeAssignment.zero(gc.base)))
    for G, comp, f in corpus:
        X = build_compressed(G, f, comp)
        classes = comp.classes()
        expected = sum(2 ** (G.degree(members[0]) - 1) for members in classes.values())
        bound = 2 ** (G.max_degree() - 1) * len(classes)
        rep.checked += 1
        if X.graph.n != expected or X.graph.n > bound or compressed_vertex_count(G, comp) != expected:
            rep.fail((G.name, X.graph.n, expected, bound))
    return rep


def suite_lemma11(seed: int = 0, count: int = 100, size_cap: int = 40) -> SuiteReport:
    """Compressed isomorphism, precompressed isomorphism and a compressible
    twisting fixing W all agree."""
    rng = random.Random(seed)
    rep = SuiteReport("lemma11")
    positives = 0
    while rep.checked < count:
        G = sampling.random_base_graph(rng, rng.randint(3, 7), 0.5)
        comp = sampling.random_compression(rng, G)
        if comp.is_identity() or compressed_vertex_count(G, comp) > size_cap:
            continue
        f = sampling.random_compressible_assignment(rng, G, comp)
        g = sampling.random_compressible_assignment(rng, G, comp)
        W = [w for w in range(G.n) if rng.random() < 0.3]
        T = compressed_isomorphic_fixing(G, comp, f, g, W)
        Pf, Pg = build_precompressed(G, f, comp), build_precompressed(G, g, comp)
        pin = {Pf.cfi.index((w, 0)): Pg.cfi.index((w, 0)) for w in W}
        pre = brute_force_isomorphic(Pf.graph, Pg.graph, pinned=pin, cap=200)
        Cf, Cg = build_compressed(G, f, comp), build_compressed(G, g, comp)
        idx = {key: i for i, key in enumerate(Cf.keys)}
        pin_c = {idx[(comp.class_of[w], 0)]: idx[(comp.class_of[w], 0)] for w in W}
        com = brute_force_isomorphic(Cf.graph, Cg.graph, pinned=pin_c)
        rep.checked += 1
        positives += pre
        if not (com == pre == (T is not None)):
            rep.fail((G.edges(), comp.class_of, sorted(f.ones), sorted(g.ones), W, com, pre, T is not None))
    rep.stats = {"isomorphic": positives}
    return rep


def ladder_instances() -> list[tuple[OrderedBaseGraph, Compression]]:
    """2 x n ladders with two interior columns merged (column-shift compressions)."""
    out = []
    for n, (a, b) in [(6, (1, 3)), (6, (2, 4)), (7, (2, 4)), (7, (1, 4)), (8, (2, 5)), (8, (3, 5))]:
        G = make_grid(2, n)
        labels = list(range(G.n))
        for i in range(2):
            labels[G.vertex((i, b))] = labels[G.vertex((i, a))]
        out.append((G, Compression.from_labels(labels)))
    return out


def sandwich_instances(seed: int = 0, count: int = 24, size_cap: int = 40):
    rng = random.Random(seed)
    out = []
    for G, comp in ladder_instances():
        f = EdgeAssignment.zero(G)
        g = sampling.odd_partner(rng, G, comp, f)
        if g is not None:
            out.append((G, comp, f, g))
    while len(out) < count:
        G = sampling.random_base_graph(rng, rng.randint(4, 7), 0.5)
        comp = sampling.random_compression(rng, G)
        if comp.is_identity() or compressed_vertex_count(G, comp) > size_cap:
            continue
        f = sampling.random_compressible_assignment(rng, G, comp)
        g = sampling.odd_partner(rng, G, comp, f)
        if g is not None:
            out.append((G, comp, f, g))
    return out


def sandwich_rounds(G, comp, f, g, k: int) -> tuple[int | None, int | None, int | None]:
    builders = (
        lambda h: build_cfi(G, h).graph,
        lambda h: build_precompressed(G, h, comp).graph,
        lambda h: build_compressed(G, h, comp).graph,
    )
    return tuple(wl_distinguish(b(f), b(g), k).round for b in builders)  # type: ignore[return-value]


def sandwich_violations(r_cfi, r_pre, r_comp) -> list[str]:
    """Which of the three round implications fail (None means never distinguished)."""
    inf = float("inf")
    c, p, m = (inf if x is None else x for x in (r_cfi, r_pre, r_comp))
    bad = []
    if c < inf and not p <= c:
        bad.append("cfi->pre")
    if p < inf and not m <= p:
        bad.append("pre->comp")
    if m < inf and not p <= m + 2:
        bad.append("comp->pre+2")
    return bad


def suite_lemma12(seed: int = 0, count: int = 24) -> SuiteReport:
    """Distinguishing rounds of the CFI, precompressed and compressed pairs obey the round sandwich."""
    rep = SuiteReport("lemma12")
    rows = []
    for t, (G, comp, f, g) in enumerate(sandwich_instances(seed, count)):
        k = 2 if t % 2 == 0 else 3
        r = sandwich_rounds(G, comp, f, g, k)
        rows.append((k,) + r)
        rep.checked += 1
        bad = sandwich_violations(*r)
        if bad:
            rep.fail((G.edges(), comp.class_of, k, r, bad))
    rep.stats = {"rounds": rows}
    return rep


def toy_params(kind: str = "small"):
    if kind == "small":
        return build_params(3, 5, toy=True, periods=[3, 4, 5])
    return build_params(3, 9, toy=True, periods=[7, 8, 9])


def random_cop_positions(gc: gcm.GridCompression, rng: random.Random, count: int) -> list[list[tuple[int, int]]]:
    """Half uniform sets of at most k vertices, half built around separator shapes."""
    out = []
    for t in range(count):
        if t % 2 == 0:
            size = rng.randint(0, gc.k)
            W = [(rng.randrange(gc.k), rng.randrange(gc.J)) for _ in range(size)]
        else:
            cols = [rng.randrange(gc.Jstar)]
            for _ in range(gc.k - 1):
                cols.append((cols[-1] + rng.choice([-1, 0, 1, 2])) % gc.Jstar)
            W = []
            for i, c in enumerate(cols):
                m = gc.period(i)
                W.append((i, rng.choice(range(c % m, gc.J, m))))
        out.append(list(dict.fromkeys(W)))
    return out


def exhaustive_separators(gc: gcm.GridCompression, W) -> list[list[tuple[int, int]]]:
    """All k-vertex sets inside the closure of W that pass the literal shift test.

    Only sets with one vertex per row are tried: a row without a deleted vertex
    is a free path from the first to the last column under every shift.
    """
    X = gcm.star_closure(gc, W)
    rows = [sorted(u for u in X if u[0] == i) for i in range(gc.k)]
    cands = list(itertools.product(*rows))
    flags = gcm.toroidal_separator_flags(gc, cands) if cands else []
    return [sorted(c) for c, ok in zip(cands, flags) if ok]


def suite_lemma17(seed: int = 0, count: int = 1000, params=None) -> SuiteReport:
    """At most one k-vertex toroidal vertical separator lies inside the closure of W."""
    gc = gcm.grid(params or toy_params())
    rng = random.Random(seed)
    rep = SuiteReport("lemma17")
    found = 0
    for W in random_cop_positions(gc, rng, count):
        sols = exhaustive_separators(gc, W)
        rep.checked += 1
        found += bool(sols)
        if len(sols) > 1:
            rep.fail((W, sols))
    rep.stats = {"with_separator": found}
    return rep


def suite_lemma15(seed: int = 0, count: int = 300, params=None) -> SuiteReport:
    """End-to-end twisting exists (and is valid) iff W is not a pseudo-separator."""
    gc = gcm.grid(params or build_params(3, 16))
    rng = random.Random(seed)
    rep = SuiteReport("lemma15")
    branches: dict[str, int] = {}
    for W in random_cop_positions(gc, rng, count):
        W = [(i, j % gc.J) for i, j in W]
        pseudo = gcm.is_pseudo_separator(gc, W)
        e2e = gcm.end_to_end_twisting(gc, W)
        rep.checked += 1
        if e2e is None:
            branches["none"] = branches.get("none", 0) + 1
            if not pseudo:
                rep.fail(("missing", W))
            continue
        branches[e2e.branch] = branches.get(e2e.branch, 0) + 1
        problems = gcm.end_to_end_problems(gc, W, e2e.twisting)
        if pseudo or problems:
            rep.fail(("invalid", W, pseudo, problems))
    rep.stats = branches
    return rep


def suite_lemma19(seed: int = 0, games_per_strategy: int = 1, rounds: int | None = 120, params=None) -> SuiteReport:
    """The robber policy survives seeded cop strategies with legal moves and intact invariants."""
    gc = gcm.grid(params or build_params(3, 16))
    rep = SuiteReport("lemma19")
    for name in ("random", "greedy", "sweep", "separator"):
        for t in range(games_per_strategy):
            tr = games.simulate_compressed_game(gc, games.make_strategy(name, gc, seed + t), max_rounds=rounds, record_rounds=False)
            rep.checked += 1
            if tr.outcome != "survived" or tr.invariant_failures:
                rep.fail(tr.summary())
    return rep


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "lemma4": suite_lemma4,
    "lemma10": suite_lemma10,
    "lemma11": suite_lemma11,
    "lemma12": suite_lemma12,
    "lemma15": suite_lemma15,
    "lemma17": suite_lemma17,
    "lemma19": suite_lemma19,
}

QUICK = {
    "lemma4": {"count": 60},
    "lemma10": {"count": 20},
    "lemma11": {"count": 30},
    "lemma12": {"count": 10},
    "lemma15": {"count": 60},
    "lemma17": {"count": 60},
    "lemma19": {"rounds": 40},
}


def run_suite(name: str, seed: int = 0, quick: bool = False) -> SuiteReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; available: {', '.join(SUITES)}") from None
    return fn(seed=seed, **(QUICK[name] if quick else {}))
