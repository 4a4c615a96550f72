"""Cops-and-robber and bijective pebble games.

Exact solvers cover tiny instances. The compressed-game simulator plays a
cop strategy against a robber policy on the compressed cylindrical grid and
validates every robber move with :func:`check_robber_move`, which works from
the definitions only (twisting validity, twisted edges, compressibility,
fixed cop classes).

A round is: a cop is lifted and its destination announced, the robber moves,
the cop lands. Capture is checked after landing.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from . import f2
from .base_graphs import OrderedBaseGraph, edge_key, neighbor_index
from .cfi import SizeCapExceeded, Twisting
from .compression import Compression, tied_variables
from .graphs import ColoredGraph
from . import grid_compression as gcm

Edge = tuple[int, int]
DEFAULT_STATE_CAP = 2_000_000


# ---- exact cops-and-robber solving ----------------------------------------


def _plain_regions(G: OrderedBaseGraph, W: frozenset[int]) -> dict[Edge, int]:
    """Edge -> region id: edges are mutually reachable iff they touch the same
    component of ``G - W``. Edges inside ``W`` get their own region."""
    comp: dict[int, int] = {}
    for s in range(G.n):
        if s in W or s in comp:
            continue
        comp[s] = s
        stack = [s]
        while stack:
            u = stack.pop()
            for v in G.neighbors[u]:
                if v not in W and v not in comp:
                    comp[v] = s
                    stack.append(v)
    out = {}
    for u, v in G.edges():
        if u not in W:
            out[(u, v)] = comp[u]
        elif v not in W:
            out[(u, v)] = comp[v]
        else:
            out[(u, v)] = -1 - len(out)
    return out


def twist_space(G: OrderedBaseGraph, comp: Compression, fixed: Iterable[int]) -> f2.ReducedBasis:
    """Span of the twisted-edge vectors of compressible twistings fixing ``fixed``.

    Edge ``i`` of ``G.edges()`` is bit ``i``. Two edges are exchangeable in the
    compressed game iff their sum lies in this span.
    """
    arcs = G.arcs()
    pos = {a: i for i, a in enumerate(arcs)}
    var = tied_variables(G, comp)
    nv = len(arcs)
    rows = []
    for u in range(G.n):
        mask = 0
        for v in G.neighbors[u]:
            mask ^= 1 << var[pos[(u, v)]]
        rows.append(mask)
    for u in set(fixed):
        for v in G.neighbors[u]:
            rows.append(1 << var[pos[(u, v)]])
    # variables not used as a representative never appear; pin them to 0
    used = set(var)
    rows += [1 << i for i in range(nv) if i not in used]
    edges = G.edges()
    space = f2.ReducedBasis()
    for x in f2.nullspace(rows, nv):
        vec = 0
        for idx, (u, v) in enumerate(edges):
            if ((x >> var[pos[(u, v)]]) ^ (x >> var[pos[(v, u)]])) & 1:
                vec |= 1 << idx
        space.add(vec)
    return space


def _compressed_regions(G: OrderedBaseGraph, comp: Compression, W: frozenset[int]) -> dict[Edge, int]:
    fixed = [v for v in range(G.n) if comp.class_of[v] in W]
    space = twist_space(G, comp, fixed)
    return {e: space.reduce(1 << i) for i, e in enumerate(G.edges())}


@dataclass
class CopsRobberSolution:
    cops_win: bool
    rounds: int | None  # least r such that the cops win in r rounds
    values: dict  # (cop set, robber edge) -> rounds to capture, for won states
    states: int

    def as_dict(self) -> dict:
        return {"winner": "cops" if self.cops_win else "robber", "rounds": self.rounds, "states": self.states}


def _solve(
    edges: list[Edge],
    units: list[int],
    cop_count: int,
    regions_of: Callable[[frozenset[int]], dict[Edge, int]],
    caught: Callable[[frozenset[int], Edge], bool],
    round_budget: int | None,
    cap: int,
) -> tuple[dict, int]:
    positions = [frozenset(c) for s in range(cop_count + 1) for c in itertools.combinations(units, s)]
    nstates = len(positions) * len(edges)
    if nstates > cap:
        raise SizeCapExceeded(f"{nstates} game states exceed the cap of {cap}")
    lifted = [frozenset(c) for s in range(cop_count) for c in itertools.combinations(units, s)]
    regions = {W: regions_of(W) for W in lifted}
    members: dict[tuple, list[Edge]] = {}
    for W, reg in regions.items():
        for e, rid in reg.items():
            members.setdefault((W, rid), []).append(e)
    live = {(C, e) for C in positions for e in edges if not caught(C, e)}
    value: dict[tuple, int] = {}
    good: dict[tuple, int] = {}  # (W, region) -> rounds needed when the robber is in that region
    t = 0
    while round_budget is None or t < round_budget:
        t += 1
        new_good = {}
        for key, region in members.items():
            if key in good:
                continue
            W = key[0]
            for v in units:
                X = W | {v}
                if all(caught(X, e) or (X, e) in value for e in region):
                    new_good[key] = t
                    break
        good.update(new_good)
        added = 0
        for C, e in live:
            if (C, e) in value:
                continue
            options = [C - {c} for c in C]
            if len(C) < cop_count:
                options.append(C)
            for W in options:
                if (W, regions[W][e]) in good:
                    value[(C, e)] = t
                    added += 1
                    break
        if not added and not new_good:
            break
    return value, nstates


def solve_cops_robber(
    G: OrderedBaseGraph, cop_count: int, round_budget: int | None = None, cap: int = DEFAULT_STATE_CAP
) -> CopsRobberSolution:
    """Exact value of the cops-and-robber game with the robber on edges.

    The robber picks the starting edge; cops win in ``r`` rounds iff they
    win in ``r`` rounds from every starting edge.
    """
    if cop_count < 1:
        raise ValueError("need at least one cop")
    edges = G.edges()
    if not edges:
        return CopsRobberSolution(True, 0, {}, 0)

    def caught(X, e):
        return e[0] in X and e[1] in X

    value, nstates = _solve(edges, list(range(G.n)), cop_count, lambda W: _plain_regions(G, W), caught, round_budget, cap)
    start = [value.get((frozenset(), e)) for e in edges]
    if any(r is None for r in start):
        return CopsRobberSolution(False, None, value, nstates)
    return CopsRobberSolution(True, max(start), value, nstates)


def solve_compressed_cops_robber(
    G: OrderedBaseGraph,
    comp: Compression,
    cop_count: int,
    start: Edge,
    round_budget: int | None = None,
    cap: int = DEFAULT_STATE_CAP,
) -> CopsRobberSolution:
    """Exact value of the compressed game with the robber starting on ``start``.

    Cops sit on classes (named by their least member). The robber may move
    between two edges iff some compressible twisting fixing the cop classes
    twists exactly those two edges.
    """
    start = edge_key(*start)
    edges = G.edges()
    if start not in set(edges):
        raise ValueError(f"{start} is not an edge")
    units = sorted(set(comp.class_of))
    cls = comp.class_of

    def caught(X, e):
        return cls[e[0]] in X and cls[e[1]] in X

    value, nstates = _solve(
        edges, units, cop_count, lambda W: _compressed_regions(G, comp, W), caught, round_budget, cap
    )
    r = value.get((frozenset(), start))
    return CopsRobberSolution(r is not None, r, value, nstates)


# ---- bijective pebble game -------------------------------------------------


@dataclass
class PebbleSolution:
    spoiler_wins: bool
    rounds: int | None  # least r such that Spoiler wins in r rounds
    positions: int

    def as_dict(self) -> dict:
        return {"winner": "spoiler" if self.spoiler_wins else "duplicator", "rounds": self.rounds, "positions": self.positions}


def _partial_iso(A: ColoredGraph, B: ColoredGraph, pairs: Sequence[tuple[int, int]]) -> bool:
    for a, (u, v) in enumerate(pairs):
        if A.colors[u] != B.colors[v]:
            return False
        for u2, v2 in pairs[a + 1:]:
            if (u == u2) != (v == v2):
                return False
            if A.has_edge(u, u2) != B.has_edge(v, v2):
                return False
            if A.same_class(u, u2) != B.same_class(v, v2):
                return False
    return True


def solve_pebble_game(
    A: ColoredGraph, B: ColoredGraph, pebbles: int, round_budget: int | None = None, size_cap: int = 8
) -> PebbleSolution:
    """Exact bijective pebble game with ``pebbles`` pebble pairs.

    Positions are multisets of pebbled pairs. Duplicator survives a round from
    a position iff, for every pebble Spoiler may lift, the bipartite graph of
    pairs ``(u, v)`` leading to surviving positions has a perfect matching.
    Class relations, when present, must be preserved too.
    """
    if pebbles < 1:
        raise ValueError("need at least one pebble pair")
    if A.n != B.n:
        return PebbleSolution(True, 0, 0)
    n = A.n
    if n > size_cap:
        raise SizeCapExceeded(f"{n} vertices exceed the pebble-game cap of {size_cap}")
    pairs = [(u, v) for u in range(n) for v in range(n)]
    positions = []
    for s in range(pebbles + 1):
        positions.extend(itertools.combinations_with_replacement(pairs, s))
    lost = {P for P in positions if not _partial_iso(A, B, P)}
    if () in lost:
        return PebbleSolution(True, 0, len(positions))
    t = 0
    while round_budget is None or t < round_budget:
        t += 1
        newly = set()
        for P in positions:
            if P in lost:
                continue
            lifts = {P[:i] + P[i + 1:] for i in range(len(P))}
            if len(P) < pebbles:
                lifts.add(P)
            for Q in lifts:
                rows, cols = [], []
                for u, v in pairs:
                    if tuple(sorted(Q + ((u, v),))) not in lost:
                        rows.append(u)
                        cols.append(v)
                m = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
                if (maximum_bipartite_matching(m, perm_type="column") < 0).any():
                    newly.add(P)
                    break
        if () in newly:
            return PebbleSolution(True, t, len(positions))
        if not newly:
            break
        lost |= newly
    return PebbleSolution(False, None, len(positions))


# ---- compressed game on the cylindrical grid --------------------------------


class IllegalMove(RuntimeError):
    pass


class InvariantViolation(RuntimeError):
    pass


def check_robber_move(
    G: OrderedBaseGraph,
    comp: Compression,
    members: dict[int, list[int]],
    old: Edge,
    new: Edge,
    T: Twisting,
    cop_classes: Iterable[int],
) -> list[str]:
    """Everything wrong with moving the robber from ``old`` to ``new`` via ``T``.

    ``members`` maps a class (its least vertex) to its vertices.
    """
    problems = []
    old, new = edge_key(*old), edge_key(*new)
    if not G.has_edge(*new):
        return [f"{new} is not an edge"]
    if not T.is_valid(G):
        problems.append("not a twisting: a vertex has an odd number of out-arcs or an arc is not an edge")
        return problems
    want = set() if old == new else {old, new}
    if T.twisted_edges() != want:
        problems.append(f"twists {sorted(T.twisted_edges())[:4]} instead of {sorted(want)}")
    masks: dict[int, int] = {}
    for u, v in T.arcs:
        masks[u] = masks.get(u, 0) | (1 << (neighbor_index(G, u, v) - 1))
    for c in {comp.class_of[u] for u in masks}:
        patterns = {masks.get(u, 0) for u in members[c]}
        if len(patterns) > 1:
            problems.append(f"not compressible at the class of {c}")
            break
    cops = set(cop_classes)
    moved_guarded = [u for u in masks if comp.class_of[u] in cops]
    if moved_guarded:
        problems.append(f"moves {len(moved_guarded)} vertex(es) in cop-occupied classes")
    return problems


@dataclass
class CopMove:
    lift: int | None  # index into the cop list, or None to bring a new cop
    dest: tuple[int, int]


@dataclass
class GameState:
    gc: gcm.GridCompression
    cops: list[tuple[int, int]]  # one vertex per cop, as placed
    budget: int
    robber: Edge  # base vertex indices
    side: str
    round: int = 0

    def robber_coords(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return self.gc.coord(self.robber[0]), self.gc.coord(self.robber[1])


class CopStrategy(Protocol):
    name: str

    def move(self, state: GameState) -> CopMove: ...


def _cop_position(gc: gcm.GridCompression, cops: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """One vertex per occupied class."""
    seen = {}
    for u in cops:
        seen.setdefault(gc.class_rep(u), u)
    return list(seen.values())


@dataclass
class RoundRecord:
    round: int
    cop_move: dict
    case: str
    old_edge: list
    new_edge: list
    twisted: int
    legal: bool
    problems: list[str]
    invariants: dict

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class GameTranscript:
    params: dict
    strategy: str
    seed: int
    start_edge: list
    rounds: list[RoundRecord] = field(default_factory=list)
    outcome: str = "survived"
    rounds_played: int = 0
    invariant_failures: int = 0
    jumps: int = 0

    def summary(self) -> dict:
        return {
            "params": self.params,
            "strategy": self.strategy,
            "seed": self.seed,
            "start_edge": self.start_edge,
            "outcome": self.outcome,
            "rounds_played": self.rounds_played,
            "invariant_failures": self.invariant_failures,
            "jumps": self.jumps,
        }


class RobberPolicy:
    """The side-hopping robber for the compressed game on the cylindrical grid.

    The robber stays in the first or the last ``k+2`` columns, where every
    class is a singleton, and hops to a cop-free column on its side. When a
    ``k``-subset of the landing position is a pseudo-separator whose unique
    toroidal separator comes within ``J/3`` of the robber's end, while the
    current position is not a pseudo-separator, it crosses to the other end
    along an end-to-end twisting.

    The symmetric side is handled by a ``side`` parameter rather than a
    reflection, because the compression itself is not mirror-symmetric.
    """

    def __init__(self, gc: gcm.GridCompression) -> None:
        self.gc = gc
        self.k = gc.k
        self.third = gc.J / 3

    def strip(self, side: str) -> range:
        width = self.k + 2
        return range(0, width) if side == "first" else range(self.gc.J - width, self.gc.J)

    def column_of(self, e: Edge) -> int:
        (_, j1), (_, j2) = self.gc.coord(e[0]), self.gc.coord(e[1])
        return j1 if j1 == j2 else -1

    def column(self, state: GameState) -> int:
        return self.column_of(state.robber)

    def guarded_columns(self, W: Iterable[tuple[int, int]], side: str) -> set[int]:
        cols = set(self.strip(side))
        return {j for u in W for _, j in self.gc.class_members(u) if j in cols}

    def invariants(self, state: GameState, W: list[tuple[int, int]], r: int) -> dict:
        col = self.column(state)
        i1 = col in self.strip(state.side) and col not in self.guarded_columns(W, state.side)
        S = gcm.unique_toroidal_separator(self.gc, W) if len(W) <= self.k else None
        dist = None
        i2 = True
        if S is not None:
            dist = gcm.distance_to_end(self.gc, S, state.side)
            i2 = dist >= self.third - 2 * r
        return {"I1": i1, "I2": i2, "separator_distance": dist, "side": state.side}

    def _local_path(
        self, start: Edge, targets: set[int] | Edge, W: list[tuple[int, int]], side: str
    ) -> list[int] | None:
        """Vertex sequence ``u_1..u_m`` inside the side strip: ``u_1u_2`` is ``start``,
        interior vertices avoid ``W``, and ``u_m`` extends the reached target.

        ``targets`` is either a set of columns (end on a vertical edge in one of
        them) or a specific edge.
        """
        gc = self.gc
        cols = set(self.strip(side))
        guarded = {gc.index(u) for u in W}
        by_edge = isinstance(targets, tuple)
        goal = set(targets) if by_edge else None

        def is_goal(v: int) -> bool:
            return v in goal if by_edge else gc.coord(v)[1] in targets

        parent: dict[int, int | None] = {}
        queue = []
        for s in start:
            if s not in guarded:
                parent[s] = None
                queue.append(s)
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            if is_goal(u) and u not in guarded:
                path = []
                x: int | None = u
                while x is not None:
                    path.append(x)
                    x = parent[x]
                path.reverse()
                first = start[1] if path[0] == start[0] else start[0]
                path.insert(0, first)
                if by_edge:
                    last = goal_other(targets, u)
                    if last in path:
                        return None
                    path.append(last)
                else:
                    i, j = gc.coord(u)
                    on = set(path)
                    ends = [gc.index(((i + d) % gc.k, j)) for d in (-1, 1)]
                    last = min(v for v in ends if v not in on)
                    path.append(last)
                return path
            for v in gc.base.neighbors[u]:
                if v in parent or v in guarded or gc.coord(v)[1] not in cols:
                    continue
                parent[v] = u
                queue.append(v)
        return None

    def _hop(self, robber: Edge, W, X, side: str) -> tuple[Edge, Twisting]:
        gc = self.gc
        free_cols = set(self.strip(side)) - self.guarded_columns(X, side)
        (_, j1), (_, j2) = gc.coord(robber[0]), gc.coord(robber[1])
        if j1 == j2 and j1 in free_cols:
            return robber, Twisting.of()
        path = self._local_path(robber, free_cols, W, side)
        if path is None:
            raise InvariantViolation(f"no cop-free route to a free column on the {side} side")
        coords = [gc.coord(v) for v in path]
        return edge_key(path[-2], path[-1]), gcm.path_twisting(gc, coords)

    def _to_edge(self, robber: Edge, target: Edge, W, side: str) -> Twisting:
        if edge_key(*robber) == edge_key(*target):
            return Twisting.of()
        path = self._local_path(robber, target, W, side)
        if path is None:
            raise InvariantViolation(f"no cop-free route to the end-to-end edge on the {side} side")
        return gcm.path_twisting(self.gc, [self.gc.coord(v) for v in path])

    def move(self, state: GameState, W: list[tuple[int, int]], x: tuple[int, int]) -> tuple[Edge, Twisting, str, str]:
        """Return the new edge, the twisting, the case label and the new side."""
        gc = self.gc
        X = _cop_position(gc, W + [x])
        side = state.side
        if gcm.pseudo_separator_structural(gc, W):
            case = "separator" if gcm.unique_toroidal_separator(gc, W) is not None else "pseudo"
            new, T = self._hop(state.robber, W, X, side)
            return new, T, case, side
        near = None
        for Wp in itertools.combinations(X, self.k):
            if not gcm.pseudo_separator_structural(gc, list(Wp)):
                continue
            S = gcm.unique_toroidal_separator(gc, list(Wp))
            if S is not None:
                near = gcm.distance_to_end(gc, S, side) < self.third
            break
        if not near:
            new, T = self._hop(state.robber, W, X, side)
            return new, T, "open" if near is None else "open-far", side
        e2e = gcm.end_to_end_twisting(gc, W)
        if e2e is None:
            raise InvariantViolation("cop position is not a pseudo-separator but has no end-to-end twisting")
        here, there = (e2e.first_edge, e2e.last_edge) if side == "first" else (e2e.last_edge, e2e.first_edge)
        other = "last" if side == "first" else "first"
        T = self._to_edge(state.robber, here, W, side) ^ e2e.twisting
        new, T3 = self._hop(there, W, X, other)
        return new, T ^ T3, "jump", other


def goal_other(edge: Edge, u: int) -> int:
    return edge[1] if edge[0] == u else edge[0]


# ---- cop strategies ---------------------------------------------------------


class _Base:
    name = "base"

    def __init__(self, gc: gcm.GridCompression, seed: int) -> None:
        self.gc = gc
        self.rng = random.Random(seed)
        self.seed = seed

    def _lift(self, state: GameState, keep: Callable[[tuple[int, int]], float] | None = None) -> int | None:
        if len(state.cops) < state.budget:
            return None
        if keep is None:
            return self.rng.randrange(len(state.cops))
        scores = [keep(u) for u in state.cops]
        return min(range(len(scores)), key=lambda i: (scores[i], self.rng.random()))

    def _random_vertex(self) -> tuple[int, int]:
        return (self.rng.randrange(self.gc.k), self.rng.randrange(self.gc.J))


class IdleCops(_Base):
    """Never lands anywhere useful: every cop keeps returning to the same vertex."""

    name = "idle"

    def move(self, state: GameState) -> CopMove:
        spot = (0, self.gc.J // 2)
        if len(state.cops) < state.budget:
            return CopMove(None, spot)
        return CopMove(0, spot)


class RandomCops(_Base):
    name = "random"

    def move(self, state: GameState) -> CopMove:
        return CopMove(self._lift(state), self._random_vertex())


class GreedyCops(_Base):
    """Land next to the robber; lift the cop farthest from it."""

    name = "greedy"

    def move(self, state: GameState) -> CopMove:
        (i, j), _ = state.robber_coords()
        lift = self._lift(state, keep=lambda u: -abs(u[1] - j))
        di = self.rng.choice([-1, 0, 0, 1])
        dj = self.rng.choice([-1, 0, 1, 1, 2])
        dest = ((i + di) % self.gc.k, min(max(j + dj, 0), self.gc.J - 1))
        return CopMove(lift, dest)


class SweepCops(_Base):
    """Hold a full column and advance it toward the robber one cop at a time."""

    name = "sweep"

    def __init__(self, gc, seed):
        super().__init__(gc, seed)
        self.col = self.rng.randrange(gc.J // 4, 3 * gc.J // 4)

    def move(self, state: GameState) -> CopMove:
        k = self.gc.k
        (_, j), _ = state.robber_coords()
        targets = [(i, self.col) for i in range(k)]
        if all(t in state.cops for t in targets):
            step = -1 if j < self.col else 1
            self.col = min(max(self.col + step, 0), self.gc.J - 1)
            targets = [(i, self.col) for i in range(k)]
        dest = next(t for t in targets if t not in state.cops)
        wanted = set(targets)
        # keep cops on the new column, then cops on the old one nearest the robber row
        return CopMove(self._lift(state, keep=lambda u: 2 if u in wanted else abs(u[1] - self.col)), dest)


class SeparatorCops(_Base):
    """Build positions whose toroidal separator sits close to the robber's end.

    Picks a k-vertex separator shape near the robber's end column in the
    toroidal grid and places cops on class members of it far away inside the
    compressed region, so the robber must decide whether to cross.
    """

    name = "separator"

    def __init__(self, gc, seed):
        super().__init__(gc, seed)
        self.plan: list[tuple[int, int]] = []
        self.todo: list[tuple[int, int]] = []

    def _plan(self, state: GameState) -> list[tuple[int, int]]:
        gc = self.gc
        (_, j), _ = state.robber_coords()
        offset = self.rng.randrange(0, int(gc.J / 3))
        base = (j + self.rng.choice([-1, 1]) * offset) % gc.Jstar
        cols = [base]
        for _ in range(gc.k - 1):
            cols.append((cols[-1] + self.rng.choice([-1, 0, 1])) % gc.Jstar)
        if not gcm.is_toroidal_k_separator_shape(gc.Jstar, cols):
            cols = [base] * gc.k
        plan = []
        for i, c in enumerate(cols):
            m = gc.period(i)
            choices = [cc for cc in range(c % m, gc.J, m)]
            plan.append((i, self.rng.choice(choices)))
        return plan

    def move(self, state: GameState) -> CopMove:
        if not self.todo:
            self.plan = self._plan(state)
            if self.rng.random() < 0.3:
                # a near miss: shift one vertex by two columns
                i, c = self.plan[self.rng.randrange(len(self.plan))]
                self.plan[i] = (i, min(c + 2, self.gc.J - 1))
            self.todo = list(self.plan)
        dest = self.todo.pop(0)
        planned = set(self.plan)
        return CopMove(self._lift(state, keep=lambda u: 1 if u in planned else 0), dest)


class ScriptEnded(Exception):
    """A scripted strategy has no moves left; the game stops there."""


class ScriptedCops:
    """Replays moves from a JSON script.

    ``{"name": "...", "moves": [{"lift": null, "dest": [0, 5]}, ...],
    "repeat": false}``. ``lift`` is the index of the cop to pick up (in
    placement order) or null to bring a new one. A malformed or illegal move
    loses the game for the cops.
    """

    def __init__(self, script: dict, seed: int = 0) -> None:
        if not isinstance(script, dict) or not isinstance(script.get("moves"), list):
            raise ValueError("a strategy script is an object with a 'moves' list")
        self.name = str(script.get("name", "scripted"))
        self.moves = script["moves"]
        self.repeat = bool(script.get("repeat", False))
        self.seed = seed
        self.pos = 0

    def move(self, state: GameState) -> CopMove:
        if self.pos >= len(self.moves):
            if not self.repeat or not self.moves:
                raise ScriptEnded()
            self.pos = 0
        raw = self.moves[self.pos]
        self.pos += 1
        try:
            lift, dest = raw["lift"], raw["dest"]
            dest = (int(dest[0]), int(dest[1]))
            if lift is not None:
                lift = int(lift)
        except (KeyError, TypeError, ValueError, IndexError):
            raise IllegalMove(f"malformed move {raw!r}") from None
        return CopMove(lift, dest)


STRATEGIES = {
    cls.name: cls for cls in (IdleCops, RandomCops, GreedyCops, SweepCops, SeparatorCops)
}


def make_strategy(name: str, gc: gcm.GridCompression, seed: int):
    try:
        return STRATEGIES[name](gc, seed)
    except KeyError:
        raise ValueError(f"unknown cop strategy {name!r}; choose from {sorted(STRATEGIES)}") from None


def simulate_compressed_game(
    gc: gcm.GridCompression,
    strategy,
    policy: RobberPolicy | None = None,
    max_rounds: int | None = None,
    start: tuple[tuple[int, int], tuple[int, int]] = ((0, 0), (1, 0)),
    record_rounds: bool = True,
    stop_on_violation: bool = True,
) -> GameTranscript:
    """Play the compressed ``(k+1)``-cop game; every robber move is re-checked."""
    if policy is None:
        policy = RobberPolicy(gc)
    if max_rounds is None:
        max_rounds = lemma_round_count(gc)
    G, comp = gc.base, gc.compression
    members = comp.classes()
    a, b = (gc.index(u) for u in start)
    if not G.has_edge(a, b):
        raise ValueError(f"{start} is not an edge of the cylinder")
    state = GameState(gc, [], gc.k + 1, edge_key(a, b), "first" if start[0][1] < gc.J // 2 else "last")
    tr = GameTranscript(gc.params.as_dict(), getattr(strategy, "name", "custom"), getattr(strategy, "seed", 0), [list(start[0]), list(start[1])])
    for r in range(max_rounds):
        state.round = r
        try:
            mv = strategy.move(state)
            if mv.lift is None and len(state.cops) >= state.budget:
                raise IllegalMove("no cop left beside the graph")
            if mv.lift is not None and not 0 <= mv.lift < len(state.cops):
                raise IllegalMove(f"no cop number {mv.lift}")
            if not gc.in_C(tuple(mv.dest)):
                raise IllegalMove(f"destination {mv.dest} is off the grid")
        except IllegalMove as exc:
            tr.outcome = f"cops-illegal: {exc}"
            break
        except ScriptEnded:
            break
        cops = list(state.cops)
        if mv.lift is not None:
            cops.pop(mv.lift)
        W = _cop_position(gc, cops)
        inv = policy.invariants(state, W, r)
        try:
            new, T, case, side = policy.move(state, W, tuple(mv.dest))
        except InvariantViolation as exc:
            tr.invariant_failures += 1
            tr.outcome = f"robber-stuck: {exc}"
            break
        cop_classes = [gc.index(gc.class_rep(u)) for u in W]
        problems = check_robber_move(G, comp, members, state.robber, new, T, cop_classes)
        old = state.robber
        cops.append(tuple(mv.dest))
        state.cops = cops
        X = {gc.index(gc.class_rep(u)) for u in cops}
        captured = comp.class_of[new[0]] in X and comp.class_of[new[1]] in X
        inv["landing_column_free"] = policy.column_of(new) not in policy.guarded_columns(cops, side)
        inv["captured"] = captured
        if case == "jump":
            tr.jumps += 1
        ok_inv = inv["I1"] and inv["I2"] and inv["landing_column_free"]
        if not ok_inv:
            tr.invariant_failures += 1
        if record_rounds:
            tr.rounds.append(
                RoundRecord(
                    r + 1,
                    {"lift": mv.lift, "dest": list(mv.dest)},
                    case,
                    [list(gc.coord(v)) for v in old],
                    [list(gc.coord(v)) for v in new],
                    len(T.twisted_edges()),
                    not problems,
                    problems,
                    inv,
                )
            )
        tr.rounds_played = r + 1
        if problems:
            tr.outcome = "robber-illegal"
            break
        state.robber, state.side = new, side
        if captured:
            tr.outcome = "captured"
            break
        if not ok_inv and stop_on_violation:
            tr.outcome = "invariant-violation"
            break
    return tr


def lemma_round_count(p) -> int:
    """``J/6 - (k+2)`` rounds, the survival horizon of the robber policy."""
    gc = gcm._gc(p)
    return gc.J // 6 - (gc.k + 2)
