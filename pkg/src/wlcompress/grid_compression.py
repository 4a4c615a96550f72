"""Equivalences, separators, periodic paths and end-to-end twistings on the
compressed cylindrical grid.

Coordinates are ``(row, column)``. The cylindrical grid ``C`` has columns
``0..J_len-1``; the toroidal grid ``C*`` has columns ``0..Jstar_len-1`` and
contains ``C``. Base-graph vertex ``(i, j)`` of ``C`` has index ``i * J_len + j``.

Row ``i`` uses the column period ``m_i = fk * p_i * p_{i+1}`` (row indices
mod k). ``~*`` relates same-row vertices whose columns differ by a multiple
of ``m_i``; the compression ``~`` restricts it to columns in
``[m_i, lambda_i * m_i)`` and makes every other vertex a singleton.
"""

from __future__ import annotations

import functools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .base_graphs import GridParams, OrderedBaseGraph, edge_key, make_cylinder
from .cfi import Twisting
from .compression import Compression

Coord = tuple[int, int]


class GridCompression:
    """The cylinder ``C`` together with its compression, built lazily."""

    def __init__(self, params: GridParams) -> None:
        self.params = params
        self.k = params.k
        self.J = params.J_len
        self.Jstar = params.Jstar_len

    def __repr__(self) -> str:
        return f"GridCompression({self.params!r})"

    def index(self, u: Coord) -> int:
        i, j = u
        return i * self.J + j

    def coord(self, v: int) -> Coord:
        return divmod(v, self.J)

    def period(self, i: int) -> int:
        return self.params.class_period(i)

    def in_C(self, u: Coord) -> bool:
        i, j = u
        return 0 <= i < self.k and 0 <= j < self.J

    def merged_range(self, i: int) -> tuple[int, int]:
        """Columns of row ``i`` that belong to non-singleton-capable classes."""
        m = self.period(i)
        return m, self.params.lambdas[i] * m

    def class_rep(self, u: Coord) -> Coord:
        i, j = u
        lo, hi = self.merged_range(i)
        if lo <= j < hi:
            return (i, lo + (j - lo) % self.period(i))
        return (i, j)

    def class_members(self, u: Coord) -> list[Coord]:
        i, j = u
        lo, hi = self.merged_range(i)
        if lo <= j < hi:
            m = self.period(i)
            return [(i, c) for c in range(lo + (j - lo) % m, hi, m)]
        return [(i, j)]

    def is_singleton(self, u: Coord) -> bool:
        return len(self.class_members(u)) == 1

    @functools.cached_property
    def base(self) -> OrderedBaseGraph:
        return make_cylinder(self.k, self.J)

    @functools.cached_property
    def compression(self) -> Compression:
        class_of = []
        for i in range(self.k):
            for j in range(self.J):
                class_of.append(self.index(self.class_rep((i, j))))
        return Compression(tuple(class_of))


@functools.lru_cache(maxsize=8)
def grid(params: GridParams) -> GridCompression:
    return GridCompression(params)


def _gc(p: GridParams | GridCompression) -> GridCompression:
    return p if isinstance(p, GridCompression) else grid(p)


def _check_coord(u: Coord, k: int, width: int) -> None:
    i, j = u
    if not (0 <= i < k and 0 <= j < width):
        raise ValueError(f"{u} is outside the {k} x {width} grid")


def equiv_star(p: GridParams | GridCompression, u: Coord, v: Coord) -> bool:
    gc = _gc(p)
    _check_coord(u, gc.k, gc.Jstar)
    _check_coord(v, gc.k, gc.Jstar)
    return u[0] == v[0] and (v[1] - u[1]) % gc.period(u[0]) == 0


def equiv(p: GridParams | GridCompression, u: Coord, v: Coord) -> bool:
    gc = _gc(p)
    _check_coord(u, gc.k, gc.J)
    _check_coord(v, gc.k, gc.J)
    if u == v:
        return True
    if u[0] != v[0]:
        return False
    lo, hi = gc.merged_range(u[0])
    j, j2 = sorted((u[1], v[1]))
    return (j2 - j) % gc.period(u[0]) == 0 and j >= lo and j2 < hi


def approx(ell: int, u: Coord, v: Coord) -> bool:
    if ell < 2:
        raise ValueError("period must be at least 2")
    return u[0] == v[0] and (v[1] - u[1]) % ell == 0


def class_census(p: GridParams | GridCompression) -> list[int]:
    """Number of compression classes in each row."""
    gc = _gc(p)
    counts = []
    for i in range(gc.k):
        lo, hi = gc.merged_range(i)
        if hi > lo:
            counts.append(gc.J - (hi - lo) + gc.period(i))
        else:
            counts.append(gc.J)
    return counts


# ---- closures as boolean masks -------------------------------------------


def star_closure_mask(p: GridParams | GridCompression, W: Iterable[Coord]) -> np.ndarray:
    """``[W]`` under ``~*`` as a ``k x Jstar`` mask over ``C*``."""
    gc = _gc(p)
    mask = np.zeros((gc.k, gc.Jstar), dtype=bool)
    for i, j in W:
        m = gc.period(i)
        mask[i, j % m::m] = True
    return mask


def equiv_closure_mask(p: GridParams | GridCompression, W: Iterable[Coord]) -> np.ndarray:
    gc = _gc(p)
    mask = np.zeros((gc.k, gc.J), dtype=bool)
    for u in W:
        i, j = u
        lo, hi = gc.merged_range(i)
        if lo <= j < hi:
            m = gc.period(i)
            mask[i, lo + (j - lo) % m:hi:m] = True
        else:
            mask[i, j] = True
    return mask


def approx_closure_mask(
    p: GridParams | GridCompression, ell: int, W: Iterable[Coord], torus: bool = False
) -> np.ndarray:
    gc = _gc(p)
    width = gc.Jstar if torus else gc.J
    mask = np.zeros((gc.k, width), dtype=bool)
    for i, j in W:
        mask[i, j % ell::ell] = True
    return mask


def mask_coords(mask: np.ndarray) -> list[Coord]:
    rows, cols = np.nonzero(mask)
    return list(zip(rows.tolist(), cols.tolist()))


def equiv_closure(p: GridParams | GridCompression, W: Iterable[Coord]) -> set[Coord]:
    return set(mask_coords(equiv_closure_mask(p, W)))


def star_closure(p: GridParams | GridCompression, W: Iterable[Coord]) -> set[Coord]:
    return set(mask_coords(star_closure_mask(p, W)))


# ---- separation on masks ---------------------------------------------------

_FOUR = ndimage.generate_binary_structure(2, 1)


def ends_connected(blocked: np.ndarray, wrap_rows: bool) -> bool:
    """Whether a free path joins column 0 and the last column.

    ``blocked`` is a rows x columns mask of deleted vertices; with
    ``wrap_rows`` the first and last rows are adjacent in every column.
    A fully deleted end column counts as separated.
    """
    free = ~blocked
    if not free[:, 0].any() or not free[:, -1].any():
        return False
    labels, count = ndimage.label(free, structure=_FOUR)
    if wrap_rows and blocked.shape[0] > 2:
        both = free[0] & free[-1]
        if both.any():
            a = labels[0][both]
            b = labels[-1][both]
            graph = coo_matrix((np.ones(len(a)), (a, b)), shape=(count + 1, count + 1))
            _, comp = connected_components(graph, directed=False)
            labels = comp[labels]
            # label 0 marks blocked cells; comp keeps it separate only if never paired
    left = set(labels[:, 0][free[:, 0]].tolist())
    right = set(labels[:, -1][free[:, -1]].tolist())
    return not left.isdisjoint(right)


def _bfs_path(blocked: np.ndarray, wrap_rows: bool) -> list[Coord] | None:
    """Lexicographically tie-broken BFS path from column 0 to the last column."""
    rows, cols = blocked.shape
    starts = [(i, 0) for i in range(rows) if not blocked[i, 0]]
    parent: dict[Coord, Coord | None] = {s: None for s in starts}
    queue = deque(starts)
    while queue:
        u = queue.popleft()
        if u[1] == cols - 1:
            path = []
            while u is not None:
                path.append(u)
                u = parent[u]
            return path[::-1]
        i, j = u
        nbrs = []
        if i > 0:
            nbrs.append((i - 1, j))
        elif wrap_rows and rows > 2:
            nbrs.append((rows - 1, j))
        if j > 0:
            nbrs.append((i, j - 1))
        if j < cols - 1:
            nbrs.append((i, j + 1))
        if i < rows - 1:
            nbrs.append((i + 1, j))
        elif wrap_rows and rows > 2:
            nbrs.append((0, j))
        for v in sorted(nbrs):
            if v not in parent and not blocked[v]:
                parent[v] = u
                queue.append(v)
    return None


@dataclass
class SeparationCheck:
    separates: bool
    witness: list[Coord] | None = None


def is_vertical_separator(
    p: GridParams | GridCompression, W: Iterable[Coord] | np.ndarray, witness: bool = False
) -> SeparationCheck:
    """Does ``C - W`` separate the first column from the last one?"""
    gc = _gc(p)
    if isinstance(W, np.ndarray):
        blocked = W
    else:
        blocked = np.zeros((gc.k, gc.J), dtype=bool)
        for u in W:
            _check_coord(u, gc.k, gc.J)
            blocked[u] = True
    connected = ends_connected(blocked, wrap_rows=True)
    path = _bfs_path(blocked, True) if connected and witness else None
    return SeparationCheck(not connected, path)


_SLICED = np.zeros((3, 3, 3), dtype=bool)
_SLICED[1] = _FOUR  # 4-connectivity inside each slice, nothing across slices


def ends_connected_batch(blocked: np.ndarray) -> np.ndarray:
    """:func:`ends_connected` with row wrap for every slice of a ``(s, k, J)`` stack."""
    s, k, J = blocked.shape
    free = ~blocked
    labels, count = ndimage.label(free, structure=_SLICED)
    if k > 2:
        both = free[:, 0, :] & free[:, -1, :]
        a = labels[:, 0, :][both]
        b = labels[:, -1, :][both]
        if len(a):
            graph = coo_matrix((np.ones(len(a)), (a, b)), shape=(count + 1, count + 1))
            _, comp = connected_components(graph, directed=False)
            labels = np.where(free, comp[labels] + 1, 0)
    left = labels[:, :, 0]
    right = labels[:, :, -1]
    hit = (left[:, :, None] == right[:, None, :]) & (left[:, :, None] > 0)
    return hit.any(axis=(1, 2))


def is_toroidal_vertical_separator(
    p: GridParams | GridCompression, W: Iterable[Coord], batch: int = 256
) -> tuple[bool, int | None]:
    """Try every column shift of ``W`` in ``C*``; return the least separating shift.

    Shifts are checked in batches, each shift labelled independently.
    """
    gc = _gc(p)
    W = list(W)
    for u in W:
        _check_coord(u, gc.k, gc.Jstar)
    if not W:
        return False, None
    rows = np.array([i for i, _ in W])
    cols = np.array([j for _, j in W])
    for z0 in range(0, gc.Jstar, batch):
        zs = np.arange(z0, min(z0 + batch, gc.Jstar))
        shifted = (cols[None, :] + zs[:, None]) % gc.Jstar
        inside = shifted < gc.J
        blocked = np.zeros((len(zs), gc.k, gc.J), dtype=bool)
        sl, idx = np.nonzero(inside)
        blocked[sl, rows[idx], shifted[sl, idx]] = True
        sep = ~ends_connected_batch(blocked) & inside.any(axis=1)
        if sep.any():
            return True, int(zs[np.argmax(sep)])
    return False, None


def toroidal_separator_flags(
    p: GridParams | GridCompression, sets: Sequence[Sequence[Coord]], max_slices: int = 8192
) -> list[bool]:
    """:func:`is_toroidal_vertical_separator` for many sets, batched over (set, shift)."""
    gc = _gc(p)
    out = []
    per = max(1, max_slices // gc.Jstar)
    zs = np.arange(gc.Jstar)
    for s0 in range(0, len(sets), per):
        chunk = [list(S) for S in sets[s0:s0 + per]]
        blocked = np.zeros((len(chunk), gc.Jstar, gc.k, gc.J), dtype=bool)
        nonempty = np.zeros((len(chunk), gc.Jstar), dtype=bool)
        for t, S in enumerate(chunk):
            if not S:
                continue
            rows = np.array([i for i, _ in S])
            cols = np.array([j for _, j in S])
            shifted = (cols[None, :] + zs[:, None]) % gc.Jstar
            inside = shifted < gc.J
            sl, idx = np.nonzero(inside)
            blocked[t, sl, rows[idx], shifted[sl, idx]] = True
            nonempty[t] = inside.any(axis=1)
        flat = blocked.reshape(-1, gc.k, gc.J)
        sep = (~ends_connected_batch(flat)).reshape(len(chunk), gc.Jstar) & nonempty
        out.extend(bool(x) for x in sep.any(axis=1))
    return out


def pairwise_separates_rows(p: GridParams | GridCompression, W: Iterable[Coord], i: int) -> bool:
    """``[W]`` under ``~_{fk p_{i+1}}`` separates the ends of the rows ``i, i+1`` subgraph."""
    gc = _gc(p)
    i2 = (i + 1) % gc.k
    q = gc.params.pair_period(i)
    closure = approx_closure_mask(gc, q, W)
    two_rows = closure[[i, i2]]
    return not ends_connected(two_rows, wrap_rows=False)


def is_pairwise_separator(p: GridParams | GridCompression, W: Iterable[Coord]) -> bool:
    gc = _gc(p)
    W = list(W)
    return all(pairwise_separates_rows(gc, W, i) for i in range(gc.k))


def is_pseudo_separator(p: GridParams | GridCompression, W: Iterable[Coord]) -> bool:
    gc = _gc(p)
    W = list(W)
    if not is_pairwise_separator(gc, W):
        return False
    return is_vertical_separator(gc, approx_closure_mask(gc, gc.params.fk, W)).separates


@dataclass
class SeparatorReport:
    is_vertical: bool
    is_toroidal_vertical: bool
    is_pairwise: bool
    is_pseudo: bool
    witness: list[Coord] | None = None
    shift: int | None = None

    def as_dict(self) -> dict:
        return {
            "is_vertical": self.is_vertical,
            "is_toroidal_vertical": self.is_toroidal_vertical,
            "is_pairwise": self.is_pairwise,
            "is_pseudo": self.is_pseudo,
            "witness": None if self.witness is None else [list(u) for u in self.witness],
            "shift": self.shift,
        }


def separator_report(p: GridParams | GridCompression, W: Iterable[Coord]) -> SeparatorReport:
    gc = _gc(p)
    W = list(W)
    vert = is_vertical_separator(gc, W, witness=True)
    tvs, z = is_toroidal_vertical_separator(gc, W)
    pairwise = is_pairwise_separator(gc, W)
    pseudo = pairwise and is_vertical_separator(gc, approx_closure_mask(gc, gc.params.fk, W)).separates
    return SeparatorReport(vert.separates, tvs, pairwise, pseudo, vert.witness, z)


# ---- structural forms for cop positions of at most k vertices --------------


def one_per_row(k: int, W: Iterable[Coord]) -> list[int] | None:
    """Columns of ``W`` indexed by row if ``W`` has exactly one vertex per row."""
    cols: list[int | None] = [None] * k
    count = 0
    for i, j in W:
        if cols[i] is not None:
            return None
        cols[i] = j
        count += 1
    if count != k:
        return None
    return cols  # type: ignore[return-value]


def _near(d: int, mod: int) -> bool:
    return d % mod in (0, 1, mod - 1)


def pseudo_separator_structural(p: GridParams | GridCompression, W: Iterable[Coord]) -> bool:
    """Closed form of the pseudo-separator test for ``|W| <= k``.

    Such a ``W`` must hold one vertex per row, and cyclically consecutive rows
    must have columns within 1 of each other modulo ``fk * p_{i+1}``. The
    literal predicate :func:`is_pseudo_separator` is the reference.
    """
    gc = _gc(p)
    W = list(W)
    if len(W) > gc.k:
        raise ValueError("structural test covers at most k vertices")
    cols = one_per_row(gc.k, W)
    if cols is None:
        return False
    for i in range(gc.k):
        i2 = (i + 1) % gc.k
        if not _near(cols[i2] - cols[i], gc.params.pair_period(i)):
            return False
    return True


def is_toroidal_k_separator_shape(Jstar: int, cols: Sequence[int]) -> bool:
    """One column per row, cyclically consecutive rows in consecutive columns of ``C*``."""
    k = len(cols)
    return all(_near(cols[(i + 1) % k] - cols[i], Jstar) for i in range(k))


def toroidal_separators_in_star_closure(p: GridParams | GridCompression, W: Iterable[Coord]) -> list[list[Coord]]:
    """All k-vertex separators of the consecutive-column shape inside ``[W]`` under ``~*``.

    Anchors on the row-0 class members and extends row by row.
    """
    gc = _gc(p)
    W = list(W)
    cols = one_per_row(gc.k, W)
    if cols is None:
        return []
    found = []
    m0 = gc.period(0)
    for c0 in range(cols[0] % m0, gc.Jstar, m0):
        partial = [[c0]]
        for i in range(1, gc.k):
            m = gc.period(i)
            nxt = []
            for seq in partial:
                for d in (-1, 0, 1):
                    c = (seq[-1] + d) % gc.Jstar
                    if (c - cols[i]) % m == 0:
                        nxt.append(seq + [c])
            partial = nxt
        for seq in partial:
            if _near(seq[0] - seq[-1], gc.Jstar):
                found.append([(i, c) for i, c in enumerate(seq)])
    return found


class SeparatorUniquenessError(RuntimeError):
    pass


def unique_toroidal_separator(p: GridParams | GridCompression, W: Iterable[Coord]) -> list[Coord] | None:
    """``S_W``: the k-vertex toroidal vertical separator inside ``[W]`` under ``~*``."""
    gc = _gc(p)
    W = list(W)
    if len(W) > gc.k:
        raise ValueError(f"cop position has {len(W)} > k = {gc.k} vertices")
    found = toroidal_separators_in_star_closure(gc, W)
    if len(found) > 1:
        raise SeparatorUniquenessError(f"{len(found)} candidate separators for {sorted(W)}")
    return found[0] if found else None


def distance_to_end(p: GridParams | GridCompression, S: Iterable[Coord], side: str) -> int:
    """Distance in ``C*`` between column 0 (``side='first'``) or column ``J-1``
    (``side='last'``) and the vertex set ``S``.

    Every row meets the end column, so the distance is the cyclic column gap.
    """
    gc = _gc(p)
    end = 0 if side == "first" else gc.J - 1
    best = None
    for _, c in S:
        d = (c - end) % gc.Jstar
        d = min(d, gc.Jstar - d)
        best = d if best is None else min(best, d)
    if best is None:
        raise ValueError("empty set")
    return best


# ---- periodic paths and their twistings ------------------------------------


@dataclass
class PeriodicPath:
    vertices: list[Coord]
    q: int


def rows_period(p: GridParams | GridCompression, rows: Iterable[int]) -> int:
    gc = _gc(p)
    return functools.reduce(math.gcd, (gc.period(i) for i in set(rows)))


def path_problems(p: GridParams | GridCompression, path: PeriodicPath) -> list[str]:
    """Everything that stops ``path`` from being a q-periodic path in ``C``."""
    gc = _gc(p)
    P, q = path.vertices, path.q
    problems = []
    if len(P) < 2:
        return ["path needs at least two vertices"]
    if len(set(P)) != len(P):
        problems.append("path repeats a vertex")
    for u, v in zip(P, P[1:]):
        if not (gc.in_C(u) and gc.in_C(v)) or not gc.base.has_edge(gc.index(u), gc.index(v)):
            problems.append(f"{u} - {v} is not an edge of C")
            break
    if not gc.is_singleton(P[0]) or not gc.is_singleton(P[-1]):
        problems.append("path ends must lie in singleton classes")
    if problems:
        return problems
    pos = {u: t for t, u in enumerate(P)}
    for t in range(len(P) - 1):
        u = P[t]
        if gc.is_singleton(u):
            continue
        i, j = u
        nxt = P[t + 1]
        for c in range(j % q, gc.J, q):
            v = (i, c)
            if gc.is_singleton(v):
                continue
            s = pos.get(v)
            if s is None or s >= len(P) - 1:
                problems.append(f"{v} is q-equivalent to {u} but not followed on the path")
                return problems
            nv = P[s + 1]
            if not approx(q, nxt, nv):
                problems.append(f"successors of {u} and {v} are not q-equivalent")
                return problems
    return problems


def path_twisting(gc: GridCompression, P: Sequence[Coord]) -> Twisting:
    """``T_P``: every interior vertex points at both of its path neighbors."""
    arcs = []
    for t in range(1, len(P) - 1):
        u = gc.index(P[t])
        arcs.append((u, gc.index(P[t - 1])))
        arcs.append((u, gc.index(P[t + 1])))
    return Twisting.of(arcs)


def periodic_path_twisting(p: GridParams | GridCompression, path: PeriodicPath) -> Twisting:
    gc = _gc(p)
    problems = path_problems(gc, path)
    if problems:
        raise ValueError("; ".join(problems))
    return path_twisting(gc, path.vertices)


# ---- end-to-end twistings ---------------------------------------------------


def twisting_arc_masks(G: OrderedBaseGraph, T: Twisting) -> dict[int, int]:
    from .base_graphs import neighbor_index

    masks: dict[int, int] = {}
    for u, v in T.arcs:
        masks[u] = masks.get(u, 0) | (1 << (neighbor_index(G, u, v) - 1))
    return masks


def grid_twisting_compressible(gc: GridCompression, T: Twisting) -> bool:
    """Compressibility of a twisting of ``C``, touching only classes with moved members."""
    masks = twisting_arc_masks(gc.base, T)
    seen_classes = {gc.class_rep(gc.coord(u)) for u in masks}
    for rep in seen_classes:
        pattern = None
        for member in gc.class_members(rep):
            mask = masks.get(gc.index(member), 0)
            if pattern is None:
                pattern = mask
            elif mask != pattern:
                return False
    return True


def column_edge(gc: GridCompression, e: tuple[int, int], column: int) -> bool:
    (_, j1), (_, j2) = gc.coord(e[0]), gc.coord(e[1])
    return j1 == j2 == column


def end_to_end_problems(p: GridParams | GridCompression, W: Iterable[Coord], T: Twisting) -> list[str]:
    """Independent validity check of an end-to-end twisting avoiding ``W``."""
    gc = _gc(p)
    problems = []
    if not T.is_valid(gc.base):
        problems.append("not a twisting of C (odd out-degree or non-edge arc)")
    if not grid_twisting_compressible(gc, T):
        problems.append("not compressible")
    twisted = T.twisted_edges()
    first = [e for e in twisted if column_edge(gc, e, 0)]
    last = [e for e in twisted if column_edge(gc, e, gc.J - 1)]
    if len(first) != 1 or len(last) != 1 or len(twisted) != 2:
        problems.append(f"twists {len(twisted)} edges ({len(first)} in the first column, {len(last)} in the last)")
    moved = T.moved_vertices()
    guarded = {gc.index(u) for u in equiv_closure(gc, W)}
    if moved & guarded:
        problems.append("moves a guarded vertex")
    return problems


def _column_neighbor(gc: GridCompression, u: Coord, avoid: set[Coord]) -> Coord:
    i, j = u
    for r in sorted({(i - 1) % gc.k, (i + 1) % gc.k}):
        if (r, j) not in avoid:
            return (r, j)
    raise ValueError(f"no free column neighbor of {u}")


def end_path(gc: GridCompression, P: Sequence[Coord]) -> list[Coord]:
    """Cut ``P`` to run from its last column-0 visit to the next last-column
    visit, then extend both ends by a vertical step so that the first and last
    path edges are column edges."""
    P = list(P)
    if P[0][1] != 0:
        P.reverse()
    last_col = gc.J - 1
    end = next(t for t, u in enumerate(P) if u[1] == last_col)
    start = max(t for t, u in enumerate(P[: end + 1]) if u[1] == 0)
    core = P[start:end + 1]
    on_path = set(core)
    head = _column_neighbor(gc, core[0], on_path)
    on_path.add(head)
    tail = _column_neighbor(gc, core[-1], on_path)
    return [head] + core + [tail]


def _row_path(gc: GridCompression, i: int) -> list[Coord]:
    return [(i, j) for j in range(gc.J)]


def _weave_path(gc: GridCompression, i: int, j: int) -> list[Coord]:
    """Row ``i`` detouring through row ``i+1`` around every column congruent to
    ``j`` modulo ``fk * p_{i+1}``."""
    q = gc.params.pair_period(i)
    i2 = (i + 1) % gc.k
    path = []
    for c in range(gc.J):
        r = (j - c) % q
        if r == 1:  # column just before a blocked one: step down
            path += [(i, c), (i2, c)]
        elif r == 0:
            path.append((i2, c))
        elif r == q - 1:  # just after: come back up
            path += [(i2, c), (i, c)]
        else:
            path.append((i, c))
    # trim dangling detours at the borders
    while path[0][0] == i2 and len(path) > 1 and path[1][1] == path[0][1]:
        path.pop(0)
    while path[-1][0] == i2 and len(path) > 1 and path[-2][1] == path[-1][1]:
        path.pop()
    return path


def _vertical_segment(gc: GridCompression, j: int, i_from: int, i_to: int) -> list[Coord]:
    """Shortest path from ``(i_from, j)`` to ``(i_to, j)`` around column ``j``; ties go down."""
    down = (i_to - i_from) % gc.k
    up = (i_from - i_to) % gc.k
    step = 1 if down <= up else -1
    seg = [(i_from, j)]
    r = i_from
    while r != i_to:
        r = (r + step) % gc.k
        seg.append((r, j))
    return seg


def _shifted_chain(gc: GridCompression, blocked: np.ndarray) -> list[Coord] | None:
    fk = gc.params.fk
    P = _bfs_path(blocked, wrap_rows=True)
    if P is None:
        return None
    free_cols = [c for c in range(fk) if not blocked[:, c].any()]
    if not free_cols:
        return None
    j = free_cols[0]
    b = next(t for t, u in enumerate(P) if u[1] == j + fk)
    a = max(t for t in range(b) if P[t][1] == j)
    sub = P[a:b + 1]
    i_start, i_end = sub[0][0], sub[-1][0]
    Q = _vertical_segment(gc, j, i_end, i_start)[:-1] + sub
    # Q runs from (i_end, j) to (i_end, j + fk); chain shifted copies across C
    chain: list[Coord] = []
    z_lo = -(j // fk) - 2
    z_hi = (gc.J - j) // fk + 2
    for z in range(z_lo, z_hi + 1):
        copy = [(r, c + z * fk) for r, c in Q]
        chain.extend(copy if not chain else copy[1:])
    end = next(t for t, u in enumerate(chain) if u[1] == gc.J - 1)
    start = max(t for t in range(end) if chain[t][1] == 0)
    return chain[start:end + 1]


@dataclass
class EndToEnd:
    twisting: Twisting
    path: list[Coord]
    branch: str
    first_edge: tuple[int, int] = field(default=(0, 0))
    last_edge: tuple[int, int] = field(default=(0, 0))


def end_to_end_twisting(p: GridParams | GridCompression, W: Iterable[Coord]) -> EndToEnd | None:
    """An end-to-end twisting avoiding ``W``, or None if ``W`` is a pseudo-separator.

    Branches: a cop-free row; a row pair whose closure does not separate
    (weave through the two rows); otherwise a path avoiding the ``~_fk``
    closure, cut to span ``fk`` columns and repeated every ``fk`` columns.
    """
    gc = _gc(p)
    W = list(W)
    if len(W) > gc.k:
        raise ValueError(f"cop position has {len(W)} > k = {gc.k} vertices")
    for u in W:
        _check_coord(u, gc.k, gc.J)
    rows = {i for i, _ in W}
    path: list[Coord] | None = None
    branch = ""
    free_rows = [i for i in range(gc.k) if i not in rows]
    if free_rows:
        path, branch = _row_path(gc, free_rows[0]), "row"
    else:
        cols = one_per_row(gc.k, W)
        for i in range(gc.k):
            if not pairwise_separates_rows(gc, W, i):
                path, branch = _weave_path(gc, i, cols[i]), "weave"
                break
        else:
            blocked = approx_closure_mask(gc, gc.params.fk, W)
            if ends_connected(blocked, wrap_rows=True):
                path, branch = _shifted_chain(gc, blocked), "shifted"
    if path is None:
        return None
    full = end_path(gc, path)
    T = path_twisting(gc, full)
    first = edge_key(gc.index(full[0]), gc.index(full[1]))
    last = edge_key(gc.index(full[-2]), gc.index(full[-1]))
    return EndToEnd(T, full, branch, first, last)


def shifted_chain_twisting(p: GridParams | GridCompression, W: Iterable[Coord]) -> EndToEnd | None:
    """The repeated-segment construction on its own, for any ``W``.

    For ``|W| <= k`` a pairwise separator already makes the ``~_fk`` closure
    separate, so :func:`end_to_end_twisting` never reaches this branch; it is
    exposed so the construction can be exercised on larger sets.
    """
    gc = _gc(p)
    blocked = approx_closure_mask(gc, gc.params.fk, list(W))
    if not ends_connected(blocked, wrap_rows=True):
        return None
    path = _shifted_chain(gc, blocked)
    if path is None:
        return None
    full = end_path(gc, path)
    T = path_twisting(gc, full)
    first = edge_key(gc.index(full[0]), gc.index(full[1]))
    last = edge_key(gc.index(full[-2]), gc.index(full[-1]))
    return EndToEnd(T, full, "shifted", first, last)
