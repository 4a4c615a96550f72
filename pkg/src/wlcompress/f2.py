"""Linear systems over F2 with rows stored as int bitmasks.

Bit ``i`` of a row mask is the coefficient of variable ``i``. Solutions are
returned as bitmasks too.
"""

from __future__ import annotations

from typing import Iterable


def solve(rows: Iterable[tuple[int, int]], nvars: int) -> int | None:
    """Solve ``mask . x = rhs`` for every ``(mask, rhs)`` row.

    Returns the lexicographically first solution in variable order
    ``x_0, x_1, ...`` (with 0 < 1), or ``None`` if the system is inconsistent.

    Each row is reduced on its highest set bit, so a pivot variable only
    depends on lower-indexed variables. Setting every free variable to 0 and
    back-substituting in increasing pivot order then yields the lex-first
    solution, since free variables can be chosen independently.
    """
    pivots: dict[int, tuple[int, int]] = {}
    for mask, rhs in rows:
        if mask >> nvars:
            raise ValueError("row mentions a variable outside the system")
        rhs &= 1
        while mask:
            top = mask.bit_length() - 1
            hit = pivots.get(top)
            if hit is None:
                pivots[top] = (mask, rhs)
                break
            mask ^= hit[0]
            rhs ^= hit[1]
        else:
            if rhs:
                return None
    x = 0
    for top in sorted(pivots):
        mask, rhs = pivots[top]
        rest = mask & ~(1 << top)
        value = rhs ^ ((rest & x).bit_count() & 1)
        if value:
            x |= 1 << top
    return x


def rank(rows: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    for mask in rows:
        while mask:
            top = mask.bit_length() - 1
            if top not in pivots:
                pivots[top] = mask
                break
            mask ^= pivots[top]
    return len(pivots)


def nullspace(rows: Iterable[int], nvars: int) -> list[int]:
    """Basis of ``{x : mask . x = 0 for every row mask}``."""
    pivots: dict[int, int] = {}  # pivot column -> fully reduced row
    for mask in rows:
        for col, row in pivots.items():
            if (mask >> col) & 1:
                mask ^= row
        if not mask:
            continue
        col = (mask & -mask).bit_length() - 1
        for c in list(pivots):
            if (pivots[c] >> col) & 1:
                pivots[c] ^= mask
        pivots[col] = mask
    basis = []
    for free in range(nvars):
        if free in pivots:
            continue
        x = 1 << free
        for col, row in pivots.items():
            if (row >> free) & 1:
                x |= 1 << col
        basis.append(x)
    return basis


class ReducedBasis:
    """Incrementally echelonized span; ``reduce`` gives a canonical coset representative."""

    def __init__(self, vectors: Iterable[int] = ()) -> None:
        self.pivots: dict[int, int] = {}
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> int:
        out = 0
        while v:
            top = v.bit_length() - 1
            row = self.pivots.get(top)
            if row is None:
                out |= 1 << top
                v &= ~(1 << top)
            else:
                v ^= row
        return out

    def add(self, v: int) -> bool:
        while v:
            top = v.bit_length() - 1
            row = self.pivots.get(top)
            if row is None:
                self.pivots[top] = v
                return True
            v ^= row
        return False

    def __len__(self) -> int:
        return len(self.pivots)

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0
