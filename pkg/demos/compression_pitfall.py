"""Compressing can turn isomorphic CFI graphs into non-isomorphic ones.

On a 6-cycle with opposite vertices 0 and 3 identified, the assignments
f = 0 and g = {01, 34} have the same parity, so the plain CFI graphs are
isomorphic. Every isomorphism needs a twisting, and a compressible one
would have to treat vertices 0 and 3 alike, which the linear system rules
out. The compressed graphs therefore differ.

    python3 demos/compression_pitfall.py
"""

from __future__ import annotations

from wlcompress.base_graphs import OrderedBaseGraph
from wlcompress.cfi import EdgeAssignment, brute_force_isomorphic, build_cfi, find_twisting
from wlcompress.compression import Compression, build_compressed, compressed_isomorphic_fixing


def main() -> None:
    G = OrderedBaseGraph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    comp = Compression.from_partition(6, [[0, 3], [1], [2], [4], [5]])
    f = EdgeAssignment.zero(G)
    g = EdgeAssignment.from_ones(G, [(0, 1), (3, 4)])

    T = find_twisting(G, f, g)
    print("plain twisting:", sorted(T.arcs) if T is not None else None)
    print("compressible twisting:", compressed_isomorphic_fixing(G, comp, f, g))

    cfi = brute_force_isomorphic(build_cfi(G, f).graph, build_cfi(G, g).graph)
    A, B = build_compressed(G, f, comp).graph, build_compressed(G, g, comp).graph
    print(f"CFI graphs isomorphic: {cfi}")
    print(f"compressed graphs ({A.n} vertices each) isomorphic: {brute_force_isomorphic(A, B)}")


if __name__ == "__main__":
    main()
