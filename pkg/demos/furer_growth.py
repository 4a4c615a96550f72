"""How many 2-WL rounds it takes to separate the two CFI graphs over a 2 x n grid.

The pair differs by one twisted edge in the first column. The round at which
the color histograms first differ grows linearly in n, which is the
baseline the compressed construction improves on.

    python3 demos/furer_growth.py [n ...]
"""

from __future__ import annotations

import sys
import time

from wlcompress.experiments import build_pair
from wlcompress.wl import wl_distinguish


def main(ns: list[int]) -> None:
    print(f"{'n':>4} {'vertices':>9} {'round':>6} {'seconds':>8}")
    for n in ns:
        A, B, info = build_pair({"family": "grid", "shape": f"2x{n}", "twist": "first-column"})
        start = time.perf_counter()
        res = wl_distinguish(A, B, 2)
        print(f"{n:>4} {A.n:>9} {res.round:>6} {time.perf_counter() - start:>8.2f}")


if __name__ == "__main__":
    main([int(x) for x in sys.argv[1:]] or [4, 8, 12, 16])
