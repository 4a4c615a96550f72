"""One game of the compressed cops-and-robber game at k = 3, w = 16.

Four cops follow a named strategy. The robber follows the side-hopping
policy, and every robber move is re-checked for legality. The demo prints
the first rounds and a summary.

    python3 demos/robber_game.py [strategy] [seed] [rounds]
"""

from __future__ import annotations

import sys

from wlcompress import games
from wlcompress import grid_compression as gcm
from wlcompress.base_graphs import build_params


def main(strategy: str = "separator", seed: int = 0, rounds: int | None = None) -> None:
    gc = gcm.grid(build_params(3, 16))
    tr = games.simulate_compressed_game(gc, games.make_strategy(strategy, gc, seed), max_rounds=rounds)
    for rec in tr.rounds[:12]:
        inv = rec.invariants
        print(
            f"round {rec.round:>3}: cop -> {rec.cop_move['dest']}, robber {rec.case:>5} "
            f"{rec.old_edge} -> {rec.new_edge}, legal {rec.legal}, side {inv['side']}, "
            f"separator distance {inv['separator_distance']}"
        )
    s = tr.summary()
    print(f"... {s['rounds_played']} rounds, outcome {s['outcome']}, jumps {s['jumps']}, invariant failures {s['invariant_failures']}")


if __name__ == "__main__":
    args = sys.argv[1:]
    main(args[0] if args else "separator", int(args[1]) if len(args) > 1 else 0, int(args[2]) if len(args) > 2 else None)
