"""A walk through the compressed cylindrical grid for k = 3, w = 16.

Prints the parameters, the per-row class census, and then classifies a few
cop positions: which ones block every first-to-last-column path after
closing them under the periodic equivalences, and which end-to-end
twisting the robber would use otherwise.

    python3 demos/grid_tour.py
"""

from __future__ import annotations

from wlcompress import grid_compression as gcm
from wlcompress.base_graphs import build_params
from wlcompress.compression import compressed_vertex_count


def main() -> None:
    p = build_params(3, 16)
    gc = gcm.grid(p)
    print(f"periods {list(p.periods)}, fk {p.fk}, |J| {p.J_len}, |J*| {p.Jstar_len}, lambdas {list(p.lambdas)}")
    census = gcm.class_census(gc)
    print(f"classes per row {census}, total {sum(census)}")
    print(f"compressed CFI vertices {compressed_vertex_count(gc.base, gc.compression)}")

    positions = {
        "no cops": [],
        "aligned column": [(0, 2500), (1, 2500), (2, 2500)],
        "staircase": [(0, 2000), (1, 2001), (2, 2000)],
        "gap of five": [(0, 2000), (1, 2005), (2, 2000)],
        "two rows": [(0, 300), (1, 300)],
    }
    for name, W in positions.items():
        pseudo = gcm.is_pseudo_separator(gc, W)
        S = gcm.unique_toroidal_separator(gc, W) if W else None
        e2e = gcm.end_to_end_twisting(gc, W)
        route = "none" if e2e is None else f"{e2e.branch} path of {len(e2e.path)} vertices"
        print(f"{name:>15}: pseudo-separator {pseudo!s:5}  separator {S}  end-to-end {route}")


if __name__ == "__main__":
    main()
