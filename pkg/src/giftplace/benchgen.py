"""Synthetic Bookshelf benchmark generator.

Produces desk-scale designs with a known-good structure: a grid "mesh" of
2-pin nets over unit movable cells (guaranteeing connectivity), a configurable
dose of random higher-fanout nets, and fixed IO terminals on the region
periphery, each tied to a cell from the matching side of the logical grid so
that good placements have a geometric meaning.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .netlist import Cell, Design, Net, Pin, Region, Row

log = logging.getLogger(__name__)

DEFAULT_FANOUT: dict[int, float] = {2: 0.35, 3: 0.25, 4: 0.15, 5: 0.10, 6: 0.08, 7: 0.05, 8: 0.02}


def generate(
    cells: int,
    rows: int | None = None,
    cols: int | None = None,
    fanout: dict[int, float] | None = None,
    io_count: int | None = None,
    long_range_fraction: float = 0.15,
    utilization: float = 0.70,
    seed: int = 0,
) -> Design:
    """Build an in-memory synthetic design with ``cells`` movable unit cells."""
    if cells < 4:
        raise ValueError(f"need at least 4 cells, got {cells}")
    if not 0.0 < utilization <= 1.0:
        raise ValueError(f"utilization must be in (0, 1], got {utilization}")
    rng = np.random.default_rng(seed)

    cols = cols or math.ceil(math.sqrt(cells))
    rows = rows or math.ceil(cells / cols)
    if rows * cols < cells:
        raise ValueError(f"{rows} rows x {cols} cols cannot hold {cells} cells")
    fanout = fanout or DEFAULT_FANOUT
    if any(d < 2 for d in fanout):
        raise ValueError("fanout degrees must be >= 2")

    side = math.ceil(math.sqrt(cells / utilization))
    half = side / 2.0
    region = Region(
        xmin=-half, ymin=-half, xmax=half, ymax=half,
        rows=[Row(y=-half + r, height=1.0, x=-half, num_sites=side) for r in range(side)],
    )

    all_cells = [Cell(id=i, name=f"c{i}", width=1.0, height=1.0) for i in range(cells)]
    nets: list[Net] = []

    def add_net(members: np.ndarray | list[int]) -> None:
        nets.append(Net(id=len(nets), name=f"n{len(nets)}", pins=[Pin(cell=int(c)) for c in members]))

    # mesh: right and up neighbors on the logical grid
    for i in range(cells):
        r, c = divmod(i, cols)
        if c + 1 < cols and i + 1 < cells:
            add_net([i, i + 1])
        if i + cols < cells:
            add_net([i, i + cols])

    # random long-range nets with the requested fanout profile
    degrees = np.array(sorted(fanout), dtype=np.int64)
    weights = np.array([fanout[int(d)] for d in degrees], dtype=float)
    weights = weights / weights.sum()
    n_long = int(round(long_range_fraction * cells))
    for _ in range(n_long):
        d = min(int(rng.choice(degrees, p=weights)), cells)
        add_net(rng.choice(cells, size=d, replace=False))

    # IO terminals on the periphery, attached to the matching grid side
    n_io = io_count if io_count is not None else max(4, int(round(2 * math.sqrt(cells))))
    grid_c = np.arange(cells) % cols
    grid_r = np.arange(cells) // cols
    side_cells = {
        "bottom": np.flatnonzero(grid_r <= max(rows // 3, 0)),
        "right": np.flatnonzero(grid_c >= cols - 1 - cols // 3),
        "top": np.flatnonzero(grid_r >= rows - 1 - rows // 3),
        "left": np.flatnonzero(grid_c <= max(cols // 3, 0)),
    }
    perimeter = 4.0 * side
    for j in range(n_io):
        t = (j + 0.5) * perimeter / n_io
        x, y, side_name = _ring_point(t, side, half)
        io_cell = Cell(
            id=len(all_cells), name=f"io{j}", width=1.0, height=1.0,
            fixed=True, fixed_pos=(x, y),
        )
        all_cells.append(io_cell)
        candidates = side_cells[side_name]
        target = int(rng.choice(candidates)) if candidates.size else int(rng.integers(cells))
        add_net([target, io_cell.id])

    design = Design(cells=all_cells, nets=nets, region=region)
    design.validate()
    return design


def _ring_point(t: float, side: int, half: float) -> tuple[float, float, str]:
    """Map arclength t along the region boundary to an inset pad center."""
    inset = 0.5  # pad centers half a unit inside the region
    if t < side:
        return -half + t, -half + inset, "bottom"
    t -= side
    if t < side:
        return half - inset, -half + t, "right"
    t -= side
    if t < side:
        return half - t, half - inset, "top"
    t -= side
    return -half + inset, half - t, "left"
