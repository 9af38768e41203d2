"""Shared fixtures: tiny hand-built designs, random-graph helpers, verdicts.

Acceptance tests append one PASS/FAIL line per criterion to VERDICTS; the
terminal-summary hook prints them after capture ends so they are visible in
every pytest run.
"""

from __future__ import annotations

import numpy as np
import pytest

from giftplace import (
    Cell,
    Design,
    Net,
    Pin,
    Region,
    SparseSymMatrix,
    from_coo,
)


def make_design(cells, nets, region) -> Design:
    design = Design(cells=cells, nets=nets, region=region)
    design.validate()
    return design


@pytest.fixture
def tri_design() -> Design:
    """Three movable unit cells joined by one 3-pin net, plus a 2-pin net."""
    cells = [
        Cell(id=0, name="a", width=1.0, height=1.0),
        Cell(id=1, name="b", width=1.0, height=1.0),
        Cell(id=2, name="c", width=1.0, height=1.0),
    ]
    nets = [
        Net(id=0, name="n0", pins=[Pin(0), Pin(1), Pin(2)]),
        Net(id=1, name="n1", pins=[Pin(0), Pin(1)]),
    ]
    return make_design(cells, nets, Region(0.0, 0.0, 10.0, 10.0))


@pytest.fixture
def anchored_design() -> Design:
    """Two movable cells between two fixed pads on a 12x4 strip."""
    cells = [
        Cell(id=0, name="p_left", width=1.0, height=1.0, fixed=True, fixed_pos=(1.0, 2.0)),
        Cell(id=1, name="m0", width=1.0, height=1.0),
        Cell(id=2, name="m1", width=1.0, height=1.0),
        Cell(id=3, name="p_right", width=1.0, height=1.0, fixed=True, fixed_pos=(11.0, 2.0)),
    ]
    nets = [
        Net(id=0, name="n0", pins=[Pin(0), Pin(1)]),
        Net(id=1, name="n1", pins=[Pin(1), Pin(2)]),
        Net(id=2, name="n2", pins=[Pin(2), Pin(3)]),
    ]
    return make_design(cells, nets, Region(0.0, 0.0, 12.0, 4.0))


def random_connected_graph(n: int, rng: np.random.Generator) -> SparseSymMatrix:
    """Random spanning tree plus extra edges, positive random weights."""
    rows, cols, vals = [], [], []
    order = rng.permutation(n)
    for i in range(1, n):
        a = order[i]
        b = order[rng.integers(0, i)]
        rows += [a, b]
        cols += [b, a]
        w = float(rng.uniform(0.1, 2.0))
        vals += [w, w]
    extra = max(n // 2, 1)
    for _ in range(extra):
        a, b = rng.integers(0, n, size=2)
        if a == b:
            continue
        w = float(rng.uniform(0.1, 2.0))
        rows += [int(a), int(b)]
        cols += [int(b), int(a)]
        vals += [w, w]
    return from_coo(n, rows, cols, vals)


@pytest.fixture
def graph_rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)
