"""Random grids for property tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .grid import Branch, Droop, GridSpec, Power, Resistance, Voltage


def random_grid(
    n_nodes: int,
    rng: np.random.Generator,
    extra_branches: int = 0,
    n_slack: int = 1,
    r_range: tuple[float, float] = (0.001, 0.05),
    p_range: tuple[float, float] = (-1.0, 0.5),
) -> GridSpec:
    """Connected grid on nodes ``1..n_nodes``.

    Nodes ``1..n_slack`` are slack buses at 1.0 pu and node ``n_slack + 1``
    is always a constant-power terminal; the rest draw uniformly from
    power, step, resistive load and droop. A random spanning tree is laid
    down first, then ``extra_branches`` chords (possibly parallel lines).
    """
    if n_nodes < n_slack + 1:
        raise ValueError("need room for at least one constant-power node")
    nodes = []
    for i in range(1, n_nodes + 1):
        if i <= n_slack:
            kind = Voltage(1.0)
        elif i == n_slack + 1:
            kind = Power(float(rng.uniform(*p_range)))
        else:
            choice = rng.integers(4)
            if choice == 0:
                kind = Power(float(rng.uniform(*p_range)))
            elif choice == 1:
                kind = Resistance(0.0)
            elif choice == 2:
                kind = Resistance(float(rng.uniform(0.1, 2.0)))
            else:
                kind = Droop(float(rng.uniform(*p_range)), float(rng.uniform(0.1, 2.0)))
        nodes.append((i, kind))

    def resistance():
        return float(rng.uniform(*r_range))

    branches = []
    for i in range(2, n_nodes + 1):
        branches.append(Branch(int(rng.integers(1, i)), i, resistance()))
    for _ in range(extra_branches):
        a, b = rng.choice(np.arange(1, n_nodes + 1), size=2, replace=False)
        branches.append(Branch(int(a), int(b), resistance()))
    return GridSpec(tuple(nodes), tuple(branches), name=f"random-{n_nodes}")


def radial_feeder(n_loads: int, rng: np.random.Generator, r_range=(0.0005, 0.003), p_range=(-0.05, 0.0)) -> GridSpec:
    """Long feeder: one slack, ``n_loads`` constant-power nodes on a random tree."""
    nodes = [(1, Voltage(1.0))] + [
        (i, Power(float(rng.uniform(*p_range)))) for i in range(2, n_loads + 2)
    ]
    branches = [
        Branch(int(rng.integers(max(1, i - 4), i)), i, float(rng.uniform(*r_range)))
        for i in range(2, n_loads + 2)
    ]
    return GridSpec(tuple(nodes), tuple(branches), name=f"feeder-{n_loads}")
