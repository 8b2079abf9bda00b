"""Empirical cost of the emulated algorithm against grid size."""
from __future__ import annotations

import time

import numpy as np

from .blockenc import decompose
from .lattice import Field, GridSpec, StateVector, VelocityField
from .lcu import build_plan, lcu_step
from .stencil import StabilityParams, build_time_marching_matrix


def benchmark(sizes, steps: int = 10, dims: int = 2, r_h: float = 0.1, r_a: float = 0.1,
              tol: float = 1e-10) -> list[dict]:
    """Time ``steps`` LCU steps per grid size at a fixed physical horizon.

    ``D`` and the velocity are fixed physically and chosen so that the smallest
    grid runs at ``(r_a, r_h)`` for exactly ``steps`` steps. Holding ``r_h``
    fixed forces ``dt ~ dx^2``, so the step count needed for the same horizon
    grows as ``N_x^2``.
    """
    sizes = sorted(int(s) for s in sizes)
    dx0 = 2 * np.pi / sizes[0]
    dt0 = 1.0
    diffusivity = r_h * dx0**2 / dt0
    speed = r_a * dx0 / dt0 / dims  # per component, so sum_j |v_j| dt/dx = r_a
    horizon = steps * dt0
    rows = []
    for n_x in sizes:
        grid = GridSpec.cubic(dims, n_x)
        dt = r_h * grid.spacing**2 / diffusivity
        vel = VelocityField.constant(grid, speed)
        params = StabilityParams.from_velocity(vel, dt, diffusivity)
        A = build_time_marching_matrix(grid, params)
        plan = build_plan(decompose(A, params, grid), dims, tol)
        x = grid.coordinates()[0]
        state = StateVector.prepare(Field(grid, 1 + np.sin(x)), plan.n_ancilla)
        t0 = time.perf_counter()
        plan.propagator.matvecs = 0
        for _ in range(steps):
            state, _ = lcu_step(state, plan)
        elapsed = time.perf_counter() - t0
        n_steps_needed = int(round(horizon / dt))
        per_step = elapsed / steps
        rows.append({
            "n_x": n_x,
            "N": grid.size,
            "qubits": grid.n_qubits + plan.n_ancilla,
            "dt": dt,
            "steps_for_horizon": n_steps_needed,
            "matvecs_per_step": plan.propagator.matvecs // steps,
            "seconds_per_step": per_step,
            "seconds_for_horizon": per_step * n_steps_needed,
        })
    return rows


def format_table(rows: list[dict]) -> str:
    cols = ["n_x", "N", "qubits", "steps_for_horizon", "matvecs_per_step",
            "seconds_per_step", "seconds_for_horizon"]
    lines = ["  ".join(f"{c:>18}" for c in cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r[c]
            cells.append(f"{v:>18.4e}" if isinstance(v, float) else f"{v:>18d}")
        lines.append("  ".join(cells))
    return "\n".join(lines)
