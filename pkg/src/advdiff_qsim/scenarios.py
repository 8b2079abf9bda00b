"""Built-in experiments and error metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ShapeError
from .lattice import Boundary, Field, GridSpec, VelocityField
from .lcu import ancilla_count
from .stencil import StabilityParams


def taylor_green_velocity(grid: GridSpec) -> VelocityField:
    """``v = (sin x cos y, -cos x sin y)`` sampled at the grid points."""
    if grid.dims != 2:
        raise ConfigurationError(f"Taylor-Green field is two-dimensional, grid has d={grid.dims}")
    x, y = grid.coordinates()
    return VelocityField(grid, (np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)))


def initial_condition_sin(grid: GridSpec) -> Field:
    """``sin(x + y) + 1`` scaled to unit 2-norm."""
    if grid.dims != 2:
        raise ConfigurationError(f"initial condition is two-dimensional, grid has d={grid.dims}")
    x, y = grid.coordinates()
    return Field(grid, np.sin(x + y) + 1).normalized()


def initial_condition_bump(grid: GridSpec) -> Field:
    """Positive off-centre Gaussian on a unit background, unit 2-norm."""
    r2 = 0
    for c, n in zip(grid.coordinates(), grid.shape):
        length = n * grid.spacing
        r2 = r2 + (c - 0.3 * length) ** 2 / (0.1 * length) ** 2
    return Field(grid, 1 + np.exp(-0.5 * r2)).normalized()


def mse_metric(quantum: Field, classical: Field) -> float:
    """Mean squared deviation from the normalized classical field, in % of ``max c^2``."""
    if quantum.values.shape != classical.values.shape:
        raise ShapeError("quantum and classical snapshots have different sizes")
    q = quantum.values
    c = classical.normalized().values
    return float(np.mean((q - c) ** 2) / np.max(c**2) * 100)


def rms_speed(velocity: VelocityField) -> float:
    v = velocity.as_array()
    return float(math.sqrt(np.mean(np.sum(v**2, axis=0))))


def peclet(velocity: VelocityField, diffusivity: float, length: float = math.pi) -> float:
    if not diffusivity > 0:
        raise ConfigurationError("Peclet number undefined without diffusion (D = 0)")
    return rms_speed(velocity) * length / diffusivity


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: GridSpec
    velocity: VelocityField
    field0: Field
    params: StabilityParams
    n_steps: int

    @property
    def n_ancilla(self) -> int:
        return ancilla_count(self.grid.dims)

    @property
    def n_qubits(self) -> int:
        return self.grid.n_qubits + self.n_ancilla

    def describe(self) -> dict:
        out = {
            "scenario": self.name,
            "shape": list(self.grid.shape),
            "dx": self.grid.spacing,
            "dt": self.params.dt,
            "diffusivity": self.params.diffusivity,
            "max_r_a": self.params.max_r_a,
            "r_h": self.params.r_h,
            "n_steps": self.n_steps,
            "system_qubits": self.grid.n_qubits,
            "ancilla_qubits": self.n_ancilla,
            "total_qubits": self.n_qubits,
        }
        if self.params.diffusivity > 0:
            out["peclet"] = peclet(self.velocity, self.params.diffusivity)
        return out


def taylor_green(n_x: int = 64, n_steps: int = 1400, max_r_a: float = 0.1, r_h: float = 0.1) -> Scenario:
    """Passive scalar in a steady Taylor-Green vortex on ``[0, 2 pi)^2``.

    The defaults are the 64x64, 1400-step reference case.
    """
    grid = GridSpec.cubic(2, n_x)
    vel = taylor_green_velocity(grid)
    params = StabilityParams.from_ratios(vel, max_r_a, r_h)
    return Scenario("taylor-green", grid, vel, initial_condition_sin(grid), params, n_steps)


def heat(n_x: int = 32, n_steps: int = 200, r_h: float = 0.1, dims: int = 1,
         boundary=Boundary.PERIODIC) -> Scenario:
    """Pure diffusion of an off-centre bump; the only scenario that takes reflecting boundaries."""
    grid = GridSpec.cubic(dims, n_x, boundary=boundary)
    vel = VelocityField.zero(grid)
    params = StabilityParams.from_ratios(vel, 0.0, r_h)
    return Scenario("heat", grid, vel, initial_condition_bump(grid), params, n_steps)


SCENARIOS = {"taylor-green": taylor_green, "heat": heat}


def check_reference_case(s: Scenario):
    """Assert the 64x64 reference parameter set; raises ``ConfigurationError`` on mismatch."""
    problems = []
    if s.grid.shape != (64, 64):
        problems.append(f"grid {s.grid.shape} != (64, 64)")
    if s.grid.n_qubits != 12 or s.n_ancilla != 3:
        problems.append(f"qubits {s.grid.n_qubits}+{s.n_ancilla} != 12+3")
    if s.n_steps != 1400:
        problems.append(f"N_T {s.n_steps} != 1400")
    if not math.isclose(s.params.max_r_a, 0.1, rel_tol=1e-12):
        problems.append(f"max r_a {s.params.max_r_a} != 0.1")
    if not math.isclose(s.params.r_h, 0.1, rel_tol=1e-12):
        problems.append(f"r_h {s.params.r_h} != 0.1")
    if problems:
        raise ConfigurationError("; ".join(problems))
