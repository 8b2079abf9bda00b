"""Explicit forward-Euler time-marching operator and the classical reference solver."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, ShapeError
from .lattice import Field, GridSpec, VelocityField, neighbor_index

# CSR matrices stand in for the row-compressed sparse operator type.
SparseOperator = sp.csr_array


@dataclass(frozen=True)
class StabilityParams:
    """Courant-type numbers of one explicit step.

    ``r_a[j, m] = v_j(x_m) * dt / dx`` and ``r_h = D * dt / dx**2``.
    """

    r_a: np.ndarray
    r_h: float
    dt: float
    diffusivity: float

    def __post_init__(self):
        r_a = np.atleast_2d(np.asarray(self.r_a, dtype=float))
        r_a.flags.writeable = False
        object.__setattr__(self, "r_a", r_a)
        d = r_a.shape[0]
        if not (self.r_h >= 0):
            raise ConfigurationError(f"r_h must be non-negative, got {self.r_h}")
        if not self.r_h < 1 / (2 * d):
            raise ConfigurationError(
                f"r_h = {self.r_h} violates the explicit stability limit r_h < 1/(2d) = {1 / (2 * d)}"
            )
        if not self.dt > 0:
            raise ConfigurationError(f"time step must be positive, got {self.dt}")

    @property
    def dims(self) -> int:
        return self.r_a.shape[0]

    @property
    def normalization(self) -> float:
        return 1.0 - 2 * self.dims * self.r_h

    @property
    def max_r_a(self) -> float:
        """``max_m sum_j |r_a[j, m]|``."""
        return float(np.abs(self.r_a).sum(axis=0).max())

    @property
    def equivalent_advection(self) -> float:
        """Equivalent advection number of the unit-diagonal operator."""
        return (2 * self.r_h + self.max_r_a) / self.normalization

    @classmethod
    def from_velocity(cls, velocity: VelocityField, dt: float, diffusivity: float) -> StabilityParams:
        dx = velocity.grid.spacing
        return cls(velocity.as_array() * dt / dx, diffusivity * dt / dx**2, dt, diffusivity)

    @classmethod
    def from_ratios(cls, velocity: VelocityField, max_r_a: float, r_h: float) -> StabilityParams:
        """Pick ``dt`` so that ``max(sum_j |v_j|) dt / dx == max_r_a``; ``D`` follows from ``r_h``.

        A zero velocity field gets a nominal ``dt = 1``.
        """
        dx = velocity.grid.spacing
        vmax = velocity.max_abs_sum()
        dt = max_r_a * dx / vmax if vmax > 0 else 1.0
        if not dt > 0:
            raise ConfigurationError(f"max r_a must be positive for a moving fluid, got {max_r_a}")
        return cls.from_velocity(velocity, dt, r_h * dx**2 / dt)

    @classmethod
    def uniform(cls, grid: GridSpec, r_a, r_h: float) -> StabilityParams:
        """Spatially constant advection numbers (scalar or one per dimension), ``dt = 1``."""
        r_a = np.broadcast_to(np.asarray(r_a, dtype=float), (grid.dims,))
        ra = np.repeat(r_a[:, None], grid.size, axis=1)
        return cls(ra, r_h, 1.0, r_h * grid.spacing**2)

    def check_grid(self, grid: GridSpec):
        if self.r_a.shape != (grid.dims, grid.size):
            raise ShapeError(f"advection numbers of shape {self.r_a.shape} do not fit grid {grid.shape}")

    def warn_if_classically_unstable(self):
        peak = float(np.abs(self.r_a).max())
        if peak > 1:
            warnings.warn(f"max |r_a| = {peak:.3g} > 1: explicit classical solver may be unstable",
                          RuntimeWarning, stacklevel=2)


def build_time_marching_matrix(grid: GridSpec, params: StabilityParams) -> SparseOperator:
    """Forward-Euler operator ``A = I + M dt`` for central differences on a periodic grid.

    Row ``m`` holds ``1 - 2 d r_h`` on the diagonal, ``r_h + r_a[j, m]/2`` at the
    ``-e_j`` neighbour and ``r_h - r_a[j, m]/2`` at the ``+e_j`` neighbour.
    """
    if not grid.is_periodic:
        raise ConfigurationError("time-marching operator needs a periodic grid; extend by reflection first")
    params.check_grid(grid)
    n = grid.size
    m = np.arange(n)
    rows = [m]
    cols = [m]
    vals = [np.full(n, params.normalization)]
    for j in range(grid.dims):
        ra = params.r_a[j]
        rows += [m, m]
        cols += [neighbor_index(m, j, -1, grid), neighbor_index(m, j, +1, grid)]
        vals += [params.r_h + 0.5 * ra, params.r_h - 0.5 * ra]
    coo = sp.coo_array((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    A = sp.csr_array(coo)
    A.sum_duplicates()
    A.sort_indices()
    return A


def classical_step(field: Field, A: SparseOperator) -> Field:
    if A.shape != (field.grid.size, field.grid.size):
        raise ShapeError(f"operator {A.shape} does not act on a field of {field.grid.size} points")
    return Field(field.grid, A @ field.values)


@dataclass
class ClassicalRun:
    snapshots: dict[int, Field]
    norms: np.ndarray
    final: Field
    sums: np.ndarray = field(repr=False, default=None)


def classical_run(field0: Field, A: SparseOperator, steps: int, snapshots=()) -> ClassicalRun:
    """Iterate ``phi <- A phi`` ``steps`` times.

    ``norms[t]`` is ``|phi_t|`` for ``t = 0..steps``; ``snapshots`` maps each
    requested step to its (unnormalized) field.
    """
    if A.shape != (field0.grid.size, field0.grid.size):
        raise ShapeError(f"operator {A.shape} does not act on a field of {field0.grid.size} points")
    if steps < 0:
        raise ConfigurationError("steps must be non-negative")
    wanted = set(int(s) for s in snapshots) | {0}
    phi = field0.values.copy()
    norms = np.empty(steps + 1)
    sums = np.empty(steps + 1)
    norms[0] = np.linalg.norm(phi)
    sums[0] = phi.sum()
    shots = {0: field0} if 0 in wanted else {}
    for t in range(1, steps + 1):
        phi = A @ phi
        norms[t] = np.linalg.norm(phi)
        sums[t] = phi.sum()
        if t in wanted:
            shots[t] = Field(field0.grid, phi)
    return ClassicalRun(shots, norms, Field(field0.grid, phi), sums)
