"""Neumann and Dirichlet walls by mirror extension into a doubled periodic domain.

The mirror is whole-sample: ``(a, b, c, d)`` extends to ``(a, b, c, d, d, c, b, a)``
(even, insulated wall) or ``(a, b, c, d, -d, -c, -b, -a)`` (odd, zero-value wall).
The wall sits half a cell outside the first and last sample, so the doubled
length stays a power of two. Evolving the extension with the periodic scheme
preserves the parity whenever the velocity is mirrored consistently, and the
first half is the bounded-domain solution.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, ConsistencyError, ShapeError
from .lattice import Boundary, Field, GridSpec, VelocityField
from .stencil import StabilityParams

MAX_POINTS = 1 << 24


class Parity(enum.Enum):
    EVEN = 1
    ODD = -1

    @classmethod
    def for_boundary(cls, b: Boundary) -> Parity:
        if b is Boundary.NEUMANN_REFLECT:
            return cls.EVEN
        if b is Boundary.DIRICHLET_REFLECT:
            return cls.ODD
        raise ConfigurationError(f"{b.value} boundary has no reflection parity")

    @property
    def boundary(self) -> Boundary:
        return Boundary.NEUMANN_REFLECT if self is Parity.EVEN else Boundary.DIRICHLET_REFLECT


def _replace_dim(grid: GridSpec, dim: int, n: int, b: Boundary) -> GridSpec:
    shape = list(grid.shape)
    bnd = list(grid.boundary)
    shape[dim], bnd[dim] = n, b
    return GridSpec(tuple(shape), grid.spacing, tuple(bnd))


def _mirror(arr: np.ndarray, dim: int, sign: float) -> np.ndarray:
    return np.concatenate([arr, sign * np.flip(arr, axis=dim)], axis=dim)


def extend_reflect(field: Field, dim: int, parity: Parity | None = None,
                   max_points: int = MAX_POINTS) -> Field:
    """Double ``field`` along ``dim`` with even or odd mirror symmetry.

    ``parity`` defaults to the one implied by the grid's boundary flag and must
    agree with it when the flag is a reflecting one.
    """
    grid = field.grid
    if not 0 <= dim < grid.dims:
        raise IndexError(f"dimension {dim} outside [0, {grid.dims})")
    flag = grid.boundary[dim]
    if flag is Boundary.PERIODIC:
        if parity is None:
            raise ConfigurationError(f"dimension {dim} is periodic; give a parity to extend it anyway")
    else:
        implied = Parity.for_boundary(flag)
        if parity is not None and parity is not implied:
            raise ConfigurationError(f"{flag.value} boundary needs {implied.name} reflection, got {parity.name}")
        parity = implied
    if 2 * grid.size > max_points:
        raise ConfigurationError(f"extension to {2 * grid.size} points exceeds cap {max_points}")
    ext_grid = _replace_dim(grid, dim, 2 * grid.shape[dim], Boundary.PERIODIC)
    return Field.from_array(ext_grid, _mirror(field.as_array(), dim, parity.value))


def symmetry_defect(field_ext: Field, dim: int, parity: Parity) -> float:
    """Largest deviation from the mirror symmetry, relative to ``max |phi|``."""
    arr = field_ext.as_array()
    half = field_ext.grid.shape[dim] // 2
    lo = np.take(arr, range(half), axis=dim)
    hi = np.take(arr, range(half, 2 * half), axis=dim)
    scale = max(float(np.abs(arr).max()), np.finfo(float).tiny)
    return float(np.abs(hi - parity.value * np.flip(lo, axis=dim)).max()) / scale


def restrict(field_ext: Field, dim: int, parity: Parity, tol: float = 1e-8,
             normalize: bool = False) -> Field:
    """First half of ``field_ext`` along ``dim`` after checking the mirror symmetry.

    ``normalize`` rescales to unit 2-norm, as for a post-selected quantum state.
    """
    grid = field_ext.grid
    if grid.shape[dim] % 2:
        raise ShapeError(f"dimension {dim} of length {grid.shape[dim]} cannot be halved")
    defect = symmetry_defect(field_ext, dim, parity)
    if defect > tol:
        raise ConsistencyError(f"reflection symmetry along dim {dim} broken by {defect:.3e} (tol {tol:.1e})")
    half = grid.shape[dim] // 2
    sub = np.take(field_ext.as_array(), range(half), axis=dim)
    out = Field.from_array(_replace_dim(grid, dim, half, parity.boundary), sub)
    return out.normalized() if normalize else out


def interface_values(field_ext: Field, dim: int) -> np.ndarray:
    """Midpoint values at the two mirror walls (``[n-1]/[n]`` and ``[2n-1]/[0]`` pairs)."""
    arr = field_ext.as_array()
    n2 = field_ext.grid.shape[dim]
    half = n2 // 2
    pairs = [(half - 1, half), (n2 - 1, 0)]
    return np.stack([0.5 * (np.take(arr, a, axis=dim) + np.take(arr, b, axis=dim)) for a, b in pairs])


def extend_velocity(velocity: VelocityField, dim: int) -> VelocityField:
    """Mirror a velocity field: the normal component odd, tangential ones even."""
    grid = velocity.grid
    ext_grid = _replace_dim(grid, dim, 2 * grid.shape[dim], Boundary.PERIODIC)
    comps = []
    for j, c in enumerate(velocity.components):
        arr = c.reshape(grid.shape, order="F")
        comps.append(_mirror(arr, dim, -1.0 if j == dim else 1.0).reshape(-1, order="F"))
    return VelocityField(ext_grid, tuple(comps))


def check_mirror_symmetric(velocity_ext: VelocityField, dim: int, tol: float = 1e-12):
    """Reject an extended-domain velocity that would break the reflection parity."""
    for j, c in enumerate(velocity_ext.components):
        parity = Parity.ODD if j == dim else Parity.EVEN
        f = Field(velocity_ext.grid, c)
        if np.abs(c).max() > 0 and symmetry_defect(f, dim, parity) > tol:
            raise ConfigurationError(
                f"velocity component {j} is not {parity.name.lower()} about the dim-{dim} mirror")


@dataclass(frozen=True)
class ReflectedProblem:
    """A bounded problem recast on its doubled periodic domain."""

    grid: GridSpec
    field0: Field
    velocity: VelocityField
    params: StabilityParams
    reflected: tuple[tuple[int, Parity], ...]

    def restrict(self, field_ext: Field, tol: float = 1e-8, normalize: bool = False) -> Field:
        out = field_ext
        for dim, parity in reversed(self.reflected):
            out = restrict(out, dim, parity, tol=tol, normalize=False)
        return out.normalized() if normalize else out


def reflect_problem(field0: Field, velocity: VelocityField, dt: float, diffusivity: float) -> ReflectedProblem:
    """Extend every reflecting dimension of ``field0`` and ``velocity``; keep ``dt`` and ``D``."""
    if velocity.grid != field0.grid:
        raise ShapeError("velocity and field live on different grids")
    f, v = field0, velocity
    done = []
    for dim, b in enumerate(field0.grid.boundary):
        if b is Boundary.PERIODIC:
            continue
        parity = Parity.for_boundary(b)
        f = extend_reflect(f, dim, parity)
        v = extend_velocity(v, dim)
        done.append((dim, parity))
    params = StabilityParams.from_velocity(v, dt, diffusivity)
    return ReflectedProblem(f.grid, f, v, params, tuple(done))


def reflected_heat_matrix(n: int, r_h: float, parity: Parity) -> sp.csr_array:
    """1-D heat step on ``n`` points with walls built into the boundary rows.

    Even parity gives the insulated rows ``[1 - r_h, r_h, 0, ...]``; odd parity
    (ghost value ``-phi_0``) gives ``[1 - 3 r_h, r_h, 0, ...]``.
    """
    main = np.full(n, 1 - 2 * r_h)
    main[0] += parity.value * r_h
    main[-1] += parity.value * r_h
    off = np.full(n - 1, r_h)
    return sp.csr_array(sp.diags([off, main, off], [-1, 0, 1]))
