"""Grid description, flattened indexing and field containers.

Linear indices run with dimension 0 fastest::

    m = i_0 + n_0 * i_1 + n_0 * n_1 * i_2 + ...

which is numpy's Fortran order on an array of shape ``grid.shape``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ShapeError


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    NEUMANN_REFLECT = "neumann"
    DIRICHLET_REFLECT = "dirichlet"

    @classmethod
    def parse(cls, value: str | Boundary) -> Boundary:
        if isinstance(value, Boundary):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ConfigurationError(
                f"unknown boundary {value!r}; expected one of "
                + ", ".join(b.value for b in cls)
            ) from None


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform Cartesian grid.

    ``shape`` holds the point count per dimension. Counts are powers of two so
    that every dimension maps onto a qubit register. Counts may differ between
    dimensions (a reflected dimension is twice as long) but the spacing is
    always shared.
    """

    shape: tuple[int, ...]
    spacing: float
    boundary: tuple[Boundary, ...] = ()

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        if len(shape) < 1:
            raise ConfigurationError("grid needs at least one dimension")
        for n in shape:
            if n < 2 or not _is_power_of_two(n):
                raise ConfigurationError(f"points per dimension must be a power of two >= 2, got {n}")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ConfigurationError(f"grid spacing must be positive, got {self.spacing}")
        boundary = self.boundary or (Boundary.PERIODIC,) * len(shape)
        boundary = tuple(Boundary.parse(b) for b in boundary)
        if len(boundary) != len(shape):
            raise ConfigurationError("one boundary flag per dimension required")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "boundary", boundary)

    @classmethod
    def cubic(cls, dims: int, n_x: int, spacing: float | None = None,
              boundary: Boundary | str | tuple = Boundary.PERIODIC) -> GridSpec:
        """``n_x**dims`` grid on ``[0, 2*pi)`` per dimension unless ``spacing`` is given."""
        if dims < 1:
            raise ConfigurationError(f"dims must be >= 1, got {dims}")
        if spacing is None:
            spacing = 2 * np.pi / n_x if n_x > 0 else 1.0
        if isinstance(boundary, (str, Boundary)):
            boundary = (boundary,) * dims
        return cls(shape=(n_x,) * dims, spacing=spacing, boundary=tuple(boundary))

    @property
    def dims(self) -> int:
        return len(self.shape)

    @property
    def n_x(self) -> int:
        if len(set(self.shape)) != 1:
            raise ConfigurationError(f"grid {self.shape} has no single points-per-dimension")
        return self.shape[0]

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def n_qubits(self) -> int:
        return sum(n.bit_length() - 1 for n in self.shape)

    @property
    def strides(self) -> tuple[int, ...]:
        out, s = [], 1
        for n in self.shape:
            out.append(s)
            s *= n
        return tuple(out)

    @property
    def is_periodic(self) -> bool:
        return all(b is Boundary.PERIODIC for b in self.boundary)

    def coordinates(self) -> list[np.ndarray]:
        """Per-dimension coordinate ``i_j * spacing`` of every flattened point."""
        idx = np.arange(self.size)
        return [((idx // s) % n) * self.spacing for s, n in zip(self.strides, self.shape)]

    def with_periodic(self) -> GridSpec:
        return GridSpec(self.shape, self.spacing, (Boundary.PERIODIC,) * self.dims)


def flatten_index(coords, grid: GridSpec) -> int:
    if len(coords) != grid.dims:
        raise ShapeError(f"expected {grid.dims} coordinates, got {len(coords)}")
    m = 0
    for c, n, s in zip(coords, grid.shape, grid.strides):
        if not 0 <= c < n:
            raise IndexError(f"coordinate {c} outside [0, {n})")
        m += int(c) * s
    return m


def unflatten_index(index: int, grid: GridSpec) -> tuple[int, ...]:
    if not 0 <= index < grid.size:
        raise IndexError(f"index {index} outside [0, {grid.size})")
    return tuple((index // s) % n for s, n in zip(grid.strides, grid.shape))


def neighbor_index(index, dim: int, offset: int, grid: GridSpec):
    """Periodic neighbour of ``index`` along ``dim``; works elementwise on arrays."""
    if not 0 <= dim < grid.dims:
        raise IndexError(f"dimension {dim} outside [0, {grid.dims})")
    if grid.boundary[dim] is not Boundary.PERIODIC:
        raise ConfigurationError(f"dimension {dim} is not periodic; extend it by reflection first")
    s, n = grid.strides[dim], grid.shape[dim]
    i = (index // s) % n
    return index + (((i + offset) % n) - i) * s


@dataclass(frozen=True)
class Field:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size != self.grid.size:
            raise ShapeError(f"field has {values.size} values, grid has {self.grid.size} points")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def as_array(self) -> np.ndarray:
        """Values reshaped to ``grid.shape`` (index ``[i_0, i_1, ...]``)."""
        return self.values.reshape(self.grid.shape, order="F")

    @classmethod
    def from_array(cls, grid: GridSpec, array: np.ndarray) -> Field:
        return cls(grid, np.asarray(array).reshape(-1, order="F"))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def normalized(self) -> Field:
        nrm = self.norm()
        if nrm == 0:
            raise ShapeError("cannot normalize a zero field")
        return Field(self.grid, self.values / nrm)


@dataclass(frozen=True)
class VelocityField:
    grid: GridSpec
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        comps = tuple(np.asarray(c, dtype=float).reshape(-1) for c in self.components)
        if len(comps) != self.grid.dims:
            raise ShapeError(f"{len(comps)} velocity components for a {self.grid.dims}-d grid")
        for c in comps:
            if c.size != self.grid.size:
                raise ShapeError("velocity component length does not match grid")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, grid: GridSpec) -> VelocityField:
        return cls(grid, tuple(np.zeros(grid.size) for _ in range(grid.dims)))

    @classmethod
    def constant(cls, grid: GridSpec, values) -> VelocityField:
        values = np.broadcast_to(np.asarray(values, dtype=float), (grid.dims,))
        return cls(grid, tuple(np.full(grid.size, v) for v in values))

    def as_array(self) -> np.ndarray:
        return np.stack(self.components)

    def max_abs_sum(self) -> float:
        """``max_m sum_j |v_j(x_m)|``."""
        return float(np.abs(self.as_array()).sum(axis=0).max())


@dataclass
class StateVector:
    """Amplitudes over ``ancilla (x) system``; ancilla register most significant.

    Index ``a * N + m`` addresses ancilla basis state ``a`` and grid point ``m``.
    """

    system: GridSpec
    n_ancilla: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != (1 << self.n_ancilla) * self.system.size:
            raise ShapeError("amplitude vector length does not match registers")

    @classmethod
    def prepare(cls, field: Field, n_ancilla: int) -> StateVector:
        """Encode ``field / |field|`` with every ancilla in ``|0>``."""
        amps = np.zeros((1 << n_ancilla) * field.grid.size, dtype=complex)
        amps[: field.grid.size] = field.normalized().values
        return cls(field.grid, n_ancilla, amps)

    @property
    def n_qubits(self) -> int:
        return self.system.n_qubits + self.n_ancilla

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def system_block(self, ancilla: int = 0) -> np.ndarray:
        n = self.system.size
        return self.amplitudes[ancilla * n:(ancilla + 1) * n]

    def to_field(self) -> Field:
        """Real part of the all-zero-ancilla block as a field."""
        block = self.system_block(0)
        return Field(self.system, block.real)
