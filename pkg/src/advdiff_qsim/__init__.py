"""State-vector emulation of quantum time marching for advection-diffusion."""
from .blockenc import (BlockUnitary, ChebyshevPropagator, StepDecomposition, apply_block_unitary,
                       decompose, dilate, encoded_operator_dense, shift_operator)
from .boundary import Parity, extend_reflect, reflect_problem, restrict
from .errors import (ConfigurationError, ConsistencyError, DegenerateStateError, NumericalError,
                     ShapeError)
from .lattice import (Boundary, Field, GridSpec, StateVector, VelocityField, flatten_index,
                      neighbor_index, unflatten_index)
from .lcu import (LcuPlan, ProbabilityLedger, SimulationConfig, SimulationReport, build_plan,
                  lcu_step, run_simulation)
from .scenarios import (initial_condition_sin, mse_metric, peclet, taylor_green,
                        taylor_green_velocity)
from .stencil import (StabilityParams, build_time_marching_matrix, classical_run, classical_step)

__all__ = [
    "BlockUnitary",
    "ChebyshevPropagator",
    "StepDecomposition",
    "apply_block_unitary",
    "decompose",
    "dilate",
    "encoded_operator_dense",
    "shift_operator",
    "Parity",
    "extend_reflect",
    "reflect_problem",
    "restrict",
    "ConfigurationError",
    "ConsistencyError",
    "DegenerateStateError",
    "NumericalError",
    "ShapeError",
    "Boundary",
    "Field",
    "GridSpec",
    "StateVector",
    "VelocityField",
    "flatten_index",
    "neighbor_index",
    "unflatten_index",
    "LcuPlan",
    "ProbabilityLedger",
    "SimulationConfig",
    "SimulationReport",
    "build_plan",
    "lcu_step",
    "run_simulation",
    "initial_condition_sin",
    "mse_metric",
    "peclet",
    "taylor_green",
    "taylor_green_velocity",
    "StabilityParams",
    "build_time_marching_matrix",
    "classical_run",
    "classical_step",
]

__version__ = "0.1.0"
