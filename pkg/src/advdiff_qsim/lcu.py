"""LCU composition of the advection block-unitary with the shift operators.

The ancilla register is ``(lcu, dil)`` with the LCU select register most
significant and the dilation qubit least significant. Ancilla value ``a`` of a
state vector therefore reads ``a = 2 * lcu + dil``. A step succeeds when the
select register returns to ``|0>`` and the dilation qubit reads ``|1>``, which
leaves ``A~ phi / |A~ phi|`` on the system register.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .blockenc import ChebyshevPropagator, StepDecomposition, decompose, dilate
from .errors import ConsistencyError, DegenerateStateError, ShapeError
from .lattice import Field, StateVector
from .stencil import StabilityParams, build_time_marching_matrix

SUCCESS_ANCILLA = 1  # lcu = 0, dil = 1


def lcu_register_qubits(d: int) -> int:
    return math.ceil(math.log2(d + 1))


def ancilla_count(d: int) -> int:
    return lcu_register_qubits(d) + 1


def householder_completion(column: np.ndarray) -> np.ndarray:
    """Real orthogonal matrix whose first column is ``column`` (unit norm)."""
    c = np.asarray(column, dtype=float)
    e0 = np.zeros_like(c)
    e0[0] = 1.0
    w = e0 - c
    ww = w @ w
    if ww < 1e-30:
        return np.eye(c.size)
    return np.eye(c.size) - 2.0 * np.outer(w, w) / ww


@dataclass
class LcuPlan:
    n_ancilla: int
    prep_column: np.ndarray
    prepare: np.ndarray
    unitaries: list
    propagator: ChebyshevPropagator = field(repr=False)

    @property
    def dims(self) -> int:
        return len(self.unitaries) - 1

    @property
    def n_slots(self) -> int:
        return self.prep_column.size


def build_plan(decomp: StepDecomposition, d: int | None = None, tol: float = 1e-10) -> LcuPlan:
    d = decomp.dims if d is None else d
    if d != decomp.dims:
        raise ShapeError(f"decomposition has {decomp.dims} shifts, expected {d}")
    n_sel = lcu_register_qubits(d)
    col = np.zeros(1 << n_sel)
    col[: d + 1] = np.sqrt(decomp.kappa / decomp.kappa.sum())
    bu = dilate(decomp.a_hat)
    return LcuPlan(
        n_ancilla=n_sel + 1,
        prep_column=col,
        prepare=householder_completion(col),
        unitaries=[bu, *decomp.shifts],
        propagator=ChebyshevPropagator(bu, tol),
    )


def lcu_circuit(state: StateVector, plan: LcuPlan) -> np.ndarray:
    """Full pre-measurement state after prepare, select and unprepare.

    Returned with shape ``(n_slots, 2, N)`` indexed ``[lcu, dil, m]``.
    """
    n = state.system.size
    if state.n_ancilla != plan.n_ancilla:
        raise ShapeError(f"state carries {state.n_ancilla} ancillas, plan needs {plan.n_ancilla}")
    psi = state.amplitudes.reshape(plan.n_slots, 2, n)
    phi = psi[0, 0]
    if np.linalg.norm(psi.reshape(-1)[n:]) > 1e-12:
        raise ConsistencyError("LCU step expects all ancillas in |0>")

    V = plan.prepare
    branches = np.zeros((plan.n_slots, 2, n), dtype=complex)
    # select slot 0: dilation evolution on (dil, system)
    branches[0] = plan.propagator.apply(np.concatenate([V[0, 0] * phi, np.zeros(n)])).reshape(2, n)
    # select slot j: X on dil together with S_j on the system
    for j, shift in enumerate(plan.unitaries[1:], start=1):
        if V[j, 0] != 0:
            branches[j, 1] = shift @ (V[j, 0] * phi)
    return np.einsum("kl,kan->lan", V.conj(), branches)


def lcu_step(state: StateVector, plan: LcuPlan, floor: float = 1e-12) -> tuple[StateVector, float]:
    """One post-selected time step; measured ancillas are reset to ``|0>``."""
    out = lcu_circuit(state, plan)
    success = out[0, SUCCESS_ANCILLA]
    p = float(np.vdot(success, success).real)
    if p < floor:
        raise DegenerateStateError(f"success probability {p:.3e} below floor {floor:.1e}")
    amps = np.zeros_like(state.amplitudes)
    amps[: state.system.size] = success / math.sqrt(p)
    return StateVector(state.system, state.n_ancilla, amps), p


@dataclass
class ProbabilityLedger:
    per_step: list = field(default_factory=list)
    cumulative: list = field(default_factory=list)
    classical_norm_ratio: list = field(default_factory=list)
    survivors: list | None = None

    def record(self, p: float):
        prev = self.cumulative[-1] if self.cumulative else 1.0
        self.per_step.append(p)
        self.cumulative.append(prev * p)

    @property
    def total(self) -> float:
        return self.cumulative[-1] if self.cumulative else 1.0


@dataclass
class SimulationConfig:
    params: StabilityParams
    n_steps: int
    snapshots: tuple = ()
    quantum: bool = True
    classical: bool = True
    tol: float = 1e-10
    prob_floor: float = 1e-12
    shots: int | None = None
    seed: int | None = None
    # stop early once the normalized state is this close to uniform
    steady_tol: float | None = None


@dataclass
class SimulationReport:
    steps: int
    ledger: ProbabilityLedger
    quantum_snapshots: dict = field(default_factory=dict)
    classical_snapshots: dict = field(default_factory=dict)
    mse: dict = field(default_factory=dict)
    n_ancilla: int = 0
    n_system_qubits: int = 0
    matvecs_per_step: int = 0
    wall_time: float = 0.0
    quantum_final: Field | None = None
    classical_final: Field | None = None

    @property
    def n_qubits(self) -> int:
        return self.n_system_qubits + self.n_ancilla

    @property
    def cumulative_probability(self) -> float:
        return self.ledger.total


def _distance_to_uniform(vec: np.ndarray) -> float:
    v = np.asarray(vec)
    nrm = np.linalg.norm(v)
    return float(np.linalg.norm(v / nrm - 1 / math.sqrt(v.size)))


def run_simulation(field0: Field, config: SimulationConfig) -> SimulationReport:
    """March ``field0`` (normalized to unit 2-norm) through ``config.n_steps`` LCU steps.

    With ``config.classical`` set, ``A`` is applied in lockstep to the same
    normalized initial field and the classical squared-norm ratio recorded
    alongside the probabilities. Snapshots are taken at the requested steps
    and at the final step.
    """
    from .scenarios import mse_metric

    grid = field0.grid
    params = config.params
    t0 = time.perf_counter()
    field0 = field0.normalized()
    A = build_time_marching_matrix(grid, params)
    wanted = {int(s) for s in config.snapshots if 0 <= int(s) <= config.n_steps} | {0}
    d = grid.dims

    report = SimulationReport(steps=0, ledger=ProbabilityLedger(),
                              n_ancilla=ancilla_count(d), n_system_qubits=grid.n_qubits)
    state = plan = None
    if config.quantum:
        plan = build_plan(decompose(A, params, grid), d, config.tol)
        state = StateVector.prepare(field0, plan.n_ancilla)
        report.matvecs_per_step = plan.propagator.matvecs_per_apply
    phi_c = None
    c_norm0 = 1.0
    if config.classical:
        params.warn_if_classically_unstable()
        phi_c = field0.values.copy()
        c_norm0 = float(phi_c @ phi_c)

    def snap(t):
        if state is not None:
            report.quantum_snapshots[t] = Field(grid, state.system_block(0).real)
        if phi_c is not None:
            report.classical_snapshots[t] = Field(grid, phi_c)
        if state is not None and phi_c is not None:
            report.mse[t] = mse_metric(report.quantum_snapshots[t], report.classical_snapshots[t])

    snap(0)
    t = 0
    for t in range(1, config.n_steps + 1):
        if state is not None:
            state, p = lcu_step(state, plan, config.prob_floor)
            report.ledger.record(p)
        if phi_c is not None:
            phi_c = A @ phi_c
            report.ledger.classical_norm_ratio.append(float(phi_c @ phi_c) / c_norm0)
        if t in wanted:
            snap(t)
        if config.steady_tol is not None:
            probe = state.system_block(0) if state is not None else phi_c
            if _distance_to_uniform(probe) < config.steady_tol:
                break
    report.steps = t
    if t not in report.quantum_snapshots and t not in report.classical_snapshots:
        snap(t)

    if state is not None:
        report.quantum_final = Field(grid, state.system_block(0).real)
        if config.shots:
            rng = np.random.default_rng(config.seed)
            alive = int(config.shots)
            survivors = []
            for p in report.ledger.per_step:
                alive = int(rng.binomial(alive, min(p, 1.0)))
                survivors.append(alive)
            report.ledger.survivors = survivors
    if phi_c is not None:
        report.classical_final = Field(grid, phi_c)
    report.wall_time = time.perf_counter() - t0
    return report
