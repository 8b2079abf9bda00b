"""Exit criteria of the build, one test per criterion.

Run ``pytest tests/test_acceptance.py -v`` for a pass/fail line per criterion in
the terminal summary. Criterion 2 is the full 64x64 case and carries the
``slow`` marker.
"""
import math

import numpy as np
import pytest

from advdiff_qsim import oracles
from advdiff_qsim.blockenc import ChebyshevPropagator, decompose, dilate, encoded_operator_dense
from advdiff_qsim.boundary import interface_values, reflect_problem
from advdiff_qsim.cli import main
from advdiff_qsim.lattice import Field, GridSpec, StateVector
from advdiff_qsim.lcu import SimulationConfig, build_plan, lcu_step, run_simulation
from advdiff_qsim.scenarios import check_reference_case, heat, mse_metric, taylor_green
from advdiff_qsim.stencil import StabilityParams, build_time_marching_matrix, classical_run
from advdiff_qsim.verify import random_params


@pytest.fixture(scope="module")
def steady_run():
    """32x32 Taylor-Green run, extended until both solutions have settled."""
    n_t = 350
    while True:
        s = taylor_green(32, n_t)
        rep = run_simulation(s.field0, SimulationConfig(s.params, n_t))
        q = rep.quantum_final.values
        c = rep.classical_final.values
        q_dist = np.linalg.norm(q - 1 / math.sqrt(q.size))
        c_dev = np.abs(c - s.field0.values.mean()).max()
        if q_dist < 1e-4 and c_dev < 1e-6:
            return s, rep, q_dist, c_dev
        n_t *= 2
        assert n_t < 100_000, "no steady state reached"


def test_criterion_1_taylor_green_cumulative_probability(steady_run, criterion):
    s, rep, q_dist, _ = steady_run
    err = abs(rep.cumulative_probability - 2 / 3)
    criterion(1, "32x32 Taylor-Green cumulative probability -> 2/3",
              q_dist < 1e-4 and err <= 0.01,
              f"N_T={rep.steps}, cumulative={rep.cumulative_probability:.8f}, "
              f"|diff|={err:.2e} (tol 1e-2), |phi_t - uniform|={q_dist:.1e}")


@pytest.mark.slow
def test_criterion_2_full_scale_reproduction(criterion):
    s = taylor_green()
    check_reference_case(s)
    snaps = tuple(range(0, 1401, 14))
    rep = run_simulation(s.field0, SimulationConfig(s.params, 1400, snapshots=snaps))
    worst_t = max(rep.mse, key=rep.mse.get)
    worst = rep.mse[worst_t]
    criterion(2, "64x64, N_T=1400, 12+3 qubits, MSE <= 0.5% of max|phi|^2",
              rep.n_qubits == 15 and len(rep.mse) == len(snaps) and worst <= 0.5,
              f"qubits={rep.n_system_qubits}+{rep.n_ancilla}, {len(rep.mse)} snapshots, "
              f"max MSE={worst:.4f}% at step {worst_t}, cumulative={rep.cumulative_probability:.6f}")


def test_criterion_3_per_step_probability_identity(criterion):
    worst = 0.0
    checked = 0
    for d in (1, 2):
        grid = GridSpec.cubic(d, 8)
        rng = np.random.default_rng(300 + d)
        for _ in range(20):
            params = random_params(grid, rng, varying=True)
            A = build_time_marching_matrix(grid, params)
            plan = build_plan(decompose(A, params, grid), d)
            bound = 5 * params.equivalent_advection**2
            state = StateVector.prepare(Field(grid, rng.uniform(size=grid.size)), plan.n_ancilla)
            for _ in range(5):
                phi = state.system_block(0)
                classical = np.linalg.norm(A @ phi) ** 2 / np.linalg.norm(phi) ** 2
                state, p = lcu_step(state, plan)
                worst = max(worst, abs(p - classical) / bound)
                checked += 1
    criterion(3, "|p_t - |A phi_t|^2/|phi_t|^2| <= 5 r_eq^2",
              worst <= 1.0, f"{checked} steps over 40 parameter sets, worst ratio to bound {worst:.3f}")


def test_criterion_4_encoding_error_order(criterion):
    grid = GridSpec.cubic(1, 8)

    def err(r):
        params = StabilityParams.uniform(grid, r, r)
        A = build_time_marching_matrix(grid, params)
        return np.linalg.norm(encoded_operator_dense(decompose(A, params, grid)) - A.toarray(), 2)

    e1, e2 = err(0.1), err(0.05)
    ratio = e1 / e2
    criterion(4, "halving (r_a, r_h) from 0.1 to 0.05 shrinks |A~ - A|_2 by a factor in [3.5, 4.5]",
              3.5 <= ratio <= 4.5, f"|A~-A|_2 = {e1:.6f} -> {e2:.6f}, ratio {ratio:.4f}")


def test_criterion_5_structural_identities(criterion):
    worst = dict(recompose=0.0, kappa=0.0, rowsum=0.0, shift=0.0, herm=0.0, unitary=0.0, cheb=0.0)
    rng = np.random.default_rng(55)
    for d, n_x in [(1, 8), (1, 256), (2, 4), (2, 16), (3, 4), (3, 8)]:
        grid = GridSpec.cubic(d, n_x)
        params = random_params(grid, rng, varying=True)
        A = build_time_marching_matrix(grid, params)
        dec = decompose(A, params, grid)
        worst["recompose"] = max(worst["recompose"], np.abs(dec.recompose() - A).max())
        worst["kappa"] = max(worst["kappa"], abs(dec.kappa.sum() - 1 / (1 - 2 * d * params.r_h)))
        worst["rowsum"] = max(worst["rowsum"], np.abs(A.sum(axis=1) - 1).max())
        for S in dec.shifts:
            worst["shift"] = max(worst["shift"], np.abs((S @ S.T).toarray() - np.eye(grid.size)).max())
        if grid.size > 256:
            continue
        bu = dilate(dec.a_hat)
        H = bu.hamiltonian.toarray()
        worst["herm"] = max(worst["herm"], np.abs(H - H.conj().T).max())
        U = oracles.eig_exponential(H)
        worst["unitary"] = max(worst["unitary"], np.abs(U @ U.conj().T - np.eye(bu.dim)).max())
        prop = ChebyshevPropagator(bu)
        for _ in range(3):
            v = rng.normal(size=bu.dim) + 1j * rng.normal(size=bu.dim)
            v /= np.linalg.norm(v)
            worst["cheb"] = max(worst["cheb"], oracles.phase_distance(prop.apply(v), U @ v))
    tols = dict(recompose=1e-14, kappa=1e-14, rowsum=1e-14, shift=0.0, herm=1e-14, unitary=1e-12, cheb=1e-8)
    ok = all(worst[k] <= tols[k] for k in tols)
    criterion(5, "structural identities", ok,
              ", ".join(f"{k}={worst[k]:.1e}<={tols[k]:.0e}" for k in tols))


def test_criterion_6_boundary_suite(criterion):
    n_t = 200
    s = heat(16, n_t, 0.1, 1, "neumann")
    prob = reflect_problem(s.field0, s.velocity, s.params.dt, s.params.diffusivity)
    rep = run_simulation(prob.field0, SimulationConfig(prob.params, n_t, snapshots=range(0, n_t + 1, 20)))
    start = prob.restrict(prob.field0.normalized()).values.sum()
    drift = max(abs(prob.restrict(c).values.sum() / start - 1) for c in rep.classical_snapshots.values())
    budget = n_t * 5 * prob.params.equivalent_advection**2
    mse = max(mse_metric(prob.restrict(q, tol=np.inf, normalize=True), prob.restrict(c)) / 100
              for q, c in zip(rep.quantum_snapshots.values(), rep.classical_snapshots.values()))

    s_d = heat(16, n_t, 0.1, 1, "dirichlet")
    prob_d = reflect_problem(s_d.field0, s_d.velocity, s_d.params.dt, s_d.params.diffusivity)
    run = classical_run(prob_d.field0, build_time_marching_matrix(prob_d.grid, prob_d.params), n_t,
                        snapshots=range(0, n_t + 1, 10))
    wall = max(np.abs(interface_values(f, 0)).max() for f in run.snapshots.values())

    ok = drift <= 1e-10 and mse <= budget and wall <= 1e-8
    criterion(6, "reflection boundaries", ok,
              f"Neumann sum drift {drift:.1e} (tol 1e-10), quantum MSE {mse:.2e} <= budget {budget:.2f}; "
              f"Dirichlet wall value {wall:.1e} (tol 1e-8)")


def test_criterion_7_steady_state_limits(steady_run, criterion):
    s, rep, q_dist, c_dev = steady_run
    criterion(7, "steady states", q_dist < 1e-4 and c_dev < 1e-6,
              f"quantum |phi - 1/sqrt(N)| = {q_dist:.1e} (tol 1e-4), "
              f"classical max|phi - mean(phi_0)| = {c_dev:.1e} (tol 1e-6) at N_T={rep.steps}")


def test_criterion_8_deterministic_artifacts(tmp_path, criterion):
    args = ["run", "--scenario", "taylor-green", "--nx", "16", "--nt", "60", "--shots", "300", "--seed", "11"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    files = sorted(p.name for p in a.iterdir() if p.name != "timing.json")
    same = [(a / f).read_bytes() == (b / f).read_bytes() for f in files]
    criterion(8, "byte-identical artifacts on repeated runs", all(same) and len(files) >= 6,
              f"{sum(same)}/{len(files)} files identical")
