"""Small-grid consistency suite behind ``advdiff-qsim verify``.

Each check compares a production path against a dense brute-force oracle and
returns ``(name, passed, detail)``.
"""
from __future__ import annotations

import numpy as np

from . import oracles
from .blockenc import ChebyshevPropagator, decompose, dilate, encoded_operator_dense
from .lattice import GridSpec, StateVector, Field
from .lcu import build_plan, lcu_step
from .stencil import StabilityParams, build_time_marching_matrix


def random_params(grid: GridSpec, rng: np.random.Generator, varying: bool = False,
                  max_r_a: float = 0.2, max_r_h: float = 0.15) -> StabilityParams:
    """Random stable parameters; per-point advection numbers when ``varying``."""
    d = grid.dims
    r_h = float(rng.uniform(0, min(max_r_h, 0.9 / (2 * d))))
    if varying:
        r_a = rng.uniform(-max_r_a, max_r_a, size=(d, grid.size))
    else:
        r_a = np.repeat(rng.uniform(-max_r_a, max_r_a, size=(d, 1)), grid.size, axis=1)
    return StabilityParams(r_a, r_h, 1.0, r_h * grid.spacing**2)


def _check(name, err, tol):
    return name, bool(err <= tol), f"max error {err:.2e} (tol {tol:.0e})"


def run_checks(seed: int = 1234, n_draws: int = 5) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    results = []
    worst = {k: 0.0 for k in ("stencil", "recompose", "kappa", "rowsum", "shift", "herm",
                              "unitary", "cheb", "lcu", "prob")}
    for d, n_x in [(1, 4), (1, 8), (2, 4), (2, 8), (3, 4)]:
        grid = GridSpec.cubic(d, n_x)
        for _ in range(n_draws):
            params = random_params(grid, rng, varying=True)
            A = build_time_marching_matrix(grid, params)
            Ad = A.toarray()
            worst["stencil"] = max(worst["stencil"], np.abs(
                Ad - oracles.dense_time_marching(grid.shape, params.r_a, params.r_h)).max())
            worst["rowsum"] = max(worst["rowsum"], np.abs(Ad.sum(axis=1) - 1).max())
            dec = decompose(A, params, grid)
            worst["recompose"] = max(worst["recompose"], np.abs(dec.recompose().toarray() - Ad).max())
            worst["kappa"] = max(worst["kappa"], abs(dec.kappa.sum() - 1 / (1 - 2 * d * params.r_h)))
            for j, S in enumerate(dec.shifts):
                Sd = S.toarray()
                worst["shift"] = max(worst["shift"], np.abs(Sd - oracles.dense_shift(grid.shape, j)).max(),
                                     np.abs(Sd @ Sd.T - np.eye(grid.size)).max())
            if grid.size > 64:
                continue
            bu = dilate(dec.a_hat)
            H = bu.hamiltonian.toarray()
            worst["herm"] = max(worst["herm"], np.abs(H - H.conj().T).max())
            U = oracles.eig_exponential(H)
            worst["unitary"] = max(worst["unitary"], np.abs(U @ U.conj().T - np.eye(2 * grid.size)).max())
            v = rng.normal(size=2 * grid.size) + 1j * rng.normal(size=2 * grid.size)
            v /= np.linalg.norm(v)
            prop = ChebyshevPropagator(bu, 1e-10)
            worst["cheb"] = max(worst["cheb"], oracles.phase_distance(prop.apply(v), U @ v))

            plan = build_plan(dec, d)
            phi = Field(grid, rng.uniform(0, 1, grid.size)).normalized()
            state, p = lcu_step(StateVector.prepare(phi, plan.n_ancilla), plan)
            At = encoded_operator_dense(dec)
            ref = At @ phi.values
            worst["lcu"] = max(worst["lcu"], oracles.phase_distance(state.system_block(0), ref / np.linalg.norm(ref)))
            r_eq = params.equivalent_advection
            classical = np.linalg.norm(Ad @ phi.values) ** 2
            worst["prob"] = max(worst["prob"], abs(p - classical) / (5 * r_eq**2))

    results.append(_check("stencil matches brute-force loop", worst["stencil"], 1e-14))
    results.append(_check("row sums of A equal 1", worst["rowsum"], 1e-14))
    results.append(_check("recomposition (1-2d r_h) A_hat + 2 r_h sum S_j = A", worst["recompose"], 1e-14))
    results.append(_check("sum of kappa = 1/(1-2d r_h)", worst["kappa"], 1e-14))
    results.append(_check("shift operators are the expected permutations", worst["shift"], 0.0))
    results.append(_check("dilation is Hermitian", worst["herm"], 1e-14))
    results.append(_check("dense exp(-i H pi/2) is unitary", worst["unitary"], 1e-12))
    results.append(_check("Chebyshev action vs eigendecomposition", worst["cheb"], 1e-8))
    results.append(_check("post-selected LCU state vs dense encoded operator", worst["lcu"], 1e-8))
    results.append(("p_t within 5 r_eq^2 of |A phi|^2", bool(worst["prob"] <= 1.0),
                    f"worst |p_t - |A phi|^2| / (5 r_eq^2) = {worst['prob']:.3f}"))
    return results
