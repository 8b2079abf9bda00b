import warnings

import numpy as np
import pytest

from advdiff_qsim import oracles
from advdiff_qsim.errors import ConfigurationError, ShapeError
from advdiff_qsim.lattice import Field, GridSpec, VelocityField
from advdiff_qsim.scenarios import initial_condition_sin, taylor_green_velocity
from advdiff_qsim.stencil import (StabilityParams, build_time_marching_matrix, classical_run,
                                  classical_step)
from advdiff_qsim.verify import random_params


def small_case(r_a=0.1, r_h=0.1, n_x=4, d=1):
    grid = GridSpec.cubic(d, n_x)
    params = StabilityParams.uniform(grid, r_a, r_h)
    return grid, params, build_time_marching_matrix(grid, params)


def test_row_zero_example():
    _, _, A = small_case()
    row = {int(c): v for c, v in zip(A.indices[A.indptr[0]:A.indptr[1]], A.data[A.indptr[0]:A.indptr[1]])}
    assert row.keys() == {0, 1, 3}
    assert row[0] == pytest.approx(0.8, abs=1e-15)
    assert row[3] == pytest.approx(0.15, abs=1e-15)
    assert row[1] == pytest.approx(0.05, abs=1e-15)


def test_zero_parameters_give_identity():
    _, _, A = small_case(0.0, 0.0, n_x=8, d=2)
    assert np.array_equal(A.toarray(), np.eye(64))


@pytest.mark.parametrize("d,n_x", [(1, 8), (2, 4), (2, 8), (3, 4)])
def test_row_sums_are_one_for_any_velocity(d, n_x):
    rng = np.random.default_rng(d * 10 + n_x)
    grid = GridSpec.cubic(d, n_x)
    for _ in range(5):
        A = build_time_marching_matrix(grid, random_params(grid, rng, varying=True))
        assert np.abs(A.sum(axis=1) - 1).max() <= 1e-14


@pytest.mark.parametrize("d,n_x", [(1, 8), (2, 4), (3, 4)])
def test_matches_brute_force_loop(d, n_x):
    rng = np.random.default_rng(7)
    grid = GridSpec.cubic(d, n_x)
    params = random_params(grid, rng, varying=True)
    A = build_time_marching_matrix(grid, params).toarray()
    ref = oracles.dense_time_marching(grid.shape, params.r_a, params.r_h)
    assert np.abs(A - ref).max() <= 1e-15


def test_sparsity_at_most_one_plus_two_d():
    for d in (1, 2, 3):
        _, _, A = small_case(0.05, 0.05, n_x=8, d=d)
        assert np.diff(A.indptr).max() <= 1 + 2 * d


def test_two_point_grid_merges_coincident_neighbours():
    _, _, A = small_case(0.1, 0.1, n_x=2)
    np.testing.assert_allclose(A.toarray(), [[0.8, 0.2], [0.2, 0.8]], atol=1e-15)


def test_pure_diffusion_is_symmetric():
    _, _, A = small_case(0.0, 0.12, n_x=8, d=2)
    assert np.array_equal(A.toarray(), A.toarray().T)


def test_taylor_green_column_sums_are_one():
    grid = GridSpec.cubic(2, 32)
    vel = taylor_green_velocity(grid)
    A = build_time_marching_matrix(grid, StabilityParams.from_ratios(vel, 0.1, 0.1))
    assert np.abs(A.sum(axis=0) - 1).max() <= 1e-14


def test_stability_limit_is_strict():
    grid = GridSpec.cubic(2, 4)
    with pytest.raises(ConfigurationError):
        StabilityParams.uniform(grid, 0.0, 0.25)
    with pytest.raises(ConfigurationError):
        StabilityParams.uniform(grid, 0.0, -0.01)
    StabilityParams.uniform(grid, 0.0, 0.2499)


def test_velocity_grid_mismatch():
    params = StabilityParams.uniform(GridSpec.cubic(1, 8), 0.1, 0.1)
    with pytest.raises(ShapeError):
        build_time_marching_matrix(GridSpec.cubic(1, 4), params)


def test_from_velocity_ratios():
    grid = GridSpec.cubic(1, 8)
    vel = VelocityField.constant(grid, 2.0)
    p = StabilityParams.from_velocity(vel, dt=0.01, diffusivity=0.5)
    assert p.r_a[0, 0] == pytest.approx(2.0 * 0.01 / grid.spacing)
    assert p.r_h == pytest.approx(0.5 * 0.01 / grid.spacing**2)


def test_large_advection_warns_for_classical_solver():
    p = StabilityParams.uniform(GridSpec.cubic(1, 8), 1.5, 0.1)
    with pytest.warns(RuntimeWarning):
        p.warn_if_classically_unstable()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        StabilityParams.uniform(GridSpec.cubic(1, 8), 1.0, 0.1).warn_if_classically_unstable()


def test_classical_step_examples():
    grid, _, A = small_case()
    out = classical_step(Field(grid, [1, 0, 0, 0]), A)
    np.testing.assert_allclose(out.values, [0.8, 0.15, 0, 0.05], atol=1e-15)

    grid8, _, A8 = small_case(0.0, 0.0, n_x=8)
    f = Field(grid8, np.arange(8.0))
    assert np.array_equal(classical_step(f, A8).values, f.values)

    _, _, Ar = small_case(0.13, 0.07, n_x=8)
    const = Field(grid8, np.full(8, 2.5))
    np.testing.assert_allclose(classical_step(const, Ar).values, 2.5, rtol=1e-15)


def test_classical_step_shape_error():
    grid, _, A = small_case()
    with pytest.raises(ShapeError):
        classical_step(Field(GridSpec.cubic(1, 8), np.ones(8)), A)


def test_classical_run_zero_steps():
    grid, _, A = small_case()
    f = Field(grid, [1, 2, 3, 4])
    run = classical_run(f, A, 0)
    assert np.array_equal(run.final.values, f.values)
    assert run.norms.shape == (1,)


def test_classical_run_conserves_sum_taylor_green():
    grid = GridSpec.cubic(2, 16)
    vel = taylor_green_velocity(grid)
    A = build_time_marching_matrix(grid, StabilityParams.from_ratios(vel, 0.1, 0.1))
    run = classical_run(initial_condition_sin(grid), A, 300, snapshots=(100, 300))
    assert np.abs(run.sums / run.sums[0] - 1).max() <= 1e-12
    assert set(run.snapshots) == {0, 100, 300}
    assert np.all(np.diff(run.norms) <= 1e-15)
