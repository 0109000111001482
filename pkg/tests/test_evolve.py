import numpy as np
import pytest

from chiralchain import (
    AmplitudeState,
    SystemConfig,
    TimeGrid,
    build_coupling_matrix,
    dicke_initial_state,
    eigendecompose,
    linear_time_grid,
    log_time_grid,
    propagate,
    sample_disorder,
)
from chiralchain.errors import DefectiveMatrixError, DimensionMismatchError
from chiralchain.evolve import NORM_SLACK
from chiralchain.model import CouplingMatrix

from oracles import random_config_params, rk4_propagate


# ---------------------------------------------------------------------------
# time grids
# ---------------------------------------------------------------------------

def test_default_log_grid_shape():
    grid = log_time_grid()
    assert len(grid) == 201
    assert grid.points[0] == 0.0
    assert np.isclose(grid.points[1], 1e-2)
    assert np.isclose(grid.points[-1], 1e4)


@pytest.mark.parametrize("points", [[], [1.0, 1.0], [2.0, 1.0], [-1.0, 1.0]])
def test_bad_grids_rejected(points):
    with pytest.raises(ValueError):
        TimeGrid(np.asarray(points, dtype=float))


def test_index_of_picks_nearest():
    grid = linear_time_grid(0.0, 10.0, 11)
    assert grid.index_of(4.2) == 4
    assert grid.index_of(100.0) == 10


# ---------------------------------------------------------------------------
# eigendecomposition
# ---------------------------------------------------------------------------

def test_single_emitter_spectrum():
    config = SystemConfig(1, 1, 0, xi=0.0)
    sample = eigendecompose(build_coupling_matrix(config, sample_disorder(config, 1)))
    assert np.allclose(sample.eigenvalues, [-0.5])
    assert np.allclose(np.abs(sample.eigenvectors), [[1.0]])


def test_two_emitter_analytic_modes():
    config = SystemConfig(2, 2, 0, xi=0.0)
    sample = eigendecompose(build_coupling_matrix(config, sample_disorder(config, 1)))
    values = sorted(sample.eigenvalues.real)
    assert np.allclose(values, [-1.0, 0.0], atol=1e-12)
    for value, expected_vector in [(0.0, [1, -1]), (-1.0, [1, 1])]:
        idx = int(np.argmin(np.abs(sample.eigenvalues - value)))
        vector = sample.eigenvectors[:, idx]
        expected = np.asarray(expected_vector) / np.sqrt(2.0)
        overlap = np.abs(np.vdot(expected, vector))
        assert np.isclose(overlap, 1.0, atol=1e-10)


def test_cascaded_chain_signals_defective():
    config = SystemConfig(4, 4, 0, xi=0.3, directionality=1.0)
    matrix = build_coupling_matrix(config, sample_disorder(config, 1))
    with pytest.raises(DefectiveMatrixError):
        eigendecompose(matrix)
    # eigenvalues are still available without validation (Jordan-degenerate)
    sample = eigendecompose(matrix, validate=False)
    assert np.allclose(sample.eigenvalues, -0.5)


def test_sorted_by_energy_shift():
    rng = np.random.default_rng(3)
    config = SystemConfig(12, 6, 6, xi=0.4, directionality=0.1, disorder_strength=0.8)
    sample = eigendecompose(build_coupling_matrix(config, sample_disorder(config, 8)))
    assert np.all(np.diff(sample.eigenvalues.imag) >= 0.0)


def test_reconstruction_residual_small():
    config = SystemConfig(15, 7, 8, xi=0.6, directionality=-0.3, disorder_strength=0.5)
    matrix = build_coupling_matrix(config, sample_disorder(config, 5))
    sample = eigendecompose(matrix)
    recon = (sample.eigenvectors * sample.eigenvalues) @ np.linalg.inv(
        sample.eigenvectors
    )
    scale = np.max(np.abs(matrix.entries))
    assert np.max(np.abs(recon - matrix.entries)) <= 1e-8 * scale


def test_non_square_rejected():
    with pytest.raises(DimensionMismatchError):
        eigendecompose(CouplingMatrix(np.zeros((2, 3), dtype=complex)))


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------

def test_scalar_exponential_decay():
    config = SystemConfig(1, 1, 0, xi=0.0)
    matrix = build_coupling_matrix(config, sample_disorder(config, 1))
    grid = linear_time_grid(0.0, 10.0, 101)
    trajectory = propagate(matrix, dicke_initial_state(config, [0]), grid)
    expected = np.exp(-0.5 * grid.points)
    assert np.allclose(trajectory.amplitudes[:, 0], expected, atol=1e-10)


def test_superradiant_population_decay():
    # symmetric two-emitter state at xi = 0 decays at the doubled rate
    config = SystemConfig(2, 2, 0, xi=0.0)
    matrix = build_coupling_matrix(config, sample_disorder(config, 1))
    grid = TimeGrid(np.array([1.0]))
    state = AmplitudeState.from_amplitudes(np.array([1.0, 1.0]) / np.sqrt(2.0))
    trajectory = propagate(matrix, state, grid)
    assert np.isclose(trajectory.norms[0], np.exp(-2.0), atol=1e-10)


def test_dark_state_holds_norm():
    # xi = pi: the symmetric pair state is decoherence-free
    config = SystemConfig(2, 2, 0, xi=np.pi)
    matrix = build_coupling_matrix(config, sample_disorder(config, 1))
    grid = TimeGrid(np.array([1e3]))
    state = AmplitudeState.from_amplitudes(np.array([1.0, 1.0]) / np.sqrt(2.0))
    trajectory = propagate(matrix, state, grid)
    assert abs(trajectory.norms[0] - 1.0) < 1e-9


def test_matches_rk4_oracle_on_random_configs():
    rng = np.random.default_rng(17)
    for _ in range(20):
        config = SystemConfig(**random_config_params(rng, n_max=8))
        disorder = sample_disorder(config, int(rng.integers(1 << 30)))
        matrix = build_coupling_matrix(config, disorder)
        zone = "disordered" if config.n_disordered else "clean"
        initial = dicke_initial_state(config, zone)
        trajectory = propagate(matrix, initial, TimeGrid(np.array([10.0])))
        oracle = rk4_propagate(matrix.entries, initial.amplitudes, 10.0, 20_000)
        assert np.max(np.abs(trajectory.amplitudes[0] - oracle)) < 1e-6


def test_defective_fallback_matches_rk4():
    config = SystemConfig(5, 5, 0, xi=0.3, directionality=1.0)
    matrix = build_coupling_matrix(config, sample_disorder(config, 1))
    initial = dicke_initial_state(config, [0])
    trajectory = propagate(matrix, initial, TimeGrid(np.array([2.0, 10.0])))
    assert trajectory.modal is None  # fallback path
    oracle = rk4_propagate(matrix.entries, initial.amplitudes, 10.0, 20_000)
    assert np.max(np.abs(trajectory.amplitudes[-1] - oracle)) < 1e-6


def test_norm_monotonicity_on_log_grid():
    rng = np.random.default_rng(23)
    for _ in range(5):
        config = SystemConfig(**random_config_params(rng, n_max=30))
        matrix = build_coupling_matrix(config, sample_disorder(config, 9))
        zone = "disordered" if config.n_disordered else "clean"
        trajectory = propagate(matrix, dicke_initial_state(config, zone), log_time_grid())
        assert np.all(np.diff(trajectory.norms) <= NORM_SLACK)


def test_semigroup_property():
    config = SystemConfig(6, 3, 3, xi=0.7, directionality=0.4, disorder_strength=0.6)
    matrix = build_coupling_matrix(config, sample_disorder(config, 4))
    initial = dicke_initial_state(config, "disordered")
    t1, t2 = 3.0, 8.0
    direct = propagate(matrix, initial, TimeGrid(np.array([t2]))).amplitudes[0]
    stage = propagate(matrix, initial, TimeGrid(np.array([t1]))).amplitudes[0]
    relay = propagate(
        matrix, AmplitudeState.from_amplitudes(stage), TimeGrid(np.array([t2 - t1]))
    ).amplitudes[0]
    assert np.max(np.abs(direct - relay)) < 1e-8


def test_dimension_mismatch():
    config = SystemConfig(3, 3, 0, xi=0.0)
    matrix = build_coupling_matrix(config, sample_disorder(config, 1))
    with pytest.raises(DimensionMismatchError):
        propagate(matrix, AmplitudeState.from_amplitudes(np.ones(2)), log_time_grid())
