import numpy as np
import pytest
from scipy.integrate import quad

from chiralchain import (
    R_BAR_GOE,
    R_BAR_POISSON,
    SystemConfig,
    aggregate_statistics,
    eigendecompose,
    build_coupling_matrix,
    filter_levels,
    gap_ratios,
    realization_gap_ratios,
    run_spectrum_ensemble,
    sample_disorder,
    sample_surmise_gap_ratios,
    weight_constrained_filter,
    zone_weights,
)
from chiralchain.errors import NoValidRealizationsError, TooFewLevelsError
from chiralchain.spectral import SpectralSample, level_runs, valid_pair_mask

from oracles import surmise_density


def sample_from_eigenvalues(eigenvalues, vectors=None):
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    n = eigenvalues.size
    if vectors is None:
        vectors = np.eye(n, dtype=complex)
    return SpectralSample(eigenvalues, vectors)


# ---------------------------------------------------------------------------
# resonance-width filter
# ---------------------------------------------------------------------------

def test_narrow_pair_is_valid():
    mask = valid_pair_mask(np.array([-0.01 + 0j, -0.01 + 1j]))
    assert mask.tolist() == [True]


def test_wide_pair_rejected():
    mask = valid_pair_mask(np.array([-1 + 0j, -1 + 0.5j]))
    assert mask.tolist() == [False]  # width/spacing = 2


def test_degenerate_spacing_rejected():
    mask = valid_pair_mask(np.array([-0.1 + 1j, -0.1 + 1j]))
    assert mask.tolist() == [False]


def test_filter_levels_keeps_fully_valid_neighbourhoods():
    eigenvalues = np.array(
        [-0.01 + 0j, -0.01 + 1j, -0.01 + 2j, -5.0 + 2.1j, -5.0 + 9j]
    )
    sample = sample_from_eigenvalues(eigenvalues)
    # pairs: (0,1) ok, (1,2) ok, (2,3) overlapping, (3,4) overlapping;
    # level 2 borders a rejected pair and drops out of the retained set
    assert filter_levels(sample).tolist() == [0, 1]


def test_level_runs_split_on_invalid_pairs():
    runs = level_runs(np.array([True, True, False, True]))
    assert runs == [(0, 3), (3, 5)]


def test_filter_is_idempotent_and_deterministic():
    rng = np.random.default_rng(0)
    eigenvalues = np.sort(rng.uniform(0, 10, 40)) * 1j - rng.uniform(0.001, 0.05, 40)
    sample = sample_from_eigenvalues(eigenvalues)
    first = filter_levels(sample)
    second = filter_levels(sample)
    assert np.array_equal(first, second)


# ---------------------------------------------------------------------------
# gap ratios
# ---------------------------------------------------------------------------

def test_simple_gap_ratio():
    assert gap_ratios(np.array([0.0, 1.0, 3.0])) == pytest.approx([0.5])


def test_equally_spaced_levels():
    assert np.allclose(gap_ratios(np.arange(10.0)), 1.0)


def test_too_few_levels():
    with pytest.raises(TooFewLevelsError):
        gap_ratios(np.array([0.0, 1.0]))


def test_affine_invariance():
    rng = np.random.default_rng(1)
    levels = np.sort(rng.uniform(0, 5, 30))
    assert np.allclose(gap_ratios(levels), gap_ratios(3.7 * levels + 11.0))


def test_uniform_levels_poisson_mean():
    # i.i.d. uniform levels: mean ratio 2 ln 2 - 1, well inside 3 std errors
    rng = np.random.default_rng(2)
    ratios = np.concatenate(
        [gap_ratios(np.sort(rng.uniform(0, 1, 100))) for _ in range(1000)]
    )
    stderr = ratios.std(ddof=1) / np.sqrt(ratios.size)
    assert abs(ratios.mean() - R_BAR_POISSON) < 3.0 * stderr


# ---------------------------------------------------------------------------
# GOE surmise sampler
# ---------------------------------------------------------------------------

def test_surmise_density_normalized():
    integral, _ = quad(surmise_density, 0.0, 1.0)
    assert integral == pytest.approx(1.0, abs=1e-8)


def test_surmise_sampler_matches_quadrature_mean():
    mean_exact, _ = quad(lambda r: r * surmise_density(r), 0.0, 1.0)
    assert mean_exact == pytest.approx(4.0 - 2.0 * np.sqrt(3.0), abs=1e-9)
    rng = np.random.default_rng(3)
    draws = sample_surmise_gap_ratios(rng, 100_000)
    assert draws.min() >= 0.0 and draws.max() <= 1.0
    assert abs(draws.mean() - mean_exact) < 3.0 * draws.std() / np.sqrt(draws.size)
    # the surmise mean sits on the documented GOE reference value
    assert abs(mean_exact - R_BAR_GOE) < 0.01


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

def test_all_unit_ratios():
    stats = aggregate_statistics([np.ones(5), np.ones(7)])
    assert stats.mean_gap_ratio == pytest.approx(1.0)
    assert stats.intrasample_variance == pytest.approx(0.0)


def test_mean_of_realization_means():
    stats = aggregate_statistics([np.full(4, 0.3), np.full(6, 0.5)])
    assert stats.mean_gap_ratio == pytest.approx(0.4)
    assert stats.intrasample_variance == pytest.approx(0.0)


def test_no_valid_realizations():
    with pytest.raises(NoValidRealizationsError):
        aggregate_statistics([np.empty(0), np.empty(0)])


def test_intrasample_variance_is_mean_sample_variance():
    a = np.array([0.2, 0.4, 0.9])
    b = np.array([0.5, 0.7])
    stats = aggregate_statistics([a, b])
    expected = 0.5 * (np.var(a, ddof=1) + np.var(b, ddof=1))
    assert stats.intrasample_variance == pytest.approx(expected)


# ---------------------------------------------------------------------------
# eigenvector-weight constraint
# ---------------------------------------------------------------------------

def test_zone_weight_retention():
    eigenvalues = np.array([-0.001 + 0j, -0.001 + 1j, -0.001 + 2j])
    # columns: weight on site 1 = 0, 0.25, 0.5
    vectors = np.zeros((2, 3), dtype=complex)
    vectors[:, 0] = [1.0, 0.0]
    vectors[:, 1] = [np.sqrt(0.75), 0.5]
    vectors[:, 2] = [np.sqrt(0.5), np.sqrt(0.5)]
    sample = SpectralSample(eigenvalues, vectors)
    weights = zone_weights(sample, np.array([1]))
    assert np.allclose(weights, [0.0, 0.25, 0.5])
    kept = weight_constrained_filter(sample, np.array([1]), threshold=0.25)
    # exact threshold weight is rejected (strict inequality)
    assert kept.tolist() == [2]


def test_full_zone_constraint_is_noop():
    config = SystemConfig(12, 6, 6, xi=0.5, disorder_strength=0.8)
    sample = eigendecompose(
        build_coupling_matrix(config, sample_disorder(config, 5)), validate=False
    )
    zone = np.arange(12)
    unconstrained = realization_gap_ratios(sample)
    constrained = realization_gap_ratios(sample, zone=zone, threshold=0.25)
    assert np.allclose(unconstrained, constrained)


def test_fully_disordered_constraint_matches_unconstrained_statistics():
    # zone = whole chain consistency at the ensemble level
    config = SystemConfig(40, 0, 40, xi=0.5, disorder_strength=0.8)
    plain = run_spectrum_ensemble(config, 40, master_seed=5)
    constrained = run_spectrum_ensemble(
        config, 40, master_seed=5, weight_zone="disordered"
    )
    assert constrained.statistics.mean_gap_ratio == pytest.approx(
        plain.statistics.mean_gap_ratio, abs=1e-12
    )


def test_spectrum_dissipativity_and_sorting():
    config = SystemConfig(30, 15, 15, xi=0.4, directionality=0.2, disorder_strength=0.6)
    result = run_spectrum_ensemble(config, 5, master_seed=9)
    for realization in result.realizations:
        assert np.all(realization.eigenvalues.real <= 1e-10)
        assert np.all(np.diff(realization.eigenvalues.imag) >= 0.0)
