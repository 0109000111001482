"""Level statistics of the complex coupling-matrix spectrum.

Eigenvalues are complex: real parts are (negative) collective decay rates,
imaginary parts are energy shifts.  Level statistics are computed on the
imaginary parts after a resonance-width filter discards pairs whose decay
widths overlap their spacing:

    pair (n, n+1) is valid  iff  (-Re[l_n + l_{n+1}] / 2) / Im[l_{n+1} - l_n] < 1/2

with the spectrum sorted by imaginary part ascending.  Gap ratios
``r_j = min(d_j, d_{j-1}) / max(d_j, d_{j-1})`` are formed only inside maximal
runs of consecutive valid pairs, so no ratio ever straddles a rejected gap.

Reference values: uncorrelated (Poisson) levels give a mean ratio
``2 ln 2 - 1 ~= 0.386``; strongly repelling (GOE-like) levels give ``~= 0.53``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoValidRealizationsError, TooFewLevelsError

__all__ = [
    "SpectralSample",
    "GapStatistics",
    "R_BAR_POISSON",
    "R_BAR_GOE",
    "valid_pair_mask",
    "filter_levels",
    "weight_constrained_filter",
    "zone_weights",
    "level_runs",
    "gap_ratios",
    "realization_gap_ratios",
    "aggregate_statistics",
    "sample_surmise_gap_ratios",
]

#: Mean gap ratio of uncorrelated (Poisson) level sequences, 2 ln 2 - 1.
R_BAR_POISSON = 2.0 * np.log(2.0) - 1.0

#: Mean gap ratio of GOE-class spectra (large-matrix value).
R_BAR_GOE = 0.5307

WIDTH_SPACING_CUTOFF = 0.5


@dataclass(frozen=True)
class SpectralSample:
    """Eigendecomposition of one coupling matrix.

    ``eigenvalues`` are sorted by imaginary part ascending (ties broken by
    real part, then original index); ``eigenvectors`` holds the matching right
    eigenvectors as unit-norm columns.  ``disorder_seed`` is -1 when the
    matrix did not come from a seeded disorder realization.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    disorder_seed: int = -1

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def energies(self) -> np.ndarray:
        """Sorted energy shifts (imaginary parts)."""
        return self.eigenvalues.imag


@dataclass(frozen=True)
class GapStatistics:
    """Ensemble-aggregated gap-ratio statistics."""

    mean_gap_ratio: float
    intrasample_variance: float
    retained_fraction: float
    n_realizations: int


def valid_pair_mask(eigenvalues: np.ndarray) -> np.ndarray:
    """Boolean mask over adjacent pairs of a sorted spectrum.

    A pair passes when the mean resonance width is less than half its energy
    spacing; degenerate spacings are always rejected.
    """
    widths = -0.5 * (eigenvalues[:-1].real + eigenvalues[1:].real)
    spacings = np.diff(eigenvalues.imag)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(spacings > 0.0, widths / spacings, np.inf)
    return ratio < WIDTH_SPACING_CUTOFF


def level_runs(pair_ok: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of consecutive valid pairs.

    Returns half-open level-index ranges ``(start, stop)``; a run with k valid
    pairs spans k+1 levels and yields k-1 gap ratios.
    """
    runs: list[tuple[int, int]] = []
    start = None
    for i, ok in enumerate(pair_ok):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            runs.append((start, i + 1))
            start = None
    if start is not None:
        runs.append((start, len(pair_ok) + 1))
    return runs


def filter_levels(sample: SpectralSample) -> np.ndarray:
    """Indices of levels whose every adjacent pair passes the width filter."""
    return _retained_indices(valid_pair_mask(sample.eigenvalues))


def _retained_indices(pair_ok: np.ndarray) -> np.ndarray:
    n = pair_ok.shape[0] + 1
    if n == 1:
        return np.arange(1)  # a lone level has no overlapping neighbour
    keep = np.ones(n, dtype=bool)
    keep[:-1] &= pair_ok
    keep[1:] &= pair_ok
    return np.nonzero(keep)[0]


def zone_weights(sample: SpectralSample, zone: np.ndarray) -> np.ndarray:
    """Per-level excitation weight inside ``zone`` (eigenvector column mass)."""
    return np.sum(np.abs(sample.eigenvectors[np.asarray(zone, dtype=int), :]) ** 2, axis=0)


def weight_constrained_filter(
    sample: SpectralSample, zone: np.ndarray, threshold: float = 0.25
) -> np.ndarray:
    """Width-filtered levels that also carry strictly more than ``threshold``
    excitation weight in ``zone``."""
    heavy = zone_weights(sample, zone) > threshold
    return np.intersect1d(filter_levels(sample), np.nonzero(heavy)[0])


def gap_ratios(levels: np.ndarray) -> np.ndarray:
    """Gap ratios of a strictly increasing level sequence.

    r_j = min(d_j, d_{j-1}) / max(d_j, d_{j-1}) for the adjacent spacings
    d_j; one ratio per interior level.  Invariant under affine rescaling of
    the levels.
    """
    levels = np.asarray(levels, dtype=float)
    if levels.size < 3:
        raise TooFewLevelsError(
            f"gap ratios need at least 3 levels, got {levels.size}"
        )
    gaps = np.diff(levels)
    return np.minimum(gaps[:-1], gaps[1:]) / np.maximum(gaps[:-1], gaps[1:])


def realization_gap_ratios(
    sample: SpectralSample,
    zone: np.ndarray | None = None,
    threshold: float = 0.25,
) -> np.ndarray:
    """Pooled gap ratios of one realization after all filters.

    Adjacent pairs must pass the resonance-width filter and, when ``zone`` is
    given, both endpoints must carry more than ``threshold`` weight in the
    zone.  Ratios are formed independently inside each surviving run and
    pooled; the result may be empty.
    """
    pair_ok = valid_pair_mask(sample.eigenvalues)
    if zone is not None:
        heavy = zone_weights(sample, zone) > threshold
        pair_ok = pair_ok & heavy[:-1] & heavy[1:]
    energies = sample.energies
    pooled: list[np.ndarray] = []
    for start, stop in level_runs(pair_ok):
        if stop - start >= 3:
            pooled.append(gap_ratios(energies[start:stop]))
    if not pooled:
        return np.empty(0)
    return np.concatenate(pooled)


def aggregate_statistics(
    ratio_lists: list[np.ndarray],
    retained_counts: np.ndarray | None = None,
    level_counts: np.ndarray | None = None,
) -> GapStatistics:
    """Aggregate per-realization gap ratios into ensemble statistics.

    The mean gap ratio is the ensemble mean of per-realization means r_a;
    the intrasample variance is the ensemble mean of the per-realization
    sample variance of the r_j about r_a (realizations with fewer than two
    ratios contribute to the mean only).
    """
    means = [float(np.mean(r)) for r in ratio_lists if r.size >= 1]
    if not means:
        raise NoValidRealizationsError(
            "no realization retained enough levels for a gap ratio"
        )
    variances = [float(np.var(r, ddof=1)) for r in ratio_lists if r.size >= 2]
    if retained_counts is not None and level_counts is not None:
        retained_fraction = float(np.sum(retained_counts) / np.sum(level_counts))
    else:
        retained_fraction = float("nan")
    return GapStatistics(
        mean_gap_ratio=float(np.mean(means)),
        intrasample_variance=float(np.mean(variances)) if variances else 0.0,
        retained_fraction=retained_fraction,
        n_realizations=len(means),
    )


def sample_surmise_gap_ratios(rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw gap ratios from the GOE Wigner-like surmise density on [0, 1].

    P(r) = (27/4) (r + r^2) / (1 + r + r^2)^(5/2); rejection sampling against
    a uniform envelope.  Used as the level-repulsion calibration oracle.
    """
    out = np.empty(0)
    # density maximum ~1.2549 at r = (sqrt(11/3) - 1)/2; 1.26 dominates it
    peak = 1.26
    while out.size < size:
        need = size - out.size
        r = rng.uniform(0.0, 1.0, size=2 * need + 16)
        u = rng.uniform(0.0, peak, size=r.size)
        dens = 27.0 / 4.0 * (r + r * r) / (1.0 + r + r * r) ** 2.5
        out = np.concatenate([out, r[u < dens]])
    return out[:size]
