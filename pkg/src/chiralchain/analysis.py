"""Post-processing of sweep curves into crossover points and interface
profiles.

Two independent estimators locate the delocalization-to-localization
crossover as a function of disorder strength:

- the midpoint rule on a mean-gap-ratio curve (reciprocal coupling only):
  the disorder strength where the curve crosses halfway between its weak-
  and strong-disorder plateaus;
- the maximum of the time-integrated directional photon loss ratio read out
  at a fixed long time, refined parabolically around the sampled maximum.

Both return bracketed estimates; the figures publish orderings of these
points rather than absolute values, and so do the acceptance contracts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FlatCurveError, NoCrossingError
from .model import SystemConfig

__all__ = [
    "CrossoverEstimate",
    "InterfaceProfile",
    "crossover_from_gap_ratio",
    "crossover_from_dplr",
    "interface_profile",
]

PLATEAU_SAMPLES = 3
MIN_CURVE_POINTS = 6


@dataclass(frozen=True)
class CrossoverEstimate:
    """Estimated crossover disorder strength with its sampling bracket."""

    method: str
    w_star: float
    w_low: float
    w_high: float

    def __post_init__(self) -> None:
        if not (self.w_low <= self.w_star <= self.w_high):
            raise ValueError("crossover estimate left its bracket")


def _as_sorted_curve(w_values, y_values, stderr=None):
    w = np.asarray(w_values, dtype=float)
    y = np.asarray(y_values, dtype=float)
    if w.shape != y.shape or w.ndim != 1:
        raise ValueError("curve arrays must be 1-D and equally long")
    if w.size < MIN_CURVE_POINTS:
        raise ValueError(
            f"crossover estimation needs >= {MIN_CURVE_POINTS} disorder strengths, "
            f"got {w.size}"
        )
    order = np.argsort(w)
    se = None if stderr is None else np.asarray(stderr, dtype=float)[order]
    return w[order], y[order], se


def crossover_from_gap_ratio(w_values, r_bar_values) -> CrossoverEstimate:
    """Midpoint-rule crossover of a mean-gap-ratio curve.

    Plateaus are the means over the PLATEAU_SAMPLES weakest and strongest
    sampled disorder strengths; the estimate linearly interpolates the first
    crossing of their midpoint.  Raises NoCrossingError when the curve never
    reaches the midpoint (typical outside the reciprocal regime).
    """
    w, r, _ = _as_sorted_curve(w_values, r_bar_values)
    weak = float(np.mean(r[:PLATEAU_SAMPLES]))
    strong = float(np.mean(r[-PLATEAU_SAMPLES:]))
    midpoint = 0.5 * (weak + strong)
    above = r > midpoint
    crossings = np.nonzero(above[:-1] != above[1:])[0]
    if crossings.size == 0 or np.isclose(weak, strong):
        raise NoCrossingError(
            f"gap-ratio curve never crosses its plateau midpoint {midpoint:.4f}"
        )
    i = int(crossings[0])
    fraction = (midpoint - r[i]) / (r[i + 1] - r[i])
    w_star = w[i] + fraction * (w[i + 1] - w[i])
    return CrossoverEstimate("gap_ratio_midpoint", float(w_star), float(w[i]), float(w[i + 1]))


def crossover_from_dplr(w_values, dplr_values, stderr=None) -> CrossoverEstimate:
    """Crossover from the maximum of a loss-ratio-at-readout curve.

    Raises FlatCurveError when no maximum is resolvable: either the curve's
    total variation is within twice the pooled standard error (the maximum
    position would be noise), or the sampled maximum sits on the boundary of
    the disorder range (nothing brackets it; monotone curves have no
    crossover inside the sampled window).  The sampled maximum is refined
    with a parabola through its three surrounding points, clamped to the
    enclosing bracket.
    """
    w, y, se = _as_sorted_curve(w_values, dplr_values, stderr)
    span = float(np.max(y) - np.min(y))
    if se is not None:
        pooled = float(np.sqrt(np.mean(se**2)))
        if span < 2.0 * pooled:
            raise FlatCurveError(
                f"loss-ratio curve variation {span:.4g} is below twice the "
                f"pooled standard error {pooled:.4g}"
            )
    elif span == 0.0:
        raise FlatCurveError("loss-ratio curve is exactly constant")

    peak = int(np.argmax(y))
    if peak == 0 or peak == w.size - 1:
        raise FlatCurveError(
            f"loss-ratio maximum sits at the sampled boundary w = {w[peak]}; "
            "no interior maximum to bracket"
        )
    low = w[peak - 1]
    high = w[peak + 1]
    w_star = w[peak]
    x0, x1, x2 = w[peak - 1 : peak + 2]
    y0, y1, y2 = y[peak - 1 : peak + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    if denom != 0.0:
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
        if a < 0.0:  # proper maximum
            w_star = float(np.clip(-b / (2.0 * a), low, high))
    return CrossoverEstimate("dplr_maximum", float(w_star), float(low), float(high))


@dataclass(frozen=True)
class InterfaceProfile:
    """Ensemble-mean site populations at a readout time, zone-annotated."""

    site_population: np.ndarray
    n_clean: int
    readout_time: float

    @property
    def clean_population(self) -> np.ndarray:
        return self.site_population[: self.n_clean]

    @property
    def disordered_population(self) -> np.ndarray:
        return self.site_population[self.n_clean :]

    @property
    def total(self) -> float:
        return float(np.sum(self.site_population))


def interface_profile(
    mean_populations: np.ndarray, config: SystemConfig, readout_time: float
) -> tuple[InterfaceProfile, float]:
    """Wrap an ensemble-mean population profile and measure its interface width.

    The width is the number of consecutive clean-zone sites, counted leftward
    from the interface site, whose population stays at or above 1/e of the
    interface-site value (0 when only the interface site itself qualifies).
    A profile entirely on one site therefore has width 0; a weaker disorder
    spreads further into the clean zone and yields a larger width.
    """
    profile = InterfaceProfile(
        np.asarray(mean_populations, dtype=float), config.n_clean, readout_time
    )
    clean = profile.clean_population
    if clean.size == 0:
        return profile, 0.0
    interface_value = clean[-1]
    if interface_value <= 0.0:
        return profile, 0.0
    threshold = interface_value / np.e
    width = 0
    for distance in range(1, clean.size):
        if clean[-1 - distance] >= threshold:
            width = distance
        else:
            break
    return profile, float(width)
