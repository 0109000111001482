"""Disorder-ensemble orchestration: seeded realizations, averaged series with
error bars, spectral statistics, and parameter sweeps.

Reproducibility contract: realization seeds are a pure function of
(master_seed, realization index); every reduction runs in fixed seed order
over fully gathered per-realization results, so the worker count can never
change a single output bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError, NoValidRealizationsError
from .evolve import TimeGrid, eigendecompose, propagate
from .model import (
    SystemConfig,
    build_coupling_matrix,
    dicke_initial_state,
    sample_disorder,
    zone_sites,
)
from .observables import (
    OBSERVABLE_KINDS,
    ObservableSeries,
    above_uniform_excess,
    profile_participation_ratio,
    trajectory_series,
)
from .spectral import (
    GapStatistics,
    aggregate_statistics,
    realization_gap_ratios,
    weight_constrained_filter,
    filter_levels,
    zone_weights,
)

__all__ = [
    "EnsembleSpec",
    "EnsembleResult",
    "SpectrumRealization",
    "SpectrumResult",
    "SweepSpec",
    "SweepResult",
    "derive_seeds",
    "run_ensemble",
    "run_spectrum_ensemble",
    "run_sweep",
]

SWEEPABLE_PARAMETERS = (
    "disorder_strength",
    "n_total",
    "n_clean",
    "n_disordered",
    "xi",
    "directionality",
    "gamma_total",
)

INTEGER_PARAMETERS = ("n_total", "n_clean", "n_disordered")

TIME_SERIES_SUMMARIES = ("imbalance", "right_population", "entropy", "pr", "dplr")


def derive_seeds(master_seed: int, n_realizations: int) -> np.ndarray:
    """Realization seeds derived from one master seed (uint64, collision-safe)."""
    ss = np.random.SeedSequence(int(master_seed))
    return ss.generate_state(int(n_realizations), dtype=np.uint64)


@dataclass(frozen=True)
class EnsembleSpec:
    """One averaged simulation: a system, a grid, and a realization budget."""

    base_config: SystemConfig
    n_realizations: int
    master_seed: int
    grid: TimeGrid
    observables: tuple = OBSERVABLE_KINDS
    initial_zone: str = "disordered"
    cut: int | None = None
    profile_time: float | None = None

    def __post_init__(self) -> None:
        if self.n_realizations < 1:
            raise ConfigError("n_realizations must be positive")
        unknown = set(self.observables) - set(OBSERVABLE_KINDS)
        if unknown:
            raise ConfigError(f"unknown observable kinds: {sorted(unknown)}")


@dataclass
class EnsembleResult:
    series: dict
    site_profile: np.ndarray | None
    profile_time: float | None
    n_realizations: int
    master_seed: int


def _realization_series(spec: EnsembleSpec, seed: int):
    config = spec.base_config
    disorder = sample_disorder(config, seed)
    matrix = build_coupling_matrix(config, disorder)
    initial = dicke_initial_state(config, spec.initial_zone)
    trajectory = propagate(matrix, initial, spec.grid)
    values = {
        kind: trajectory_series(trajectory, kind, config, disorder, spec.cut)
        for kind in spec.observables
        if kind != "pr"
    }
    excess = above_uniform_excess(trajectory) if "pr" in spec.observables else None
    profile = None
    if spec.profile_time is not None:
        idx = spec.grid.index_of(spec.profile_time)
        profile = np.abs(trajectory.amplitudes[idx]) ** 2
    return values, excess, profile


def _map_indexed(worker, n_items: int, workers: int):
    """Run ``worker(i)`` for i in range(n_items), results gathered by index."""
    results = [None] * n_items
    if workers <= 1 or n_items <= 1:
        for i in range(n_items):
            results[i] = worker(i)
        return results
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i, res in enumerate(pool.map(worker, range(n_items))):
            results[i] = res
    return results


def _reduce_series(stacked: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(mean, stderr, n_surviving) over realizations, NaN-aware, fixed order."""
    n_surviving = np.sum(~np.isnan(stacked), axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(n_surviving > 0, np.nansum(stacked, axis=0), np.nan)
        mean = mean / np.maximum(n_surviving, 1)
        centered = np.where(np.isnan(stacked), 0.0, stacked - mean[None, :])
        ssq = np.sum(centered**2, axis=0)
        stderr = np.where(
            n_surviving > 1,
            np.sqrt(ssq / np.maximum(n_surviving - 1, 1)) / np.sqrt(np.maximum(n_surviving, 1)),
            0.0,
        )
        stderr = np.where(n_surviving == 0, np.nan, stderr)
    mean = np.where(n_surviving == 0, np.nan, mean)
    return mean, stderr, n_surviving


JACKKNIFE_GROUPS = 20


def _jackknife_pr(group_sums: np.ndarray, group_alive: np.ndarray):
    """Participation-ratio series with delete-one-group jackknife errors.

    The PR of the ensemble-mean excess profile is scale invariant, so it is
    evaluated directly on (partial) sums.  ``group_sums`` has shape
    (G, T, N); ``group_alive`` counts surviving realizations per group and
    grid point.
    """
    total = group_sums.sum(axis=0)
    alive = group_alive.sum(axis=0)
    values = profile_participation_ratio(total)
    values = np.where(alive > 0, values, np.nan)
    n_groups = group_sums.shape[0]
    if n_groups < 2:
        return values, np.zeros_like(values), alive
    leave_out = np.stack(
        [profile_participation_ratio(total - group_sums[g]) for g in range(n_groups)]
    )
    with np.errstate(invalid="ignore"):
        center = np.nanmean(leave_out, axis=0)
        variance = (n_groups - 1) / n_groups * np.nansum(
            (leave_out - center) ** 2, axis=0
        )
    stderr = np.where(alive > 0, np.sqrt(variance), np.nan)
    return values, stderr, alive


def run_ensemble(
    spec: EnsembleSpec, workers: int = 1, seeds: np.ndarray | None = None
) -> EnsembleResult:
    """Average all requested observables over disorder realizations.

    Per-realization gaps (vanished norm, undefined loss ratio) are excluded
    from the average; the surviving count is recorded per grid point.
    Participation ratios are taken of the ensemble-mean above-uniform
    profile (average inside the ratio) with delete-a-group jackknife error
    bars.  ``seeds`` overrides the derived seeds (testing/reproduction only).
    """
    if seeds is None:
        seeds = derive_seeds(spec.master_seed, spec.n_realizations)
    seeds = np.asarray(seeds)
    n_real = len(seeds)
    wants_pr = "pr" in spec.observables
    n_groups = min(JACKKNIFE_GROUPS, n_real)

    def worker(i: int):
        return _realization_series(spec, int(seeds[i]))

    scalar_kinds = [k for k in spec.observables if k != "pr"]
    stacks = {kind: [] for kind in scalar_kinds}
    group_sums = None
    group_alive = None
    profile_sum = None

    # map in parallel, reduce on this thread in fixed seed order
    pool = None
    if workers <= 1 or n_real <= 1:
        iterator = map(worker, range(n_real))
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        iterator = pool.map(worker, range(n_real))
    try:
        for i, (values, excess, profile) in enumerate(iterator):
            for kind in scalar_kinds:
                stacks[kind].append(values[kind])
            if excess is not None:
                if group_sums is None:
                    group_sums = np.zeros((n_groups,) + excess.shape)
                    group_alive = np.zeros((n_groups, excess.shape[0]), dtype=int)
                g = i % n_groups
                alive_rows = ~np.isnan(excess[:, 0])
                group_sums[g] += np.where(np.isnan(excess), 0.0, excess)
                group_alive[g] += alive_rows
            if profile is not None:
                profile_sum = profile if profile_sum is None else profile_sum + profile
    finally:
        if pool is not None:
            pool.shutdown()

    series = {}
    for kind in scalar_kinds:
        mean, stderr, n_surviving = _reduce_series(np.stack(stacks[kind]))
        series[kind] = ObservableSeries(
            grid=spec.grid,
            values=mean,
            kind=kind,
            ensemble_size=n_real,
            stderr=stderr,
            n_surviving=n_surviving,
        )
    if wants_pr:
        values, stderr, alive = _jackknife_pr(group_sums, group_alive)
        series["pr"] = ObservableSeries(
            grid=spec.grid,
            values=values,
            kind="pr",
            ensemble_size=n_real,
            stderr=stderr,
            n_surviving=alive,
        )

    site_profile = None if profile_sum is None else profile_sum / n_real

    return EnsembleResult(
        series=series,
        site_profile=site_profile,
        profile_time=spec.profile_time,
        n_realizations=n_real,
        master_seed=spec.master_seed,
    )


# ---------------------------------------------------------------------------
# spectral ensembles
# ---------------------------------------------------------------------------

@dataclass
class SpectrumRealization:
    seed: int
    eigenvalues: np.ndarray
    zone_weight: np.ndarray
    retained: np.ndarray


@dataclass
class SpectrumResult:
    realizations: list
    statistics: GapStatistics
    weight_zone: np.ndarray | None
    threshold: float


def run_spectrum_ensemble(
    config: SystemConfig,
    n_realizations: int,
    master_seed: int,
    weight_zone=None,
    threshold: float = 0.25,
    workers: int = 1,
) -> SpectrumResult:
    """Eigenvalue statistics over disorder realizations.

    ``weight_zone`` (a zone selector, e.g. "disordered") activates the
    eigenvector-weight constraint: only levels with more than ``threshold``
    excitation weight in the zone enter the gap-ratio statistics.  The
    reported per-level zone weight always refers to the disordered zone
    unless a constraint zone is given.
    """
    zone = None if weight_zone is None else zone_sites(config, weight_zone)
    report_zone = zone if zone is not None else config.disordered_sites
    seeds = derive_seeds(master_seed, n_realizations)

    def worker(i: int):
        disorder = sample_disorder(config, int(seeds[i]))
        matrix = build_coupling_matrix(config, disorder)
        sample = eigendecompose(matrix, disorder_seed=int(seeds[i]), validate=False)
        weights = zone_weights(sample, report_zone)
        if zone is None:
            retained_idx = filter_levels(sample)
        else:
            retained_idx = weight_constrained_filter(sample, zone, threshold)
        retained = np.zeros(config.n_total, dtype=bool)
        retained[retained_idx] = True
        ratios = realization_gap_ratios(sample, zone=zone, threshold=threshold)
        realization = SpectrumRealization(
            seed=int(seeds[i]),
            eigenvalues=sample.eigenvalues,
            zone_weight=weights,
            retained=retained,
        )
        return realization, ratios

    results = _map_indexed(worker, len(seeds), workers)
    realizations = [r for r, _ in results]
    ratio_lists = [ratios for _, ratios in results]
    retained_counts = np.array([r.retained.sum() for r in realizations])
    level_counts = np.full(len(realizations), config.n_total)
    try:
        statistics = aggregate_statistics(
            ratio_lists, retained_counts=retained_counts, level_counts=level_counts
        )
    except NoValidRealizationsError:
        # spectra are still reportable even when no gap ratio exists (N < 3
        # or an all-superradiant ensemble)
        statistics = GapStatistics(
            mean_gap_ratio=float("nan"),
            intrasample_variance=float("nan"),
            retained_fraction=float(np.sum(retained_counts) / np.sum(level_counts)),
            n_realizations=0,
        )
    return SpectrumResult(realizations, statistics, zone, threshold)


# ---------------------------------------------------------------------------
# parameter sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """Cartesian parameter sweep; each grid point runs one ensemble.

    ``axes`` maps sweepable parameter names to value lists; ``constraints``
    are (target, expression) pairs evaluated per point (e.g.
    ``("n_clean", "n_total - n_disordered")``) to keep configs consistent.
    All grid points share the same master seed, so disorder draws are common
    random numbers across points: differences along an axis are estimated
    with strongly correlated noise.
    """

    base_config: SystemConfig
    axes: tuple
    n_realizations: int
    master_seed: int
    grid: TimeGrid
    constraints: tuple = ()
    summaries: tuple = ("pr", "dplr")
    readout_time: float = 4000.0
    initial_zone: str = "disordered"
    weight_zone: str | None = None
    weight_threshold: float = 0.25

    def __post_init__(self) -> None:
        for name, values in self.axes:
            if name not in SWEEPABLE_PARAMETERS:
                raise ConfigError(f"cannot sweep parameter {name!r}")
            if len(values) == 0:
                raise ConfigError(f"axis {name!r} has no values")
        for summary in self.summaries:
            if summary not in TIME_SERIES_SUMMARIES + ("gap_ratio",):
                raise ConfigError(f"unknown summary {summary!r}")


@dataclass
class SweepResult:
    parameter_names: list
    rows: list
    summaries: tuple
    readout_time: float


def _evaluate_expression(expression: str, names: dict) -> float:
    """Evaluate a tiny arithmetic expression over parameter names.

    Supports +, -, *, /, //, unary minus, numbers, and parameter names;
    nothing else parses.
    """
    import ast

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.BinOp):
            ops = {
                ast.Add: lambda a, b: a + b,
                ast.Sub: lambda a, b: a - b,
                ast.Mult: lambda a, b: a * b,
                ast.Div: lambda a, b: a / b,
                ast.FloorDiv: lambda a, b: a // b,
            }
            if type(node.op) not in ops:
                raise ConfigError(f"unsupported operator in {expression!r}")
            return ops[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -walk(node.operand)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ConfigError(f"unknown name {node.id!r} in {expression!r}")
            return names[node.id]
        raise ConfigError(f"unsupported syntax in constraint {expression!r}")

    return walk(ast.parse(expression, mode="eval"))


def sweep_points(spec: SweepSpec) -> list:
    """Resolved per-point parameter dicts (axis values plus constraints).

    Points enumerate the cartesian product of the axes in declaration order,
    first axis slowest.
    """
    import itertools

    base = {f.name: getattr(spec.base_config, f.name) for f in fields(SystemConfig)}
    names = [name for name, _ in spec.axes]
    value_lists = [list(values) for _, values in spec.axes]
    points = []
    for combo in itertools.product(*value_lists) if names else [()]:
        params = dict(base)
        params.update(zip(names, combo))
        for target, expression in spec.constraints:
            params[target] = _evaluate_expression(expression, params)
        for key in INTEGER_PARAMETERS:
            rounded = int(round(params[key]))
            if abs(params[key] - rounded) > 1e-9:
                raise ConfigError(
                    f"{key} must be an integer after constraints, got {params[key]}"
                )
            params[key] = rounded
        points.append(params)
    return points


def _point_summaries(spec: SweepSpec, config: SystemConfig, workers: int) -> dict:
    row = {}
    wants_series = [s for s in spec.summaries if s in TIME_SERIES_SUMMARIES]
    if wants_series:
        ensemble = EnsembleSpec(
            base_config=config,
            n_realizations=spec.n_realizations,
            master_seed=spec.master_seed,
            grid=spec.grid,
            observables=tuple(wants_series),
            initial_zone=spec.initial_zone,
        )
        result = run_ensemble(ensemble, workers=workers)
        idx = spec.grid.index_of(spec.readout_time)
        for kind in wants_series:
            series = result.series[kind]
            row[f"{kind}_mean"] = float(series.values[idx])
            row[f"{kind}_stderr"] = float(series.stderr[idx])
            row[f"{kind}_n"] = int(series.n_surviving[idx])
        if "pr" in wants_series:
            row["pr_over_n"] = row["pr_mean"] / config.n_total
            if config.n_disordered > 0:
                row["pr_over_nd"] = row["pr_mean"] / config.n_disordered
            else:
                row["pr_over_nd"] = float("nan")
    if "gap_ratio" in spec.summaries:
        spectrum = run_spectrum_ensemble(
            config,
            spec.n_realizations,
            spec.master_seed,
            weight_zone=spec.weight_zone,
            threshold=spec.weight_threshold,
            workers=workers,
        )
        row["r_bar"] = spectrum.statistics.mean_gap_ratio
        row["v_i"] = spectrum.statistics.intrasample_variance
        row["retained_fraction"] = spectrum.statistics.retained_fraction
        row["gap_ratio_n"] = spectrum.statistics.n_realizations
    return row


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Run every grid point, recording per-point failures without aborting."""
    parameter_names = [name for name, _ in spec.axes]
    rows = []
    for params in sweep_points(spec):
        row = {name: params[name] for name in parameter_names}
        row["error"] = ""
        try:
            config = SystemConfig(**params)
            row.update(_point_summaries(spec, config, workers))
        except Exception as exc:  # per-point failure stays in-row
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return SweepResult(
        parameter_names=parameter_names,
        rows=rows,
        summaries=spec.summaries,
        readout_time=spec.readout_time,
    )
