"""Command-line driver: TOML configuration in, deterministic CSV tables out.

Subcommands
-----------
run       time-series observables for one system (one CSV per observable)
sweep     parameter sweeps with scalar summaries and crossover estimates
spectrum  eigenvalue export plus gap-ratio statistics

Every run writes a ``manifest.json`` recording the resolved configuration,
its digest, seeds, and output files.  CSV payloads are byte-stable across
repeated runs with equal seeds at any worker count; numbers are serialized
with 17 significant digits so determinism is checkable with a byte compare.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .analysis import crossover_from_dplr, crossover_from_gap_ratio, interface_profile
from .ensemble import (
    EnsembleSpec,
    SweepSpec,
    run_ensemble,
    run_spectrum_ensemble,
    run_sweep,
)
from .errors import ConfigError, FlatCurveError, NoCrossingError, NonConvergedError
from .evolve import TimeGrid, linear_time_grid, log_time_grid
from .model import SystemConfig
from .observables import OBSERVABLE_KINDS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SYSTEM_KEYS = {
    "n_total",
    "n_clean",
    "n_disordered",
    "xi",
    "xi_over_pi",
    "directionality",
    "gamma_total",
    "disorder_strength",
}
RUN_KEYS = {
    "n_realizations",
    "master_seed",
    "observables",
    "initial_zone",
    "profile_time",
    "cut",
}
GRID_KEYS = {"t_min", "t_max", "n_points", "spacing", "include_zero"}


def fmt(value) -> str:
    """Serialize one CSV cell; floats get 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(cell) for cell in row) + "\n")


# ---------------------------------------------------------------------------
# configuration loading
# ---------------------------------------------------------------------------

def load_toml(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # tomllib reports line and column in its message
        raise ConfigError(f"{path}: {exc}") from exc


def parse_override(text: str):
    """Parse one --set KEY=VALUE override into (section, key, value)."""
    if "=" not in text:
        raise ConfigError(f"--set expects KEY=VALUE, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    if "." in key:
        section, key = key.split(".", 1)
    elif key in SYSTEM_KEYS:
        section = "system"
    elif key in RUN_KEYS:
        section = "run"
    elif key in GRID_KEYS:
        section = "grid"
    else:
        raise ConfigError(f"--set key {key!r} does not match any known setting")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare string value
    return section, key, value


def apply_overrides(document: dict, overrides: list) -> list:
    applied = []
    for text in overrides:
        section, key, value = parse_override(text)
        document.setdefault(section, {})[key] = value
        applied.append({"section": section, "key": key, "value": value})
    return applied


def _require(table: dict, key: str, section: str):
    if key not in table:
        raise ConfigError(f"missing required key '{key}' in [{section}]")
    return table[key]


def build_system_config(document: dict) -> SystemConfig:
    table = document.get("system")
    if table is None:
        raise ConfigError("missing required section [system]")
    unknown = set(table) - SYSTEM_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in [system]: {sorted(unknown)}")
    n_total = int(_require(table, "n_total", "system"))

    if "xi" in table and "xi_over_pi" in table:
        raise ConfigError("give either 'xi' or 'xi_over_pi' in [system], not both")
    if "xi" in table:
        xi = float(table["xi"])
    elif "xi_over_pi" in table:
        xi = np.pi * float(table["xi_over_pi"])
    else:
        raise ConfigError("missing required key 'xi' (or 'xi_over_pi') in [system]")

    n_clean = table.get("n_clean")
    n_disordered = table.get("n_disordered")
    if n_clean is None and n_disordered is None:
        n_clean = n_total // 2
        n_disordered = n_total - n_clean
    elif n_clean is None:
        n_clean = n_total - int(n_disordered)
    elif n_disordered is None:
        n_disordered = n_total - int(n_clean)

    return SystemConfig(
        n_total=n_total,
        n_clean=int(n_clean),
        n_disordered=int(n_disordered),
        xi=xi,
        directionality=float(table.get("directionality", 0.0)),
        gamma_total=float(table.get("gamma_total", 1.0)),
        disorder_strength=float(table.get("disorder_strength", 0.0)),
    )


def build_grid(document: dict) -> TimeGrid:
    table = document.get("grid", {})
    unknown = set(table) - GRID_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in [grid]: {sorted(unknown)}")
    spacing = table.get("spacing", "logarithmic")
    if spacing == "logarithmic":
        return log_time_grid(
            t_min=float(table.get("t_min", 1e-2)),
            t_max=float(table.get("t_max", 1e4)),
            n_points=int(table.get("n_points", 200)),
            include_zero=bool(table.get("include_zero", True)),
        )
    if spacing == "linear":
        return linear_time_grid(
            float(table.get("t_min", 0.0)),
            float(table.get("t_max", 10.0)),
            int(table.get("n_points", 200)),
        )
    raise ConfigError(f"grid spacing must be 'logarithmic' or 'linear', got {spacing!r}")


def build_run_settings(document: dict) -> dict:
    table = document.get("run", {})
    unknown = set(table) - RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in [run]: {sorted(unknown)}")
    observables = tuple(table.get("observables", OBSERVABLE_KINDS))
    bad = set(observables) - set(OBSERVABLE_KINDS)
    if bad:
        raise ConfigError(f"unknown observables in [run]: {sorted(bad)}")
    return {
        "n_realizations": int(table.get("n_realizations", 200)),
        "master_seed": int(table.get("master_seed", 0)),
        "observables": observables,
        "initial_zone": table.get("initial_zone", "disordered"),
        "profile_time": (
            float(table["profile_time"]) if "profile_time" in table else None
        ),
        "cut": int(table["cut"]) if "cut" in table else None,
    }


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------

def _utcnow() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def write_manifest(
    out_dir: Path,
    command: str,
    config: SystemConfig | None,
    settings: dict,
    grid: TimeGrid | None,
    outputs: list,
    overrides: list,
    workers: int,
    started: str,
    extra: dict | None = None,
) -> Path:
    manifest = {
        "tool_version": __version__,
        "command": command,
        "config_digest": config.digest() if config is not None else None,
        "config": None
        if config is None
        else {k: getattr(config, k) for k in (
            "n_total", "n_clean", "n_disordered", "xi", "directionality",
            "gamma_total", "disorder_strength",
        )},
        "master_seed": settings.get("master_seed"),
        "n_realizations": settings.get("n_realizations"),
        "grid": None
        if grid is None
        else {
            "n_points": len(grid),
            "t_first": float(grid.points[0]),
            "t_last": float(grid.points[-1]),
            "spacing": grid.spacing,
        },
        "workers": workers,
        "overrides": overrides,
        "started": started,
        "finished": _utcnow(),
        "outputs": [str(p.name) for p in outputs],
    }
    if extra:
        manifest.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=float) + "\n")
    return path


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    started = _utcnow()
    document = load_toml(args.config)
    overrides = apply_overrides(document, args.set or [])
    config = build_system_config(document)
    grid = build_grid(document)
    settings = build_run_settings(document)
    if args.seed is not None:
        settings["master_seed"] = args.seed
        overrides.append({"section": "run", "key": "master_seed", "value": args.seed})
    if args.realizations is not None:
        settings["n_realizations"] = args.realizations
        overrides.append(
            {"section": "run", "key": "n_realizations", "value": args.realizations}
        )

    spec = EnsembleSpec(
        base_config=config,
        n_realizations=settings["n_realizations"],
        master_seed=settings["master_seed"],
        grid=grid,
        observables=settings["observables"],
        initial_zone=settings["initial_zone"],
        cut=settings["cut"],
        profile_time=settings["profile_time"],
    )
    result = run_ensemble(spec, workers=args.workers)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for kind in settings["observables"]:
        series = result.series[kind]
        path = out_dir / f"{kind}.csv"
        write_csv(
            path,
            ["gamma_t", "mean", "stderr", "n_surviving"],
            zip(grid.points, series.values, series.stderr, series.n_surviving),
        )
        outputs.append(path)
    if result.site_profile is not None:
        profile, width = interface_profile(
            result.site_profile, config, result.profile_time
        )
        path = out_dir / "profile.csv"
        write_csv(
            path,
            ["site", "zone", "population"],
            (
                (
                    mu + 1,
                    "clean" if mu < config.n_clean else "disordered",
                    pop,
                )
                for mu, pop in enumerate(profile.site_population)
            ),
        )
        outputs.append(path)
        extra = {
            "profile_time": result.profile_time,
            "interface_width_sites": width,
        }
    else:
        extra = None
    write_manifest(
        out_dir, "run", config, settings, grid, outputs, overrides,
        args.workers, started, extra,
    )
    return EXIT_OK


def cmd_spectrum(args) -> int:
    started = _utcnow()
    document = load_toml(args.config)
    overrides = apply_overrides(document, args.set or [])
    config = build_system_config(document)
    settings = build_run_settings(document)
    if args.seed is not None:
        settings["master_seed"] = args.seed
    if args.realizations is not None:
        settings["n_realizations"] = args.realizations

    table = document.get("spectrum", {})
    weight_zone = table.get("weight_zone")
    threshold = float(table.get("weight_threshold", 0.25))

    if config.directionality != 0.0:
        print(
            "warning: gap-ratio statistics assume reciprocal coupling "
            f"(directionality = 0); got D = {config.directionality}. "
            "Statistics are emitted anyway but may not separate the phases.",
            file=sys.stderr,
        )

    result = run_spectrum_ensemble(
        config,
        settings["n_realizations"],
        settings["master_seed"],
        weight_zone=weight_zone,
        threshold=threshold,
        workers=args.workers,
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    spectrum_path = out_dir / "spectrum.csv"
    rows = (
        (
            realization.seed,
            index,
            value.real,
            value.imag,
            realization.zone_weight[index],
            realization.retained[index],
        )
        for realization in result.realizations
        for index, value in enumerate(realization.eigenvalues)
    )
    write_csv(
        spectrum_path,
        ["seed", "index", "re_lambda", "im_lambda", "zone_weight", "retained"],
        rows,
    )
    stats_path = out_dir / "gap_statistics.csv"
    stats = result.statistics
    write_csv(
        stats_path,
        ["mean_gap_ratio", "intrasample_variance", "retained_fraction", "n_realizations"],
        [
            (
                stats.mean_gap_ratio,
                stats.intrasample_variance,
                stats.retained_fraction,
                stats.n_realizations,
            )
        ],
    )
    write_manifest(
        out_dir, "spectrum", config, settings, None,
        [spectrum_path, stats_path], overrides, args.workers, started,
        extra={"weight_zone": weight_zone, "weight_threshold": threshold},
    )
    return EXIT_OK


def _build_sweep_spec(document: dict, args) -> tuple:
    config = build_system_config(document)
    grid = build_grid(document)
    settings = build_run_settings(document)
    if args.seed is not None:
        settings["master_seed"] = args.seed
    if args.realizations is not None:
        settings["n_realizations"] = args.realizations

    table = document.get("sweep")
    if table is None:
        raise ConfigError("missing required section [sweep]")
    axes_table = table.get("axes")
    if not axes_table:
        raise ConfigError("missing required table [sweep.axes]")
    axes = tuple((name, tuple(values)) for name, values in axes_table.items())
    constraints = tuple(
        (target, expression)
        for target, expression in table.get("constraints", {}).items()
    )
    spec = SweepSpec(
        base_config=config,
        axes=axes,
        n_realizations=settings["n_realizations"],
        master_seed=settings["master_seed"],
        grid=grid,
        constraints=constraints,
        summaries=tuple(table.get("summaries", ["pr", "dplr"])),
        readout_time=float(table.get("readout_time", 4000.0)),
        initial_zone=settings["initial_zone"],
        weight_zone=table.get("weight_zone"),
        weight_threshold=float(table.get("weight_threshold", 0.25)),
    )
    crossover_methods = tuple(table.get("crossover", []))
    return spec, settings, crossover_methods


SUMMARY_COLUMNS = {
    "imbalance": ["imbalance_mean", "imbalance_stderr", "imbalance_n"],
    "right_population": [
        "right_population_mean",
        "right_population_stderr",
        "right_population_n",
    ],
    "entropy": ["entropy_mean", "entropy_stderr", "entropy_n"],
    "pr": ["pr_mean", "pr_stderr", "pr_n", "pr_over_n", "pr_over_nd"],
    "dplr": ["dplr_mean", "dplr_stderr", "dplr_n"],
    "gap_ratio": ["r_bar", "v_i", "retained_fraction", "gap_ratio_n"],
}

CROSSOVER_SOURCE = {"gap_ratio": "r_bar", "dplr": "dplr_mean"}


def _crossover_rows(result, methods):
    """Crossover estimates per curve (grouped by all non-disorder axes)."""
    group_names = [n for n in result.parameter_names if n != "disorder_strength"]
    groups = {}
    for row in result.rows:
        key = tuple(row[n] for n in group_names)
        groups.setdefault(key, []).append(row)
    out = []
    for method in methods:
        column = CROSSOVER_SOURCE[method]
        for key, rows in groups.items():
            ok = [r for r in rows if not r["error"] and column in r]
            record = dict(zip(group_names, key))
            record["method"] = method
            record.update({"w_star": "", "w_low": "", "w_high": "", "error": ""})
            try:
                w = [r["disorder_strength"] for r in ok]
                y = [r[column] for r in ok]
                if method == "dplr":
                    se = [r.get("dplr_stderr", 0.0) for r in ok]
                    estimate = crossover_from_dplr(w, y, se)
                else:
                    estimate = crossover_from_gap_ratio(w, y)
                record.update(
                    w_star=estimate.w_star,
                    w_low=estimate.w_low,
                    w_high=estimate.w_high,
                )
            except (FlatCurveError, NoCrossingError, ValueError) as exc:
                record["error"] = f"{type(exc).__name__}: {exc}"
            out.append(record)
    return group_names, out


def cmd_sweep(args) -> int:
    started = _utcnow()
    document = load_toml(args.sweep)
    overrides = apply_overrides(document, args.set or [])
    spec, settings, crossover_methods = _build_sweep_spec(document, args)

    result = run_sweep(spec, workers=args.workers)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    columns = list(result.parameter_names)
    for summary in spec.summaries:
        columns.extend(SUMMARY_COLUMNS[summary])
    columns.append("error")
    sweep_path = out_dir / "sweep.csv"
    write_csv(
        sweep_path,
        columns,
        ([row.get(c, "") for c in columns] for row in result.rows),
    )
    outputs = [sweep_path]

    if crossover_methods:
        group_names, records = _crossover_rows(result, crossover_methods)
        cross_path = out_dir / "crossovers.csv"
        cross_columns = group_names + ["method", "w_star", "w_low", "w_high", "error"]
        write_csv(
            cross_path,
            cross_columns,
            ([record.get(c, "") for c in cross_columns] for record in records),
        )
        outputs.append(cross_path)

    failures = sum(1 for row in result.rows if row["error"])
    points = [
        {k: row[k] for k in result.parameter_names} | {"error": row["error"]}
        for row in result.rows
    ]
    write_manifest(
        out_dir, "sweep", spec.base_config, settings, spec.grid, outputs,
        overrides, args.workers, started,
        extra={
            "axes": {name: list(values) for name, values in spec.axes},
            "constraints": {t: e for t, e in spec.constraints},
            "readout_time": spec.readout_time,
            "points": points,
            "failed_points": failures,
        },
    )
    if failures:
        print(f"warning: {failures} sweep point(s) failed", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralchain",
        description="Simulate excitation dynamics and localization diagnostics "
        "of a chirally coupled emitter chain with a clean/disordered interface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_flag: bool):
        if config_flag:
            p.add_argument("--config", required=True, help="TOML configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument(
            "--workers",
            type=int,
            default=os.cpu_count() or 1,
            help="worker threads for realizations (results are worker-count independent)",
        )
        p.add_argument(
            "--realizations", type=int, default=None, help="override realization count"
        )
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override a config value (repeatable), e.g. --set disorder_strength=0.2",
        )

    run_p = sub.add_parser("run", help="time-series observables for one system")
    common(run_p, config_flag=True)
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="parameter sweep with scalar summaries")
    sweep_p.add_argument("--sweep", required=True, help="TOML sweep file")
    common(sweep_p, config_flag=False)
    sweep_p.set_defaults(func=cmd_sweep)

    spec_p = sub.add_parser("spectrum", help="eigenvalues and gap-ratio statistics")
    common(spec_p, config_flag=True)
    spec_p.set_defaults(func=cmd_spectrum)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergedError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        _remove_partial_outputs(Path(args.out))
        return EXIT_NUMERICAL


def _remove_partial_outputs(out_dir: Path) -> None:
    if not out_dir.is_dir():
        return
    for name in list(out_dir.iterdir()):
        if name.suffix in (".csv", ".json"):
            try:
                name.unlink()
            except OSError:
                pass


if __name__ == "__main__":
    sys.exit(main())
