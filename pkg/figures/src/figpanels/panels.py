"""Panel specifications and the renderer.

A panel spec is a small TOML document:

    [panel]
    title = "Imbalance dynamics"
    output = "imbalance.png"
    x_label = "gamma t"
    y_label = "imbalance"
    x_scale = "log"           # "log" | "linear"
    y_scale = "linear"

    [[series]]
    csv = "runs/w0.5/imbalance.csv"
    x = "gamma_t"
    y = "mean"
    yerr = "stderr"           # optional error band
    label = "w = 0.5"
    style = "-"               # optional matplotlib format string

    [[markers]]               # optional vertical reference lines
    x = 4000.0
    label = "readout"

CSV paths are resolved against a data root at render time, so one checked-in
spec serves any output directory.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

__all__ = ["PanelSpec", "PanelSchemaError", "load_panel_spec", "render_panel"]

SCALES = ("linear", "log")


class PanelSchemaError(ValueError):
    """A panel spec or one of its input CSV files is malformed."""


@dataclass(frozen=True)
class SeriesSpec:
    csv: str
    x: str
    y: str
    label: str
    yerr: str | None = None
    style: str = "-"


@dataclass(frozen=True)
class MarkerSpec:
    """Vertical reference line: a literal position, or positions read from a
    CSV column (crossover-estimate overlays)."""

    x: float | None = None
    csv: str | None = None
    x_column: str | None = None
    label: str = ""

    def __post_init__(self) -> None:
        literal = self.x is not None
        from_csv = self.csv is not None and self.x_column is not None
        if literal == from_csv:
            raise PanelSchemaError(
                "a marker needs either 'x' or both 'csv' and 'x_column'"
            )


@dataclass(frozen=True)
class PanelSpec:
    title: str
    output: str
    x_label: str
    y_label: str
    series: tuple
    x_scale: str = "linear"
    y_scale: str = "linear"
    markers: tuple = ()

    def __post_init__(self) -> None:
        if self.x_scale not in SCALES or self.y_scale not in SCALES:
            raise PanelSchemaError(
                f"axis scales must be one of {SCALES}, got "
                f"({self.x_scale!r}, {self.y_scale!r})"
            )
        if not self.series:
            raise PanelSchemaError("a panel needs at least one [[series]] entry")


def load_panel_spec(path) -> PanelSpec:
    path = Path(path)
    try:
        document = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise PanelSchemaError(f"{path}: {exc}") from exc
    panel = document.get("panel")
    if panel is None:
        raise PanelSchemaError(f"{path}: missing [panel] table")
    for key in ("title", "output", "x_label", "y_label"):
        if key not in panel:
            raise PanelSchemaError(f"{path}: missing key '{key}' in [panel]")
    series = []
    for i, entry in enumerate(document.get("series", [])):
        for key in ("csv", "x", "y", "label"):
            if key not in entry:
                raise PanelSchemaError(
                    f"{path}: series #{i + 1} is missing key '{key}'"
                )
        series.append(
            SeriesSpec(
                csv=entry["csv"],
                x=entry["x"],
                y=entry["y"],
                label=entry["label"],
                yerr=entry.get("yerr"),
                style=entry.get("style", "-"),
            )
        )
    markers = tuple(
        MarkerSpec(
            x=float(m["x"]) if "x" in m else None,
            csv=m.get("csv"),
            x_column=m.get("x_column"),
            label=m.get("label", ""),
        )
        for m in document.get("markers", [])
    )
    return PanelSpec(
        title=panel["title"],
        output=panel["output"],
        x_label=panel["x_label"],
        y_label=panel["y_label"],
        series=tuple(series),
        x_scale=panel.get("x_scale", "linear"),
        y_scale=panel.get("y_scale", "linear"),
        markers=markers,
    )


def read_columns(csv_path: Path, columns) -> dict:
    """Read the named columns from a CSV table, failing loudly."""
    if not csv_path.is_file():
        raise PanelSchemaError(f"input CSV not found: {csv_path}")
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PanelSchemaError(f"{csv_path}: file is empty") from None
        missing = [c for c in columns if c not in header]
        if missing:
            raise PanelSchemaError(
                f"{csv_path}: missing column(s) {missing}; header is {header}"
            )
        index = {c: header.index(c) for c in columns}
        rows = [row for row in reader if row]
    if not rows:
        raise PanelSchemaError(f"{csv_path}: no data rows")
    out = {}
    for c in columns:
        values = []
        for row in rows:
            cell = row[index[c]]
            values.append(float(cell) if cell != "" else np.nan)
        out[c] = np.asarray(values)
    return out


def render_panel(spec: PanelSpec, data_root, out_dir) -> Path:
    """Render one panel to ``out_dir / spec.output``; deterministic output.

    Reads only CSV files resolved against ``data_root``; never touches the
    simulator. Returns the written image path.
    """
    data_root = Path(data_root)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    for entry in spec.series:
        columns = [entry.x, entry.y] + ([entry.yerr] if entry.yerr else [])
        table = read_columns(data_root / entry.csv, columns)
        x, y = table[entry.x], table[entry.y]
        ax.plot(x, y, entry.style, label=entry.label, linewidth=1.4)
        if entry.yerr:
            err = table[entry.yerr]
            ax.fill_between(x, y - err, y + err, alpha=0.25, linewidth=0)
    for marker in spec.markers:
        if marker.x is not None:
            positions = [marker.x]
        else:
            table = read_columns(data_root / marker.csv, [marker.x_column])
            positions = [v for v in table[marker.x_column] if np.isfinite(v)]
        for position in positions:
            ax.axvline(position, color="0.4", linestyle=":", linewidth=1.0)
        if marker.label and positions:
            ax.annotate(marker.label, (positions[0], ax.get_ylim()[1]),
                        xytext=(3, -12), textcoords="offset points",
                        fontsize=8, color="0.3")
    ax.set_xscale(spec.x_scale)
    ax.set_yscale(spec.y_scale)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.set_title(spec.title)
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()

    target = out_dir / spec.output
    fig.savefig(target, metadata={"Software": "chiralchain-figures"})
    plt.close(fig)
    return target
