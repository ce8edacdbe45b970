"""Figure recipes: which CSVs to draw, how, and against which reference.

A recipe is a TOML file:

    figure_id = "fer-vs-drift"
    x_label = "frequency drift rate in Hz/s"
    y_label = "frame error rate"
    x_scale = "log"
    y_scale = "log"
    reference = "fer_drift"          # optional bundled dataset

    [[curves]]
    csv = "out/fer-drift-LS-5.csv"   # css-linksim sweep output
    label = "LS-5 simulated"
    style = "C0--s"
    y_column = "fer"                 # default "fer"

Reference datasets bundle previously reported curves for these waveforms
(digitized), so fresh sweeps can be drawn on top of them.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

REFERENCE_FILES = {
    "pn_profiles": ("ref_pn_profiles.csv", "offset_hz", "level_dbc_hz"),
    "fer_snr_ls4": ("ref_fer_snr_ls4.csv", "snr_db", "fer"),
    "fer_snr_us4": ("ref_fer_snr_us4.csv", "snr_db", "fer"),
    "symbol_errors_drift": (
        "ref_symbol_errors_drift.csv",
        "rate_hz_per_s",
        "symbol_errors",
    ),
    "fer_drift": ("ref_fer_drift.csv", "rate_hz_per_s", "fer"),
    "fer_drift_measured": ("ref_fer_drift_measured.csv", "rate_hz_per_s", "fer"),
}


@dataclass(frozen=True)
class CurveSpec:
    csv_path: Path
    label: str
    style: str = ""
    x_column: str = "x"
    y_column: str = "fer"


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    curves: tuple[CurveSpec, ...]
    x_label: str = ""
    y_label: str = ""
    x_scale: str = "linear"
    y_scale: str = "linear"
    reference: str | None = None

    def __post_init__(self):
        if not self.figure_id:
            raise ValueError("figure_id must be non-empty")
        if not self.curves:
            raise ValueError("recipe has no curves")
        if self.x_scale not in ("linear", "log") or self.y_scale not in ("linear", "log"):
            raise ValueError("scales must be 'linear' or 'log'")
        if self.reference is not None and self.reference not in REFERENCE_FILES:
            raise ValueError(
                "unknown reference %r (have: %s)"
                % (self.reference, ", ".join(sorted(REFERENCE_FILES)))
            )
        for curve in self.curves:
            if not curve.csv_path.exists():
                raise FileNotFoundError(str(curve.csv_path))


def load_recipe(path: str | Path, base_dir: str | Path | None = None) -> FigureRecipe:
    """Parse a TOML recipe; relative CSV paths resolve against base_dir
    (default: the recipe's directory)."""
    path = Path(path)
    base = Path(base_dir) if base_dir is not None else path.parent
    data = tomllib.loads(path.read_text())
    curves = []
    for entry in data.get("curves", []):
        csv_path = Path(entry["csv"])
        if not csv_path.is_absolute():
            csv_path = base / csv_path
        curves.append(
            CurveSpec(
                csv_path=csv_path,
                label=entry.get("label", csv_path.stem),
                style=entry.get("style", ""),
                x_column=entry.get("x_column", "x"),
                y_column=entry.get("y_column", "fer"),
            )
        )
    return FigureRecipe(
        figure_id=data["figure_id"],
        curves=tuple(curves),
        x_label=data.get("x_label", ""),
        y_label=data.get("y_label", ""),
        x_scale=data.get("x_scale", "linear"),
        y_scale=data.get("y_scale", "linear"),
        reference=data.get("reference"),
    )


def read_sweep_csv(path: Path, x_column: str, y_column: str) -> tuple[list, list]:
    """Read one css-linksim CSV ('#' metadata lines skipped)."""
    with open(path) as handle:
        rows = [line for line in handle if line.strip() and not line.startswith("#")]
    if not rows:
        raise ValueError("%s: empty CSV" % path)
    reader = csv.DictReader(rows)
    xs, ys = [], []
    for row in reader:
        if x_column not in row or y_column not in row:
            raise ValueError(
                "%s: missing column %r or %r" % (path, x_column, y_column)
            )
        xs.append(float(row[x_column]))
        ys.append(float(row[y_column]))
    if not xs:
        raise ValueError("%s: no data rows" % path)
    return xs, ys


def load_reference(name: str) -> dict[str, tuple[list, list]]:
    """Bundled reference dataset as {series: (x, y)}."""
    filename, x_col, y_col = REFERENCE_FILES[name]
    ref = resources.files("css_linksim_figures").joinpath("refdata", filename)
    series: dict[str, tuple[list, list]] = {}
    reader = csv.DictReader(ref.read_text().splitlines())
    for row in reader:
        xs, ys = series.setdefault(row["series"], ([], []))
        xs.append(float(row[x_col]))
        ys.append(float(row[y_col]))
    return series
