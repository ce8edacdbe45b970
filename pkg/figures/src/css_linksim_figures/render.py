"""Render recipes to SVG and PNG.

Rendering is a pure view: the plotted arrays are exactly the CSV values
(verified after each render), reference curves draw in grey underneath,
and the SVG output is byte-stable for identical inputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .recipes import FigureRecipe, load_reference, read_sweep_csv

# fixed hash salt + no date metadata -> reproducible SVG bytes
matplotlib.rcParams["svg.hashsalt"] = "css-linksim-figures"


def render(recipe: FigureRecipe, out_dir: str | Path) -> tuple[Path, Path]:
    """Draw one figure; returns the (svg, png) paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        if recipe.reference:
            for series, (xs, ys) in sorted(load_reference(recipe.reference).items()):
                ax.plot(
                    xs, ys, color="0.75", linewidth=1.0, zorder=1,
                    label="reference %s" % series,
                )
        plotted = []
        for curve in recipe.curves:
            xs, ys = read_sweep_csv(curve.csv_path, curve.x_column, curve.y_column)
            line = ax.plot(xs, ys, curve.style, label=curve.label, zorder=2)[0]
            plotted.append((curve, xs, ys, line))
        for curve, xs, ys, line in plotted:
            assert_extrema_match(xs, ys, line)
        ax.set_xscale(recipe.x_scale)
        ax.set_yscale(recipe.y_scale)
        ax.set_xlabel(recipe.x_label)
        ax.set_ylabel(recipe.y_label)
        ax.grid(True, which="both", alpha=0.4)
        ax.legend(fontsize=7, ncol=2)
        svg = out_dir / ("%s.svg" % recipe.figure_id)
        png = out_dir / ("%s.png" % recipe.figure_id)
        fig.savefig(svg, metadata={"Date": None})
        fig.savefig(png, dpi=150)
        return svg, png
    finally:
        plt.close(fig)


def assert_extrema_match(xs, ys, line) -> None:
    """The rendered line must carry exactly the CSV data."""
    ydata = np.asarray(line.get_ydata(), dtype=float)
    xdata = np.asarray(line.get_xdata(), dtype=float)
    if not (
        np.array_equal(xdata, np.asarray(xs, dtype=float))
        and np.array_equal(ydata, np.asarray(ys, dtype=float))
    ):
        raise AssertionError("plotted data differs from CSV data")
    assert float(ydata.max()) == max(ys) and float(ydata.min()) == min(ys)
