"""Rendering tests, including the fresh-simulation overlay check."""

import shutil
import subprocess

import pytest

from css_linksim_figures.cli import main
from css_linksim_figures.recipes import (
    CurveSpec,
    FigureRecipe,
    REFERENCE_FILES,
    load_recipe,
    load_reference,
    read_sweep_csv,
)
from css_linksim_figures.render import render

SAMPLE_CSV = """\
# setting=US-6
# sweep=drift_rate
x,fer,mean_symbol_errors,trials,ci95
10.0,0.01,0.2,100,0.02
20.0,0.25,3.5,100,0.08
30.0,0.9,11.0,100,0.05
"""


@pytest.fixture()
def sample_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    path.write_text(SAMPLE_CSV)
    return path


def recipe_for(path, **kwargs):
    defaults = dict(
        figure_id="demo",
        curves=(CurveSpec(csv_path=path, label="demo", style="C0-o"),),
        x_label="x",
        y_label="fer",
        x_scale="log",
        y_scale="log",
    )
    defaults.update(kwargs)
    return FigureRecipe(**defaults)


def test_reference_datasets_load():
    for name in REFERENCE_FILES:
        series = load_reference(name)
        assert series
        for xs, ys in series.values():
            assert len(xs) == len(ys) > 0
    # ten series in the drift dataset, as published
    assert len(load_reference("fer_drift")) == 10


def test_read_sweep_csv_skips_metadata(sample_csv):
    xs, ys = read_sweep_csv(sample_csv, "x", "fer")
    assert xs == [10.0, 20.0, 30.0]
    assert ys == [0.01, 0.25, 0.9]


def test_read_sweep_csv_missing_column(sample_csv):
    with pytest.raises(ValueError):
        read_sweep_csv(sample_csv, "x", "nope")


def test_empty_csv_rejected(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError):
        read_sweep_csv(empty, "x", "fer")


def test_recipe_requires_curves_and_existing_files(tmp_path):
    with pytest.raises(ValueError):
        FigureRecipe(figure_id="x", curves=())
    with pytest.raises(FileNotFoundError):
        recipe_for(tmp_path / "missing.csv")


def test_render_writes_svg_and_png(sample_csv, tmp_path):
    out = tmp_path / "figs"
    svg, png = render(recipe_for(sample_csv, reference="fer_drift"), out)
    assert svg.exists() and png.exists()
    assert svg.stat().st_size > 1000 and png.stat().st_size > 1000


def test_render_deterministic_svg(sample_csv, tmp_path):
    recipe = recipe_for(sample_csv)
    svg1, _ = render(recipe, tmp_path / "a")
    svg2, _ = render(recipe, tmp_path / "b")
    assert svg1.read_bytes() == svg2.read_bytes()


def test_render_errors_leave_no_file(sample_csv, tmp_path):
    bad = recipe_for(sample_csv)
    object.__setattr__(bad.curves[0], "y_column", "nope")
    out = tmp_path / "figs"
    with pytest.raises(ValueError):
        render(bad, out)
    assert not list(out.glob("*.svg")) and not list(out.glob("*.png"))


def test_recipe_toml_roundtrip(sample_csv, tmp_path):
    toml = tmp_path / "r.toml"
    toml.write_text(
        'figure_id = "demo"\n'
        'x_label = "drift"\n'
        'x_scale = "log"\n'
        'y_scale = "log"\n'
        'reference = "fer_drift_measured"\n'
        "[[curves]]\n"
        'csv = "%s"\n'
        'label = "sweep"\n'
        'style = "C1-o"\n'
        'y_column = "mean_symbol_errors"\n' % sample_csv.name
    )
    recipe = load_recipe(toml, base_dir=tmp_path)
    assert recipe.curves[0].csv_path == sample_csv
    assert recipe.curves[0].y_column == "mean_symbol_errors"
    svg, png = render(recipe, tmp_path / "f")
    assert svg.exists() and png.exists()


def test_cli_render(sample_csv, tmp_path, capsys):
    toml = tmp_path / "r.toml"
    toml.write_text(
        'figure_id = "cli-demo"\n[[curves]]\ncsv = "sweep.csv"\nlabel = "s"\n'
    )
    code = main(["render", "--recipe", str(toml), "--out", str(tmp_path / "o")])
    assert code == 0
    assert (tmp_path / "o" / "cli-demo.svg").exists()


def test_cli_bad_recipe_exits_2(tmp_path, capsys):
    toml = tmp_path / "bad.toml"
    toml.write_text('figure_id = "x"\n[[curves]]\ncsv = "missing.csv"\n')
    assert main(["render", "--recipe", str(toml), "--out", str(tmp_path)]) == 2


@pytest.mark.skipif(
    shutil.which("css-linksim") is None, reason="primary CLI not installed"
)
def test_fresh_simulation_overlay_end_to_end(tmp_path):
    """Secondary acceptance: fresh sweep CSVs from the primary CLI render
    on top of every bundled reference dataset without error, and the
    plotted extrema equal the CSV extrema (checked inside render)."""
    out_dir = tmp_path / "out"
    out_dir.mkdir()
    runs = [
        (["fer-drift", "--setting", "US-6", "--grid", "12:40:4"], "fer-drift-US-6.csv"),
        (["fer-drift", "--setting", "LS-6", "--grid", "3:12:4"], "fer-drift-LS-6.csv"),
        (["fer-snr", "--setting", "US-6", "--grid=-25:-21:3"], "fer-snr-US-6.csv"),
        (
            ["fer-triangle", "--setting", "LS-6", "--grid", "3:12:4"],
            "fer-triangle-LS-6.csv",
        ),
    ]
    for argv, filename in runs:
        subprocess.run(
            ["css-linksim", *argv, "--trials", "20", "--seed", "9",
             "--out", str(out_dir / filename)],
            check=True,
        )
    subprocess.run(
        [
            "css-linksim", "pn-verify", "--profile", "pn1", "--n", "131072",
            "--seeds", "5", "--seed", "1", "--out", str(out_dir / "pn-verify-pn1.csv"),
        ],
        check=True,
    )
    figures = [
        ("pn_profiles", "pn-verify-pn1.csv", "offset_hz", "estimated_dbc_hz", "linear"),
        ("fer_snr_us4", "fer-snr-US-6.csv", "x", "fer", "log"),
        ("symbol_errors_drift", "fer-drift-US-6.csv", "x", "mean_symbol_errors", "linear"),
        ("fer_drift", "fer-drift-LS-6.csv", "x", "fer", "log"),
        ("fer_drift_measured", "fer-triangle-LS-6.csv", "x", "fer", "log"),
    ]
    for reference, filename, x_col, y_col, y_scale in figures:
        recipe = FigureRecipe(
            figure_id="accept-%s" % reference,
            curves=(
                CurveSpec(
                    csv_path=out_dir / filename,
                    label="fresh %s" % filename,
                    style="C0-o",
                    x_column=x_col,
                    y_column=y_col,
                ),
            ),
            x_scale="log" if reference != "fer_snr_us4" else "linear",
            y_scale=y_scale,
            reference=reference,
        )
        svg, png = render(recipe, tmp_path / "figs")
        assert svg.exists() and png.exists()
