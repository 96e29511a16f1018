"""Rendering tests for the sweep-CSV figure package."""

import json
import time

import matplotlib.pyplot as plt
import pytest

from qvsp_plots import (
    CSV_COLUMNS,
    FigureSpec,
    SchemaError,
    load_figure_spec,
    read_sweep_csv,
    render_fig2,
    save_figure,
)
from qvsp_plots.cli import main

GOOD_HEADER = ("value,phi_bar_rad,phi_bar_omega_rad,blocked_fraction,"
               "err_estimate_rad,error\n")


def _write_spec(tmp_path, data, name="fig.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data), encoding="utf-8")
    return str(p)


def test_three_curve_panel_acceptance(golden_dir, tmp_path,
                                      record_plots_acceptance):
    start = time.perf_counter()
    spec = FigureSpec(
        panel="fig2b",
        inputs=((str(golden_dir / "fig2b_v3.csv"), None),
                (str(golden_dir / "fig2b_v4.csv"), None),
                (str(golden_dir / "fig2b_v5.csv"), None)),
        output=str(tmp_path / "fig2b"),
        band_mrad=(0.05, 0.2),
    )
    fig = render_fig2(spec)
    try:
        ax = fig.axes[0]
        styles = [line.get_linestyle() for line in ax.lines]
        labels = [line.get_label() for line in ax.lines]
        style_ok = styles == [":", "-.", "-"]
        labels_ok = labels == ["v = 3 km/s", "v = 4 km/s", "v = 5 km/s"]
        solid = ax.lines[styles.index("-")]
        solid_max = max(solid.get_ydata())
        band_ok = spec.band_mrad[0] <= solid_max <= spec.band_mrad[1]
        written = save_figure(fig, spec.output)
    finally:
        plt.close(fig)
    elapsed = time.perf_counter() - start
    ok = (style_ok and labels_ok and band_ok and len(written) == 2
          and elapsed < 10.0)
    record_plots_acceptance(
        "three-curve width panel", ok,
        f"styles {styles} labeled {labels}; solid-curve max "
        f"{solid_max:.3f} mrad inside band [0.05, 0.2]; PNG+SVG written "
        f"in {elapsed:.1f} s (budget 10 s)")
    assert style_ok and labels_ok
    assert band_ok
    assert len(written) == 2
    assert elapsed < 10.0


def test_velocities_come_from_sidecars(golden_dir):
    curve = read_sweep_csv(str(golden_dir / "fig2b_v4.csv"))
    assert curve.velocity_km_per_s == 4.0
    assert len(curve.values) == 7
    # explicit spec velocity overrides the sidecar
    forced = read_sweep_csv(str(golden_dir / "fig2b_v4.csv"),
                            velocity_km_per_s=5.0)
    assert forced.velocity_km_per_s == 5.0


def test_rerun_is_byte_identical(golden_dir, tmp_path):
    spec = FigureSpec(panel="fig2a",
                      inputs=((str(golden_dir / "fig2a.csv"), None),),
                      output=str(tmp_path / "a"))
    for stem in ("one", "two"):
        fig = render_fig2(spec)
        save_figure(fig, str(tmp_path / stem))
        plt.close(fig)
    assert ((tmp_path / "one.png").read_bytes()
            == (tmp_path / "two.png").read_bytes())
    assert ((tmp_path / "one.svg").read_bytes()
            == (tmp_path / "two.svg").read_bytes())


def test_phase_map_panel_renders(golden_dir, tmp_path):
    spec = FigureSpec(panel="phase-map",
                      inputs=((str(golden_dir / "phase_map.csv"), None),),
                      output=str(tmp_path / "pm"))
    fig = render_fig2(spec)
    try:
        ys = fig.axes[0].lines[0].get_ydata()
        assert len(ys) == 5
        assert min(ys) < 0 < max(ys)  # antisymmetric transect
    finally:
        plt.close(fig)


def test_missing_column_is_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("value,phi_bar_rad,blocked_fraction,err_estimate_rad\n"
                   "1,2,3,4\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="phi_bar_omega_rad"):
        read_sweep_csv(str(bad))
    with pytest.raises(SchemaError, match="bad.csv"):
        read_sweep_csv(str(bad))


def test_empty_csv_is_named(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(GOOD_HEADER, encoding="utf-8")
    with pytest.raises(SchemaError, match="empty.csv"):
        read_sweep_csv(str(empty))
    with pytest.raises(SchemaError, match="missing.csv"):
        read_sweep_csv(str(tmp_path / "missing.csv"))


def test_nan_rows_are_dropped(tmp_path):
    mixed = tmp_path / "mixed.csv"
    mixed.write_text(GOOD_HEADER
                     + "1,nan,nan,nan,nan,GeometryError: blocked\n"
                     + "2,0.5,1e-4,0.1,1e-9,\n", encoding="utf-8")
    curve = read_sweep_csv(str(mixed))
    assert curve.values == (2.0,)
    assert curve.phi_bar_omega_rad == (1e-4,)
    all_bad = tmp_path / "allnan.csv"
    all_bad.write_text(GOOD_HEADER + "1,nan,nan,nan,nan,x\n",
                       encoding="utf-8")
    with pytest.raises(SchemaError, match="no finite readout"):
        read_sweep_csv(str(all_bad))


def test_spec_validation(tmp_path):
    good = {"panel": "fig2a", "inputs": ["a.csv"], "output": "o"}
    spec = load_figure_spec(_write_spec(tmp_path, good))
    assert spec.panel == "fig2a" and spec.inputs == (("a.csv", None),)

    for mutate, match in (
        (lambda d: d.update(panel="fig3"), "panel"),
        (lambda d: d.update(inputs=[]), "inputs"),
        (lambda d: d.update(surprise=1), "surprise"),
        (lambda d: d.update(x_range=[2, 1]), "x_range"),
        (lambda d: d.update(inputs=[{"csv": "a.csv", "zap": 1}]), "zap"),
    ):
        data = {"panel": "fig2a", "inputs": ["a.csv"], "output": "o"}
        mutate(data)
        with pytest.raises(SchemaError, match=match):
            load_figure_spec(_write_spec(tmp_path, data))


def test_cli_renders_and_reports_errors(golden_dir, tmp_path, capsys):
    spec = {"panel": "fig2b",
            "inputs": [{"csv": str(golden_dir / "fig2b_v5.csv"),
                        "velocity_km_per_s": 5.0}],
            "output": str(tmp_path / "cli_out")}
    assert main(["--spec", _write_spec(tmp_path, spec)]) == 0
    out = capsys.readouterr().out
    assert "cli_out.png" in out and "cli_out.svg" in out

    bad = {"panel": "fig2b", "inputs": [str(tmp_path / "nope.csv")],
           "output": str(tmp_path / "x")}
    assert main(["--spec", _write_spec(tmp_path, bad, "bad.json")]) == 2
    assert "nope.csv" in capsys.readouterr().err
