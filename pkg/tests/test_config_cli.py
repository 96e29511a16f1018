"""Configuration parsing and command-line contract tests."""

import csv
import json
import math
from pathlib import Path as FilePath

import pytest

from qvsp.cli import (
    CSV_HEADER,
    ExperimentConfig,
    cmd_phase,
    load_config,
    main,
)
from qvsp.errors import ConfigError

CONFIG_DIR = FilePath(__file__).resolve().parent.parent / "demos" / "configs"


def _demo(name: str) -> dict:
    with open(CONFIG_DIR / name, encoding="utf-8") as fh:
        return json.load(fh)


def _write(tmp_path, data, name="cfg.json") -> str:
    p = tmp_path / name
    p.write_text(json.dumps(data), encoding="utf-8")
    return str(p)


# ----------------------------------------------------------------- parsing


@pytest.mark.parametrize("name", sorted(p.name for p in
                                        CONFIG_DIR.glob("*.json")))
def test_round_trip_is_identity(name):
    cfg = ExperimentConfig.from_dict(_demo(name))
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert again.to_dict() == cfg.to_dict()


def test_unknown_keys_are_named_with_full_path():
    data = _demo("circle.json")
    data["scatterer"]["material"]["bogus"] = 1.0
    with pytest.raises(ConfigError, match="scatterer.material.bogus"):
        ExperimentConfig.from_dict(data)
    data = _demo("circle.json")
    data["geometry"]["radius_nm"] = 5.0
    with pytest.raises(ConfigError, match="geometry.radius_nm"):
        ExperimentConfig.from_dict(data)
    data = _demo("circle.json")
    data["extra_section"] = {}
    with pytest.raises(ConfigError, match="extra_section"):
        ExperimentConfig.from_dict(data)


def test_presets_materialize_known_species():
    cfg = ExperimentConfig.from_dict(_demo("spot.json"))
    assert cfg.atom.alpha0_vol == 2.4e-29
    assert cfg.atom.omega0 == 3.198e15
    assert cfg.scatterer.material.omega_p == 5.549e15
    assert cfg.scatterer.material.gamma == 2.795e13
    data = _demo("spot.json")
    data["atom"] = {"preset": "Unobtainium"}
    with pytest.raises(ConfigError, match="Unobtainium"):
        ExperimentConfig.from_dict(data)
    data = _demo("spot.json")
    data["atom"] = {"preset": "Na", "omega0_rad_per_s": 1e15}
    with pytest.raises(ConfigError, match="preset"):
        ExperimentConfig.from_dict(data)


def test_explicit_sections_equal_presets():
    data = _demo("spot.json")
    data["atom"] = {"alpha0_vol_m3": 2.4e-29, "omega0_rad_per_s": 3.198e15}
    data["scatterer"]["material"] = {"omega_p_rad_per_s": 5.549e15,
                                     "gamma_rad_per_s": 2.795e13}
    explicit = ExperimentConfig.from_dict(data)
    preset = ExperimentConfig.from_dict(_demo("spot.json"))
    assert explicit.atom == preset.atom
    assert explicit.scatterer == preset.scatterer
    # round-trip preserves the explicit spelling
    assert "alpha0_vol_m3" in explicit.to_dict()["atom"]
    assert explicit.to_dict()["atom"]["alpha0_vol_m3"] == 2.4e-29


def test_field_level_validation():
    data = _demo("spot.json")
    data["beam"]["width_m"] = -1e-9
    with pytest.raises(ConfigError, match="width_m"):
        ExperimentConfig.from_dict(data)
    data = _demo("spot.json")
    data["rotation"]["axis"] = [0.0, 0.0]
    with pytest.raises(ConfigError, match="axis"):
        ExperimentConfig.from_dict(data)
    data = _demo("spot.json")
    data["temperature_K"] = -3.0
    with pytest.raises(ConfigError, match="temperature_K"):
        ExperimentConfig.from_dict(data)
    data = _demo("circle.json")
    data["geometry"]["kind"] = "helix"
    with pytest.raises(ConfigError, match="kind"):
        ExperimentConfig.from_dict(data)


def test_sweep_grid_forms(tmp_path):
    data = _demo("fig2a.json")
    cfg = ExperimentConfig.from_dict(data)
    assert len(cfg.sweep.values) == 19
    assert cfg.sweep.values[0] == 1000.0 and cfg.sweep.values[-1] == 10000.0
    # serialized form carries explicit values and still round-trips
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    data["sweep"]["values"] = [1.0, 2.0]
    with pytest.raises(ConfigError, match="not both"):
        ExperimentConfig.from_dict(data)
    data = _demo("fig2a.json")
    data["sweep"] = {"variable": "velocity"}
    with pytest.raises(ConfigError, match="grid"):
        ExperimentConfig.from_dict(data)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(str(bad))


# ------------------------------------------------------------ subcommands


def test_phase_circle_reports_nine_pi(capsys):
    rc = main(["phase", "-c", str(CONFIG_DIR / "circle.json")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    local = report["breakdown"]["qvsp_local_rad"]
    # circle radius equals the characteristic rotation length, so the
    # magnitude of the rotation phase is exactly 9 pi
    assert abs(local) == pytest.approx(9 * math.pi, rel=1e-9)
    assert report["ell_omega_m"] == pytest.approx(
        report["diagnostics"]["closest_approach_m"], rel=1e-12)
    assert report["diagnostics"]["kr_closest"] < 0.05


def test_phase_two_lines_reports_rational_coefficients(capsys):
    rc = main(["phase", "-c", str(CONFIG_DIR / "two_lines.json")])
    assert rc == 0
    coeff = json.loads(capsys.readouterr().out)["diagnostics"]["coefficients"]
    assert coeff["local_difference"] == pytest.approx(90 * math.pi / 32,
                                                      rel=1e-9)
    assert coeff["nonlocal"] == pytest.approx(-27 * math.pi / 32, rel=1e-9)
    assert coeff["total"] == pytest.approx(63 * math.pi / 32, rel=1e-9)


def test_phase_segment_includes_line_reference(tmp_path, capsys):
    data = _demo("two_lines.json")
    data["geometry"] = {"kind": "segment", "x_offset_m": 1.5e-7,
                        "length_m": 1.5e-5, "speed_m_per_s": 1.0,
                        "samples": 2001}
    rc = main(["phase", "-c", _write(tmp_path, data)])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    local = report["breakdown"]["qvsp_local_rad"]
    line = report["diagnostics"]["infinite_line_local_rad"]
    assert local == pytest.approx(line, rel=2e-2)
    assert report["breakdown"]["vdw_quasistatic_rad"] > 0.0


def test_phase_malformed_key_exits_2(tmp_path, capsys):
    data = _demo("circle.json")
    data["geometry"]["radius_nm"] = 5.0
    rc = main(["phase", "-c", _write(tmp_path, data)])
    assert rc == 2
    assert "geometry.radius_nm" in capsys.readouterr().err


def test_phase_numerical_failure_exits_3(tmp_path, capsys):
    data = _demo("circle.json")
    data["geometry"]["radius_m"] = 0.5e-9  # inside the 1 nm sphere
    rc = main(["phase", "-c", _write(tmp_path, data)])
    assert rc == 3
    assert "GeometryError" in capsys.readouterr().err


def test_sweep_csv_contract(tmp_path, capsys):
    data = _demo("spot.json")
    data["sweep"] = {"variable": "velocity", "values": [3000.0, 5000.0]}
    cfg_path = _write(tmp_path, data)
    out = tmp_path / "sweep.csv"
    rc = main(["sweep", "-c", cfg_path, "-o", str(out)])
    assert rc == 0
    text = out.read_bytes()
    assert b"\r" not in text  # LF endings only
    rows = list(csv.DictReader(text.decode("utf-8").splitlines()))
    assert tuple(rows[0].keys()) == CSV_HEADER
    assert [float(r["value"]) for r in rows] == [3000.0, 5000.0]

    # values are full-precision: the beam readout survives a text round trip
    report_rc = main(["phase", "-c", cfg_path])
    assert report_rc == 0
    captured = capsys.readouterr().out
    report = json.loads(captured[captured.index("{"):])
    assert float(rows[1]["phi_bar_omega_rad"]) == report["phi_bar_omega_rad"]
    assert float(rows[1]["phi_bar_rad"]) == report["phi_bar_rad"]
    assert float(rows[1]["blocked_fraction"]) == report["blocked_fraction"]

    # reruns are byte-identical
    out2 = tmp_path / "sweep2.csv"
    assert main(["sweep", "-c", cfg_path, "-o", str(out2)]) == 0
    assert out2.read_bytes() == text

    # the sidecar records the full round-trippable config
    sidecar = json.loads((tmp_path / "sweep.csv.json").read_text())
    assert sidecar["config"] == load_config(cfg_path).to_dict()
    assert sidecar["rows_total"] == 2
    assert sidecar["rows_failed"] == []


def test_sweep_partial_failure_keeps_going(tmp_path, capsys):
    data = _demo("spot.json")
    data["beam"]["width_m"] = 1e-9
    data["sweep"] = {"variable": "center", "values": [0.0, 6e-8]}
    out = tmp_path / "partial.csv"
    rc = main(["sweep", "-c", _write(tmp_path, data), "-o", str(out)])
    assert rc == 0  # one row still succeeded
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert rows[0]["phi_bar_rad"] == "nan"
    assert "GeometryError" in rows[0]["error"]
    assert rows[1]["error"] == ""
    sidecar = json.loads((out.parent / "partial.csv.json").read_text())
    assert len(sidecar["rows_failed"]) == 1


def test_sweep_total_failure_exits_3(tmp_path, capsys):
    data = _demo("spot.json")
    data["beam"]["width_m"] = 1e-9
    data["sweep"] = {"variable": "center", "values": [0.0, 1e-8]}
    out = tmp_path / "allfail.csv"
    rc = main(["sweep", "-c", _write(tmp_path, data), "-o", str(out)])
    assert rc == 3
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert all(r["phi_bar_rad"] == "nan" for r in rows)


def test_sweep_missing_section_exits_2(tmp_path, capsys):
    rc = main(["sweep", "-c", str(CONFIG_DIR / "spot.json"),
               "-o", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "sweep" in capsys.readouterr().err


def test_optimize_reports_material_optimum(capsys):
    rc = main(["optimize", "-c", str(CONFIG_DIR / "optimize.json")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["omega_p_star_rad_per_s"] == pytest.approx(5.549e15,
                                                             rel=5e-3)
    assert report["omega_res_rad_per_s"] == pytest.approx(
        report["omega_p_star_rad_per_s"] / math.sqrt(3.0), rel=1e-12)
    assert report["re_d2_alpha_at_omega0_m3_s2"] < 0.0
    assert report["ell_omega_m"] == pytest.approx(7.98e-9, rel=1e-2)


def test_optimize_degenerate_bracket_exits_3(tmp_path, capsys):
    data = _demo("optimize.json")
    data["optimize"]["bracket_rad_per_s"] = [4.0e15, 4.2e15]
    rc = main(["optimize", "-c", _write(tmp_path, data)])
    assert rc == 3
    assert "BracketError" in capsys.readouterr().err


def test_selftest_passes_and_injection_fails(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "14/14 checks passed" in out
    assert main(["selftest", "--inject-delta-alpha-sign-error"]) == 1
    captured = capsys.readouterr()
    assert "rotation-null-trace" in captured.err
