"""Golden-CSV fixtures for the plots package.

The fixtures shell out to the ``qvsp`` command line — the only
interface this package is allowed to consume — and cache the sweep
outputs for the whole session.
"""

import json
import subprocess
import sys

import pytest

PLOTS_ACCEPTANCE: list[tuple[str, bool, str]] = []

_BASE_CONFIG = {
    "atom": {"preset": "Na"},
    "scatterer": {"radius_m": 3.5e-8, "material": {"preset": "K-drude"}},
    "rotation": {"omega_rad_per_s": 31415926535.897932,
                 "axis": [0.0, 0.0, 1.0]},
}

_WIDTHS = [8e-9, 1.2e-8, 1.9e-8, 3.0e-8, 4.7e-8, 7.4e-8, 1e-7]


def _run_sweep(config: dict, out_csv) -> None:
    cfg_path = out_csv.with_suffix(".config.json")
    cfg_path.write_text(json.dumps(config), encoding="utf-8")
    subprocess.run(
        [sys.executable, "-m", "qvsp.cli", "sweep", "-c", str(cfg_path),
         "-o", str(out_csv), "--threads", "2"],
        check=True, capture_output=True, text=True)


@pytest.fixture(scope="session")
def golden_dir(tmp_path_factory):
    """Directory of sweep CSVs produced by the qvsp CLI."""
    root = tmp_path_factory.mktemp("golden")
    for v in (3000.0, 4000.0, 5000.0):
        cfg = dict(_BASE_CONFIG)
        cfg["beam"] = {"center_x_m": 3.5e-8, "width_m": 8e-9,
                       "velocity_m_per_s": v}
        cfg["sweep"] = {"variable": "width", "values": _WIDTHS}
        _run_sweep(cfg, root / f"fig2b_v{int(v / 1000)}.csv")

    cfg = dict(_BASE_CONFIG)
    cfg["beam"] = {"center_x_m": 3.5e-8, "width_m": 8e-9,
                   "velocity_m_per_s": 1000.0}
    cfg["sweep"] = {"variable": "velocity",
                    "start": 1000.0, "stop": 10000.0, "count": 4}
    _run_sweep(cfg, root / "fig2a.csv")

    cfg = dict(_BASE_CONFIG)
    cfg["beam"] = {"center_x_m": 0.0, "width_m": 8e-9,
                   "velocity_m_per_s": 5000.0}
    cfg["sweep"] = {"variable": "center",
                    "values": [-9e-8, -4e-8, 0.0, 4e-8, 9e-8]}
    _run_sweep(cfg, root / "phase_map.csv")
    return root


@pytest.fixture
def record_plots_acceptance():
    def _record(name: str, passed: bool, detail: str):
        PLOTS_ACCEPTANCE.append((name, passed, detail))

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not PLOTS_ACCEPTANCE:
        return
    terminalreporter.section("figure acceptance checks")
    for name, passed, detail in PLOTS_ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}: {detail}")
