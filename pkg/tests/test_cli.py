from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from conic_xi.cli import ConfigError, config_from_mapping, main, parse_config


# ---------------------------------------------------------------------------
# configuration parsing
# ---------------------------------------------------------------------------


def test_minimal_xi_config(tmp_path: Path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps({"model": "flat_cn", "n": 2, "twist": "spin",
                             "angles": [1.0, 2.0]}))
    cfg = parse_config(p)
    assert cfg.command == "xi"
    assert cfg.model == "flat_cn" and cfg.n == 2 and cfg.twist == "spin"
    assert cfg.angles == (1.0, 2.0)


def test_toml_config(tmp_path: Path):
    p = tmp_path / "run.toml"
    p.write_text('command = "partition"\nalpha = "1/2"\nphi = 0.9\ncutoff = 500\n')
    cfg = parse_config(p)
    assert cfg.command == "partition"
    assert float(cfg.alpha) == 0.5


def test_zero_alpha_rejected():
    with pytest.raises(ConfigError, match="alpha must be positive"):
        config_from_mapping({"alpha": 0})


def test_unknown_command_lists_valid_ones():
    with pytest.raises(ConfigError, match="xi.*eta.*partition.*gr.*lefschetz.*report"):
        config_from_mapping({"command": "frobnicate"})


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown config key 'spam'"):
        config_from_mapping({"spam": 1})


def test_bad_json_reports_line(tmp_path: Path):
    p = tmp_path / "broken.json"
    p.write_text('{"model": }')
    with pytest.raises(ConfigError, match="line"):
        parse_config(p)


def test_nondecreasing_grid_rejected():
    with pytest.raises(ConfigError, match="decreasing"):
        config_from_mapping({"s_grid": [0.1, 0.2, 0.3, 0.4]})


def test_config_error_exit_code(tmp_path: Path, capsys):
    code = main(["partition", "--alpha", "0", "--output-dir", str(tmp_path)])
    assert code == 2
    assert "alpha must be positive" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def test_xi_quadric_prints_three_locals_and_unit_sum(tmp_path: Path, capsys):
    code = main(["xi", "--model", "quadric", "--angles", "0.7", "1.3",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert out.count(":") >= 4  # a1, a2, vertex, sum
    data = json.loads((tmp_path / "results.json").read_text())
    total = complex(data["values"]["sum"]["re"], data["values"]["sum"]["im"])
    assert abs(total - 1.0) < 1e-8
    assert len(data["values"]) == 4


def test_xi_single_cone_artifacts(tmp_path: Path):
    code = main(["xi", "--model", "flat_cn", "--n", "2", "--twist", "spin",
                 "--angles", "1.0", "2.0", "--output-dir", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "results.json").read_text())
    assert "error_bound" in data["values"]["xi_tilde"]
    assert data["config"]["twist"] == "spin"
    csv_lines = (tmp_path / "results.csv").read_text().strip().splitlines()
    assert csv_lines[0] == "quantity,s,re,im"


def test_partition_third_sector_column_is_zero(tmp_path: Path):
    code = main(["partition", "--alpha", "1", "--phi", "0.8973", "--cutoff", "2000",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "partition.csv").read_text().strip().splitlines()[1:]
    xi3 = [r.split(",") for r in rows if r.startswith("xi3")]
    assert xi3, "expected xi3 rows"
    for row in xi3:
        assert float(row[2]) == 0.0 and float(row[3]) == 0.0


def test_gr_command_reproduces_correction(tmp_path: Path):
    code = main(["gr", "--alpha", "3", "--predomain", "0.6", "0.8", "--phi", "1.2",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "results.json").read_text())
    got = complex(data["values"]["xi_predomain"]["re"], data["values"]["xi_predomain"]["im"])
    lam = np.exp(1j * 1.2 / 3)
    expected = 1 / (1 - lam) + 0.36 / lam + 0.64 / lam**2
    assert abs(got - expected) < 1e-9


def test_eta_command(tmp_path: Path):
    code = main(["eta", "--n", "2", "--angles", "1.2566370614359172", "0.8975979010256552",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "results.json").read_text())
    e1 = complex(data["values"]["eta1"]["re"], data["values"]["eta1"]["im"])
    c1 = complex(data["values"]["eta1_closed"]["re"], data["values"]["eta1_closed"]["im"])
    assert abs(e1 - c1) < 1e-6


def test_lefschetz_command_breakdown(tmp_path: Path):
    code = main(["lefschetz", "--model", "quadric", "--twist", "spin",
                 "--angles", "0.9", "2.2", "--output-dir", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "results.json").read_text())
    total = complex(data["values"]["sum"]["re"], data["values"]["sum"]["im"])
    assert abs(total) < 1e-8


# ---------------------------------------------------------------------------
# determinism and round-trips
# ---------------------------------------------------------------------------


def test_results_json_byte_identical_across_runs(tmp_path: Path):
    args = ["xi", "--model", "circle", "--alpha", "3", "--angles", "1.1"]
    d1, d2 = tmp_path / "one", tmp_path / "two"
    assert main(args + ["--output-dir", str(d1)]) == 0
    assert main(args + ["--output-dir", str(d2)]) == 0
    assert (d1 / "results.json").read_bytes() == (d2 / "results.json").read_bytes()
    assert (d1 / "results.csv").read_bytes() == (d2 / "results.csv").read_bytes()


def test_results_json_round_trips_floats_exactly(tmp_path: Path):
    from conic_xi.char_algebra import TorusElement
    from conic_xi.model_cones import ConeModel, xi_tilde

    assert main(["xi", "--model", "flat_cn", "--n", "1", "--angles", "2.2",
                 "--output-dir", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "results.json").read_text())
    est = xi_tilde(ConeModel.flat(1), TorusElement([2.2]))
    assert data["values"]["xi_tilde"]["re"] == est.value.real
    assert data["values"]["xi_tilde"]["im"] == est.value.imag
    assert data["values"]["xi_tilde"]["error_bound"] == est.error_bound


def test_nonconvergence_exit_code(tmp_path: Path):
    code = main(["xi", "--model", "flat_cn", "--n", "1", "--angles", "2.2",
                 "--tol", "1e-18", "--output-dir", str(tmp_path)])
    assert code == 3


def test_flags_override_config_file(tmp_path: Path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps({"model": "circle", "alpha": 3, "angles": [1.1]}))
    out = tmp_path / "out"
    code = main(["xi", "--config", str(p), "--alpha", "2", "--output-dir", str(out)])
    assert code == 0
    data = json.loads((out / "results.json").read_text())
    assert data["config"]["alpha"] == "2"


def test_env_thread_cap(tmp_path: Path, monkeypatch):
    monkeypatch.setenv("CONIC_XI_THREADS", "not-an-int")
    assert main(["report", "--output-dir", str(tmp_path)]) == 2


def test_predomain_from_config_file_with_pairs(tmp_path: Path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps({
        "command": "gr", "alpha": 3, "phi": 1.2,
        "predomain": [[0.6, 0.0], [0.8, 0.0]],
    }))
    out = tmp_path / "out"
    assert main(["gr", "--config", str(p), "--output-dir", str(out)]) == 0
    data = json.loads((out / "results.json").read_text())
    got = complex(data["values"]["xi_predomain"]["re"], data["values"]["xi_predomain"]["im"])
    lam = np.exp(1j * 1.2 / 3)
    assert abs(got - (1 / (1 - lam) + 0.36 / lam + 0.64 / lam**2)) < 1e-9


def test_xi_cyclic_model(tmp_path: Path):
    code = main(["xi", "--model", "cyclic", "--order", "4", "--weights", "1",
                 "--angles", "1.1", "--output-dir", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "results.json").read_text())
    got = complex(data["values"]["xi_tilde_closed"]["re"],
                  data["values"]["xi_tilde_closed"]["im"])
    root = np.exp(-2j * np.pi / 4)
    oracle = np.mean([1 / (1 - root**el * np.exp(1.1j)) for el in range(4)])
    assert abs(got - oracle) < 1e-10


def test_report_command_runs_clean(tmp_path: Path):
    assert main(["report", "--output-dir", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "results.json").read_text())
    assert data["worst_residual"] < 1e-6
