import json

import pytest
from numpy.testing import assert_allclose

from ptdoublet.cli import main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path), "--no-plot"])


def test_spectrum_natanzon_json(tmp_path):
    assert run(tmp_path, "spectrum", "--beta", "1", "--C", "10", "--nmax", "2") == 0
    payload = json.loads((tmp_path / "spectrum.json").read_text())
    assert payload["beta"] == 1.0 and payload["C"] == 10.0
    assert [lev["kind"] for lev in payload["levels"]] == ["doublet", "doublet", "none"]
    assert_allclose(payload["levels"][0]["energy"], [-8.544718983450856, 80.76493871476717])


def test_spectrum_eckart_csv(tmp_path):
    code = run(
        tmp_path, "spectrum", "--model", "eckart", "--A", "3", "--beta", "1",
        "--format", "csv",
    )
    assert code == 0
    lines = (tmp_path / "spectrum.csv").read_text().strip().split("\n")
    assert lines[0] == "N,delta,energy"
    assert [float(x) for x in lines[1].split(",")] == [0.0, 2.0, -3.75]
    assert [float(x) for x in lines[2].split(",")] == [1.0, 1.0, 0.0]


def test_spectrum_eckart_requires_A(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "eckart") == 2


def test_spectrum_eckart_weak_well(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "eckart", "--A", "0.5") == 2


def test_wavefunction_natanzon(tmp_path):
    code = run(
        tmp_path, "wavefunction", "--beta", "1", "--C", "10", "--N", "1",
        "--branch", "minus",
    )
    assert code == 0
    side = json.loads((tmp_path / "wavefunction_N1_minus.json").read_text())
    assert side["N"] == 1 and side["q"] == -1
    assert side["node_count"] == 1
    assert side["residual"] < 1e-5
    assert abs(side["decay_slope_left"] + side["delta"]) < 0.02 * side["delta"]
    csv_lines = (tmp_path / "wavefunction_N1_minus.csv").read_text().strip().split("\n")
    assert csv_lines[0] == "t,omega,z,re_psi,im_psi,abs_psi"
    assert len(csv_lines) == 1 + 2001


def test_wavefunction_eckart_stem(tmp_path):
    code = run(tmp_path, "wavefunction", "--model", "eckart", "--A", "3", "--N", "0")
    assert code == 0
    assert (tmp_path / "wavefunction_eckart_N0.json").exists()
    assert (tmp_path / "wavefunction_eckart_N0.csv").exists()


def test_wavefunction_single_level_stem(tmp_path):
    code = run(tmp_path, "wavefunction", "--beta", "0", "--C", "10", "--N", "0")
    assert code == 0
    side = json.loads((tmp_path / "wavefunction_N0_single.json").read_text())
    assert side["q"] == 0
    assert_allclose(side["delta"], 9.0)


def test_wavefunction_missing_level(tmp_path):
    assert run(tmp_path, "wavefunction", "--beta", "1", "--C", "2", "--N", "5") == 2


def test_contour_export(tmp_path):
    code = run(tmp_path, "contour-export", "--eps0", "0.25", "--n", "801")
    assert code == 0
    rep = json.loads((tmp_path / "contour_report.json").read_text())
    assert rep["eps0"] == 0.25 and rep["n_points"] == 801
    assert rep["formula_residual_sin"] < 1e-12
    assert rep["z0_defect"] < 1e-14
    lines = (tmp_path / "contour.csv").read_text().strip().split("\n")
    assert len(lines) == 1 + 801


def test_contour_export_rejects_tiny_eps(tmp_path):
    assert run(tmp_path, "contour-export", "--eps0", "1e-6") == 2


def test_verify_fast_checks_pass(tmp_path):
    code = run(
        tmp_path, "verify", "--beta", "1", "--C", "10", "--nmax", "1",
        "--checks", "contour,liouville,residual,pt-defect,nodes",
    )
    assert code == 0
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["all_passed"] is True
    assert set(rep["checks"]) == {
        "contour-implicit", "liouville", "residual", "pt-defect", "nodes",
    }
    nodes = rep["checks"]["nodes"]["per_state"]
    assert nodes["N1_q+1"] == {"winding": 1, "root_oracle": 1, "expected": 1}


def test_verify_alias_canonicalization(tmp_path):
    code = run(tmp_path, "verify", "--checks", "pt,contour", "--nmax", "0")
    assert code == 0
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert set(rep["checks"]) == {"pt-defect", "contour-implicit"}


def test_verify_unknown_check(tmp_path):
    assert run(tmp_path, "verify", "--checks", "spectralflow") == 2


def test_verify_override_energy_fails_liouville(tmp_path):
    code = run(
        tmp_path, "verify", "--nmax", "0", "--checks", "liouville",
        "--override-e-d", "3.14",
    )
    assert code == 1
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["all_passed"] is False
    assert rep["checks"]["liouville"]["passed"] is False
    assert rep["checks"]["liouville"]["max_relative_residual"] > 1e-9


def test_verify_crashed_check_is_failed_not_fatal(tmp_path):
    # no admissible doublet at C=2: the numeric check cannot run, the
    # report must still land with that check marked failed
    code = run(
        tmp_path, "verify", "--beta", "1", "--C", "2", "--nmax", "0",
        "--checks", "numeric",
    )
    assert code == 1
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["checks"]["numeric-match"]["passed"] is False


def test_verify_numeric_match_end_to_end(tmp_path):
    # slow path: dense solve on the wide contour plus refinement
    code = run(
        tmp_path, "verify", "--beta", "1", "--C", "10", "--nmax", "0",
        "--checks", "numeric",
    )
    assert code == 0
    rep = json.loads((tmp_path / "verify.json").read_text())
    rec = rep["checks"]["numeric-match"]["per_state"]["N0_q+1"]
    assert rec["relative_error"] < 1e-3
    assert rec["imag_magnitude"] < 1e-6
    assert rec["node_count"] == 0


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("beta = 2.5\nC = 20\nnmax = 0\n# comment line\n\n")
    code = run(tmp_path, "spectrum", "--config", str(conf), "--beta", "1.5")
    assert code == 0
    payload = json.loads((tmp_path / "spectrum.json").read_text())
    assert payload["beta"] == 1.5  # flag wins
    assert payload["C"] == 20.0  # file beats default


def test_config_file_rejects_unknown_key(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("bogus = 3\n")
    assert run(tmp_path, "spectrum", "--config", str(conf)) == 2


def test_config_file_rejects_bad_value(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("beta = fast\n")
    assert run(tmp_path, "spectrum", "--config", str(conf)) == 2


def test_missing_config_file(tmp_path):
    assert run(tmp_path, "spectrum", "--config", str(tmp_path / "nope.conf")) == 2


def test_env_var_output_dir(tmp_path, monkeypatch):
    envdir = tmp_path / "from_env"
    monkeypatch.setenv("PTDOUBLET_OUT", str(envdir))
    code = main(["spectrum", "--nmax", "0", "--no-plot"])
    assert code == 0
    assert (envdir / "spectrum.json").exists()


def test_explicit_out_beats_env(tmp_path, monkeypatch):
    monkeypatch.setenv("PTDOUBLET_OUT", str(tmp_path / "ignored"))
    target = tmp_path / "explicit"
    code = main(["spectrum", "--nmax", "0", "--out", str(target), "--no-plot"])
    assert code == 0
    assert (target / "spectrum.json").exists()
    assert not (tmp_path / "ignored").exists()


def test_io_failure_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["spectrum", "--nmax", "0", "--out", str(blocker / "sub"), "--no-plot"])
    assert code == 3


def test_invalid_grid_settings(tmp_path):
    assert run(tmp_path, "contour-export", "--n", "2") == 2
    assert run(tmp_path, "wavefunction", "--T", "0") == 2


def test_plot_renders_figure(tmp_path):
    code = main(["spectrum", "--nmax", "1", "--out", str(tmp_path), "--plot"])
    assert code == 0
    assert (tmp_path / "spectrum.png").stat().st_size > 0
