import json
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ptdoublet import (
    EckartParams,
    NatanzonParams,
    doublet,
    eckart_state,
    natanzon_state,
    spectrum_report,
)
from ptdoublet.numeric import BranchVerification, EigenMatch
from ptdoublet.report import (
    CONTOUR_HEADER,
    SPECTRUM_CSV_HEADER,
    WAVEFN_HEADER,
    atomic_write_text,
    branch_verification_record,
    eigen_dump_payload,
    grid_metadata,
    spectrum_csv_rows,
    spectrum_payload,
    verification_payload,
    wavefn_sidecar,
    write_contour_csv,
    write_csv,
    write_json,
    write_wavefn_csv,
)


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "out.txt"
    atomic_write_text(str(target), "payload\n")
    assert target.read_text() == "payload\n"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["out.txt"]
    atomic_write_text(str(target), "second\n")
    assert target.read_text() == "second\n"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["out.txt"]


def test_write_json_is_deterministic_and_round_trips(tmp_path):
    payload = {"b": 1.0 / 3.0, "a": [0.1, 2.0**-52, 1e300], "nested": {"x": -0.0}}
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_json(str(p1), payload)
    write_json(str(p2), payload)
    assert p1.read_bytes() == p2.read_bytes()
    back = json.loads(p1.read_text())
    assert back["b"] == 1.0 / 3.0
    assert back["a"] == [0.1, 2.0**-52, 1e300]
    # insertion order is preserved, not sorted
    assert list(back.keys()) == ["b", "a", "nested"]


def test_write_csv_round_trips_doubles(tmp_path):
    rows = [(0.1, 1.0 / 3.0), (np.pi, 2.0**-52)]
    path = tmp_path / "t.csv"
    write_csv(str(path), rows, ("x", "y"))
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "x,y"
    for line, row in zip(lines[1:], rows):
        got = [float(s) for s in line.split(",")]
        assert got == list(row)


def test_contour_csv(tmp_path, small_grid):
    path = tmp_path / "contour.csv"
    write_contour_csv(str(path), small_grid)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == ",".join(CONTOUR_HEADER)
    assert len(lines) == 1 + small_grid.n_points
    first = [float(s) for s in lines[1].split(",")]
    assert first[0] == small_grid.t[0]
    assert first[1] == small_grid.r[0].real
    assert first[2] == small_grid.r[0].imag


def test_wavefn_csv_and_sidecar(tmp_path, grid):
    st = natanzon_state(NatanzonParams(beta=1.0, C=10.0), 0, -1, grid)
    path = tmp_path / "w.csv"
    write_wavefn_csv(str(path), st)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == ",".join(WAVEFN_HEADER)
    assert len(lines) == 1 + grid.n_points
    row = [float(s) for s in lines[1 + grid.anchor_index].split(",")]
    assert row[0] == 0.0
    assert_allclose(np.hypot(row[3], row[4]), row[5], rtol=1e-12)

    side = wavefn_sidecar(st, node_count=0, residual=3.2e-7)
    assert side["model"] == "natanzon"
    assert side["N"] == 0 and side["q"] == -1
    assert side["node_count"] == 0
    assert side["residual"] == 3.2e-7
    assert side["decay_slope_left"] == st.decay_fit[0]


def test_spectrum_payload_shapes():
    p = NatanzonParams(beta=1.0, C=10.0)
    levels = spectrum_report(p, 2)
    payload = spectrum_payload(p.beta, p.C, levels)
    assert payload["beta"] == 1.0 and payload["C"] == 10.0
    kinds = [lev["kind"] for lev in payload["levels"]]
    assert kinds == ["doublet", "doublet", "none"]
    first = payload["levels"][0]
    assert first["N"] == 0
    assert first["q"] == [-1, 1]
    assert first["delta"][0] < first["delta"][1]
    assert first["energy"][0] < first["energy"][1]
    single = spectrum_payload(0.0, 10.0, spectrum_report(NatanzonParams(beta=0.0, C=10.0), 0))
    lev0 = single["levels"][0]
    assert lev0["kind"] == "single"
    assert lev0["q"] == [0]
    assert "degenerate" not in lev0  # flagged only on the coalescence boundary


def test_spectrum_csv_rows():
    levels = spectrum_report(NatanzonParams(beta=1.0, C=10.0), 1)
    rows = list(spectrum_csv_rows(levels))
    assert len(SPECTRUM_CSV_HEADER) == 4
    assert [r[0] for r in rows] == [0, 0, 1, 1]
    assert [r[1] for r in rows] == [-1, 1, -1, 1]
    lev = doublet(0, 1.0, 10.0)
    assert rows[0][2] == lev.delta_minus and rows[1][2] == lev.delta_plus


def test_grid_metadata(small_grid):
    meta = grid_metadata(small_grid)
    assert meta == {
        "profile": "constant",
        "eps0": 1.0,
        "t_min": -12.0,
        "t_max": 12.0,
        "n_points": 201,
    }


def test_eigen_dump_payload(small_grid):
    matches = [
        EigenMatch(-8.5, -8.51, 0.001, 0, True),
        EigenMatch(80.7, None, float("inf"), None, False),
    ]
    payload = eigen_dump_payload(small_grid, [1 + 2j], [1 + 2j], matches)
    assert payload["raw_eigenvalues"] == [[1.0, 2.0]]
    assert payload["filtered_eigenvalues"] == [[1.0, 2.0]]
    assert payload["matches"][0]["numeric"] == [-8.51, 0.0]
    assert payload["matches"][1]["numeric"] is None
    assert payload["grid"]["n_points"] == 201


def test_verification_payload():
    recs = {"a": {"passed": True, "x": 1}, "b": {"passed": False}}
    out = verification_payload(recs)
    assert out["all_passed"] is False
    assert out["checks"]["a"]["x"] == 1
    out_ok = verification_payload({"a": {"passed": True}})
    assert out_ok["all_passed"] is True
    with pytest.raises(ValueError):
        verification_payload({"a": {"x": 1}})


def test_branch_verification_record():
    rec = BranchVerification(
        q=1, analytic_energy=80.7, coarse_energy=80.5 + 1e-11j,
        fine_energy=80.65 + 0j, extrapolated=80.699 + 0j,
        relative_error=1.2e-5, imag_magnitude=0.0, node_count=0,
        improvement=120.0,
    )
    out = branch_verification_record(rec)
    assert out["q"] == 1
    assert out["coarse_energy"] == [80.5, 1e-11]
    assert out["node_count"] == 0
    assert out["improvement"] == 120.0


def test_wavefn_sidecar_eckart_defaults(grid):
    st = eckart_state(EckartParams(A=3.0, beta=1.0), 1, grid)
    side = wavefn_sidecar(st)
    assert side["model"] == "eckart"
    assert side["node_count"] is None
    assert "residual" not in side
