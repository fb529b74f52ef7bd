"""Machine-readable exports: delimited samples and JSON reports.

Identical inputs must produce byte-identical files, so every writer uses
a fixed key order, shortest round-trip float formatting (JSON) or %.17g
(CSV), and no timestamps. Writes are whole-file atomic: content goes to a
temporary file in the target directory and is renamed into place.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable, Mapping, Sequence

import numpy as np

from .contour import ContourGrid
from .numeric import BranchVerification, EigenMatch
from .spectrum import Doublet, NoDoublet, SingleLevel
from .wavefn import WaveSamples

CSV_FMT = "%.17g"


def atomic_write_text(path: str, content: str) -> None:
    """Write `content` to `path` via a same-directory temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, payload) -> None:
    """Serialize with stable key order and shortest-round-trip floats."""
    atomic_write_text(path, json.dumps(payload, indent=2, allow_nan=True) + "\n")


def _csv(rows: Iterable[Sequence[float]], header: Sequence[str]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(CSV_FMT % float(x) for x in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str, rows: Iterable[Sequence[float]], header: Sequence[str]) -> None:
    atomic_write_text(path, _csv(rows, header))


def contour_rows(grid: ContourGrid):
    """Rows t, re_r, im_r, omega, z, re_dxi_dr, im_dxi_dr."""
    for k in range(grid.n_points):
        yield (
            grid.t[k], grid.r[k].real, grid.r[k].imag,
            grid.omega[k], grid.z[k], grid.dxi[k].real, grid.dxi[k].imag,
        )


CONTOUR_HEADER = ("t", "re_r", "im_r", "omega", "z", "re_dxi_dr", "im_dxi_dr")


def write_contour_csv(path: str, grid: ContourGrid) -> None:
    write_csv(path, contour_rows(grid), CONTOUR_HEADER)


POTENTIAL_HEADER = ("t", "re_V", "im_V")


def write_potential_csv(path: str, grid: ContourGrid, values: np.ndarray) -> None:
    rows = ((grid.t[k], values[k].real, values[k].imag) for k in range(grid.n_points))
    write_csv(path, rows, POTENTIAL_HEADER)


def spectrum_payload(beta: float, C: float, levels: Sequence) -> dict:
    """JSON body for a spectrum table, one record per N in (N, q) order."""
    out_levels = []
    for level in levels:
        if isinstance(level, Doublet):
            rec = {
                "N": level.N,
                "kind": "doublet",
                "delta": [level.delta_minus, level.delta_plus],
                "energy": [level.e_minus, level.e_plus],
                "q": [level.q_minus, level.q_plus],
            }
        elif isinstance(level, SingleLevel):
            rec = {
                "N": level.N,
                "kind": "single",
                "delta": [level.delta],
                "energy": [level.energy],
                "q": [0],
            }
            if level.degenerate:
                rec["degenerate"] = True
        elif isinstance(level, NoDoublet):
            rec = {"N": level.N, "kind": "none", "delta": [], "energy": [], "q": []}
        else:
            raise TypeError(f"unknown level record {type(level).__name__}")
        out_levels.append(rec)
    return {"beta": beta, "C": C, "levels": out_levels}


SPECTRUM_CSV_HEADER = ("N", "q", "delta", "energy")


def spectrum_csv_rows(levels: Sequence):
    """One row per (N, q); NoDoublet levels contribute no rows."""
    for level in levels:
        if isinstance(level, Doublet):
            yield (level.N, level.q_minus, level.delta_minus, level.e_minus)
            yield (level.N, level.q_plus, level.delta_plus, level.e_plus)
        elif isinstance(level, SingleLevel):
            yield (level.N, 0, level.delta, level.energy)


WAVEFN_HEADER = ("t", "omega", "z", "re_psi", "im_psi", "abs_psi")


def write_wavefn_csv(path: str, samples: WaveSamples) -> None:
    g = samples.grid
    rows = (
        (
            g.t[k], g.omega[k], g.z[k],
            samples.values[k].real, samples.values[k].imag, abs(samples.values[k]),
        )
        for k in range(g.n_points)
    )
    write_csv(path, rows, WAVEFN_HEADER)


def wavefn_sidecar(samples: WaveSamples, node_count=None, residual=None) -> dict:
    payload = {
        "model": samples.model,
        "N": samples.N,
        "q": samples.q,
        "delta": samples.delta,
        "energy": samples.energy,
        "node_count": node_count if node_count is not None else samples.node_count,
        "decay_slope_left": samples.decay_fit[0],
        "decay_slope_right": samples.decay_fit[1],
    }
    if residual is not None:
        payload["residual"] = residual
    return payload


def _complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def grid_metadata(grid: ContourGrid) -> dict:
    return {
        "profile": grid.profile.kind,
        "eps0": grid.profile.eps0,
        "t_min": grid.t_min,
        "t_max": grid.t_max,
        "n_points": grid.n_points,
    }


def eigen_dump_payload(
    grid: ContourGrid,
    raw: Sequence[complex],
    filtered: Sequence[complex],
    matches: Sequence[EigenMatch] = (),
) -> dict:
    """Eigenvalue dump: grid metadata, raw and filtered values, matches."""
    return {
        "grid": grid_metadata(grid),
        "raw_eigenvalues": [_complex_pair(z) for z in raw],
        "filtered_eigenvalues": [_complex_pair(z) for z in filtered],
        "matches": [
            {
                "analytic": _complex_pair(m.analytic_energy),
                "numeric": _complex_pair(m.numeric_energy) if m.numeric_energy is not None else None,
                "relative_error": m.relative_error,
                "node_count": m.node_count,
                "converged": m.converged,
            }
            for m in matches
        ],
    }


def verification_payload(records: Mapping[str, Mapping]) -> dict:
    """Verify-report body: named checks with pass/fail and measured values."""
    checks = {}
    for name in records:
        rec = dict(records[name])
        if "passed" not in rec:
            raise ValueError(f"check record {name!r} lacks a passed flag")
        checks[name] = rec
    return {"checks": checks, "all_passed": all(bool(c["passed"]) for c in checks.values())}


def branch_verification_record(rec: BranchVerification) -> dict:
    return {
        "q": rec.q,
        "analytic_energy": rec.analytic_energy,
        "coarse_energy": _complex_pair(rec.coarse_energy),
        "fine_energy": _complex_pair(rec.fine_energy),
        "extrapolated": _complex_pair(rec.extrapolated),
        "relative_error": rec.relative_error,
        "imag_magnitude": rec.imag_magnitude,
        "node_count": rec.node_count,
        "improvement": rec.improvement,
    }
