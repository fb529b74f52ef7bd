"""Batch front end: spectrum tables, wavefunction samples, verification
suites and contour exports from one command line.

Configuration precedence is flags over config-file entries over built-in
defaults; the config file is flat key=value text with the same names as
the long flags. PTDOUBLET_OUT overrides the default output directory but
loses to an explicit --out or config entry.

Exit codes: 0 success; 1 a verification check failed (the report is still
written); 2 invalid configuration or inadmissible parameters; 3 I/O
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import contour, numeric, plots, report
from .errors import PtDoubletError
from .potentials import (
    EckartParams,
    NatanzonParams,
    liouville_residual_max,
    v_eckart,
    v_natanzon,
)
from .spectrum import Doublet, NoDoublet, SingleLevel, doublet, eckart_levels, spectrum_report
from .wavefn import (
    count_nodes,
    eckart_state,
    natanzon_state,
    polynomial_zeros_in_strip,
    pt_symmetry_defect,
    schrodinger_residual,
)

DEFAULTS = {
    "model": "natanzon",
    "A": None,
    "beta": 1.0,
    "C": 10.0,
    "nmax": 1,
    "N": 0,
    "branch": "minus",
    "eps0": contour.DEFAULT_EPS0,
    "profile": "constant",
    "T": contour.DEFAULT_T,
    "n": contour.DEFAULT_N,
    "checks": "contour,liouville,residual,pt-defect,nodes,numeric-match",
    "out": None,
    "format": "json",
    "plot": True,
    "override_e_d": None,
}

_CHECK_ALIASES = {
    "contour": "contour-implicit",
    "contour-implicit": "contour-implicit",
    "liouville": "liouville",
    "residual": "residual",
    "pt": "pt-defect",
    "pt-defect": "pt-defect",
    "nodes": "nodes",
    "numeric": "numeric-match",
    "numeric-match": "numeric-match",
}

# thresholds the verify report tests against
CONTOUR_FORMULA_TOL = 1e-12
CONTOUR_STORED_TOL = 1e-9
Z0_TOL = 1e-14
LIOUVILLE_TOL = 1e-9
RESIDUAL_TOL = 1e-5
PT_TOL = 1e-8
NUMERIC_REL_TOL = 1e-3
NUMERIC_IM_TOL = 1e-6
VERIFY_T = 24.0


class InvalidConfig(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Merged settings of one invocation."""

    model: str
    A: Optional[float]
    beta: float
    C: float
    nmax: int
    N: int
    branch: str
    eps0: float
    profile: str
    T: float
    n: int
    checks: str
    out: str
    format: str
    plot: bool
    override_e_d: Optional[float]


_CASTS = {
    "A": float, "beta": float, "C": float, "eps0": float, "T": float,
    "nmax": int, "N": int, "n": int,
    "model": str, "branch": str, "profile": str, "checks": str,
    "out": str, "format": str, "override_e_d": float,
    "plot": lambda s: s if isinstance(s, bool) else s.strip().lower() in ("1", "true", "yes", "on"),
}


def read_config_file(path: str) -> dict:
    """Flat key=value text; blank lines and # comments are skipped."""
    values = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidConfig(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise InvalidConfig(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CASTS[key](value.strip())
        except ValueError as exc:
            raise InvalidConfig(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return values


def merge_config(args: argparse.Namespace) -> RunConfig:
    """flags > config file > environment (output dir only) > defaults."""
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key, default in DEFAULTS.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
        elif key in file_values:
            merged[key] = file_values[key]
        else:
            merged[key] = default
    if merged["out"] is None:
        merged["out"] = os.environ.get("PTDOUBLET_OUT", ".")
    if merged["format"] not in ("json", "csv"):
        raise InvalidConfig(f"format must be json or csv, got {merged['format']!r}")
    if merged["branch"] not in ("plus", "minus"):
        raise InvalidConfig(f"branch must be plus or minus, got {merged['branch']!r}")
    if merged["profile"] not in ("constant", "decaying"):
        raise InvalidConfig(f"profile must be constant or decaying, got {merged['profile']!r}")
    if merged["model"] not in ("eckart", "natanzon"):
        raise InvalidConfig(f"model must be eckart or natanzon, got {merged['model']!r}")
    if merged["n"] < 3 or merged["T"] <= 0 or merged["nmax"] < 0 or merged["N"] < 0:
        raise InvalidConfig("grid and level settings must be positive")
    return RunConfig(**merged)


def build_run_grid(config: RunConfig) -> contour.ContourGrid:
    profile = contour.EpsilonProfile(config.profile, config.eps0)
    return contour.build_grid(profile, -config.T, config.T, config.n)


def _out_path(config: RunConfig, name: str) -> str:
    os.makedirs(config.out, exist_ok=True)
    return os.path.join(config.out, name)


def _natanzon_params(config: RunConfig) -> NatanzonParams:
    return NatanzonParams(beta=config.beta, C=config.C)


def _eckart_params(config: RunConfig) -> EckartParams:
    if config.A is None:
        raise InvalidConfig("--A is required for the eckart model")
    return EckartParams(A=config.A, beta=config.beta)


def cmd_spectrum(config: RunConfig) -> int:
    """Level table for the configured model; JSON schema or per-(N, q) CSV."""
    if config.model == "eckart":
        levels = eckart_levels(_eckart_params(config))
        if config.format == "json":
            payload = {
                "A": config.A,
                "beta": config.beta,
                "levels": [
                    {"N": lvl.N, "delta": lvl.delta, "energy": lvl.energy} for lvl in levels
                ],
            }
            report.write_json(_out_path(config, "spectrum.json"), payload)
        else:
            rows = ((lvl.N, lvl.delta, lvl.energy) for lvl in levels)
            report.write_csv(_out_path(config, "spectrum.csv"), rows, ("N", "delta", "energy"))
        if config.plot:
            singles = [SingleLevel(N=lvl.N, delta=lvl.delta, energy=lvl.energy) for lvl in levels]
            plots.render_spectrum(singles, _out_path(config, "spectrum.png"))
        return 0
    table = spectrum_report(_natanzon_params(config), config.nmax)
    if config.format == "json":
        payload = report.spectrum_payload(config.beta, config.C, table)
        report.write_json(_out_path(config, "spectrum.json"), payload)
    else:
        report.write_csv(
            _out_path(config, "spectrum.csv"),
            report.spectrum_csv_rows(table),
            report.SPECTRUM_CSV_HEADER,
        )
    if config.plot:
        plots.render_spectrum(table, _out_path(config, "spectrum.png"))
    return 0


def cmd_wavefunction(config: RunConfig) -> int:
    """Samples of one state: CSV values, JSON sidecar, rendered figure."""
    grid = build_run_grid(config)
    if config.model == "eckart":
        p_e = _eckart_params(config)
        state = eckart_state(p_e, config.N, grid)
        potential = lambda r: v_eckart(r, p_e)  # noqa: E731
        stem = f"wavefunction_eckart_N{config.N}"
    else:
        p_n = _natanzon_params(config)
        q = 1 if config.branch == "plus" else -1
        state = natanzon_state(p_n, config.N, q, grid)
        potential = lambda xi: v_natanzon(xi, p_n, grid)  # noqa: E731
        tag = {1: "plus", -1: "minus", 0: "single"}[state.q]
        stem = f"wavefunction_N{config.N}_{tag}"
    nodes = count_nodes(state)
    residual = schrodinger_residual(state, potential, state.energy)
    report.write_wavefn_csv(_out_path(config, stem + ".csv"), state)
    report.write_json(
        _out_path(config, stem + ".json"),
        report.wavefn_sidecar(state, node_count=nodes, residual=residual),
    )
    if config.plot:
        plots.render_wavefunction(state, _out_path(config, stem + ".png"))
    return 0


def cmd_contour_export(config: RunConfig) -> int:
    """Contour samples plus the validation report for the configured grid."""
    grid = build_run_grid(config)
    rep = contour.validate_contour(grid)
    report.write_contour_csv(_out_path(config, "contour.csv"), grid)
    payload = dict(report.grid_metadata(grid))
    payload.update(
        {
            "stored_residual_sin": rep.stored_residual_sin,
            "stored_residual_cos": rep.stored_residual_cos,
            "formula_residual_sin": rep.formula_residual_sin,
            "formula_residual_cos": rep.formula_residual_cos,
            "formula_composition_residual": rep.formula_composition_residual,
            "z0_defect": rep.z0_defect,
            "min_singular_distance_xi": rep.min_singular_distance_xi,
            "min_singular_distance_r": rep.min_singular_distance_r,
        }
    )
    report.write_json(_out_path(config, "contour_report.json"), payload)
    if config.plot:
        plots.render_contour(grid, _out_path(config, "contour.png"))
    return 0


def _admissible_states(config: RunConfig) -> list[tuple[int, int, float, float]]:
    """(N, q, delta, energy) for every admissible level up to nmax."""
    states = []
    for n in range(config.nmax + 1):
        level = doublet(n, config.beta, config.C)
        if isinstance(level, Doublet):
            states.append((n, -1, level.delta_minus, level.e_minus))
            states.append((n, 1, level.delta_plus, level.e_plus))
        elif isinstance(level, SingleLevel):
            states.append((n, 0, level.delta, level.energy))
    return states


def _check_contour(config: RunConfig, grid, **_):
    rep = contour.validate_contour(grid)
    passed = (
        rep.formula_residual_sin < CONTOUR_FORMULA_TOL
        and rep.formula_residual_cos < CONTOUR_FORMULA_TOL
        and rep.formula_composition_residual < CONTOUR_FORMULA_TOL
        and rep.stored_residual_sin < CONTOUR_STORED_TOL
        and rep.stored_residual_cos < CONTOUR_STORED_TOL
        and (np.isnan(rep.z0_defect) or rep.z0_defect < Z0_TOL)
    )
    return {
        "passed": bool(passed),
        "formula_residual_sin": rep.formula_residual_sin,
        "formula_residual_cos": rep.formula_residual_cos,
        "formula_composition_residual": rep.formula_composition_residual,
        "stored_residual_sin": rep.stored_residual_sin,
        "stored_residual_cos": rep.stored_residual_cos,
        "z0_defect": rep.z0_defect,
        "tolerance": CONTOUR_FORMULA_TOL,
    }


def _check_liouville(config: RunConfig, grid, states, **_):
    p_n = _natanzon_params(config)
    worst = 0.0
    detail = {}
    for n, q, delta, e_d in states:
        p_e = EckartParams(A=delta + n + 1.0, beta=config.beta)
        e_e = -(delta**2) + config.beta**2 / delta**2
        e_d_used = config.override_e_d if config.override_e_d is not None else e_d
        value = liouville_residual_max(e_e, e_d_used, p_e, p_n, grid)
        detail[f"N{n}_q{q:+d}"] = value
        worst = max(worst, value)
    return {
        "passed": bool(worst < LIOUVILLE_TOL and detail),
        "max_relative_residual": worst,
        "per_state": detail,
        "tolerance": LIOUVILLE_TOL,
    }


def _check_residual(config: RunConfig, grid, states, **_):
    p_n = _natanzon_params(config)
    worst = 0.0
    detail = {}
    for n, q, delta, e_d in states:
        p_e = EckartParams(A=delta + n + 1.0, beta=config.beta)
        st_e = eckart_state(p_e, n, grid)
        res_e = schrodinger_residual(st_e, lambda r: v_eckart(r, p_e), st_e.energy)
        st_d = natanzon_state(p_n, n, q, grid)
        res_d = schrodinger_residual(st_d, lambda xi: v_natanzon(xi, p_n, grid), e_d)
        detail[f"N{n}_q{q:+d}_eckart"] = res_e
        detail[f"N{n}_q{q:+d}_natanzon"] = res_d
        worst = max(worst, res_e, res_d)
    return {
        "passed": bool(worst < RESIDUAL_TOL and detail),
        "max_residual": worst,
        "per_state": detail,
        "tolerance": RESIDUAL_TOL,
    }


def _check_pt(config: RunConfig, grid, states, **_):
    p_n = _natanzon_params(config)
    worst = 0.0
    detail = {}
    for n, q, delta, _e in states:
        st = natanzon_state(p_n, n, q, grid)
        value = pt_symmetry_defect(st)
        detail[f"N{n}_q{q:+d}"] = value
        worst = max(worst, value)
    return {
        "passed": bool(worst < PT_TOL and detail),
        "max_defect": worst,
        "per_state": detail,
        "tolerance": PT_TOL,
    }


def _check_nodes(config: RunConfig, grid, states, **_):
    p_n = _natanzon_params(config)
    detail = {}
    ok = bool(states)
    for n, q, delta, _e in states:
        st = natanzon_state(p_n, n, q, grid)
        counted = count_nodes(st)
        oracle = polynomial_zeros_in_strip(st)
        detail[f"N{n}_q{q:+d}"] = {"winding": counted, "root_oracle": oracle, "expected": n}
        ok = ok and counted == n and oracle == n
    return {"passed": bool(ok), "per_state": detail}


def _check_numeric(config: RunConfig, grid, states, **_):
    p_n = _natanzon_params(config)
    doublet_states = [(n, q, d, e) for (n, q, d, e) in states if n == 0 and q != 0]
    if not doublet_states:
        return {"passed": False, "reason": "no N=0 doublet to confirm"}
    profile = contour.EpsilonProfile(config.profile, config.eps0)
    grid_c = contour.build_grid(profile, -VERIFY_T, VERIFY_T, config.n)
    grid_f = contour.build_grid(profile, -VERIFY_T, VERIFY_T, 2 * config.n - 1)
    analytic = [(q, e) for (_n, q, _d, e) in doublet_states]
    records = numeric.verify_doublet(p_n, analytic, grid_c, grid_f)
    detail = {}
    ok = True
    for (n, q, _d, _e), rec in zip(doublet_states, records):
        detail[f"N{n}_q{q:+d}"] = report.branch_verification_record(rec)
        ok = ok and (
            rec.relative_error < NUMERIC_REL_TOL
            and rec.imag_magnitude < NUMERIC_IM_TOL
            and rec.node_count == n
        )
    return {
        "passed": bool(ok),
        "per_state": detail,
        "relative_tolerance": NUMERIC_REL_TOL,
        "imag_tolerance": NUMERIC_IM_TOL,
    }


_CHECK_RUNNERS = {
    "contour-implicit": _check_contour,
    "liouville": _check_liouville,
    "residual": _check_residual,
    "pt-defect": _check_pt,
    "nodes": _check_nodes,
    "numeric-match": _check_numeric,
}


def cmd_verify(config: RunConfig) -> int:
    """Run the selected checks and write the pass/fail report."""
    requested = []
    for raw in config.checks.split(","):
        name = raw.strip()
        if not name:
            continue
        if name not in _CHECK_ALIASES:
            raise InvalidConfig(f"unknown check {name!r}")
        canonical = _CHECK_ALIASES[name]
        if canonical not in requested:
            requested.append(canonical)
    if not requested:
        raise InvalidConfig("no checks selected")
    grid = build_run_grid(config)
    states = _admissible_states(config)
    records = {}
    for name in requested:
        try:
            records[name] = _CHECK_RUNNERS[name](config, grid=grid, states=states)
        except PtDoubletError as exc:
            # a crashed check is a failed check; the report must still land
            records[name] = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    payload = report.verification_payload(records)
    payload["beta"] = config.beta
    payload["C"] = config.C
    payload["nmax"] = config.nmax
    report.write_json(_out_path(config, "verify.json"), payload)
    if config.plot:
        table = spectrum_report(_natanzon_params(config), config.nmax)
        plots.render_spectrum(table, _out_path(config, "verify_levels.png"))
    return 0 if payload["all_passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptdoublet",
        description="Exactly solvable PT-symmetric doublet model: spectra, "
        "wavefunctions, and independent numeric verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "level table for one model"),
        ("wavefunction", "samples of one bound state"),
        ("verify", "run verification checks and report pass/fail"),
        ("contour-export", "contour samples and validation report"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--model", choices=("eckart", "natanzon"))
        cmd.add_argument("--A", type=float)
        cmd.add_argument("--beta", type=float)
        cmd.add_argument("--C", type=float)
        cmd.add_argument("--nmax", type=int)
        cmd.add_argument("--N", type=int)
        cmd.add_argument("--branch", choices=("plus", "minus"))
        cmd.add_argument("--eps0", type=float)
        cmd.add_argument("--profile", choices=("constant", "decaying"))
        cmd.add_argument("--T", type=float)
        cmd.add_argument("--n", type=int)
        cmd.add_argument("--checks")
        cmd.add_argument("--out")
        cmd.add_argument("--format", choices=("json", "csv"))
        cmd.add_argument("--config")
        cmd.add_argument("--override-e-d", dest="override_e_d", type=float,
                         help="replace the partner energy in the liouville check")
        cmd.add_argument("--plot", dest="plot", action="store_true", default=None)
        cmd.add_argument("--no-plot", dest="plot", action="store_false")
    return parser


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
    "contour-export": cmd_contour_export,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = merge_config(args)
        return _COMMANDS[args.command](config)
    except InvalidConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PtDoubletError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
