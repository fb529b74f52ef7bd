"""Closed-form bound-state wavefunctions on deformed contours, plus the
checks that certify them: Schrodinger residuals, decay slopes, PT
symmetry, and nodal counts by the argument principle.

Both models share one polynomial core. The Eckart state is

    psi^(E)(r) = (1/sinh r)^(u+v) e^{(v-u) r} P_N(coth r)

and the partner state is

    psi^(D)(xi) = e^{-i delta xi} [1 - e^{-2 i xi}]^(1/4)
                  [sqrt(e^{2 i xi} - 1) - e^{i xi}]^{i beta/delta}
                  P_N(sqrt(1 - e^{-2 i xi}))

with u + v = delta and v - u = i beta/delta. Two printed conventions for
the Jacobi parameters circulate, (2u, 2v) and (u/2, v/2); only the first
solves the Schrodinger equation (the residual check adjudicates), but
both are kept behind the `convention` switch so the comparison stays
reproducible. Likewise the middle-factor exponent is kept as a parameter:
1/4 is the value for which psi^(D) equals sqrt(xi'(r)) psi^(E)(r) times a
constant, the wavefunction half of the Liouville transformation; 1/2
breaks that identity.

All complex powers are continuity-tracked: along grids they anchor to the
principal value at t = 0, and along arbitrary complex-t paths (used by
node counting) they are walked with the branching helpers, which leaves
winding numbers unaffected by the arbitrary overall branch constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .branching import continuous_log, continuous_power, continuous_sqrt
from .contour import ContourGrid, d2r_dt2, dr_dt, r_of_t, xi_ddot, xi_dot
from .errors import (
    AsymmetricGrid,
    BadParameters,
    BranchUndefined,
    GridTooCoarse,
    InadmissibleN,
    InvalidDelta,
    NoBoundStates,
    SingularPoint,
    TailTooShort,
    WindingNotInteger,
)
from .polys import hyp2f1_terminating, jacobi_poly, jacobi_roots  # noqa: F401  (re-exported ops)
from .potentials import EckartParams, NatanzonParams
from .spectrum import Doublet, NoDoublet, SingleLevel, doublet

# Strip half-widths in Im t for node counting. They must cover the
# zero depths of every admissible state while keeping the rectangle off
# the branch lines of each model: psi^(D) has square-root branch points
# where cosh r = 0 (depth pi/2 below the real-t line at constant shift
# eps0 = 1), psi^(E) only the sinh-zeros at depths 0 and pi.
NATANZON_STRIP = 0.53
ECKART_STRIP = 0.65
EDGE_SAMPLES = 3000
UNDERFLOW_FLOOR = 1e-250
DEFAULT_PREFACTOR_EXPONENT = 0.25


@dataclass(frozen=True)
class UVParams:
    """Hypergeometric parameter set (u, v, a, b, c) of one bound state."""

    u: complex
    v: complex
    a: complex
    b: complex
    c: complex


def derive_uv(N: int, delta: float, beta: float) -> UVParams:
    """Parameters from (N, delta, beta), verified against the energy algebra.

    u = (delta - i beta/delta)/2 and v = (delta + i beta/delta)/2, so that
    u + v = delta and v - u = i beta/delta; then a = 2A - N - 1 with
    A = delta + N + 1, b = -N, c = 1 + 2u. The identities
    4u^2 = -2 i beta - E and 4v^2 = 2 i beta - E with E = -delta^2 +
    beta^2/delta^2 are checked to 1e-12 before returning.
    """
    if delta <= 0:
        raise InvalidDelta(f"delta = {delta} must be positive")
    u = 0.5 * (delta - 1j * beta / delta)
    v = 0.5 * (delta + 1j * beta / delta)
    a = 2.0 * (delta + N + 1.0) - N - 1.0
    b = complex(-N)
    c = 1.0 + 2.0 * u
    energy = -(delta**2) + beta**2 / delta**2
    scale = max(1.0, abs(energy))
    if abs(4.0 * u**2 + 2j * beta + energy) > 1e-12 * scale:
        raise BadParameters("u fails 4u^2 = -2 i beta - E")
    if abs(4.0 * v**2 - 2j * beta + energy) > 1e-12 * scale:
        raise BadParameters("v fails 4v^2 = 2 i beta - E")
    return UVParams(u=u, v=v, a=complex(a), b=b, c=c)


def _jacobi_params(uv: UVParams, convention: str) -> tuple[complex, complex]:
    if convention == "standard":
        return 2.0 * uv.u, 2.0 * uv.v
    if convention == "halved":
        return 0.5 * uv.u, 0.5 * uv.v
    raise ValueError(f"unknown Jacobi parameter convention {convention!r}")


@dataclass(frozen=True)
class WaveSamples:
    """One state sampled on a contour grid, with its certification data.

    `path_eval` continues the same closed form along an arbitrary complex
    t path (branch-walked, arbitrary overall constant); node counting and
    off-grid diagnostics use it. node_count stays None until counted.
    """

    grid: ContourGrid
    values: np.ndarray = field(repr=False)
    model: str
    N: int
    q: int
    delta: float
    beta: float
    energy: float
    convention: str
    decay_fit: tuple[float, float]
    node_count: Optional[int] = None
    path_eval: Optional[Callable] = field(repr=False, compare=False, default=None)


def _eckart_path_values(t_path, profile, p: EckartParams, N: int, convention: str, anchor: int = 0):
    """psi^(E) along a complex-t path, branches walked from `anchor`."""
    t_arr = np.atleast_1d(np.asarray(t_path, dtype=complex))
    r = r_of_t(t_arr, profile)
    sh = np.sinh(r)
    if np.any(sh == 0):
        raise SingularPoint("psi undefined where sinh r = 0")
    delta = p.A - N - 1.0
    uv = derive_uv(N, delta, p.beta)
    al, be = _jacobi_params(uv, convention)
    log_sh = continuous_log(sh, anchor)
    return np.exp(-delta * log_sh + (uv.v - uv.u) * r) * jacobi_poly(N, al, be, np.cosh(r) / sh)


def _natanzon_path_values(
    t_path, profile, N: int, delta: float, beta: float,
    convention: str, prefactor_exponent: float, anchor: int = 0,
):
    """psi^(D) along a complex-t path via the pulled-back r variables.

    Uses 1 - e^{-2 i xi} = coth^2 r and [sqrt(e^{2 i xi} - 1) - e^{i xi}]
    = -i e^{r}, the zero-free closed form on the square-root sheet fixed
    by the Liouville map (the principal sheet gives i e^{-r} and an
    e^{-i beta r/delta} tail that solves neither the map identity nor the
    transformed equation). The only walked branches left are log(i sinh r)
    for xi itself and the prefactor power of coth^2 r.
    """
    t_arr = np.atleast_1d(np.asarray(t_path, dtype=complex))
    r = r_of_t(t_arr, profile)
    sh = np.sinh(r)
    ch = np.cosh(r)
    if np.any(sh == 0) or np.any(ch == 0):
        raise SingularPoint("psi undefined on the singular lines of the map")
    xi = -1j * continuous_log(1j * sh, anchor)
    uv = derive_uv(N, delta, beta)
    al, be = _jacobi_params(uv, convention)
    pref = np.exp(prefactor_exponent * continuous_log((ch / sh) ** 2, anchor))
    bracket = (1j * beta / delta) * (r - 1j * np.pi / 2.0)
    return np.exp(-1j * delta * xi + bracket) * pref * jacobi_poly(N, al, be, ch / sh)


def psi_eckart(r, p: EckartParams, N: int, convention: str = "standard"):
    """Unnormalized psi^(E)(r); scalar or array argument.

    The power (1/sinh r)^(u+v) takes the principal branch, which is the
    t = 0 anchored branch everywhere Im sinh r < 0; every admissible
    contour and every node-counting rectangle stays in that region.
    """
    delta = p.A - N - 1.0
    if delta <= 0:
        raise InadmissibleN(f"N = {N} needs A - N - 1 > 0, got {delta}")
    scalar = np.ndim(r) == 0
    r_arr = np.atleast_1d(np.asarray(r, dtype=complex))
    sh = np.sinh(r_arr)
    if np.any(sh == 0):
        raise SingularPoint("psi_eckart undefined where sinh r = 0")
    uv = derive_uv(N, delta, p.beta)
    al, be = _jacobi_params(uv, convention)
    out = np.exp(-delta * np.log(sh) + (uv.v - uv.u) * r_arr) * jacobi_poly(
        N, al, be, np.cosh(r_arr) / sh
    )
    return complex(out[0]) if scalar else out


class _NatanzonTable:
    """Anchored branch data of the psi^(D) prefactor along a grid.

    Only the prefactor power [1 - e^{-2 i xi}]^pe needs a walked branch
    table; the other factors have entire closed forms once the r-preimage
    of xi on the contour sheet is known (e^{-i delta xi} is entire in xi,
    the bracket power is exp((i beta/delta)(r - i pi/2)), the polynomial
    argument is coth r). 1 - e^{-2 i xi} is stored as coth^2 r so the
    near-grid ratio correction is exact.
    """

    def __init__(self, grid: ContourGrid, prefactor_exponent: float):
        self.grid = grid
        self.pe = prefactor_exponent
        w = (np.cosh(grid.r) / np.sinh(grid.r)) ** 2
        self.pref = continuous_power(w, prefactor_exponent, grid.anchor_index)

    def lookup(self, xi):
        """(r-preimage, prefactor) at near-grid xi.

        Snaps to the nearest grid point, Newton-solves sinh r = -i e^{i xi}
        from the grid seed (placing r on the contour's sheet), and corrects
        the stored prefactor by a principal log of a near-unity ratio.
        Queries beyond the safety margin raise BranchUndefined.
        """
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=complex))
        idx = np.empty(xi_arr.shape, dtype=np.intp)
        for s in range(0, xi_arr.size, 512):  # cap the distance matrix at ~16 MB
            blk = xi_arr[s : s + 512]
            idx[s : s + 512] = np.abs(blk[:, None] - self.grid.xi[None, :]).argmin(axis=1)
        if np.any(np.abs(xi_arr - self.grid.xi[idx]) > self.grid.safety_margin):
            raise BranchUndefined(
                "xi is farther from the anchoring grid than the safety margin"
            )
        r_seed = self.grid.r[idx]
        r = np.array(r_seed, dtype=complex)
        target = -1j * np.exp(1j * xi_arr)
        for _ in range(12):
            step = (np.sinh(r) - target) / np.cosh(r)
            r = r - step
            if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(r))):
                break
        w_q = (np.cosh(r) / np.sinh(r)) ** 2
        w_g = (np.cosh(r_seed) / np.sinh(r_seed)) ** 2
        pref = self.pref[idx] * np.exp(self.pe * np.log(w_q / w_g))
        return r, pref


_NATANZON_TABLES: dict[tuple[int, float], _NatanzonTable] = {}


def _natanzon_table(grid: ContourGrid, pe: float) -> _NatanzonTable:
    key = (id(grid), pe)
    table = _NATANZON_TABLES.get(key)
    if table is None or table.grid is not grid:
        table = _NatanzonTable(grid, pe)
        if len(_NATANZON_TABLES) > 8:
            _NATANZON_TABLES.clear()
        _NATANZON_TABLES[key] = table
    return table


def _resolve_delta(N: int, q: int, p: NatanzonParams) -> tuple[float, float, int]:
    """(delta, energy, resolved q) of the requested branch at (N, beta, C)."""
    level = doublet(N, p.beta, p.C)
    if isinstance(level, NoDoublet):
        raise NoBoundStates(f"no admissible state at N = {N} for beta = {p.beta}, C = {p.C}")
    if isinstance(level, SingleLevel):
        return level.delta, level.energy, 0
    if q == 1:
        return level.delta_plus, level.e_plus, 1
    if q == -1:
        return level.delta_minus, level.e_minus, -1
    raise BadParameters(f"branch q must be +1 or -1 for a doublet, got {q}")


def psi_natanzon(
    xi,
    N: int,
    q: int,
    p: NatanzonParams,
    grid: ContourGrid,
    convention: str = "standard",
    prefactor_exponent: float = DEFAULT_PREFACTOR_EXPONENT,
):
    """Unnormalized psi^(D)(xi) for branch q, branch-anchored on `grid`.

    Queries must lie within the grid's safety margin of a grid point, so
    the anchored branch is well defined; BranchUndefined otherwise.
    Equals sqrt(dxi/dr) psi_eckart(r(xi)) times one constant per state.
    """
    delta, _, _ = _resolve_delta(N, q, p)
    uv = derive_uv(N, delta, p.beta)
    al, be = _jacobi_params(uv, convention)
    scalar = np.ndim(xi) == 0
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=complex))
    table = _natanzon_table(grid, prefactor_exponent)
    r, pref = table.lookup(xi_arr)
    bracket_log = r - 1j * np.pi / 2.0
    out = (
        np.exp(-1j * delta * xi_arr + (1j * p.beta / delta) * bracket_log)
        * pref
        * jacobi_poly(N, al, be, np.cosh(r) / np.sinh(r))
    )
    return complex(out[0]) if scalar else out


def _decay_fit(values: np.ndarray, grid: ContourGrid, t_asym: Optional[float] = None):
    """Least-squares slopes of ln|psi| against Z(t) in both tails.

    Underflowed samples (|psi| < 1e-250) are dropped before fitting; each
    tail needs at least 20 surviving points or TailTooShort is raised.
    """
    if t_asym is None:
        t_asym = max(grid.t_max, -grid.t_min) - 4.0
    mags = np.abs(values)
    slopes = []
    for mask in (grid.t < -t_asym, grid.t > t_asym):
        sel = mask & (mags > UNDERFLOW_FLOOR)
        if np.count_nonzero(sel) < 20:
            raise TailTooShort(
                f"fewer than 20 usable tail points beyond |t| = {t_asym}"
            )
        slope = np.polyfit(grid.z[sel], np.log(mags[sel]), 1)[0]
        slopes.append(float(slope))
    return (slopes[0], slopes[1])


def eckart_state(
    p: EckartParams, N: int, grid: ContourGrid, convention: str = "standard"
) -> WaveSamples:
    """Sample psi^(E) for level N on `grid`, with eager decay fits."""
    delta = p.A - N - 1.0
    if delta <= 0:
        raise InadmissibleN(f"N = {N} needs A - N - 1 > 0, got {delta}")
    values = _eckart_path_values(grid.t, grid.profile, p, N, convention, grid.anchor_index)
    if not np.all(np.isfinite(values)):
        raise SingularPoint("state is not finite on the grid")

    def path_eval(ts, anchor: int = 0):
        return _eckart_path_values(ts, grid.profile, p, N, convention, anchor)

    return WaveSamples(
        grid=grid, values=values, model="eckart", N=N, q=0,
        delta=float(delta), beta=float(p.beta),
        energy=float(-(delta**2) + p.beta**2 / delta**2),
        convention=convention, decay_fit=_decay_fit(values, grid),
        node_count=None, path_eval=path_eval,
    )


def natanzon_state(
    p: NatanzonParams,
    N: int,
    q: int,
    grid: ContourGrid,
    convention: str = "standard",
    prefactor_exponent: float = DEFAULT_PREFACTOR_EXPONENT,
) -> WaveSamples:
    """Sample psi^(D) for branch q of level N on `grid`.

    q = +1 selects the larger cubic root, q = -1 the smaller; single
    levels (beta = 0 or the coalescence boundary) accept any q and record
    q = 0. Raises NoBoundStates when the level does not exist.
    """
    delta, energy, q_res = _resolve_delta(N, q, p)
    values = _natanzon_path_values(
        grid.t, grid.profile, N, delta, p.beta, convention,
        prefactor_exponent, grid.anchor_index,
    )
    if not np.all(np.isfinite(values)):
        raise SingularPoint("state is not finite on the grid")

    def path_eval(ts, anchor: int = 0):
        return _natanzon_path_values(
            ts, grid.profile, N, delta, p.beta, convention, prefactor_exponent, anchor
        )

    return WaveSamples(
        grid=grid, values=values, model="natanzon", N=N, q=q_res,
        delta=float(delta), beta=float(p.beta), energy=float(energy),
        convention=convention, decay_fit=_decay_fit(values, grid),
        node_count=None, path_eval=path_eval,
    )


def schrodinger_residual(samples: WaveSamples, potential, energy, grid: Optional[ContourGrid] = None) -> float:
    """Max normalized defect of -psi'' + (V - E) psi over interior points.

    The second derivative is taken in the model's own coordinate (r for
    the Eckart state, xi for the partner) by the chain rule from 5-point
    t-stencils. The defect at each point is divided by
    max(|psi| * |V - E|, floor), floor being 1e-12 of the largest such
    product, so scale and normalization drop out. `potential` may be a
    callable of the coordinate or a precomputed array.
    """
    g = grid if grid is not None else samples.grid
    if g.n_points < 7:
        raise GridTooCoarse("need at least 7 grid points for the 5-point stencil")
    psi = samples.values
    h = g.spacing
    d1 = (-psi[4:] + 8.0 * psi[3:-1] - 8.0 * psi[1:-3] + psi[:-4]) / (12.0 * h)
    d2 = (-psi[4:] + 16.0 * psi[3:-1] - 30.0 * psi[2:-2] + 16.0 * psi[1:-3] - psi[:-4]) / (
        12.0 * h * h
    )
    if samples.model == "eckart":
        wd = np.asarray(dr_dt(g.t, g.profile), dtype=complex)[2:-2]
        wdd = np.asarray(d2r_dt2(g.t, g.profile), dtype=complex)[2:-2]
        coord = g.r
    else:
        wd = np.asarray(xi_dot(g.t, g.profile), dtype=complex)[2:-2]
        wdd = np.asarray(xi_ddot(g.t, g.profile), dtype=complex)[2:-2]
        coord = g.xi
    psi_ww = (d2 - (wdd / wd) * d1) / wd**2
    v_vals = potential(coord) if callable(potential) else np.asarray(potential)
    v_in = np.asarray(v_vals, dtype=complex)[2:-2]
    psi_in = psi[2:-2]
    defect = np.abs(-psi_ww + (v_in - energy) * psi_in)
    weight = np.abs(psi_in) * np.abs(v_in - energy)
    top = float(np.max(weight))
    floor = 1e-12 * top if top > 0 else 1.0
    return float(np.max(defect / np.maximum(weight, floor)))


def count_nodes(
    samples: WaveSamples,
    grid: Optional[ContourGrid] = None,
    strip_half_width: Optional[float] = None,
    t_half: Optional[float] = None,
    edge_samples: int = EDGE_SAMPLES,
) -> int:
    """Zeros of psi inside a rectangle around the contour, by winding.

    The rectangle is [-a, a] x [-h, h] in complex t, traversed once
    counterclockwise; the winding of psi is the trapezoid quadrature of
    psi'/psi along the boundary, with psi' from second-order differences
    of the path samples. Default half-widths keep each model's rectangle
    clear of its branch lines while covering the zero depths of all
    admissible states at the default shift. Raises WindingNotInteger when
    the quadrature lands farther than 0.1 from an integer.
    """
    g = grid if grid is not None else samples.grid
    if strip_half_width is None:
        strip_half_width = NATANZON_STRIP if samples.model == "natanzon" else ECKART_STRIP
    if t_half is None:
        t_half = min(6.0, max(g.t_max, -g.t_min) - 1.0)
    a, hw, m = float(t_half), float(strip_half_width), int(edge_samples)
    corners = [
        complex(-a, -hw), complex(a, -hw), complex(a, hw), complex(-a, hw),
    ]
    path = np.empty(4 * m + 1, dtype=complex)
    for k in range(4):
        seg = np.linspace(0.0, 1.0, m + 1)
        path[k * m : (k + 1) * m + 1] = corners[k] + seg * (corners[(k + 1) % 4] - corners[k])
    vals = samples.path_eval(path)
    total = 0.0 + 0.0j
    for k in range(4):
        seg = vals[k * m : (k + 1) * m + 1]
        dz = (corners[(k + 1) % 4] - corners[k]) / m
        der = np.empty_like(seg)
        der[1:-1] = (seg[2:] - seg[:-2]) / (2.0 * dz)
        der[0] = (-3.0 * seg[0] + 4.0 * seg[1] - seg[2]) / (2.0 * dz)
        der[-1] = (3.0 * seg[-1] - 4.0 * seg[-2] + seg[-3]) / (2.0 * dz)
        ratio = der / seg
        total += dz * np.sum(0.5 * (ratio[1:] + ratio[:-1]))
    winding = total / (2j * np.pi)
    nearest = int(round(winding.real))
    if abs(winding - nearest) > 0.1:
        raise WindingNotInteger(
            f"winding {winding:.4f} is not within 0.1 of an integer; refine the boundary"
        )
    return nearest


def node_count_sweep(
    samples: WaveSamples, half_widths: Sequence[float], **kwargs
) -> list[tuple[float, int]]:
    """count_nodes at several strip half-widths, for zero-depth surveys."""
    return [
        (float(hw), count_nodes(samples, strip_half_width=hw, **kwargs))
        for hw in half_widths
    ]


def decay_rate(
    samples: WaveSamples, grid: Optional[ContourGrid] = None, t_asym: Optional[float] = None
) -> tuple[float, float]:
    """(slope_left, slope_right) of ln|psi| against Z; about -delta each."""
    g = grid if grid is not None else samples.grid
    return _decay_fit(samples.values, g, t_asym)


def pt_symmetry_defect(samples: WaveSamples, grid: Optional[ContourGrid] = None) -> float:
    """Max of ||psi(-t)| - |psi(t)|| over the grid, relative to max |psi|."""
    g = grid if grid is not None else samples.grid
    if not np.allclose(g.t, -g.t[::-1], rtol=0.0, atol=1e-12):
        raise AsymmetricGrid("pt_symmetry_defect needs a t-grid symmetric about 0")
    mags = np.abs(samples.values)
    return float(np.max(np.abs(mags - mags[::-1])) / np.max(mags))


def polynomial_zero_positions(samples: WaveSamples) -> np.ndarray:
    """Complex-t positions of the zeros of the state's polynomial factor.

    The N roots x_k of the Jacobi factor are pulled back through
    coth r = x_k (principal arctanh lands on the contour's sheet) and then
    through r(t) by Newton inversion of the profile. This is the
    independent check on count_nodes: a zero is counted iff its position
    lies inside the counting rectangle.
    """
    uv = derive_uv(samples.N, samples.delta, samples.beta)
    al, be = _jacobi_params(uv, samples.convention)
    roots = jacobi_roots(samples.N, al, be)
    r_pos = np.where(
        np.abs(roots) < 1e-12,
        -1j * np.pi / 2.0,
        np.arctanh(np.where(np.abs(roots) < 1e-12, 2.0, 1.0 / roots)),
    )
    profile = samples.grid.profile
    t = r_pos + 1j * profile.eps(np.real(r_pos))
    for _ in range(60):
        step = (r_of_t(t, profile) - r_pos) / dr_dt(t, profile)
        t = t - step
        if np.all(np.abs(step) <= 1e-14 * np.maximum(1.0, np.abs(t))):
            break
    order = np.lexsort((t.imag, t.real))
    return t[order]


def polynomial_zeros_in_strip(
    samples: WaveSamples,
    strip_half_width: Optional[float] = None,
    t_half: Optional[float] = None,
) -> int:
    """How many polynomial-factor zeros fall inside the counting rectangle."""
    if strip_half_width is None:
        strip_half_width = NATANZON_STRIP if samples.model == "natanzon" else ECKART_STRIP
    if t_half is None:
        g = samples.grid
        t_half = min(6.0, max(g.t_max, -g.t_min) - 1.0)
    zeros = polynomial_zero_positions(samples)
    inside = (np.abs(zeros.imag) <= strip_half_width) & (np.abs(zeros.real) <= t_half)
    return int(np.count_nonzero(inside))
