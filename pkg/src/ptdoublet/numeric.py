"""Brute-force spectral oracle: discretize the Schrodinger operator along
the deformed contour and compute its eigenvalues with no input from the
analytic solution.

The operator in the t parameter is

    -(1/w'(t)) d/dt [ (1/w'(t)) d psi/dt ] + V(w(t)) psi = E psi

where w is the model's own coordinate (r for Eckart, xi for the partner
model). The discretization is flux-form second order: the inverse metric
is evaluated at cell midpoints, which keeps the scheme second order under
the variable metric. Dirichlet rows close both ends; by block expansion
they contribute two exact eigenvalues 1 that the bound-state filter
removes along with the contour-continuum artifacts.

Eigenvector node counts continue the discrete eigenvector off the real-t
line by integrating the same ODE vertically (the Cauchy-Kovalevskaya
direction), then read the winding of the boundary loop. Nothing here
consumes analytic wavefunctions or spectra; only match_spectrum ever sees
both lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .contour import ContourGrid, d2r_dt2, dr_dt, r_of_t, xi_ddot, xi_dot
from .errors import (
    DenseCapExceeded,
    GridTooCoarse,
    NoConvergence,
    SingularPoint,
    WindingNotInteger,
)
from .potentials import EckartParams, NatanzonParams, v_eckart, v_natanzon_r

DENSE_CAP = 2048
TAIL_TOL = 1e-3
TAIL_POINTS = 20
SUPPORT_FLOOR = 1e-9
CONTINUATION_STEPS = 64
NODE_T_CAP = 6.0


@dataclass(frozen=True)
class DiscreteOperator:
    """Tridiagonal discretization of one model on one contour grid.

    sub/dia/sup hold the three bands (sub[0] and sup[-1] unused); rows 0
    and n-1 are Dirichlet identity rows.
    """

    grid: ContourGrid
    tag: str
    params: object
    sub: np.ndarray = field(repr=False)
    dia: np.ndarray = field(repr=False)
    sup: np.ndarray = field(repr=False)
    boundary: str = "dirichlet"

    @property
    def n(self) -> int:
        return self.dia.size

    def dense(self) -> np.ndarray:
        mat = np.zeros((self.n, self.n), dtype=complex)
        idx = np.arange(self.n)
        mat[idx, idx] = self.dia
        mat[idx[1:], idx[:-1]] = self.sub[1:]
        mat[idx[:-1], idx[1:]] = self.sup[:-1]
        return mat

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.dia * v
        out[1:] += self.sub[1:] * v[:-1]
        out[:-1] += self.sup[:-1] * v[1:]
        return out


def _metric_functions(tag: str, grid: ContourGrid):
    """(w', w'') along the contour as callables of (possibly complex) t."""
    if tag == "eckart":
        return (
            lambda t: np.asarray(dr_dt(t, grid.profile), dtype=complex),
            lambda t: np.asarray(d2r_dt2(t, grid.profile), dtype=complex),
        )
    if tag == "natanzon":
        return (
            lambda t: xi_dot(t, grid.profile),
            lambda t: xi_ddot(t, grid.profile),
        )
    raise ValueError(f"unknown model tag {tag!r}")


def _potential_function(tag: str, params) -> Callable:
    """V as a callable of complex t, through the r pullback closed forms."""
    if tag == "eckart":
        if not isinstance(params, EckartParams):
            raise TypeError("eckart operator needs EckartParams")
        return lambda t, profile: v_eckart(r_of_t(t, profile), params)
    if tag == "natanzon":
        if not isinstance(params, NatanzonParams):
            raise TypeError("natanzon operator needs NatanzonParams")
        return lambda t, profile: v_natanzon_r(r_of_t(t, profile), params)
    raise ValueError(f"unknown model tag {tag!r}")


def discretize(grid: ContourGrid, potential: str, params) -> DiscreteOperator:
    """Flux-form tridiagonal operator for `potential` in {eckart, natanzon}.

    Interior row i couples (i-1, i, i+1) with coefficients
    (-m_-, m_- + m_+, -m_+) / (h^2 w'_i) + V_i on the diagonal, where
    m_{+-} = 1/w' at the cell midpoints. Raises SingularPoint if the
    potential or metric blows up on a grid point or midpoint.
    """
    n = grid.n_points
    if n < 3:
        raise GridTooCoarse("discretization needs at least 3 grid points")
    h = grid.spacing
    wd_f, _ = _metric_functions(potential, grid)
    v_f = _potential_function(potential, params)
    t = grid.t
    g_c = wd_f(t)
    g_m = wd_f(t - 0.5 * h)
    g_p = wd_f(t + 0.5 * h)
    if np.any(g_c == 0) or np.any(g_m == 0) or np.any(g_p == 0):
        raise SingularPoint("metric vanishes on the grid")
    v_vals = np.asarray(v_f(t, grid.profile), dtype=complex)
    m_minus = 1.0 / g_m
    m_plus = 1.0 / g_p
    sub = np.zeros(n, dtype=complex)
    dia = np.zeros(n, dtype=complex)
    sup = np.zeros(n, dtype=complex)
    inv = 1.0 / (h * h * g_c)
    sub[1:-1] = -m_minus[1:-1] * inv[1:-1]
    sup[1:-1] = -m_plus[1:-1] * inv[1:-1]
    dia[1:-1] = (m_minus[1:-1] + m_plus[1:-1]) * inv[1:-1] + v_vals[1:-1]
    dia[0] = 1.0
    dia[-1] = 1.0
    if not (np.all(np.isfinite(dia)) and np.all(np.isfinite(sub)) and np.all(np.isfinite(sup))):
        raise SingularPoint("discretized operator has non-finite entries")
    return DiscreteOperator(grid=grid, tag=potential, params=params, sub=sub, dia=dia, sup=sup)


def eigen_all(op: DiscreteOperator, dense_cap: int = DENSE_CAP, return_vectors: bool = False):
    """All eigenvalues of the operator by a dense general eigensolver.

    Sorted by (real, imag) for determinism. Refuses matrices above
    `dense_cap` (refinement via eigen_near is still available there).
    """
    if op.n > dense_cap:
        raise DenseCapExceeded(f"n = {op.n} exceeds the dense cap {dense_cap}")
    try:
        if return_vectors:
            values, vectors = scipy.linalg.eig(op.dense())
        else:
            values = scipy.linalg.eigvals(op.dense())
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - scipy QR rarely fails
        raise NoConvergence(f"dense eigensolver failed: {exc}") from exc
    order = np.lexsort((values.imag, values.real))
    if return_vectors:
        return values[order], vectors[:, order]
    return values[order]


def eigen_near(
    op: DiscreteOperator,
    guess: complex,
    max_iter: int = 100,
    tol: float = 1e-12,
    return_vector: bool = False,
):
    """Refine one eigenvalue by shifted inverse iteration with Rayleigh updates.

    The shift follows the Rayleigh quotient; when a factorization hits an
    exactly singular shift (the shift *is* an eigenvalue to machine
    precision) the shift is perturbed and iteration continues, which is
    the useful outcome of ShiftIsEigenvalue. Convergence is declared when
    successive Rayleigh quotients agree to `tol` relative; NoConvergence
    is raised past `max_iter`.
    """
    n = op.n
    rng = np.random.default_rng(20230817)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = complex(guess)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = op.sup[:-1]
    ab[2, :-1] = op.sub[1:]
    for _ in range(max_iter):
        ab[1, :] = op.dia - lam
        try:
            w = scipy.linalg.solve_banded((1, 1), ab, v)
        except (scipy.linalg.LinAlgError, np.linalg.LinAlgError):
            # exact-singular shift: nudge off the eigenvalue and go on
            lam = lam + 1e-10 * max(1.0, abs(lam)) * (1.0 + 1.0j)
            continue
        if not np.all(np.isfinite(w)):
            lam = lam + 1e-10 * max(1.0, abs(lam)) * (1.0 + 1.0j)
            continue
        v = w / np.linalg.norm(w)
        num = np.vdot(v, op.matvec(v))
        den = np.vdot(v, v)
        lam_new = complex(num / den)
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return (lam_new, v) if return_vector else lam_new
        lam = lam_new
    raise NoConvergence(f"inverse iteration did not settle in {max_iter} steps")


def select_bound_states(
    values: np.ndarray,
    vectors: np.ndarray,
    tail_tol: float = TAIL_TOL,
    tail_points: int = TAIL_POINTS,
    energy_window: Optional[tuple[float, float]] = None,
    im_cap: Optional[float] = None,
) -> np.ndarray:
    """Indices of eigenpairs that look like bound states.

    Keeps eigenvectors whose magnitude in the first and last `tail_points`
    samples stays below tail_tol of the peak; Dirichlet artifacts and
    contour-continuum modes fail this immediately. Optional energy window
    and |Im| cap narrow the search for reports.
    """
    keep = []
    for k in range(values.size):
        e = values[k]
        if energy_window is not None and not (energy_window[0] <= e.real <= energy_window[1]):
            continue
        if im_cap is not None and abs(e.imag) > im_cap:
            continue
        vec = np.abs(vectors[:, k])
        peak = vec.max()
        if peak == 0:
            continue
        tail = max(vec[:tail_points].max(), vec[-tail_points:].max())
        if tail < tail_tol * peak:
            keep.append(k)
    return np.asarray(keep, dtype=np.intp)


@dataclass(frozen=True)
class EigenMatch:
    """One analytic level paired with its nearest numeric eigenvalue."""

    analytic_energy: complex
    numeric_energy: Optional[complex]
    relative_error: float
    node_count: Optional[int]
    converged: bool


def match_spectrum(
    numeric: Sequence[complex],
    analytic: Sequence[complex],
    tol: float = 1e-3,
    node_counts: Optional[Sequence[Optional[int]]] = None,
) -> list[EigenMatch]:
    """Greedy nearest-neighbor pairing of analytic levels to numeric ones.

    Each analytic level grabs the closest unused numeric eigenvalue;
    levels left without a partner are flagged with infinite error.
    relative_error = |numeric - analytic| / max(|analytic|, 1).
    """
    if len(numeric) == 0 or len(analytic) == 0:
        raise ValueError("both spectra must be nonempty")
    numeric_arr = np.asarray(numeric, dtype=complex)
    used = np.zeros(numeric_arr.size, dtype=bool)
    matches = []
    for j, a in enumerate(analytic):
        a = complex(a)
        dist = np.abs(numeric_arr - a)
        dist[used] = np.inf
        k = int(np.argmin(dist))
        if not np.isfinite(dist[k]):
            matches.append(EigenMatch(a, None, float("inf"), None, False))
            continue
        used[k] = True
        rel = float(dist[k] / max(abs(a), 1.0))
        nodes = None
        if node_counts is not None:
            nodes = node_counts[k]
        matches.append(EigenMatch(a, complex(numeric_arr[k]), rel, nodes, rel <= tol))
    return matches


def richardson(coarse: complex, fine: complex) -> complex:
    """Second-order Richardson extrapolation from (h, h/2) eigenvalues."""
    return (4.0 * fine - coarse) / 3.0


def _support_columns(op: DiscreteOperator, vector: np.ndarray, t_cap: float) -> tuple[int, int]:
    """Contiguous column range around the peak with usable amplitude.

    Limits the boundary rectangle to where the eigenvector is above the
    double-precision noise floor and inside |t| <= t_cap; outside, the
    stored phases are rounding noise and corrupt the winding.
    """
    mags = np.abs(vector)
    peak_idx = int(np.argmax(mags))
    floor = SUPPORT_FLOOR * mags[peak_idx]
    ok = (mags >= floor) & (np.abs(op.grid.t) <= t_cap)
    ok[:2] = False
    ok[-2:] = False
    if not ok[peak_idx]:
        raise WindingNotInteger("eigenvector has no usable support region")
    lo = peak_idx
    while lo - 1 >= 0 and ok[lo - 1]:
        lo -= 1
    hi = peak_idx
    while hi + 1 < mags.size and ok[hi + 1]:
        hi += 1
    if hi - lo < 8:
        raise WindingNotInteger("support region too narrow to count nodes")
    return lo, hi


def _vertical_sweep(
    op: DiscreteOperator,
    x: np.ndarray,
    psi0: np.ndarray,
    phi0: np.ndarray,
    energy: complex,
    half_width: float,
    steps: int,
):
    """RK4-integrate the state vertically from the real-t line.

    Returns the psi history, shape (steps+1, len(x)), at heights
    sigma_k = k * half_width / steps (half_width may be negative).
    """
    wd_f, wdd_f = _metric_functions(op.tag, op.grid)
    v_f = _potential_function(op.tag, op.params)
    profile = op.grid.profile

    def rhs(sigma, psi, phi):
        t = x + 1j * sigma
        wd = wd_f(t)
        wdd = wdd_f(t)
        pot = np.asarray(v_f(t, profile), dtype=complex)
        return 1j * phi, 1j * ((pot - energy) * wd**2 * psi + (wdd / wd) * phi)

    ds = half_width / steps
    psi = psi0.astype(complex).copy()
    phi = phi0.astype(complex).copy()
    hist = np.empty((steps + 1, x.size), dtype=complex)
    hist[0] = psi
    sigma = 0.0
    for k in range(steps):
        k1p, k1q = rhs(sigma, psi, phi)
        k2p, k2q = rhs(sigma + 0.5 * ds, psi + 0.5 * ds * k1p, phi + 0.5 * ds * k1q)
        k3p, k3q = rhs(sigma + 0.5 * ds, psi + 0.5 * ds * k2p, phi + 0.5 * ds * k2q)
        k4p, k4q = rhs(sigma + ds, psi + ds * k3p, phi + ds * k3q)
        psi = psi + ds / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        phi = phi + ds / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        sigma += ds
        hist[k + 1] = psi
    return hist


def eigenvector_nodes(
    op: DiscreteOperator,
    vector: np.ndarray,
    energy: complex,
    strip_half_width: Optional[float] = None,
    t_cap: float = NODE_T_CAP,
    steps: int = CONTINUATION_STEPS,
) -> int:
    """Node count of a discrete eigenvector by analytic continuation.

    The eigenvector is continued off the real-t line by integrating the
    differential equation vertically (initial slope from a 5-point
    stencil), tracing the boundary of the support rectangle; the zero
    count is the winding number of that loop. Default strip half-widths
    match the analytic counter: 0.53 for the partner model (clear of its
    branch line at depth pi/2), 0.65 for Eckart.
    """
    if strip_half_width is None:
        strip_half_width = 0.53 if op.tag == "natanzon" else 0.65
    lo, hi = _support_columns(op, vector, t_cap)
    x = op.grid.t[lo : hi + 1]
    h = op.grid.spacing
    v = vector
    psi0 = v[lo : hi + 1].astype(complex)
    phi0 = (
        -v[lo + 2 : hi + 3] + 8.0 * v[lo + 1 : hi + 2] - 8.0 * v[lo - 1 : hi] + v[lo - 2 : hi - 1]
    ) / (12.0 * h)
    up = _vertical_sweep(op, x, psi0, phi0, energy, strip_half_width, steps)
    dn = _vertical_sweep(op, x, psi0, phi0, energy, -strip_half_width, steps)
    # counterclockwise loop: bottom (left to right), right column (rising),
    # top (right to left), left column (descending), back to start
    loop = np.concatenate(
        [
            dn[-1, :],
            dn[::-1, -1][1:],
            up[1:, -1],
            up[-1, ::-1][1:],
            up[::-1, 0][1:],
            dn[1:, 0],
        ]
    )
    if not np.all(np.isfinite(loop)) or np.any(loop == 0):
        raise WindingNotInteger("continued boundary values are degenerate or diverged")
    angles = np.unwrap(np.angle(loop))
    winding = (angles[-1] - angles[0]) / (2.0 * np.pi)
    nearest = int(round(winding))
    if abs(winding - nearest) > 0.1:
        raise WindingNotInteger(f"eigenvector winding {winding:.4f} is not near an integer")
    return nearest


@dataclass(frozen=True)
class BranchVerification:
    """Numeric confirmation record for one doublet branch."""

    q: int
    analytic_energy: float
    coarse_energy: complex
    fine_energy: complex
    extrapolated: complex
    relative_error: float
    imag_magnitude: float
    node_count: int
    improvement: float


def verify_doublet(
    p: NatanzonParams,
    analytic: Sequence[tuple[int, float]],
    grid_coarse: ContourGrid,
    grid_fine: ContourGrid,
    tail_tol: float = TAIL_TOL,
) -> list[BranchVerification]:
    """Confirm analytic doublet energies against the discrete operator.

    `analytic` lists (q, energy) pairs. The coarse grid is solved densely
    and filtered to bound states; each analytic energy is matched to its
    nearest survivor, refined on the fine grid by inverse iteration, and
    Richardson-extrapolated. Node counts come from the coarse
    eigenvectors. Nothing analytic enters the eigensolves themselves.
    """
    op_c = discretize(grid_coarse, "natanzon", p)
    values, vectors = eigen_all(op_c, return_vectors=True)
    keep = select_bound_states(values, vectors, tail_tol=tail_tol)
    if keep.size == 0:
        raise NoConvergence("no bound states survived the tail filter")
    kept_vals = values[keep]
    op_f = discretize(grid_fine, "natanzon", p)
    out = []
    for q, e_a in analytic:
        k = int(np.argmin(np.abs(kept_vals - e_a)))
        idx = keep[k]
        e_c = complex(values[idx])
        e_f = complex(eigen_near(op_f, e_c))
        e_r = richardson(e_c, e_f)
        err_f = abs(e_f - e_a) / max(abs(e_a), 1.0)
        err_r = abs(e_r - e_a) / max(abs(e_a), 1.0)
        nodes = eigenvector_nodes(op_c, vectors[:, idx], e_c)
        out.append(
            BranchVerification(
                q=int(q),
                analytic_energy=float(e_a),
                coarse_energy=e_c,
                fine_energy=e_f,
                extrapolated=e_r,
                relative_error=err_r,
                imag_magnitude=abs(e_r.imag),
                node_count=nodes,
                improvement=float(err_f / err_r) if err_r > 0 else float("inf"),
            )
        )
    return out
