"""Exact spectra: the Eckart ladder and the cubic selection rule that
produces energy doublets in the partner model.

For the Eckart well the level data is elementary: delta = A - N - 1 and
E = -delta^2 + beta^2/delta^2 for every N with delta > 0. The partner
model inverts that relation: at fixed (beta, C) the admissible delta for
nodal count N solves

    (2N+1) delta^3 + (N^2 + N + 1 - C) delta^2 + beta^2 = 0,

the quantization cubic. Its positive real roots come in pairs: above the
threshold c_min(N, beta) there are exactly two, and each one feeds the
energy formula E = (delta + N + 1/2)^2 + 3/4 - C, giving two bound states
with the same nodal count N. Below the threshold there are none; at
beta = 0 the cubic degenerates and a linear formula gives at most one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCubic, NoBoundStates
from .potentials import EckartParams, NatanzonParams

POSITIVE_REAL = "PositiveReal"
NEGATIVE_REAL = "NegativeReal"
COMPLEX_PAIR = "ComplexPair"

_REAL_TOL = 1e-8


@dataclass(frozen=True)
class EckartLevel:
    """One exact Eckart bound state: nodal count N, delta = A - N - 1."""

    N: int
    delta: float
    energy: float


@dataclass(frozen=True)
class DeltaRoots:
    """The three roots of the quantization cubic at one (N, beta, C).

    roots are sorted by descending real part, so roots[0] is the large
    branch whenever two positive roots exist. classification entries are
    PositiveReal, NegativeReal or ComplexPair, aligned with roots.
    """

    N: int
    beta: float
    C: float
    roots: tuple[complex, complex, complex]
    classification: tuple[str, str, str]

    def positive_real(self) -> list[float]:
        return [r.real for r, c in zip(self.roots, self.classification) if c == POSITIVE_REAL]


@dataclass(frozen=True)
class Doublet:
    """Two bound states sharing nodal count N; q=+1 tags the larger root."""

    N: int
    delta_plus: float
    delta_minus: float
    e_plus: float
    e_minus: float
    q_plus: int = 1
    q_minus: int = -1


@dataclass(frozen=True)
class SingleLevel:
    """Exactly one admissible state at this N.

    degenerate marks the double-root boundary C = c_min, where the two
    branches coalesce; beta = 0 reaches this type through the linear
    root instead.
    """

    N: int
    delta: float
    energy: float
    degenerate: bool = False


@dataclass(frozen=True)
class NoDoublet:
    """No admissible state at this N for the given (beta, C)."""

    N: int


def eckart_levels(p: EckartParams) -> list[EckartLevel]:
    """All Eckart bound states, ordered by N. Raises NoBoundStates if A <= 1."""
    if p.A <= 1.0:
        raise NoBoundStates(f"A = {p.A} supports no bound state (requires A > 1)")
    levels = []
    n = 0
    while p.A - n - 1.0 > 0.0:
        delta = p.A - n - 1.0
        levels.append(EckartLevel(N=n, delta=delta, energy=-(delta**2) + p.beta**2 / delta**2))
        n += 1
    return levels


def delta_cubic_coeffs(N: int, beta: float, C: float) -> tuple[float, float, float, float]:
    """(c3, c2, c1, c0) of the quantization cubic in descending powers.

    The cubic is the selection rule multiplied through by delta^2, so a
    delta = 0 root is an artifact of the multiplication and must never be
    accepted; at beta = 0 it appears as a double root.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    return (2.0 * N + 1.0, N * (N + 1.0) + 1.0 - C, 0.0, beta**2)


def cubic_discriminant(N: int, beta: float, C: float) -> float:
    """Discriminant of the quantization cubic; positive iff three distinct reals."""
    c3, c2, _, c0 = delta_cubic_coeffs(N, beta, C)
    return -4.0 * c2**3 * c0 - 27.0 * c3**2 * c0**2


def solve_delta(N: int, beta: float, C: float) -> DeltaRoots:
    """All three roots of the quantization cubic, polished and classified.

    Companion-matrix roots followed by Newton iteration; classification
    calls a root real when |Im| < 1e-8 * max(1, |root|). Raises
    DegenerateCubic at beta = 0, where the honest equation is linear and
    the delta = 0 double root is spurious.
    """
    if beta == 0.0:
        raise DegenerateCubic("beta = 0 degenerates the cubic; use the linear root")
    c3, c2, _, c0 = delta_cubic_coeffs(N, beta, C)
    roots = np.roots([c3, c2, 0.0, c0]).astype(complex)
    for _ in range(100):
        val = c3 * roots**3 + c2 * roots**2 + c0
        der = 3.0 * c3 * roots**2 + 2.0 * c2 * roots
        step = np.where(np.abs(der) > 0, val / np.where(der == 0, 1, der), 0)
        roots = roots - step
        scale = np.abs(c3) * np.abs(roots) ** 3 + np.abs(c2) * np.abs(roots) ** 2 + np.abs(c0)
        if np.all(np.abs(c3 * roots**3 + c2 * roots**2 + c0) <= 1e-15 * scale):
            break
    order = np.argsort(-roots.real, kind="stable")
    roots = roots[order]
    cls = []
    for r in roots:
        if abs(r.imag) < _REAL_TOL * max(1.0, abs(r)):
            cls.append(POSITIVE_REAL if r.real > 0 else NEGATIVE_REAL)
        else:
            cls.append(COMPLEX_PAIR)
    return DeltaRoots(
        N=N, beta=float(beta), C=float(C),
        roots=(complex(roots[0]), complex(roots[1]), complex(roots[2])),
        classification=(cls[0], cls[1], cls[2]),
    )


def _energy(delta: float, N: int, C: float) -> float:
    return (delta + N + 0.5) ** 2 + 0.75 - C


def doublet(N: int, beta: float, C: float):
    """Classify the (N, beta, C) level: Doublet, SingleLevel or NoDoublet.

    Two positive real cubic roots give the doublet; the coalescence
    boundary gives a degenerate SingleLevel; beta = 0 takes the linear
    path delta = (C - N^2 - N - 1)/(2N+1) and yields at most one level.
    """
    if beta == 0.0:
        delta = (C - N * (N + 1.0) - 1.0) / (2.0 * N + 1.0)
        if delta > 0.0:
            return SingleLevel(N=N, delta=delta, energy=_energy(delta, N, C))
        return NoDoublet(N=N)
    pos = solve_delta(N, beta, C).positive_real()
    if len(pos) == 2:
        hi, lo = max(pos), min(pos)
        if hi - lo <= 1e-8 * hi:
            mid = 0.5 * (hi + lo)
            return SingleLevel(N=N, delta=mid, energy=_energy(mid, N, C), degenerate=True)
        return Doublet(
            N=N, delta_plus=hi, delta_minus=lo,
            e_plus=_energy(hi, N, C), e_minus=_energy(lo, N, C),
        )
    if len(pos) == 1:
        # numerically split double root straddling the classification line
        d = pos[0]
        return SingleLevel(N=N, delta=d, energy=_energy(d, N, C), degenerate=True)
    return NoDoublet(N=N)


def c_min(N: int, beta: float) -> float:
    """Smallest C with two positive real roots, to 1e-10 by bisection.

    The threshold is the discriminant zero above C = N^2 + N + 1; the
    discriminant is negative there and strictly increasing in C, so sign
    bisection brackets it cleanly.
    """
    if beta <= 0.0:
        raise ValueError("c_min requires beta > 0")
    lo = N * (N + 1.0) + 1.0
    width = max(1.0, 2.0 * (27.0 * (2.0 * N + 1.0) ** 2 * beta**2 / 4.0) ** (1.0 / 3.0))
    hi = lo + width
    while cubic_discriminant(N, beta, hi) <= 0.0:
        hi = lo + (hi - lo) * 2.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if cubic_discriminant(N, beta, mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def spectrum_report(p: NatanzonParams, n_max_request: int) -> list:
    """Per-N classification for N = 0..n_max_request, in (N, q) order."""
    if n_max_request < 0:
        raise ValueError("n_max_request must be non-negative")
    return [doublet(n, p.beta, p.C) for n in range(n_max_request + 1)]
