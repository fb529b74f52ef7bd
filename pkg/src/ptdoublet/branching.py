"""Branch tracking for multivalued functions sampled along paths.

The closed-form wavefunctions and potentials involve complex logarithms,
square roots, and general powers. Per-point principal values jump when a
path crosses a branch cut, which would corrupt residuals and winding
counts. These helpers instead fix the principal value at one anchor sample
and continue the branch outward along the sample sequence, assuming the
sampling is dense enough that consecutive arguments differ by less than pi.
"""

from __future__ import annotations

import numpy as np


def continuous_angle(values: np.ndarray, anchor: int = 0) -> np.ndarray:
    """Phase of a 1-D sample sequence, continued to remove branch jumps.

    The phase at index `anchor` is the principal argument; elsewhere the
    principal argument is corrected by multiples of 2*pi so the result has
    no jumps larger than pi between neighbours.
    """
    values = np.asarray(values)
    if values.ndim != 1:
        raise ValueError("continuous_angle expects a 1-D sample path")
    ph = np.unwrap(np.angle(values))
    shift = np.round((ph[anchor] - np.angle(values[anchor])) / (2.0 * np.pi))
    return ph - 2.0 * np.pi * shift


def continuous_log(values: np.ndarray, anchor: int = 0) -> np.ndarray:
    """log(values) with the imaginary part continued along the sequence."""
    values = np.asarray(values)
    return np.log(np.abs(values)) + 1j * continuous_angle(values, anchor)


def continuous_sqrt(values: np.ndarray, anchor: int = 0) -> np.ndarray:
    """sqrt(values), principal at the anchor, continued along the sequence."""
    return np.exp(0.5 * continuous_log(values, anchor))


def continuous_power(values: np.ndarray, exponent: complex, anchor: int = 0) -> np.ndarray:
    """values**exponent, principal at the anchor, continued along the sequence."""
    return np.exp(exponent * continuous_log(values, anchor))


def nearest_branch(candidate: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Pick the sign of a square root consistent with a reference value.

    `candidate` holds principal square roots; the return value flips the
    sign wherever -candidate is closer to `reference` than +candidate.
    """
    candidate = np.asarray(candidate)
    flip = np.abs(candidate - reference) > np.abs(candidate + reference)
    return np.where(flip, -candidate, candidate)
