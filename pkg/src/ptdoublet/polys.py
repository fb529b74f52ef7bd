"""Jacobi polynomials with complex parameters and the terminating
hypergeometric series they come from.

Everything here works for complex alpha, beta and complex argument; the
scipy implementations assume real parameters and are not usable. Roots
are needed as an independent oracle for node counting, so coefficient
extraction avoids recurrence-coefficient algebra: the polynomial is
sampled at Chebyshev nodes and a Vandermonde solve recovers exact (to
round-off) monomial coefficients even for complex parameters.
"""

from __future__ import annotations

import numpy as np

from .errors import BadParameters


def jacobi_poly(N: int, alpha: complex, beta_j: complex, z):
    """Degree-N Jacobi polynomial P_N^{(alpha, beta_j)}(z).

    Standard three-term recurrence; valid for complex parameters and
    scalar or array argument.
    """
    if N < 0:
        raise ValueError("degree must be non-negative")
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    p_prev = np.ones_like(z) if np.ndim(z) else 1.0 + 0j
    if N == 0:
        return p_prev
    s = alpha + beta_j
    p = (alpha + 1.0) + (s + 2.0) * (z - 1.0) / 2.0
    for n in range(2, N + 1):
        c = 2.0 * n + s
        a1 = 2.0 * n * (n + s) * (c - 2.0)
        a2 = (c - 1.0) * (alpha**2 - beta_j**2)
        a3 = (c - 1.0) * c * (c - 2.0)
        a4 = 2.0 * (n + alpha - 1.0) * (n + beta_j - 1.0) * c
        p, p_prev = ((a2 + a3 * z) * p - a4 * p_prev) / a1, p
    return p


def jacobi_deriv(N: int, alpha: complex, beta_j: complex, z):
    """d/dz of P_N^{(alpha, beta_j)}, via the degree-shift identity."""
    if N == 0:
        return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0.0 + 0j
    return 0.5 * (N + alpha + beta_j + 1.0) * jacobi_poly(N - 1, alpha + 1.0, beta_j + 1.0, z)


def jacobi_coeffs(N: int, alpha: complex, beta_j: complex) -> np.ndarray:
    """Monomial coefficients of P_N^{(alpha, beta_j)}, ascending order.

    Sampled at N+1 Chebyshev nodes and recovered by a Vandermonde solve;
    stable at the small degrees used here and immune to the bookkeeping
    errors of expanding the recurrence symbolically.
    """
    if N == 0:
        return np.ones(1, dtype=complex)
    x = np.cos(np.pi * (np.arange(N + 1) + 0.5) / (N + 1))
    y = jacobi_poly(N, alpha, beta_j, x)
    vand = np.vander(x.astype(complex), N + 1, increasing=True)
    return np.linalg.solve(vand, y)


def jacobi_roots(N: int, alpha: complex, beta_j: complex) -> np.ndarray:
    """All N roots of P_N^{(alpha, beta_j)}, Newton-polished.

    Companion-matrix roots of the sampled coefficients, then Newton
    iteration against the recurrence evaluation. Sorted by (real, imag)
    for reproducibility.
    """
    if N == 0:
        return np.zeros(0, dtype=complex)
    coeffs = jacobi_coeffs(N, alpha, beta_j)
    roots = np.roots(coeffs[::-1])
    for _ in range(50):
        val = jacobi_poly(N, alpha, beta_j, roots)
        der = jacobi_deriv(N, alpha, beta_j, roots)
        step = np.where(np.abs(der) > 0, val / np.where(der == 0, 1, der), 0)
        roots = roots - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(roots))):
            break
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def hyp2f1_terminating(a: complex, b: complex, c: complex, z) -> complex:
    """Gauss series 2F1(a, b; c; z) for b a non-positive integer.

    The series terminates after 1 - b terms, so it is an exact finite sum.
    Raises BadParameters when b is not a non-positive integer (within
    1e-9) or when c hits a non-positive integer before the series
    terminates, which would divide by zero.
    """
    b_int = round(float(np.real(b)))
    if abs(b - b_int) > 1e-9 or b_int > 0:
        raise BadParameters("b must be a non-positive integer for a terminating series")
    n_terms = -b_int
    for k in range(n_terms):
        if abs(c + k) < 1e-13:
            raise BadParameters("c hits a non-positive integer before the series terminates")
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    total = np.ones_like(z) if np.ndim(z) else 1.0 + 0j
    term = total
    for k in range(n_terms):
        term = term * ((a + k) * (b + k)) / ((c + k) * (k + 1.0)) * z
        total = total + term
    return total
