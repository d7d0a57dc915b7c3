"""Apply ``exp(i t H)`` to a vector for real symmetric ``H``.

Two routes: a dense eigendecomposition (exact to rounding, O(N^3) once)
and a Chebyshev expansion that only needs matrix-vector products.
"""
from __future__ import annotations

import numpy as np
from scipy.special import jv

from .errors import NumericalError

__all__ = ["chebyshev_expm_apply", "eig_expm_apply", "gershgorin_interval"]


def gershgorin_interval(diagonal: np.ndarray, row_abs_sums: np.ndarray) -> tuple[float, float]:
    """Interval guaranteed to contain the spectrum of a symmetric matrix."""
    lo = float(np.min(diagonal - row_abs_sums))
    hi = float(np.max(diagonal + row_abs_sums))
    return lo, hi


def eig_expm_apply(evals: np.ndarray, evecs: np.ndarray, psi: np.ndarray, t: float) -> np.ndarray:
    """``exp(i t H) psi`` from a precomputed ``H = V diag(evals) V^T``."""
    coeffs = evecs.T @ psi
    return evecs @ (np.exp(1j * t * evals) * coeffs)


def chebyshev_expm_apply(
    matvec,
    psi: np.ndarray,
    t: float,
    interval: tuple[float, float],
    tol: float = 1e-12,
    max_terms: int | None = None,
) -> np.ndarray:
    """``exp(i t H) psi`` by Chebyshev expansion on the given spectral interval.

    Uses ``exp(i tau x) = J_0(tau) + 2 sum_k i^k J_k(tau) T_k(x)`` on the
    rescaled operator. The series is truncated once ``|J_k| < tol`` past the
    turning point ``k > tau``; failure to get there raises NumericalError.
    """
    lo, hi = interval
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    psi = np.asarray(psi, dtype=complex)
    if t == 0:
        return psi.copy()
    center = 0.5 * (hi + lo)
    # zero-width interval means H is a multiple of the identity
    half = max(0.5 * (hi - lo), 1e-300)
    tau = abs(t) * half
    sign = 1.0 if t > 0 else -1.0
    if max_terms is None:
        max_terms = int(2 * tau + 200)

    def scaled(v):
        return (matvec(v) - center * v) / half

    t_prev = psi
    t_cur = scaled(psi)
    out = jv(0, tau) * t_prev + 2j * sign * jv(1, tau) * t_cur
    phase = 1j * sign
    converged = tau < 1e-300
    k = 1
    while not converged:
        k += 1
        if k > max_terms:
            raise NumericalError(
                f"Chebyshev series not converged after {max_terms} terms "
                f"(tau={tau:.3g}, last |J_k|={abs(jv(k - 1, tau)):.3g}, tol={tol:g})"
            )
        t_prev, t_cur = t_cur, 2.0 * scaled(t_cur) - t_prev
        phase *= 1j * sign
        c = jv(k, tau)
        out += 2.0 * phase * c * t_cur
        if k > tau and abs(c) < tol and abs(jv(k + 1, tau)) < tol:
            converged = True
    return np.exp(1j * t * center) * out
