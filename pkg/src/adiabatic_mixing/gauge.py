"""Gauge matrix on the ground manifold, loop holonomy and median-graph diffusion.

For a loop whose quantization axis precesses once about an axis tilted by
``theta`` from z, the ground-manifold generator is the real symmetric matrix

    A[a, a] = -(k_a sin^2(theta/2) + (n - k_a) cos^2(theta/2))
    A[a, b] = sin(theta) / 2        if solutions a, b differ in one vertex

and one loop acts as ``W = exp(2 pi i A)``. ``exp(i t A)`` for general ``t``
is the continuous-time walk on the median graph.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import NumericalError
from .propagate import chebyshev_expm_apply, eig_expm_apply, gershgorin_interval
from .solutions import MedianAdjacency, SolutionBasis, trivial_indices

__all__ = [
    "DENSE_LIMIT",
    "DENSE_LIMIT_MANY",
    "GaugeMatrix",
    "basis_state",
    "build_gauge_matrix",
    "cardinality_probability",
    "diffuse",
    "diffuse_many",
    "entropy",
    "holonomy_apply",
    "holonomy_matrix",
    "normalized_entropy",
    "probabilities_csv",
    "trivial_probability",
]

# Largest dimension propagated through a dense eigendecomposition by default.
# Chebyshev wins above this for a single vector; many-time traces amortise
# one eigendecomposition and keep the dense route up to DENSE_LIMIT_MANY.
DENSE_LIMIT = 256
DENSE_LIMIT_MANY = 1024
NORM_TOL = 1e-8
PROB_FLOOR = 1e-30


@dataclass(frozen=True, eq=False)
class GaugeMatrix:
    """Real symmetric ``N_s x N_s`` matrix: dense diagonal + sparse off-diagonal edges."""

    n: int
    theta: float
    diagonal: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    hopping: float

    @property
    def dim(self) -> int:
        return int(self.diagonal.shape[0])

    @cached_property
    def sparse(self) -> sp.csr_matrix:
        d = self.dim
        vals = np.full(self.alpha.size, self.hopping)
        off = sp.coo_matrix((vals, (self.alpha, self.beta)), shape=(d, d))
        return (off + off.T + sp.diags(self.diagonal)).tocsr()

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diagonal).astype(float)
        m[self.alpha, self.beta] = self.hopping
        m[self.beta, self.alpha] = self.hopping
        return m

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.sparse @ v

    def shifted(self, c: float) -> "GaugeMatrix":
        """Same matrix plus ``c * I``."""
        return GaugeMatrix(self.n, self.theta, self.diagonal + c, self.alpha, self.beta, self.hopping)

    @cached_property
    def spectral_interval(self) -> tuple[float, float]:
        degree = np.bincount(self.alpha, minlength=self.dim) + np.bincount(self.beta, minlength=self.dim)
        return gershgorin_interval(self.diagonal, abs(self.hopping) * degree)

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        evals, evecs = scipy.linalg.eigh(self.to_dense())
        if not (np.all(np.isfinite(evals)) and np.all(np.isfinite(evecs))):
            raise NumericalError(f"eigendecomposition of {self.dim}x{self.dim} gauge matrix produced non-finite values")
        return evals, evecs


def build_gauge_matrix(b: SolutionBasis, adj: MedianAdjacency, theta: float) -> GaugeMatrix:
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    k = b.popcounts.astype(float)
    s2 = math.sin(theta / 2) ** 2
    c2 = math.cos(theta / 2) ** 2
    diagonal = -(k * s2 + (b.n - k) * c2)
    return GaugeMatrix(
        n=b.n,
        theta=float(theta),
        diagonal=diagonal,
        alpha=np.asarray(adj.alpha, dtype=np.int64),
        beta=np.asarray(adj.beta, dtype=np.int64),
        # sin(pi) is not exactly 0 in floating point
        hopping=0.0 if theta in (0.0, math.pi) else math.sin(theta) / 2,
    )


def _pick_method(A: GaugeMatrix, method: str, dense_limit: int) -> str:
    if method == "auto":
        return "dense" if A.dim <= dense_limit else "chebyshev"
    if method not in ("dense", "chebyshev"):
        raise ValueError(f"unknown propagation method {method!r}")
    return method


def diffuse(
    A: GaugeMatrix,
    psi0: np.ndarray,
    t: float,
    method: str = "auto",
    dense_limit: int = DENSE_LIMIT,
    tol: float = 1e-12,
) -> np.ndarray:
    """``exp(i t A) psi0``.

    ``method`` is ``"dense"``, ``"chebyshev"`` or ``"auto"`` (dense up to
    ``dense_limit`` states).
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (A.dim,):
        raise ValueError(f"state has shape {psi0.shape}, gauge matrix is {A.dim}x{A.dim}")
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    if t == 0:
        return psi0.copy()
    how = _pick_method(A, method, dense_limit)
    if how == "dense":
        evals, evecs = A.eigensystem
        out = eig_expm_apply(evals, evecs, psi0, t)
    else:
        out = chebyshev_expm_apply(A.matvec, psi0, t, A.spectral_interval, tol=tol)
    drift = abs(np.vdot(out, out).real - np.vdot(psi0, psi0).real)
    if drift > NORM_TOL:
        raise NumericalError(f"{how} propagation changed the norm by {drift:.3g} (t={t:g}, dim={A.dim})")
    return out


def diffuse_many(
    A: GaugeMatrix, psi0: np.ndarray, times, method: str = "auto", dense_limit: int = DENSE_LIMIT_MANY
) -> np.ndarray:
    """Rows ``exp(i t A) psi0`` for each ``t`` in ``times``."""
    times = np.asarray(times, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    if _pick_method(A, method, dense_limit) == "dense":
        evals, evecs = A.eigensystem
        coeffs = evecs.T @ psi0
        return (np.exp(1j * np.outer(times, evals)) * coeffs) @ evecs.T
    return np.array([diffuse(A, psi0, t, method="chebyshev") for t in times])


def holonomy_apply(A: GaugeMatrix, psi0: np.ndarray, method: str = "auto", dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """State after one closed adiabatic loop: ``exp(2 pi i A) psi0``."""
    return diffuse(A, psi0, 2 * math.pi, method=method, dense_limit=dense_limit)


def holonomy_matrix(A: GaugeMatrix) -> np.ndarray:
    """Dense unitary ``exp(2 pi i A)``."""
    evals, evecs = A.eigensystem
    return (evecs * np.exp(2j * math.pi * evals)) @ evecs.T


def basis_state(b: SolutionBasis, mask: int = 0) -> np.ndarray:
    """Unit vector on the solution ``mask`` (default: the empty set)."""
    psi = np.zeros(b.size, dtype=complex)
    psi[b.index_of[int(mask)]] = 1.0
    return psi


def _probs(psi: np.ndarray) -> np.ndarray:
    p = np.abs(np.asarray(psi)) ** 2
    p[p < PROB_FLOOR] = 0.0
    return p


def trivial_probability(psi: np.ndarray, b: SolutionBasis) -> tuple[float, float]:
    """``(d_n, c_n)``: total and per-solution probability on the ``n+1`` trivial sets."""
    d = float(np.sum(np.abs(np.asarray(psi)[trivial_indices(b)]) ** 2))
    return d, d / (b.n + 1)


def entropy(psi: np.ndarray) -> float:
    """``-sum p ln p`` over basis probabilities, with ``0 ln 0 = 0``."""
    p = _probs(psi)
    nz = p[p > 0]
    # rounding can push a lone probability just past 1
    return max(0.0, float(-np.sum(nz * np.log(nz))))


def normalized_entropy(psi: np.ndarray, n_solutions: int | None = None) -> float:
    n_solutions = len(psi) if n_solutions is None else n_solutions
    if n_solutions < 2:
        raise ValueError("normalized entropy needs at least 2 solutions")
    return entropy(psi) / math.log(n_solutions)


def cardinality_probability(psi: np.ndarray, b: SolutionBasis) -> np.ndarray:
    """``P_k``: probability carried by solutions with exactly ``k`` vertices."""
    return np.bincount(b.popcounts, weights=np.abs(np.asarray(psi)) ** 2, minlength=b.n + 1)


def probabilities_csv(psi: np.ndarray, b: SolutionBasis) -> str:
    p = np.abs(np.asarray(psi)) ** 2
    rows = ["index,bitmask,probability"]
    rows += [f"{i},{int(s)},{p[i]:.12g}" for i, s in enumerate(b.masks)]
    return "\n".join(rows) + "\n"
