"""Full ``2^n`` state-vector simulation of the adiabatic loop.

Computational-basis index ``x`` is the vertex bitmask: bit ``j`` set means
spin ``j`` is up (``sigma^z_j = +1``, ``x_j = 1``). The empty set is the
all-down state at index 0.

The loop turns the common spin axis ``r`` once about the tilted axis
``a = (sin theta, 0, cos theta)``, starting and ending on z. Every spin is
rotated by the same involution ``V(r)``, so ``H_tau = U H_0 U`` with
``U = V^{(x)n}`` and ``H_0`` diagonal; a frozen-Hamiltonian step is then
``U exp(-i H_0 dt) U``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .graph import Graph
from .solutions import SolutionBasis

__all__ = [
    "DEFAULT_MAX_QUBITS",
    "SpinHamiltonian",
    "build_hamiltonian",
    "convergence_csv",
    "convergence_study",
    "default_steps",
    "embed",
    "evolve_adiabatic",
    "ground_projection_fidelity",
    "loop_direction",
    "problem_energies",
    "rotation_angles",
    "spin_rotation",
]

DEFAULT_MAX_QUBITS = 12
_POLE_EPS = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# local index 0 = down, 1 = up; matrices written in (up, down) order are flipped
_FLIP = np.array([1, 0])


def loop_direction(theta: float, phi: float) -> np.ndarray:
    """Unit vector ``r(phi)``: z rotated by ``phi`` about ``(sin theta, 0, cos theta)``."""
    st, ct = math.sin(theta), math.cos(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    return np.array([st * ct * (1 - cp), -st * sp, cp + ct * ct * (1 - cp)])


def rotation_angles(r) -> tuple[float, float]:
    """Polar and azimuthal angles of ``r``; azimuth is 0 at the poles."""
    x, y, z = (float(c) for c in r)
    polar = math.acos(min(1.0, max(-1.0, z)))
    if math.sin(polar) < _POLE_EPS:
        return polar, 0.0
    return polar, math.atan2(y, x)


def spin_rotation(r) -> np.ndarray:
    """Single-spin ``V`` taking sigma^z to ``r . sigma``, in (up, down) order.

    ``V`` is Hermitian and squares to the identity.
    """
    polar, azim = rotation_angles(r)
    c, s = math.cos(polar / 2), math.sin(polar / 2)
    return np.array(
        [[c, np.exp(-1j * azim) * s], [np.exp(1j * azim) * s, -c]],
        dtype=complex,
    )


def problem_energies(g: Graph, delta: float = 1.0) -> np.ndarray:
    """Diagonal of ``H_0 = delta * sum_edges (s_i + s_j + s_i s_j)`` over bitmasks."""
    idx = np.arange(1 << g.n, dtype=np.int64)
    energies = np.zeros(idx.size)
    for u, v in g.edges:
        su = 2.0 * ((idx >> u) & 1) - 1.0
        sv = 2.0 * ((idx >> v) & 1) - 1.0
        energies += su + sv + su * sv
    return delta * energies


def _check_size(n: int, max_qubits: int):
    if n > max_qubits:
        raise CapacityError(f"n={n} exceeds full-simulation limit {max_qubits}")


def _apply_all(op_local: np.ndarray, psi: np.ndarray, n: int) -> np.ndarray:
    """Apply the same single-qubit operator (local 0=down,1=up basis) to every qubit."""
    t = psi.reshape((2,) * n)
    for axis in range(n):
        t = np.tensordot(op_local, t, axes=([1], [axis]))
        t = np.moveaxis(t, 0, axis)
    return t.reshape(-1)


def _local(op_ud: np.ndarray) -> np.ndarray:
    return op_ud[np.ix_(_FLIP, _FLIP)]


@dataclass(frozen=True, eq=False)
class SpinHamiltonian:
    """``H_tau = delta * sum_edges (tau_i + tau_j + tau_i tau_j)`` with ``tau = r . sigma``."""

    graph: Graph
    direction: np.ndarray
    delta: float = 1.0

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def dim(self) -> int:
        return 1 << self.graph.n

    def _site_operator(self, j: int, single: np.ndarray) -> np.ndarray:
        # kron order: most significant qubit first; qubit j sits at bit j
        out = np.ones((1, 1), dtype=complex)
        eye = np.eye(2, dtype=complex)
        for q in reversed(range(self.n)):
            out = np.kron(out, single if q == j else eye)
        return out

    def to_dense(self) -> np.ndarray:
        """Assemble the operator from the rotated spin terms directly."""
        rx, ry, rz = self.direction
        tau = _local(rx * SIGMA_X + ry * SIGMA_Y + rz * SIGMA_Z)
        ops = [self._site_operator(j, tau) for j in range(self.n)]
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for u, v in self.graph.edges:
            h += ops[u] + ops[v] + ops[u] @ ops[v]
        return self.delta * h

    def rotation(self) -> np.ndarray:
        """Local-basis ``V`` shared by every spin."""
        return _local(spin_rotation(self.direction))

    def apply(self, psi: np.ndarray) -> np.ndarray:
        v = self.rotation()
        e = problem_energies(self.graph, self.delta)
        return _apply_all(v, e * _apply_all(v, psi, self.n), self.n)

    def step(self, psi: np.ndarray, dt: float, energies: np.ndarray | None = None) -> np.ndarray:
        """``exp(-i H dt) psi`` exactly."""
        v = self.rotation()
        if energies is None:
            energies = problem_energies(self.graph, self.delta)
        return _apply_all(v, np.exp(-1j * dt * energies) * _apply_all(v, psi, self.n), self.n)


def build_hamiltonian(g: Graph, r, delta: float = 1.0, max_qubits: int = DEFAULT_MAX_QUBITS) -> SpinHamiltonian:
    _check_size(g.n, max_qubits)
    r = np.asarray(r, dtype=float)
    if abs(np.linalg.norm(r) - 1.0) > 1e-9:
        raise ValueError(f"direction must be a unit vector, |r| = {np.linalg.norm(r)}")
    return SpinHamiltonian(g, r, float(delta))


def default_steps(T: float, delta: float = 1.0) -> int:
    return max(1000, math.ceil(40 * T * delta))


def evolve_adiabatic(
    g: Graph,
    theta: float,
    delta: float,
    T: float,
    steps: int | None = None,
    psi0: np.ndarray | None = None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> np.ndarray:
    """Run one loop ``phi: 0 -> 2 pi`` in total time ``T``.

    Piecewise-constant midpoint propagation: on step ``k`` the Hamiltonian
    is frozen at ``phi = 2 pi (k + 1/2) / steps``. ``psi0`` defaults to the
    all-down (empty-set) state.
    """
    _check_size(g.n, max_qubits)
    if T <= 0:
        raise ValueError(f"total time must be positive, got {T}")
    steps = default_steps(T, delta) if steps is None else int(steps)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    dim = 1 << g.n
    if psi0 is None:
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(psi0, dtype=complex)
        if psi.shape != (dim,):
            raise ValueError(f"state has shape {psi.shape}, expected ({dim},)")
    dt = T / steps
    phases = np.exp(-1j * dt * problem_energies(g, delta))
    n = g.n
    for k in range(steps):
        r = loop_direction(theta, 2 * math.pi * (k + 0.5) / steps)
        v = _local(spin_rotation(r))
        psi = _apply_all(v, phases * _apply_all(v, psi, n), n)
    return psi


def embed(b: SolutionBasis, amplitudes: np.ndarray) -> np.ndarray:
    """Full ``2^n`` vector carrying ``amplitudes`` on the solution bitmasks."""
    full = np.zeros(1 << b.n, dtype=complex)
    full[b.masks] = amplitudes
    return full


def ground_projection_fidelity(psi_full: np.ndarray, b: SolutionBasis, psi_pred: np.ndarray) -> tuple[float, float]:
    """``(leakage, fidelity)`` of a full state against a ground-manifold prediction.

    Fidelity is the phase-insensitive overlap of the prediction with the
    normalised projection; reported as 0 when nothing is left to project.
    """
    proj = np.asarray(psi_full)[b.masks]
    weight = float(np.vdot(proj, proj).real)
    leakage = max(0.0, 1.0 - weight)
    if weight < 1e-300:
        return leakage, 0.0
    pred = np.asarray(psi_pred, dtype=complex)
    fid = abs(np.vdot(pred, proj)) / (math.sqrt(weight) * np.linalg.norm(pred))
    return leakage, float(fid)


def convergence_study(g, b, psi_pred, theta, times, delta=1.0, steps=None):
    """Rows ``(T, steps, leakage, fidelity)`` for each total time in ``times``."""
    rows = []
    for T in times:
        k = default_steps(T, delta) if steps is None else steps
        psi = evolve_adiabatic(g, theta, delta, T, k)
        leak, fid = ground_projection_fidelity(psi, b, psi_pred)
        rows.append((float(T), int(k), leak, fid))
    return rows


def convergence_csv(rows) -> str:
    lines = ["T,steps,leakage,fidelity"]
    lines += [f"{T:g},{k},{leak:.12g},{fid:.12g}" for T, k, leak, fid in rows]
    return "\n".join(lines) + "\n"
