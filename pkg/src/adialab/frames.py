"""Instantaneous eigenframes along a trajectory, in the parallel-transport gauge.

An eigenframe collects, per grid node, the eigenvalues of h(t_k) and
eigenvectors whose phases are fixed so that successive overlaps
<n(t_k)|n(t_{k+1})> are real positive. In the continuum limit this is
the gauge <n|dn/dt> = 0. The frame carries the running dynamical-phase
integrals and feeds two moving-frame integrators:

* the forward frame, where the neglected coupling is dressed by the
  oscillating phase factor exp(i * integral of the level splitting);
* the dual frame (for the generator of the reversed evolution), where
  that phase factor is absent and the bare coupling acts directly.

The difference between those two right-hand sides is precisely why one
evolution can be adiabatic while the other is resonant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchMatchError,
    DegenerateSpectrumError,
    NotNormalizedError,
)
from .linalg import _fix_column_phases, eig_hermitian, eigh2_batch, expm_batch
from .propagation import HamiltonianSource, TimeGrid

_GAP_RTOL = 1e-6
_MATCH_MARGIN = 1e-3
_NORMALIZATION_TOL = 1e-8


@dataclass(frozen=True)
class EigenFrame:
    """Gauge-fixed instantaneous eigensystem on a time grid.

    eps[k, n] are ascending eigenvalues at node k; vectors[k][:, n] the
    matching eigenvectors; phase_integrals[k, n] the trapezoid-rule value
    of the integral of eps_n from t_0 to t_k.
    """

    grid: TimeGrid
    eps: np.ndarray
    vectors: np.ndarray
    phase_integrals: np.ndarray
    degenerate: np.ndarray

    @property
    def levels(self) -> int:
        return self.eps.shape[1]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class CouplingMatrix:
    """Frame coupling -i <n | d/dt | m> at one grid node, zero diagonal.

    The underlying overlap-derivative matrix <n|dm/dt> is anti-Hermitian
    (it is the derivative of a constant Gram matrix), so the entries here
    satisfy A_nm = conj(A_mn) up to discretization error.
    """

    k: int
    entries: np.ndarray


@dataclass(frozen=True)
class FrameAmplitudes:
    """Moving-frame amplitudes per grid node; frame is 'forward' or 'dual'."""

    phi: np.ndarray
    frame: str

    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.phi) ** 2, axis=1)


def build_eigenframe(src: HamiltonianSource, grid: TimeGrid) -> EigenFrame:
    """Diagonalize src along the grid and fix the transport gauge.

    Branches are continued between nodes by maximum-modulus overlap with
    the previous node (with ascending eigenvalue order this must be the
    identity pairing; anything else means the grid is too coarse).
    Phases are then fixed so every successive same-branch overlap is real
    positive.

    Raises
    ------
    DegenerateSpectrumError
        If any node's spectrum has a gap below 1e-6 of the local norm.
    BranchMatchError
        If overlap-based continuation is ambiguous (top two overlaps
        within 1e-3) or disagrees with eigenvalue order.
    """
    ts = grid.times()
    H = src.batch(ts)
    n_nodes = H.shape[0]
    if src.dim == 2:
        eps, vectors = eigh2_batch(H)
    else:
        eps = np.empty((n_nodes, src.dim))
        vectors = np.empty((n_nodes, src.dim, src.dim), dtype=complex)
        for k in range(n_nodes):
            dec = eig_hermitian(H[k])
            eps[k] = dec.values
            vectors[k] = dec.vectors
    # Deterministic gauge seed: largest-magnitude component of each
    # node-0 eigenvector real positive; transport fixes the rest.
    vectors[0] = _fix_column_phases(vectors[0])

    scale = np.maximum(np.sqrt(np.sum(np.abs(H) ** 2, axis=(1, 2))), 1.0)
    gaps = np.min(np.diff(eps, axis=1), axis=1)
    degenerate = gaps < _GAP_RTOL * scale
    if np.any(degenerate):
        k_bad = int(np.argmax(degenerate))
        raise DegenerateSpectrumError(
            f"spectral gap {gaps[k_bad]:.3e} at t = {ts[k_bad]:g} (node {k_bad}) "
            f"below {_GAP_RTOL:g} of the local norm"
        )

    # Successive-node overlap matrices O[k] = V_k^dag V_{k+1}.
    overlaps = np.einsum("kji,kjm->kim", vectors[:-1].conj(), vectors[1:])
    mod = np.abs(overlaps)
    best = np.argmax(mod, axis=2)
    rows = np.arange(src.dim)
    if np.any(best != rows):
        k_bad, n_bad = np.argwhere(best != rows)[0]
        raise BranchMatchError(
            f"branch continuation at node {k_bad} maps level {n_bad} to "
            f"{best[k_bad, n_bad]}; grid too coarse for overlap tracking"
        )
    top2 = np.sort(mod, axis=2)[:, :, -2:]
    margin = top2[:, :, 1] - top2[:, :, 0]
    if np.any(margin < _MATCH_MARGIN):
        k_bad = int(np.argwhere(margin < _MATCH_MARGIN)[0][0])
        raise BranchMatchError(
            f"branch overlaps at node {k_bad} separated by less than "
            f"{_MATCH_MARGIN:g}; refusing ambiguous continuation"
        )

    # Parallel transport: rotate node k+1 so the same-branch overlap with
    # node k is real positive. The per-node corrections accumulate.
    diag = overlaps[:, rows, rows]
    beta = np.vstack([np.zeros((1, src.dim)), -np.cumsum(np.angle(diag), axis=0)])
    vectors = vectors * np.exp(1j * beta)[:, np.newaxis, :]

    phase_integrals = np.vstack(
        [
            np.zeros((1, src.dim)),
            0.5 * grid.dt * np.cumsum(eps[:-1] + eps[1:], axis=0),
        ]
    )
    return EigenFrame(
        grid=grid,
        eps=eps,
        vectors=vectors,
        phase_integrals=phase_integrals,
        degenerate=np.zeros(n_nodes, dtype=bool),
    )


def coupling_series(frame: EigenFrame) -> np.ndarray:
    """Coupling matrices -i <n|dm/dt> at every node, zero diagonal.

    Interior nodes use centered differences (O(dt^2)); the two end nodes
    use one-sided second-order differences so integrators can cover the
    full window.
    """
    V = frame.vectors
    dt = frame.grid.dt
    dV = np.empty_like(V)
    dV[1:-1] = (V[2:] - V[:-2]) / (2.0 * dt)
    dV[0] = (-3.0 * V[0] + 4.0 * V[1] - V[2]) / (2.0 * dt)
    dV[-1] = (3.0 * V[-1] - 4.0 * V[-2] + V[-3]) / (2.0 * dt)
    A = -1j * np.einsum("kji,kjm->kim", V.conj(), dV)
    idx = np.arange(frame.levels)
    A[:, idx, idx] = 0.0
    return A


def coupling_matrix(frame: EigenFrame, k: int) -> CouplingMatrix:
    """Centered-difference coupling at interior node k (0 < k < steps)."""
    if not 0 < k < frame.grid.steps:
        raise IndexError(f"centered differences need 0 < k < {frame.grid.steps}")
    V = frame.vectors
    dV = (V[k + 1] - V[k - 1]) / (2.0 * frame.grid.dt)
    A = -1j * V[k].conj().T @ dV
    np.fill_diagonal(A, 0.0)
    return CouplingMatrix(k=k, entries=A)


def dual_coupling(frame: EigenFrame, k: int) -> CouplingMatrix:
    """Coupling of the dual-evolution frame at node k.

    Equals the forward coupling dressed by the accumulated level-splitting
    phase, A_nm * exp(+i [P_m - P_n]), which exactly cancels the
    oscillating factor in the dual moving-frame equation.
    """
    base = coupling_matrix(frame, k)
    P = frame.phase_integrals[k]
    phase = np.exp(1j * (P[np.newaxis, :] - P[:, np.newaxis]))
    return CouplingMatrix(k=k, entries=base.entries * phase)


def adiabatic_propagator(frame: EigenFrame, k: int) -> np.ndarray:
    """Sum over levels of |n(t_k)><n(0)| exp(-i * phase_integrals[k, n])."""
    if not 0 <= k <= frame.grid.steps:
        raise IndexError(f"node {k} outside 0..{frame.grid.steps}")
    phases = np.exp(-1j * frame.phase_integrals[k])
    return (frame.vectors[k] * phases) @ frame.vectors[0].conj().T


def _frame_generators(frame: EigenFrame, dual: bool) -> np.ndarray:
    """Hermitian midpoint generators of the moving-frame equation."""
    A = coupling_series(frame)
    if not dual:
        P = frame.phase_integrals
        phase = np.exp(1j * (P[:, :, np.newaxis] - P[:, np.newaxis, :]))
        A = A * phase
    return 0.5 * (A[:-1] + A[1:])


def _integrate_frame(frame: EigenFrame, phi0: np.ndarray, dual: bool) -> np.ndarray:
    phi0 = np.asarray(phi0, dtype=complex)
    if abs(np.linalg.norm(phi0) - 1.0) > _NORMALIZATION_TOL:
        raise NotNormalizedError("initial amplitudes must be normalized")
    gens = _frame_generators(frame, dual)
    E = expm_batch(gens, frame.grid.dt)
    phi = np.empty((frame.grid.steps + 1, frame.levels), dtype=complex)
    phi[0] = phi0
    for k in range(frame.grid.steps):
        phi[k + 1] = E[k] @ phi[k]
    return phi


def integrate_forward_frame(
    frame: EigenFrame, phi0: np.ndarray, neglect_coupling: bool = False
) -> FrameAmplitudes:
    """Integrate the moving-frame amplitudes for the forward evolution.

    The equation is i dphi_n/dt = sum_{m != n} A_nm exp(+i [P_n - P_m]) phi_m
    with P_n the running phase integrals. ``neglect_coupling`` zeroes the
    right-hand side, which is exactly the adiabatic approximation.
    """
    if neglect_coupling:
        phi = np.broadcast_to(
            np.asarray(phi0, dtype=complex), (frame.grid.steps + 1, frame.levels)
        ).copy()
        return FrameAmplitudes(phi=phi, frame="forward")
    return FrameAmplitudes(phi=_integrate_frame(frame, phi0, dual=False), frame="forward")


def integrate_dual_frame(frame: EigenFrame, phi0: np.ndarray) -> FrameAmplitudes:
    """Integrate the moving-frame amplitudes for the dual evolution.

    Expressed through the forward frame's data, the dual equation is
    i dphi_n/dt = sum_{m != n} A_nm(t) phi_m: the oscillating phase factor
    of the forward equation is absent, so a slowly varying coupling is
    resonant here even when the forward evolution is deeply adiabatic.
    """
    return FrameAmplitudes(phi=_integrate_frame(frame, phi0, dual=True), frame="dual")


def reconstruct_state(frame: EigenFrame, phi: np.ndarray, k: int) -> np.ndarray:
    """State vector from forward-frame amplitudes at node k."""
    weights = np.asarray(phi, dtype=complex) * np.exp(-1j * frame.phase_integrals[k])
    return frame.vectors[k] @ weights


def state_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a, b>|^2 for normalized state vectors."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    for v in (a, b):
        if abs(np.linalg.norm(v) - 1.0) > _NORMALIZATION_TOL:
            raise NotNormalizedError(
                f"state norm {np.linalg.norm(v):.12f} differs from 1"
            )
    return float(abs(np.vdot(a, b)) ** 2)
