"""Dual-evolution operators and the two adiabatic-inconsistency constructions.

For an evolution U(t) generated by h(t), the reversed evolution U^dag(t)
is generated by the dual Hamiltonian -U^dag h U. Two superficially
different approximations to U^dag exist:

* ``static_phase_evolution`` (V^dag): the evolution generated by the
  conjugation approximation -U_adia^dag h U_adia; it is diagonal in the
  initial eigenbasis and only accumulates reversed dynamical phases.
* ``dual_adiabatic_propagator`` (W^dag): the adiabatic approximation
  applied to the exact dual Hamiltonian, using its eigenframe
  U^dag(t)|n(t)>.

They are tied together by the exact operator identity
W^dag = U^dag U_adia V^dag, so the residual of that identity must sit at
rounding level no matter how badly either approximation fails. The
"inconsistency" U_adia V^dag = sum_n |n(t)><n(0)| != I is reproduced and
measured, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenResidualError
from .frames import EigenFrame, adiabatic_propagator
from .linalg import frobenius
from .models import sampled_hamiltonian
from .propagation import HamiltonianSource, PropagatorTrace, require_same_grid

_EIGEN_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class DualEigenFrame(EigenFrame):
    """Eigenframe of the dual Hamiltonian, built from the forward frame.

    vectors[k][:, n] = U^dag(t_k) |n(t_k)> exp(-i P_n(t_k)) is an
    eigenvector of the dual generator with eigenvalue -eps_n(t_k), and the
    chosen phase keeps the parallel-transport gauge. ``max_eigen_residual``
    records the worst eigen-equation residual found during construction.
    """

    max_eigen_residual: float = 0.0


def build_dual_frame(
    trace: PropagatorTrace, frame: EigenFrame, src: HamiltonianSource
) -> DualEigenFrame:
    """Assemble the dual Hamiltonian's gauge-fixed eigenframe.

    ``src`` is the forward Hamiltonian; it is needed to verify that each
    constructed vector really is an eigenvector of -U^dag h U at its node.

    Raises
    ------
    GridMismatchError
        If trace and frame live on different grids.
    EigenResidualError
        If any eigen-equation residual exceeds 1e-9 of the local scale.
    """
    require_same_grid(trace, frame)
    grid = frame.grid
    phases = np.exp(-1j * frame.phase_integrals)
    vectors = (
        np.einsum("kji,kjm->kim", trace.U.conj(), frame.vectors)
        * phases[:, np.newaxis, :]
    )
    eps = -frame.eps

    h_all = src.batch(grid.times())
    dual_h = -np.einsum("kji,kjl,klm->kim", trace.U.conj(), h_all, trace.U)
    residual = dual_h @ vectors - vectors * eps[:, np.newaxis, :]
    max_residual = float(np.sqrt(np.sum(np.abs(residual) ** 2, axis=1)).max())
    scale = max(1.0, float(np.sqrt(np.sum(np.abs(h_all) ** 2, axis=(1, 2))).max()))
    if max_residual > _EIGEN_RESIDUAL_TOL * scale:
        raise EigenResidualError(
            f"dual eigenvector residual {max_residual:.3e} exceeds "
            f"{_EIGEN_RESIDUAL_TOL:g} * {scale:g}"
        )
    return DualEigenFrame(
        grid=grid,
        eps=eps,
        vectors=vectors,
        phase_integrals=-frame.phase_integrals,
        degenerate=frame.degenerate.copy(),
        max_eigen_residual=max_residual,
    )


def static_phase_evolution(frame: EigenFrame, k: int) -> np.ndarray:
    """sum_n |n(0)><n(0)| exp(+i P_n(t_k)): reversed phases, frozen basis.

    This is the evolution generated by the conjugation approximation to
    the dual Hamiltonian; it commutes with h(t_0).
    """
    if not 0 <= k <= frame.grid.steps:
        raise IndexError(f"node {k} outside 0..{frame.grid.steps}")
    V0 = frame.vectors[0]
    return (V0 * np.exp(1j * frame.phase_integrals[k])) @ V0.conj().T


def dual_adiabatic_propagator(
    trace: PropagatorTrace, frame: EigenFrame, k: int
) -> np.ndarray:
    """sum_n U^dag(t_k) |n(t_k)><n(0)|: the dual evolution's adiabatic
    approximation. The dual dynamical phases cancel against the gauge
    phases of the dual eigenvectors, leaving this phase-free form."""
    require_same_grid(trace, frame)
    if not 0 <= k <= frame.grid.steps:
        raise IndexError(f"node {k} outside 0..{frame.grid.steps}")
    return trace.U[k].conj().T @ frame.vectors[k] @ frame.vectors[0].conj().T


def inconsistency_operator(frame: EigenFrame, k: int) -> np.ndarray:
    """U_adia(t_k) V^dag(t_k) = sum_n |n(t_k)><n(0)|.

    Substituting the two approximations into U U^dag = I produces this
    operator; its distance from the identity is the measured size of the
    inconsistency.
    """
    return adiabatic_propagator(frame, k) @ static_phase_evolution(frame, k)


def equivalence_residual(trace: PropagatorTrace, frame: EigenFrame, k: int) -> float:
    """|| W^dag - U^dag U_adia V^dag ||_F at node k.

    This is an exact operator identity, independent of how accurate the
    adiabatic approximation is, so the residual must be at floating-point
    level on every scenario.
    """
    require_same_grid(trace, frame)
    w = dual_adiabatic_propagator(trace, frame, k)
    composed = (
        trace.U[k].conj().T
        @ adiabatic_propagator(frame, k)
        @ static_phase_evolution(frame, k)
    )
    return frobenius(w - composed)


def _adiabatic_propagator_series(frame: EigenFrame) -> np.ndarray:
    phases = np.exp(-1j * frame.phase_integrals)
    return np.einsum(
        "kim,jm->kij", frame.vectors * phases[:, np.newaxis, :], frame.vectors[0].conj()
    )


def equivalence_residual_series(trace: PropagatorTrace, frame: EigenFrame) -> np.ndarray:
    """Node-wise residual of the identity W^dag = U^dag U_adia V^dag."""
    require_same_grid(trace, frame)
    U_dag = np.conj(np.swapaxes(trace.U, 1, 2))
    V = frame.vectors
    w = np.einsum("kij,kjm,lm->kil", U_dag, V, V[0].conj())
    Ua = _adiabatic_propagator_series(frame)
    V0 = frame.vectors[0]
    vdag = np.einsum(
        "im,km,jm->kij", V0, np.exp(1j * frame.phase_integrals), V0.conj()
    )
    composed = np.einsum("kij,kjl,klm->kim", U_dag, Ua, vdag)
    return np.sqrt(np.sum(np.abs(w - composed) ** 2, axis=(1, 2)))


def inconsistency_distance_series(frame: EigenFrame) -> np.ndarray:
    """Node-wise || U_adia V^dag - I ||_F, the measured inconsistency."""
    V = frame.vectors
    M = np.einsum("kim,jm->kij", V, V[0].conj())
    M = M - np.eye(frame.dim)
    return np.sqrt(np.sum(np.abs(M) ** 2, axis=(1, 2)))


def dual_approx_conjugated(
    frame: EigenFrame, src: HamiltonianSource, k: int
) -> np.ndarray:
    """Conjugation approximation to the dual generator: -U_adia^dag h U_adia."""
    t_k = frame.grid.t_start + k * frame.grid.dt
    Ua = adiabatic_propagator(frame, k)
    return -Ua.conj().T @ src(t_k) @ Ua


def dual_approx_generator(frame: EigenFrame, k: int, return_asymmetry: bool = False):
    """Generator whose evolution is U_adia^dag by construction.

    Computes -i U_adia^dag (dU_adia/dt) with a centered difference at
    interior node k, then symmetrizes. The recorded asymmetry is the
    Frobenius norm of the discarded anti-Hermitian part and shrinks as
    O(dt^2).
    """
    if not 0 < k < frame.grid.steps:
        raise IndexError(f"centered differences need 0 < k < {frame.grid.steps}")
    dt = frame.grid.dt
    dU = (adiabatic_propagator(frame, k + 1) - adiabatic_propagator(frame, k - 1)) / (
        2.0 * dt
    )
    raw = -1j * adiabatic_propagator(frame, k).conj().T @ dU
    sym = 0.5 * (raw + raw.conj().T)
    if return_asymmetry:
        return sym, frobenius(raw - sym)
    return sym


def dual_generator_source(frame: EigenFrame) -> HamiltonianSource:
    """Full-window sampled source for the generator of U_adia^dag.

    Interior nodes use centered differences; the two end nodes use
    one-sided second-order differences so a propagation can start at
    t_start with the identity. Used to verify, by re-propagation, that
    this generator really produces U_adia^dag.
    """
    grid = frame.grid
    phases = np.exp(-1j * frame.phase_integrals)
    Ua = np.einsum(
        "kim,jm->kij", frame.vectors * phases[:, np.newaxis, :], frame.vectors[0].conj()
    )
    dUa = np.empty_like(Ua)
    dt = grid.dt
    dUa[1:-1] = (Ua[2:] - Ua[:-2]) / (2.0 * dt)
    dUa[0] = (-3.0 * Ua[0] + 4.0 * Ua[1] - Ua[2]) / (2.0 * dt)
    dUa[-1] = (3.0 * Ua[-1] - 4.0 * Ua[-2] + Ua[-3]) / (2.0 * dt)
    raw = -1j * np.einsum("kji,kjm->kim", Ua.conj(), dUa)
    sym = 0.5 * (raw + np.conj(np.swapaxes(raw, -1, -2)))
    times = grid.times()
    return sampled_hamiltonian([(times[k], sym[k]) for k in range(len(times))])
