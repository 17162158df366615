"""Built-in Hamiltonian families.

The workhorse is a two-level system in a field of fixed magnitude tilted
at an angle theta from the z-axis and rotating about it at frequency
omega:

    h(t) = -(omega0/2) [[cos(theta),              sin(theta) e^{-i omega t}],
                        [sin(theta) e^{+i omega t}, -cos(theta)          ]]

The model is exactly solvable in the co-rotating frame, which provides
the closed-form propagator and the spectral splitting used as an oracle
throughout the test suite. A generic loader turns sampled matrices into
a piecewise-linear source for everything the closed forms cannot cover.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidParamsError,
    NonMonotoneTimesError,
    NotHermitianError,
)
from .linalg import expm_hermitian, hermitian_defect
from .propagation import HamiltonianSource

_SIGMA_Z = np.diag([1.0 + 0j, -1.0 + 0j])
_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class RotatingModelParams:
    """Level splitting omega0 > 0, rotation frequency omega >= 0, tilt theta."""

    omega0: float
    omega: float
    theta: float

    def __post_init__(self):
        if not (self.omega0 > 0.0 and np.isfinite(self.omega0)):
            raise InvalidParamsError(f"omega0 must be > 0, got {self.omega0}")
        if not (self.omega >= 0.0 and np.isfinite(self.omega)):
            raise InvalidParamsError(f"omega must be >= 0, got {self.omega}")
        if not 0.0 <= self.theta <= np.pi:
            raise InvalidParamsError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def splitting_frequency(self) -> float:
        """Oscillation frequency of the dual generator's matrix elements.

        Equals the level splitting of the co-rotating effective
        Hamiltonian, sqrt(omega0^2 + omega^2 + 2 omega0 omega cos(theta)).
        """
        return float(
            np.sqrt(
                self.omega0**2
                + self.omega**2
                + 2.0 * self.omega0 * self.omega * np.cos(self.theta)
            )
        )


def rotating_hamiltonian(p: RotatingModelParams) -> HamiltonianSource:
    """Source for the rotating tilted-field Hamiltonian."""
    c, s = np.cos(p.theta), np.sin(p.theta)
    pref = -0.5 * p.omega0

    def batch_fn(ts: np.ndarray) -> np.ndarray:
        ph = np.exp(-1j * p.omega * ts)
        H = np.empty((ts.shape[0], 2, 2), dtype=complex)
        H[:, 0, 0] = pref * c
        H[:, 0, 1] = pref * s * ph
        H[:, 1, 0] = pref * s * ph.conjugate()
        H[:, 1, 1] = -pref * c
        return H

    return HamiltonianSource(
        dim=2,
        fn=lambda t: batch_fn(np.array([t]))[0],
        batch_fn=batch_fn,
        model=p,
    )


def rotating_effective_hamiltonian(p: RotatingModelParams) -> np.ndarray:
    """Static generator in the frame co-rotating at omega about z.

    Writing U(t) = exp(-i omega t sigma_z / 2) Utilde(t) reduces the time
    dependence away; Utilde evolves under this constant matrix. Its level
    splitting equals ``splitting_frequency`` (validated against direct
    integration in the test suite).
    """
    return -0.5 * (
        (p.omega0 * np.cos(p.theta) + p.omega) * _SIGMA_Z
        + p.omega0 * np.sin(p.theta) * _SIGMA_X
    )


def rotating_exact_propagator(p: RotatingModelParams, t: float) -> np.ndarray:
    """Closed-form U(t) = exp(-i omega t sigma_z/2) exp(-i h_eff t)."""
    rot = expm_hermitian(0.5 * p.omega * _SIGMA_Z, t)
    return rot @ expm_hermitian(rotating_effective_hamiltonian(p), t)


def rotating_eigenspinors(
    p: RotatingModelParams, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Instantaneous eigenspinors in the parallel-transport gauge.

    Returns (plus, minus) where

        plus(t)  = (cos(theta/2), sin(theta/2) e^{+i omega t}) e^{-i gamma(t)}
        minus(t) = (-sin(theta/2) e^{-i omega t}, cos(theta/2)) e^{+i gamma(t)}

    with gamma(t) = (omega t / 2)(1 - cos theta). Both satisfy
    <n|dn/dt> = 0. Note the branch labels follow the spinor structure,
    not the sign of the energy: ``plus`` is the field-aligned spinor and
    carries eigenvalue -omega0/2 of h(t), ``minus`` carries +omega0/2.
    """
    half = 0.5 * p.theta
    gamma = 0.5 * p.omega * t * (1.0 - np.cos(p.theta))
    plus = np.array(
        [np.cos(half), np.sin(half) * np.exp(1j * p.omega * t)], dtype=complex
    ) * np.exp(-1j * gamma)
    minus = np.array(
        [-np.sin(half) * np.exp(-1j * p.omega * t), np.cos(half)], dtype=complex
    ) * np.exp(1j * gamma)
    return plus, minus


def rotating_coupling(p: RotatingModelParams, t) -> complex:
    """Off-diagonal frame coupling -i <plus | d/dt | minus>.

    Equals (omega/2) sin(theta) e^{-i omega t cos(theta)}; its magnitude
    is constant in time. Accepts scalar or array t.
    """
    val = (
        0.5
        * p.omega
        * np.sin(p.theta)
        * np.exp(-1j * p.omega * np.asarray(t) * np.cos(p.theta))
    )
    return complex(val) if np.isscalar(t) else val


def sampled_hamiltonian(
    samples: Sequence[tuple[float, np.ndarray]]
) -> HamiltonianSource:
    """Piecewise-linear source through sampled Hermitian matrices.

    Times must be strictly increasing; entrywise linear interpolation
    preserves Hermiticity. Evaluation outside the sample window raises
    SourceWindowError.
    """
    if len(samples) < 2:
        raise NonMonotoneTimesError("need at least two samples")
    times = np.array([float(t) for t, _ in samples])
    if not np.all(np.diff(times) > 0.0):
        raise NonMonotoneTimesError("sample times must be strictly increasing")
    mats = [np.asarray(M, dtype=complex) for _, M in samples]
    dim = mats[0].shape[0]
    for i, M in enumerate(mats):
        if M.shape != (dim, dim):
            raise DimensionMismatchError(
                f"sample {i} has shape {M.shape}, expected ({dim}, {dim})"
            )
        scale = max(float(np.abs(M).max()), 1.0)
        if hermitian_defect(M) > 1e-10 * scale:
            raise NotHermitianError(f"sample {i} is not Hermitian")
    H = np.stack(mats)

    def batch_fn(ts: np.ndarray) -> np.ndarray:
        idx = np.clip(np.searchsorted(times, ts, side="right") - 1, 0, len(times) - 2)
        t0 = times[idx]
        w = ((ts - t0) / (times[idx + 1] - t0))[:, None, None]
        return (1.0 - w) * H[idx] + w * H[idx + 1]

    return HamiltonianSource(
        dim=dim,
        fn=lambda t: batch_fn(np.array([t]))[0],
        batch_fn=batch_fn,
        window=(float(times[0]), float(times[-1])),
    )
