"""Dense complex linear algebra for small Hermitian problems.

Everything here is self-contained: closed-form eigensolver for 2x2,
cyclic Jacobi rotations above that, and unitary exponentials built from
the eigendecomposition. Intended for dimensions up to ~16.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NoConvergenceError, NotHermitianError

# Gap below which an eigendecomposition is flagged degenerate (relative
# to the Frobenius norm of the input).
DEGENERACY_GAP = 1e-9

_JACOBI_OFFDIAG_TOL = 1e-13
_JACOBI_MAX_SWEEPS = 60


def frobenius(M: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(M))


def hermitian_defect(M: np.ndarray) -> float:
    """Largest entrywise deviation max|M_ij - conj(M_ji)|."""
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def check_hermitian(M: np.ndarray, tol: float) -> bool:
    """True iff max|M_ij - conj(M_ji)| <= tol. M must be square."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"expected square matrix, got shape {M.shape}")
    return hermitian_defect(M) <= tol


def require_hermitian(M: np.ndarray, rel_tol: float = 1e-10) -> None:
    """Raise NotHermitianError unless M is Hermitian to rel_tol * ||M||_F."""
    scale = max(frobenius(M), 1.0)
    if not check_hermitian(M, rel_tol * scale):
        raise NotHermitianError(
            f"Hermiticity defect {hermitian_defect(M):.3e} exceeds "
            f"{rel_tol:.1e} * {scale:.3e}"
        )


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    ``degenerate`` is set when the smallest eigenvalue gap is below
    ``DEGENERACY_GAP`` times the matrix norm; gauge-sensitive consumers
    refuse such decompositions.
    """

    values: np.ndarray
    vectors: np.ndarray
    degenerate: bool = False

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def _fix_column_phases(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        a = col[i]
        if abs(a) > 0.0:
            out[:, j] = col * (a.conj() / abs(a))
    return out


def _eigh2(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix."""
    a = M[0, 0].real
    d = M[1, 1].real
    c = complex(M[0, 1])
    r = abs(c)
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    R = float(np.hypot(half, r))
    values = np.array([mean - R, mean + R])
    if r == 0.0:
        vectors = np.eye(2, dtype=complex)
        if a > d:
            vectors = vectors[:, ::-1]
        return values, vectors
    phase = c.conjugate() / r
    # Eigenvector of the phase-reduced real matrix [[a, r], [r, d]] for
    # the upper eigenvalue; pick the better-conditioned null-space form.
    hi = mean + R
    w1 = np.array([hi - d, r])
    w2 = np.array([r, hi - a])
    w = w1 if np.dot(w1, w1) >= np.dot(w2, w2) else w2
    w = w / np.linalg.norm(w)
    v_hi = np.array([w[0], w[1] * phase], dtype=complex)
    v_lo = np.array([-v_hi[1].conjugate(), v_hi[0].conjugate()])
    return values, np.column_stack([v_lo, v_hi])


def _jacobi_eigh(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix."""
    A = np.array(M, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = frobenius(M)
    if scale == 0.0:
        return np.zeros(n), V
    thresh = _JACOBI_OFFDIAG_TOL * scale
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(A[off_mask]) ** 2))
        if off <= thresh:
            vals = np.diag(A).real.copy()
            order = np.argsort(vals, kind="stable")
            return vals[order], V[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= thresh / (n * n):
                    continue
                phase = apq.conjugate() / r
                theta = 0.5 * np.arctan2(2.0 * r, A[p, p].real - A[q, q].real)
                cth, sth = np.cos(theta), np.sin(theta)
                # Unitary 2x2 block diag(1, e^{-i phi}) @ rotation(theta).
                block = np.array(
                    [[cth, -sth], [sth * phase, cth * phase]], dtype=complex
                )
                A[:, [p, q]] = A[:, [p, q]] @ block
                A[[p, q], :] = block.conj().T @ A[[p, q], :]
                V[:, [p, q]] = V[:, [p, q]] @ block
    raise NoConvergenceError(
        f"Jacobi sweeps exceeded {_JACOBI_MAX_SWEEPS} for dim {n}"
    )


def eig_hermitian(M: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Uses the closed-form solution for dim 2 and cyclic Jacobi rotations
    above that. Eigenvalues are sorted ascending; each eigenvector's
    largest-magnitude component is made real positive so the output is
    deterministic.

    Raises
    ------
    NotHermitianError
        If M fails the Hermiticity check at 1e-10 relative tolerance.
    NoConvergenceError
        If the Jacobi iteration does not reach its residual target.
    """
    M = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise NotHermitianError("matrix contains non-finite entries")
    require_hermitian(M, 1e-10)
    n = M.shape[0]
    if n == 1:
        values, vectors = np.array([M[0, 0].real]), np.eye(1, dtype=complex)
    elif n == 2:
        values, vectors = _eigh2(M)
    else:
        values, vectors = _jacobi_eigh(M)
    vectors = _fix_column_phases(vectors)
    scale = max(frobenius(M), 1.0)
    degenerate = n > 1 and float(np.min(np.diff(values))) < DEGENERACY_GAP * scale
    return EigenDecomposition(values=values, vectors=vectors, degenerate=degenerate)


def expm_hermitian(M: np.ndarray, s: float) -> np.ndarray:
    """exp(-i * M * s) for Hermitian M, exactly unitary by construction."""
    M = np.asarray(M, dtype=complex)
    if M.shape[0] == 2:
        return expm2_batch(M[np.newaxis], s)[0]
    dec = eig_hermitian(M)
    phases = np.exp(-1j * dec.values * s)
    return (dec.vectors * phases) @ dec.vectors.conj().T


def eigh2_batch(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized closed-form eigendecomposition of stacked 2x2 Hermitians.

    Returns (values, vectors) with values ascending along the last axis
    and vectors[..., :, j] the eigenvector for values[..., j]. Column
    phases are not normalized here; callers apply their own gauge.
    """
    a = H[..., 0, 0].real
    d = H[..., 1, 1].real
    c = H[..., 0, 1]
    r = np.abs(c)
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    R = np.hypot(half, r)
    values = np.stack([mean - R, mean + R], axis=-1)

    safe_r = np.where(r > 0.0, r, 1.0)
    phase = np.where(r > 0.0, c.conjugate() / safe_r, 1.0 + 0j)
    hi_minus_d = R + half
    hi_minus_a = R - half
    # Null-space form of the phase-reduced real matrix for the upper
    # eigenvalue; both candidates have non-negative entries, so the
    # selected ray varies continuously with the matrix.
    use_first = hi_minus_d >= hi_minus_a
    w0 = np.where(use_first, hi_minus_d, r)
    w1 = np.where(use_first, r, hi_minus_a)
    norm = np.sqrt(w0**2 + w1**2)
    # Zero matrix: eigenvectors default to the standard basis.
    norm_safe = np.where(norm > 0.0, norm, 1.0)
    v_hi0 = np.where(norm > 0.0, w0 / norm_safe, 1.0) + 0j
    v_hi1 = np.where(norm > 0.0, w1 / norm_safe, 0.0) * phase
    v_lo0 = -v_hi1.conjugate()
    v_lo1 = v_hi0.conjugate()
    vectors = np.empty(H.shape, dtype=complex)
    vectors[..., 0, 0] = v_lo0
    vectors[..., 1, 0] = v_lo1
    vectors[..., 0, 1] = v_hi0
    vectors[..., 1, 1] = v_hi1
    return values, vectors


def expm2_batch(H: np.ndarray, s) -> np.ndarray:
    """Vectorized exp(-i * H * s) for stacked 2x2 Hermitian matrices.

    ``s`` may be a scalar or an array broadcastable over the stack.
    """
    a = H[..., 0, 0].real
    d = H[..., 1, 1].real
    c = H[..., 0, 1]
    mean = 0.5 * (a + d)
    z = 0.5 * (a - d)
    R = np.hypot(z, np.abs(c))
    s = np.asarray(s, dtype=float)
    Rs = R * s
    cos = np.cos(Rs)
    # sin(R s)/R with the R -> 0 limit equal to s.
    safe_R = np.where(R > 0.0, R, 1.0)
    k = np.where(R > 0.0, np.sin(Rs) / safe_R, s)
    g = np.exp(-1j * mean * s)
    out = np.empty(np.broadcast_shapes(H.shape, np.shape(s) + (1, 1)), dtype=complex)
    out[..., 0, 0] = g * (cos - 1j * z * k)
    out[..., 0, 1] = g * (-1j * c * k)
    out[..., 1, 0] = g * (-1j * c.conjugate() * k)
    out[..., 1, 1] = g * (cos + 1j * z * k)
    return out


def expm_batch(H: np.ndarray, s) -> np.ndarray:
    """exp(-i * H_k * s) over a stack of Hermitian matrices."""
    if H.shape[-1] == 2:
        return expm2_batch(H, s)
    s_arr = np.broadcast_to(np.asarray(s, dtype=float), H.shape[:-2])
    out = np.empty_like(H, dtype=complex)
    for idx in np.ndindex(H.shape[:-2]):
        out[idx] = expm_hermitian(H[idx], float(s_arr[idx]))
    return out


def operator_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Frobenius distance ||A - B||_F."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"shape mismatch {A.shape} vs {B.shape}")
    return frobenius(A - B)


def spectral_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Spectral 2-norm of A - B via the top eigenvalue of (A-B)^dag (A-B)."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"shape mismatch {A.shape} vs {B.shape}")
    D = A - B
    G = D.conj().T @ D
    G = 0.5 * (G + G.conj().T)
    dec = eig_hermitian(G)
    return float(np.sqrt(max(dec.values[-1], 0.0)))


def unitarity_defect(U: np.ndarray) -> float:
    """||U^dag U - I||_F."""
    n = U.shape[-1]
    return frobenius(U.conj().T @ U - np.eye(n))


def unitarity_defect_batch(U: np.ndarray) -> np.ndarray:
    """||U_k^dag U_k - I||_F over a stack of matrices."""
    n = U.shape[-1]
    G = np.einsum("...ji,...jk->...ik", U.conj(), U)
    G = G - np.eye(n)
    return np.sqrt(np.sum(np.abs(G) ** 2, axis=(-2, -1)))
