"""Dense Hermitian eigensolver and small unitary helpers."""

from __future__ import annotations

import numpy as np


class NumericalError(RuntimeError):
    """Raised when an iterative numerical routine fails to converge."""


def offdiag_norm(h: np.ndarray) -> float:
    off = h - np.diag(np.diag(h))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def jacobi_eigvalsh(a, off_tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.

    Sweeps annihilate each off-diagonal entry in turn with a complex plane
    rotation; iteration stops once the off-diagonal Frobenius norm drops
    below ``off_tol``.
    """
    h = np.array(a, dtype=np.complex128)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 1:
        return h.real.reshape(1).copy()
    skip = off_tol / (n * n)
    for _ in range(max_sweeps):
        if offdiag_norm(h) < off_tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = h[p, q]
                mag = abs(hpq)
                if mag <= skip:
                    continue
                app = h[p, p].real
                aqq = h[q, q].real
                phase = hpq / mag
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # columns: H <- H U with U the (p,q) plane rotation
                col_p = h[:, p].copy()
                col_q = h[:, q].copy()
                h[:, p] = c * col_p - s * np.conj(phase) * col_q
                h[:, q] = s * phase * col_p + c * col_q
                # rows: H <- U^dagger H
                row_p = h[p, :].copy()
                row_q = h[q, :].copy()
                h[p, :] = c * row_p - s * phase * row_q
                h[q, :] = s * np.conj(phase) * row_p + c * row_q
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = h[p, p].real
                h[q, q] = h[q, q].real
    if offdiag_norm(h) >= off_tol:
        raise NumericalError(
            f"Jacobi iteration did not converge in {max_sweeps} sweeps"
        )
    return np.sort(np.diag(h).real)


def check_hermitian(a: np.ndarray, tol: float = 1e-12) -> float:
    """Max entrywise deviation from Hermiticity; raises above ``tol``."""
    dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")
    return dev


def check_unitary(u: np.ndarray, tol: float = 1e-10) -> float:
    d = u.shape[0]
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(d))))
    if dev > tol:
        raise ValueError(f"matrix is not unitary (deviation {dev:.3e})")
    return dev


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
