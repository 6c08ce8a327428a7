"""Dense numerical substrate: symmetric eigensolver, Kronecker products,
linear solves, and the PSD pseudoinverse.

Matrices are plain float64 ``numpy.ndarray`` values. Eigen decompositions
return a :class:`SpectralData` record that carries a residual certificate,
so downstream spectral formulas can trust the ordering and accuracy of the
eigenvalues they consume. Public solves never form explicit inverses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack as _lapack
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import SingularMatrixError
from .tolerances import TOL

__all__ = [
    "SpectralData",
    "sym_eigen",
    "kron",
    "solve",
    "pseudoinverse_psd",
    "symmetric_spectral_norm",
]


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues sorted ascending, optional orthonormal eigenvectors
    (as columns), and the max relative eigenpair residual."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residual: float


def _as_square_float(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")
    return a


def _require_symmetric(a: np.ndarray, name: str = "matrix") -> None:
    scale = max(np.abs(a).max(initial=0.0), 1.0)
    skew = np.abs(a - a.T).max(initial=0.0)
    if skew > TOL.symmetry_rtol * scale:
        raise ValueError(
            f"{name} is not symmetric: max asymmetry {skew:.3e} "
            f"exceeds {TOL.symmetry_rtol:.0e} * scale"
        )


def sym_eigen(a: np.ndarray, compute_vectors: bool = True) -> SpectralData:
    """Full spectrum of a symmetric matrix, ascending, with a residual
    certificate.

    Parameters
    ----------
    a : ndarray
        Square symmetric matrix (validated to relative tolerance 1e-12).
    compute_vectors : bool
        If False, only eigenvalues are kept; the residual is still
        certified internally before the vectors are dropped.
    """
    a = _as_square_float(a)
    _require_symmetric(a)
    w, v = scipy.linalg.eigh(a)
    # certificate: max_i ||A v_i - w_i v_i|| / ||A||_2
    norm_a = float(np.abs(w).max(initial=0.0))
    res_cols = np.linalg.norm(a @ v - v * w, axis=0)
    residual = float(res_cols.max(initial=0.0) / max(norm_a, 1.0))
    return SpectralData(
        eigenvalues=w,
        eigenvectors=v if compute_vectors else None,
        residual=residual,
    )


def kron(a: np.ndarray, b: np.ndarray, dim_cap: int = TOL.kron_dim_cap) -> np.ndarray:
    """Kronecker product with an output-size guard.

    Uses the column-stacking convention throughout the package:
    vec(A B C) = (C^T (x) A) vec(B) with vec = ravel(order="F").
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("kron inputs must be finite")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > dim_cap or cols > dim_cap:
        raise ValueError(
            f"kron output {rows}x{cols} exceeds the dimension cap {dim_cap}"
        )
    return np.kron(a, b)


def solve(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = rhs`` with an LU factorization and a reciprocal
    condition estimate; rejects systems with condition above 1/rcond_min.

    Raises
    ------
    SingularMatrixError
        If the condition estimate exceeds the configured floor.
    """
    a = _as_square_float(a)
    rhs = np.asarray(rhs, dtype=np.float64)
    anorm = np.linalg.norm(a, 1)
    lu, piv, info = _lapack.dgetrf(a)
    if info > 0:
        raise SingularMatrixError(
            f"exact zero pivot at position {info - 1} during LU factorization"
        )
    rcond, info = _lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < TOL.rcond_min:
        raise SingularMatrixError(
            f"matrix is numerically singular: rcond estimate {rcond:.3e} "
            f"below {TOL.rcond_min:.0e}"
        )
    x, info = _lapack.dgetrs(lu, piv, rhs)
    if info != 0:
        raise SingularMatrixError(f"triangular solve failed (info={info})")
    return x


def pseudoinverse_psd(a: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric PSD matrix via its
    spectral decomposition, zeroing eigenvalues below 1e-9 * lambda_max."""
    a = _as_square_float(a)
    _require_symmetric(a)
    spec = sym_eigen(a)
    w, v = spec.eigenvalues, spec.eigenvectors
    lam_max = float(w.max(initial=0.0))
    cutoff = TOL.pinv_cutoff_rtol * max(lam_max, 0.0)
    keep = w > cutoff
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / w[keep]
    return (v * inv_w) @ v.T


def symmetric_spectral_norm(a: np.ndarray, dense_threshold: int = 512) -> float:
    """Spectral norm (largest |eigenvalue|) of a symmetric matrix.

    Dense path for small matrices; Lanczos (``eigsh``) above the
    threshold, which is how the N^2-dimensional second-moment operator
    gets its norm certificate without a full decomposition.
    """
    a = _as_square_float(a)
    _require_symmetric(a)
    n = a.shape[0]
    if n <= dense_threshold:
        w = scipy.linalg.eigh(a, eigvals_only=True)
        return float(np.abs(w).max())
    op = LinearOperator((n, n), matvec=lambda x: a @ x, dtype=np.float64)
    v0 = np.full(n, 1.0 / np.sqrt(n))
    w = eigsh(op, k=1, which="LM", v0=v0, return_eigenvectors=False)
    return float(abs(w[0]))
