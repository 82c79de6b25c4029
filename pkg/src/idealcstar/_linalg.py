"""Shared numerical helpers: PSD verdicts and generalized eigenproblems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import HermitianStructureError

# Above this size the PSD gate uses a shifted Cholesky factorization instead
# of a full eigendecomposition; the minimum eigenvalue is then not reported.
_DENSE_EIG_LIMIT = 1600


@dataclass(frozen=True)
class PsdVerdict:
    passed: bool
    min_eigenvalue: float | None
    scale: float           # infinity norm of the matrix, used for relative tolerance
    hermitian_defect: float
    tol: float
    method: str

    @property
    def threshold(self) -> float:
        return self.tol * (1.0 + self.scale)


def hermitian_defect(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0


def psd_verdict(mat: np.ndarray, tol: float, require_hermitian: bool = True) -> PsdVerdict:
    """Check PSD-ness of a (nominally Hermitian) matrix at relative tolerance.

    Passes iff lambda_min >= -tol * (1 + ||M||_inf) after symmetrization.
    A Hermitian defect beyond the same threshold raises
    HermitianStructureError: a broken kernel, not an indefinite one.
    """
    n = mat.shape[0]
    if n == 0:
        return PsdVerdict(True, 0.0, 0.0, 0.0, tol, "empty")
    scale = float(np.max(np.sum(np.abs(mat), axis=1)))
    defect = hermitian_defect(mat)
    threshold = tol * (1.0 + scale)
    if require_hermitian and defect > threshold:
        raise HermitianStructureError(defect, threshold)
    sym = (mat + mat.conj().T) / 2.0
    if n <= _DENSE_EIG_LIMIT:
        lam_min = float(scipy.linalg.eigvalsh(sym, subset_by_index=[0, 0])[0])
        return PsdVerdict(lam_min >= -threshold, lam_min, scale, defect, tol, "eigh")
    shifted = sym + threshold * np.eye(n, dtype=sym.dtype)
    try:
        scipy.linalg.cholesky(shifted, lower=True, check_finite=False)
        return PsdVerdict(True, None, scale, defect, tol, "cholesky")
    except np.linalg.LinAlgError:
        pass
    except scipy.linalg.LinAlgError:
        pass
    lam_min = float(
        scipy.sparse.linalg.eigsh(sym, k=1, which="SA", return_eigenvectors=False)[0]
    )
    return PsdVerdict(lam_min >= -threshold, lam_min, scale, defect, tol, "eigsh")


def min_eigenvalue(mat: np.ndarray) -> float:
    sym = (mat + mat.conj().T) / 2.0
    return float(scipy.linalg.eigvalsh(sym, subset_by_index=[0, 0])[0])


def gram_range_basis(gram: np.ndarray, cutoff_ratio: float = 1e-10):
    """Whitening basis of the numerical range of a PSD Gram matrix.

    Returns (W, rank) with W = V_k diag(w_k^{-1/2}) over eigenpairs with
    w > cutoff_ratio * w_max, so that W* G W = I_rank.
    """
    sym = (gram + gram.conj().T) / 2.0
    w, v = scipy.linalg.eigh(sym)
    wmax = float(w[-1]) if len(w) else 0.0
    if wmax <= 0.0:
        return np.zeros((gram.shape[0], 0)), 0
    keep = w > cutoff_ratio * wmax
    return v[:, keep] / np.sqrt(w[keep]), int(np.count_nonzero(keep))


def top_generalized_eigenvalue(m: np.ndarray, gram: np.ndarray,
                               cutoff_ratio: float = 1e-10) -> float:
    """Largest eigenvalue of the pencil (M, G) on the numerical range of G."""
    w_basis, rank = gram_range_basis(gram, cutoff_ratio)
    if rank == 0:
        return 0.0
    reduced = w_basis.conj().T @ m @ w_basis
    reduced = (reduced + reduced.conj().T) / 2.0
    if rank > 400:
        # Lanczos on the dense Hermitian matrix; machine-precision accurate
        # and much cheaper than a full decomposition at these sizes
        top = scipy.sparse.linalg.eigsh(reduced, k=1, which="LA",
                                        return_eigenvectors=False)
        return float(top[0])
    top = float(scipy.linalg.eigvalsh(reduced, subset_by_index=[rank - 1, rank - 1])[0])
    return top
