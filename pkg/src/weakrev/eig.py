"""Hermitian eigensolver front end.

Picks the compiled Jacobi kernel when the extension is importable, else the
NumPy fallback. Setting WEAKREV_PURE_PYTHON to a non-empty value other than
"0" forces the fallback regardless.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError

if os.environ.get("WEAKREV_PURE_PYTHON", "0") not in ("", "0"):
    from . import _jacobi_py as _impl

    _BACKEND = "python"
else:
    try:
        from . import _jacobi as _impl  # type: ignore[no-redef]

        _BACKEND = "compiled"
    except ImportError:
        from . import _jacobi_py as _impl  # type: ignore[no-redef]

        _BACKEND = "python"

MAX_DIM = 1024
HERMITICITY_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 64


@dataclass(frozen=True)
class HermEigResult:
    """Eigenvalues sorted descending; `vectors` has matching columns or is None."""

    eigenvalues: np.ndarray
    vectors: np.ndarray | None
    sweeps: int


def backend_name() -> str:
    """Which Jacobi kernel this process is using: 'compiled' or 'python'."""
    return _BACKEND


def herm_eigenvalues(matrix, want_vectors: bool = False,
                     max_sweeps: int = DEFAULT_MAX_SWEEPS) -> HermEigResult:
    """Full eigensystem of a Hermitian matrix via cyclic Jacobi rotations.

    Raises DomainError for non-square, oversized, or visibly non-Hermitian
    input, and NumericalError if the sweep budget runs out.
    """
    work = np.array(matrix, dtype=np.complex128, order="C", copy=True)
    if work.ndim != 2 or work.shape[0] != work.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {work.shape}")
    dim = work.shape[0]
    if dim == 0:
        raise DomainError("matrix must be at least 1x1")
    if dim > MAX_DIM:
        raise DomainError(f"dimension {dim} exceeds the solver cap of {MAX_DIM}")
    defect = float(np.abs(work - work.conj().T).max())
    if defect > HERMITICITY_TOL:
        raise DomainError(f"matrix is not Hermitian (max asymmetry {defect:.3e})")

    diag, vecs, sweeps, converged = _impl.jacobi_eigh(work, bool(want_vectors), int(max_sweeps))
    if not converged:
        raise NumericalError(f"Jacobi solver hit the sweep limit ({max_sweeps}) before converging")

    order = np.argsort(-diag, kind="stable")
    vectors = np.asarray(vecs)[:, order] if want_vectors else None
    return HermEigResult(eigenvalues=diag[order], vectors=vectors, sweeps=int(sweeps))


def singular_values(matrix, max_sweeps: int = DEFAULT_MAX_SWEEPS) -> np.ndarray:
    """Singular values of a complex matrix, sorted descending.

    Runs one-sided Jacobi on whichever side of the matrix has fewer
    vectors, so rectangular input costs no more than its smaller dimension
    demands. Because nothing is squared along the way, small singular
    values keep absolute accuracy near machine epsilon times the largest
    one, which matters when they feed a near-cancelling sum.
    """
    work = np.array(matrix, dtype=np.complex128, order="C", copy=True)
    if work.ndim != 2:
        raise DomainError(f"expected a matrix, got ndim={work.ndim}")
    nrow, ncol = work.shape
    if nrow == 0 or ncol == 0:
        raise DomainError(f"matrix must be non-empty, got shape {work.shape}")
    if max(nrow, ncol) > MAX_DIM:
        raise DomainError(f"dimension {max(nrow, ncol)} exceeds the solver cap of {MAX_DIM}")
    if not np.isfinite(work).all():
        raise DomainError("matrix contains non-finite entries")

    # Transposing changes nothing about the singular values; orthogonalize
    # the smaller vector set.
    rows = work if nrow <= ncol else np.ascontiguousarray(work.T)
    sigma, _, converged = _impl.jacobi_svd(rows, int(max_sweeps))
    if not converged:
        raise NumericalError(
            f"one-sided Jacobi hit the sweep limit ({max_sweeps}) before converging")
    return np.sort(sigma)[::-1].copy()
