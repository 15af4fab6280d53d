"""Cyclic threshold Jacobi eigensolver, NumPy fallback.

Shares its contract with the compiled twin `weakrev._jacobi`: the input
matrix is destroyed in place, pivots are visited in row-major order, and a
pivot is rotated only while its magnitude exceeds the per-sweep threshold.
Callers go through `weakrev.eig`, which validates input and sorts output.
"""

from __future__ import annotations

import math

import numpy as np

CONV_RTOL = 1e-12


def _off_norm(a: np.ndarray) -> float:
    # Sum only the off-diagonal squares: subtracting the diagonal from the
    # total cancels catastrophically once the matrix is nearly diagonal.
    mags = np.abs(a) ** 2
    np.fill_diagonal(mags, 0.0)
    return math.sqrt(float(mags.sum()))


def _rotate(a: np.ndarray, v: np.ndarray | None, p: int, q: int, w: complex, aw: float) -> None:
    app = a[p, p].real
    aqq = a[q, q].real
    ph = w.conjugate() / aw
    tau = (aqq - app) / (2.0 * aw)
    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c

    colp = a[:, p].copy()
    colq = a[:, q].copy()
    a[:, p] = c * colp - (s * ph) * colq
    a[:, q] = s * colp + (c * ph) * colq

    phc = ph.conjugate()
    rowp = a[p, :].copy()
    rowq = a[q, :].copy()
    a[p, :] = c * rowp - (s * phc) * rowq
    a[q, :] = s * rowp + (c * phc) * rowq

    # Diagonal and pivot entries have exact closed forms; writing them beats
    # the cancellation-prone general update.
    a[p, p] = app - t * aw
    a[q, q] = aqq + t * aw
    a[p, q] = 0.0
    a[q, p] = 0.0

    if v is not None:
        vp = v[:, p].copy()
        vq = v[:, q].copy()
        v[:, p] = c * vp - (s * ph) * vq
        v[:, q] = s * vp + (c * ph) * vq


def jacobi_eigh(a, want_vectors, max_sweeps):
    """Diagonalize Hermitian `a` in place.

    Returns (diagonal, vectors_or_None, sweeps_used, converged). The
    diagonal comes back unsorted; `converged` is False when the sweep
    budget ran out before the off-diagonal norm fell under tolerance.
    """
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128) if want_vectors else None

    fro = math.sqrt(float((np.abs(a) ** 2).sum()))
    if fro == 0.0:
        diag = np.einsum("ii->i", a).real.copy()
        return diag, v, 0, True
    # Strictly relative tolerance: flooring it at some absolute value would
    # leave tiny-norm matrices (common after repeated post-selection) only
    # partially diagonalized while still reporting convergence.
    tol = CONV_RTOL * fro
    # If every pivot is at most skip, the off-diagonal norm is under tol.
    skip = tol / (2.0 * n)

    sweeps = 0
    off = _off_norm(a)
    while off > tol and sweeps < max_sweeps:
        sweeps += 1
        mags = np.abs(a)
        np.fill_diagonal(mags, 0.0)
        candidates = np.argwhere(np.triu(mags, 1) > skip)
        for p, q in candidates:
            w = complex(a[p, q])
            aw = abs(w)
            if aw <= skip:
                continue  # shrunk by an earlier rotation this sweep
            _rotate(a, v, int(p), int(q), w, aw)
        off = _off_norm(a)

    diag = np.einsum("ii->i", a).real.copy()
    return diag, v, sweeps, off <= tol


def jacobi_svd(rows, max_sweeps):
    """Singular values by one-sided Jacobi on the rows of `rows`, in place.

    Each row is treated as one vector of the set to orthogonalize; on
    convergence the row norms are the singular values of the matrix whose
    columns those vectors are. Returns (sigma, sweeps_used, converged) with
    sigma unsorted. Unlike the two-sided solver there is no squared
    intermediate, so tiny singular values come out with absolute error on
    the order of machine epsilon times the largest one.
    """
    nvec = rows.shape[0]
    if nvec == 0 or rows.shape[1] == 0:
        return np.zeros(nvec, dtype=np.float64), 0, True
    fro = math.sqrt(float((np.abs(rows) ** 2).sum()))
    if fro == 0.0:
        return np.zeros(nvec, dtype=np.float64), 0, True
    # Vectors whose norm decays below the absolute error floor of the whole
    # computation are numerically null: their remaining correlations are
    # noise, and chasing them with the scale-free pair criterion would cycle
    # forever. The Frobenius norm is invariant under the rotations, so the
    # floor is fixed up front.
    defl2 = (np.finfo(np.float64).eps * fro) ** 2

    sweeps = 0
    rotated = 1
    while rotated and sweeps < max_sweeps:
        sweeps += 1
        rotated = 0
        # Gram of the current rows; stale entries are re-derived per pair
        # below, so this only selects candidates.
        gram = rows.conj() @ rows.T
        norms = np.sqrt(np.abs(np.einsum("ii->i", gram).real))
        scale = np.outer(norms, norms)
        candidates = np.argwhere(np.triu(np.abs(gram), 1) > CONV_RTOL * scale)
        for p, q in candidates:
            rp = rows[p]
            rq = rows[q]
            gpp = float((np.abs(rp) ** 2).sum())
            gqq = float((np.abs(rq) ** 2).sum())
            if gpp <= defl2 or gqq <= defl2:
                continue
            w = complex(np.vdot(rp, rq))
            aw = abs(w)
            if aw <= CONV_RTOL * math.sqrt(gpp * gqq):
                continue  # already orthogonal enough after earlier rotations
            ph = w.conjugate() / aw
            tau = (gqq - gpp) / (2.0 * aw)
            t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            newp = c * rp - (s * ph) * rq
            newq = s * rp + (c * ph) * rq
            rows[p] = newp
            rows[q] = newq
            rotated += 1

    sigma = np.sqrt((np.abs(rows) ** 2).sum(axis=1))
    return sigma, sweeps, rotated == 0
