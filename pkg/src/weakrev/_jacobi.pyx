# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cyclic threshold Jacobi eigensolver, compiled core.

Same contract and rotation math as `weakrev._jacobi_py`; explicit loops
instead of vectorized array updates. The input matrix is destroyed in place.
"""

import numpy as np

from libc.math cimport fabs, sqrt

DEF CONV_RTOL = 1e-12


cdef double _off_norm(double complex[:, ::1] a, Py_ssize_t n) noexcept:
    cdef double acc = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    return sqrt(acc)


def jacobi_eigh(double complex[:, ::1] a, bint want_vectors, int max_sweeps):
    """Diagonalize Hermitian `a` in place.

    Returns (diagonal, vectors_or_None, sweeps_used, converged), with the
    diagonal unsorted. Callers go through `weakrev.eig` for validation and
    ordering.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef double complex[:, ::1] v = None
    vecs = None
    if want_vectors:
        vecs = np.eye(n, dtype=np.complex128)
        v = vecs

    cdef double fro = 0.0
    cdef Py_ssize_t i, j, p, q, k
    for i in range(n):
        for j in range(n):
            fro += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    fro = sqrt(fro)

    if fro == 0.0:
        return np.zeros(n, dtype=np.float64), vecs, 0, True

    # Strictly relative tolerance: flooring it at some absolute value would
    # leave tiny-norm matrices (common after repeated post-selection) only
    # partially diagonalized while still reporting convergence.
    cdef double tol = CONV_RTOL * fro
    cdef double skip = tol / (2.0 * n)

    cdef int sweeps = 0
    cdef double off = _off_norm(a, n)
    cdef double complex w, ph, phc, tp, tq
    cdef double aw, app, aqq, tau, t, c, s

    while off > tol and sweeps < max_sweeps:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                w = a[p, q]
                aw = sqrt(w.real * w.real + w.imag * w.imag)
                if aw <= skip:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                ph = w.conjugate() / aw
                tau = (aqq - app) / (2.0 * aw)
                t = (1.0 if tau >= 0.0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c

                for k in range(n):
                    tp = a[k, p]
                    tq = a[k, q]
                    a[k, p] = c * tp - s * (ph * tq)
                    a[k, q] = s * tp + c * (ph * tq)

                phc = ph.conjugate()
                for k in range(n):
                    tp = a[p, k]
                    tq = a[q, k]
                    a[p, k] = c * tp - s * (phc * tq)
                    a[q, k] = s * tp + c * (phc * tq)

                # Exact closed forms for the entries the rotation targets.
                a[p, p] = app - t * aw
                a[q, q] = aqq + t * aw
                a[p, q] = 0.0
                a[q, p] = 0.0

                if want_vectors:
                    for k in range(n):
                        tp = v[k, p]
                        tq = v[k, q]
                        v[k, p] = c * tp - s * (ph * tq)
                        v[k, q] = s * tp + c * (ph * tq)
        off = _off_norm(a, n)

    diag = np.empty(n, dtype=np.float64)
    cdef double[::1] dv = diag
    for i in range(n):
        dv[i] = a[i, i].real
    return diag, vecs, sweeps, off <= tol


def jacobi_svd(double complex[:, ::1] rows, int max_sweeps):
    """Singular values by one-sided Jacobi on the rows of `rows`, in place.

    Same contract as the fallback twin: each row is one vector of the set
    to orthogonalize, the converged row norms are the singular values, and
    the return is (sigma, sweeps_used, converged) with sigma unsorted.
    """
    cdef Py_ssize_t nvec = rows.shape[0]
    cdef Py_ssize_t m = rows.shape[1]
    if nvec == 0 or m == 0:
        return np.zeros(nvec, dtype=np.float64), 0, True

    cdef double fro2 = 0.0
    cdef Py_ssize_t i, k, p, q
    for i in range(nvec):
        for k in range(m):
            fro2 += rows[i, k].real * rows[i, k].real + rows[i, k].imag * rows[i, k].imag
    if fro2 == 0.0:
        return np.zeros(nvec, dtype=np.float64), 0, True
    # Numerically null vectors (norm under eps times the invariant Frobenius
    # norm) would cycle forever against the scale-free pair criterion; pairs
    # touching one are left alone.
    cdef double eps = 2.220446049250313e-16
    cdef double defl2 = eps * eps * fro2

    cdef int sweeps = 0
    cdef int rotated = 1
    cdef double gpp, gqq, aw, tau, t, c, s
    cdef double complex w, ph, tp, tq

    while rotated and sweeps < max_sweeps:
        sweeps += 1
        rotated = 0
        for p in range(nvec - 1):
            for q in range(p + 1, nvec):
                gpp = 0.0
                gqq = 0.0
                w = 0.0
                for k in range(m):
                    tp = rows[p, k]
                    tq = rows[q, k]
                    gpp += tp.real * tp.real + tp.imag * tp.imag
                    gqq += tq.real * tq.real + tq.imag * tq.imag
                    w += tp.conjugate() * tq
                if gpp <= defl2 or gqq <= defl2:
                    continue
                aw = sqrt(w.real * w.real + w.imag * w.imag)
                if aw <= CONV_RTOL * sqrt(gpp * gqq):
                    continue
                ph = w.conjugate() / aw
                tau = (gqq - gpp) / (2.0 * aw)
                t = (1.0 if tau >= 0.0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(m):
                    tp = rows[p, k]
                    tq = rows[q, k]
                    rows[p, k] = c * tp - s * (ph * tq)
                    rows[q, k] = s * tp + c * (ph * tq)
                rotated += 1

    sigma = np.empty(nvec, dtype=np.float64)
    cdef double[::1] sv = sigma
    cdef double acc
    for i in range(nvec):
        acc = 0.0
        for k in range(m):
            acc += rows[i, k].real * rows[i, k].real + rows[i, k].imag * rows[i, k].imag
        sv[i] = sqrt(acc)
    return sigma, sweeps, rotated == 0
