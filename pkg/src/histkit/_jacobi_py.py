"""Pure-Python cyclic Jacobi eigensolver for complex Hermitian matrices.

Used when the compiled extension is unavailable, or when
``HISTKIT_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np


def jacobi_eigh(a, tol=1e-15, max_sweeps=100):
    """Diagonalize a Hermitian matrix by cyclic two-sided Jacobi rotations.

    Parameters
    ----------
    a : (n, n) complex ndarray
        Hermitian input. Not modified.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm drops below
        ``tol * ||a||_F``.
    max_sweeps : int
        Iteration cap.

    Returns
    -------
    w : (n,) float ndarray
        Eigenvalues, unsorted.
    v : (n, n) complex ndarray
        Unitary whose columns are the matching eigenvectors.
    sweeps : int
        Number of sweeps performed.
    off : float
        Final off-diagonal Frobenius norm. ``sweeps == max_sweeps`` with
        ``off`` above threshold signals non-convergence.
    """
    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    thresh = tol * scale
    off = _offdiag(a)
    sweeps = 0
    while off > thresh and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # U restricted to (p, q): [[c, s], [-s*conj(phase), c*conj(phase)]]
                u10 = -s * phase.conjugate()
                u11 = c * phase.conjugate()
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp + u10 * colq
                a[:, q] = s * colp + u11 * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp + np.conj(u10) * rowq
                a[q, :] = s * rowp + np.conj(u11) * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp + u10 * vq
                v[:, q] = s * vp + u11 * vq
        sweeps += 1
        off = _offdiag(a)
    return np.real(np.diag(a)).copy(), v, sweeps, off


def _offdiag(a):
    # summing |a_ij|^2 directly; total minus diagonal cancels catastrophically
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))
