"""Cyclic Jacobi kernel for complex Hermitian matrices (numba-compiled)."""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def _off_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    return np.sqrt(s)


@numba.njit(cache=True, nogil=True)
def jacobi_sweeps(m, threshold, max_sweeps):
    """Diagonalize Hermitian ``m`` in place on a copy.

    Returns ``(diag, Q, sweeps, off)`` with ``Q^* m Q`` diagonal up to
    ``off`` (Frobenius norm of the off-diagonal part). ``sweeps`` is -1
    when the cap is hit before ``off <= threshold``.
    """
    n = m.shape[0]
    a = m.copy()
    q = np.eye(n, dtype=np.complex128)
    off = _off_norm(a)
    sweeps = 0
    while off > threshold:
        if sweeps >= max_sweeps:
            sweeps = -1
            break
        sweeps += 1
        for p in range(n - 1):
            for r in range(p + 1, n):
                g = a[p, r]
                ag = abs(g)
                if ag == 0.0:
                    continue
                app = a[p, p].real
                arr = a[r, r].real
                # rotation is a no-op below roundoff of the diagonal pair
                if ag < 1e-300 or (sweeps > 3 and ag < 1e-18 * (abs(app) + abs(arr))):
                    a[p, r] = 0.0
                    a[r, p] = 0.0
                    continue
                e = g / ag
                tau = (arr - app) / (2.0 * ag)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ec = np.conj(e)
                # A <- A J, J = [[c, s], [-s conj(e), c conj(e)]] on (p, r)
                for i in range(n):
                    aip = a[i, p]
                    air = a[i, r]
                    a[i, p] = c * aip - s * ec * air
                    a[i, r] = s * aip + c * ec * air
                # A <- J^* A
                for i in range(n):
                    api = a[p, i]
                    ari = a[r, i]
                    a[p, i] = c * api - s * e * ari
                    a[r, i] = s * api + c * e * ari
                a[p, r] = 0.0
                a[r, p] = 0.0
                a[p, p] = a[p, p].real
                a[r, r] = a[r, r].real
                for i in range(n):
                    qip = q[i, p]
                    qir = q[i, r]
                    q[i, p] = c * qip - s * ec * qir
                    q[i, r] = s * qip + c * ec * qir
        off = _off_norm(a)
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i].real
    return d, q, sweeps, off
