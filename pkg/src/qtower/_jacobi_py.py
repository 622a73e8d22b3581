"""Pure-Python cyclic Jacobi sweep, used when the compiled core is absent."""

import math

import numpy as np


def jacobi_sweeps(a, v, tol, max_sweeps):
    """Diagonalize ``a`` in place, accumulating rotations into ``v``.

    Same contract as the compiled ``_jacobi_ext.jacobi_sweeps``.
    """
    n = a.shape[0]
    sweep = 0
    mask = ~np.eye(n, dtype=bool)
    while True:
        off = math.sqrt(float(np.sum(np.abs(a[mask]) ** 2)))
        if off <= tol or sweep >= max_sweeps:
            return sweep
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                mag = abs(apq)
                if mag == 0.0:
                    continue
                w = apq.conjugate() / mag
                app = float(a[p, p].real)
                aqq = float(a[q, q].real)
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * w * col_q
                a[:, q] = s * col_p + c * w * col_q
                a[p, :] = a[:, p].conj()
                a[q, :] = a[:, q].conj()
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * w * vq
                v[:, q] = s * vp + c * w * vq
