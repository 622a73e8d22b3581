# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi sweep for complex Hermitian matrices."""

from libc.math cimport sqrt, hypot


def jacobi_sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                  double tol, int max_sweeps):
    """Diagonalize ``a`` in place, accumulating rotations into ``v``.

    Returns the number of sweeps performed.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double off, mag, app, aqq, tau, t, c, s
    cdef double complex w, akp, akq, vkp, vkq

    while True:
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
        if sqrt(off) <= tol or sweep >= max_sweeps:
            return sweep
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                mag = hypot(a[p, q].real, a[p, q].imag)
                if mag == 0.0:
                    continue
                # phase that makes the pivot real and positive
                w = a[p, q].conjugate() / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                # hypot keeps huge |tau| finite; t then tends to 1/(2 tau)
                if tau >= 0.0:
                    t = 1.0 / (tau + hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + hypot(1.0, tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * w * akq
                    a[k, q] = s * akp + c * w * akq
                    a[p, k] = a[k, p].conjugate()
                    a[q, k] = a[k, q].conjugate()
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * w * vkq
                    v[k, q] = s * vkp + c * w * vkq
