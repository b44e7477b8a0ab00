# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched kernels; see _pykernels.py for the reference semantics."""
import numpy as np

from libc.math cimport sqrt, fabs, NAN

DEF DEGENERATE_LENGTH = 1e-12


cdef double _det6(double* a) noexcept nogil:
    # in-place LU with partial pivoting on a row-major 6x6 block
    cdef int i, j, k, p
    cdef double det = 1.0, piv, f, tmp
    for k in range(6):
        p = k
        piv = fabs(a[6 * k + k])
        for i in range(k + 1, 6):
            if fabs(a[6 * i + k]) > piv:
                piv = fabs(a[6 * i + k])
                p = i
        if piv == 0.0:
            return 0.0
        if p != k:
            for j in range(6):
                tmp = a[6 * k + j]
                a[6 * k + j] = a[6 * p + j]
                a[6 * p + j] = tmp
            det = -det
        piv = a[6 * k + k]
        det *= piv
        for i in range(k + 1, 6):
            f = a[6 * i + k] / piv
            if f != 0.0:
                for j in range(k + 1, 6):
                    a[6 * i + j] -= f * a[6 * k + j]
    return det


cdef void _spear_one(const double[:, ::1] n, const double[:, ::1] M, bint unit,
                     double* det_out, double* had_out) noexcept nogil:
    cdef double a[36]
    cdef double lx, ly, lz, mx, my, mz, length, rn2, had = 1.0
    cdef int i
    for i in range(6):
        mx = M[i, 0]
        my = M[i, 1]
        mz = M[i, 2]
        lx = n[i, 0] - mx
        ly = n[i, 1] - my
        lz = n[i, 2] - mz
        length = sqrt(lx * lx + ly * ly + lz * lz)
        if unit:
            if length < DEGENERATE_LENGTH:
                det_out[0] = NAN
                had_out[0] = NAN
                return
            lx /= length
            ly /= length
            lz /= length
        a[6 * i + 0] = my * lz - mz * ly
        a[6 * i + 1] = mz * lx - mx * lz
        a[6 * i + 2] = mx * ly - my * lx
        a[6 * i + 3] = lx
        a[6 * i + 4] = ly
        a[6 * i + 5] = lz
        rn2 = (a[6 * i] * a[6 * i] + a[6 * i + 1] * a[6 * i + 1] + a[6 * i + 2] * a[6 * i + 2]
               + lx * lx + ly * ly + lz * lz)
        had *= sqrt(rn2)
    det_out[0] = _det6(a)
    had_out[0] = had


def spear_dets(n, M, bint unit=True):
    cdef const double[:, :, ::1] nv = np.ascontiguousarray(n, dtype=np.float64)
    cdef const double[:, :, ::1] Mv = np.ascontiguousarray(M, dtype=np.float64)
    cdef Py_ssize_t K = nv.shape[0], k
    if nv.shape[1] != 6 or Mv.shape[1] != 6 or Mv.shape[0] != K:
        raise ValueError("expected (K, 6, 3) anchor arrays")
    det = np.empty(K)
    had = np.empty(K)
    cdef double[::1] dv = det
    cdef double[::1] hv = had
    with nogil:
        for k in range(K):
            _spear_one(nv[k], Mv[k], unit, &dv[k], &hv[k])
    return det, had


cdef inline double _clamp01(double x) noexcept nogil:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


def segment_distances(p0, p1, q0, q1):
    cdef const double[:, ::1] P0 = np.ascontiguousarray(p0, dtype=np.float64)
    cdef const double[:, ::1] P1 = np.ascontiguousarray(p1, dtype=np.float64)
    cdef const double[:, ::1] Q0 = np.ascontiguousarray(q0, dtype=np.float64)
    cdef const double[:, ::1] Q1 = np.ascontiguousarray(q1, dtype=np.float64)
    cdef Py_ssize_t K = P0.shape[0], k
    out = np.empty(K)
    cdef double[::1] ov = out
    cdef double d1[3]
    cdef double d2[3]
    cdef double r[3]
    cdef double a, b, c, e, f, s, t, denom, dx, dy, dz
    cdef int j
    with nogil:
        for k in range(K):
            for j in range(3):
                d1[j] = P1[k, j] - P0[k, j]
                d2[j] = Q1[k, j] - Q0[k, j]
                r[j] = P0[k, j] - Q0[k, j]
            a = d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]
            e = d2[0] * d2[0] + d2[1] * d2[1] + d2[2] * d2[2]
            f = d2[0] * r[0] + d2[1] * r[1] + d2[2] * r[2]
            if a <= 1e-300 and e <= 1e-300:
                s = 0.0
                t = 0.0
            elif a <= 1e-300:
                s = 0.0
                t = _clamp01(f / e)
            else:
                c = d1[0] * r[0] + d1[1] * r[1] + d1[2] * r[2]
                if e <= 1e-300:
                    t = 0.0
                    s = _clamp01(-c / a)
                else:
                    b = d1[0] * d2[0] + d1[1] * d2[1] + d1[2] * d2[2]
                    denom = a * e - b * b
                    if denom > 0.0:
                        s = _clamp01((b * f - c * e) / denom)
                    else:
                        s = 0.0
                    t = (b * s + f) / e
                    if t < 0.0:
                        t = 0.0
                        s = _clamp01(-c / a)
                    elif t > 1.0:
                        t = 1.0
                        s = _clamp01((b - c) / a)
            dx = P0[k, 0] + d1[0] * s - Q0[k, 0] - d2[0] * t
            dy = P0[k, 1] + d1[1] * s - Q0[k, 1] - d2[1] * t
            dz = P0[k, 2] + d1[2] * s - Q0[k, 2] - d2[2] * t
            ov[k] = sqrt(dx * dx + dy * dy + dz * dz)
    return out
