# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Semantics mirror ``_fallback`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, atan2, cos, sin, hypot, fabs, M_PI

cnp.import_array()

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)
    double creal(double complex)
    double cimag(double complex)


cdef inline void _fix_column(double complex[:, :] V, Py_ssize_t col) noexcept nogil:
    cdef Py_ssize_t n = V.shape[0], i, best = 0
    cdef double mag, bmag = -1.0
    cdef double complex rot
    for i in range(n):
        mag = cabs(V[i, col])
        if mag > bmag:
            bmag = mag
            best = i
    if bmag <= 0.0:
        return
    rot = conj(V[best, col]) / bmag
    for i in range(n):
        V[i, col] = V[i, col] * rot
    V[best, col] = bmag


def eigh2_batch(H):
    cdef const double complex[:, :, :] h = np.ascontiguousarray(H, dtype=complex)
    cdef Py_ssize_t m = h.shape[0], k
    w_arr = np.empty((m, 2))
    V_arr = np.empty((m, 2, 2), dtype=complex)
    cdef double[:, :] w = w_arr
    cdef double complex[:, :, :] V = V_arr
    cdef double a, d, mean, half, s, norm
    cdef double complex b, up0, up1
    with nogil:
        for k in range(m):
            a = creal(h[k, 0, 0])
            d = creal(h[k, 1, 1])
            b = h[k, 0, 1]
            mean = 0.5 * (a + d)
            half = 0.5 * (a - d)
            s = hypot(half, cabs(b))
            w[k, 0] = mean - s
            w[k, 1] = mean + s
            if half >= 0:
                up0 = half + s
                up1 = conj(b)
            else:
                up0 = b
                up1 = s - half
            norm = sqrt(cabs(up0) * cabs(up0) + cabs(up1) * cabs(up1))
            if norm == 0.0:
                V[k, 0, 0] = 1.0
                V[k, 1, 0] = 0.0
                V[k, 0, 1] = 0.0
                V[k, 1, 1] = 1.0
            else:
                up0 = up0 / norm
                up1 = up1 / norm
                V[k, 0, 1] = up0
                V[k, 1, 1] = up1
                V[k, 0, 0] = -conj(up1)
                V[k, 1, 0] = conj(up0)
            _fix_column(V[k], 0)
            _fix_column(V[k], 1)
    return w_arr, V_arr


cdef bint _jacobi(double complex[:, :] A, double complex[:, :] Q, double tol,
                  int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = A.shape[0], p, q, i
    cdef int sweep
    cdef double scale = 0.0, diag, off, mag, app, aqq, two_theta, c, s
    cdef double complex apq, phase, ph_conj, xp, xq
    for i in range(n):
        for p in range(n):
            scale += cabs(A[i, p]) * cabs(A[i, p])
    scale = sqrt(scale)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += cabs(A[p, q]) * cabs(A[p, q])
        off = sqrt(off)
        if scale == 0.0 or off <= tol * scale:
            return True
        if sweep == max_sweeps:
            return False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = cabs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                ph_conj = conj(phase)
                app = creal(A[p, p])
                aqq = creal(A[q, q])
                two_theta = atan2(2.0 * mag, aqq - app)
                if two_theta > 0.5 * M_PI:
                    two_theta -= M_PI
                c = cos(0.5 * two_theta)
                s = sin(0.5 * two_theta)
                for i in range(n):
                    xp = A[i, p]
                    xq = A[i, q]
                    A[i, p] = c * xp - s * ph_conj * xq
                    A[i, q] = s * xp + c * ph_conj * xq
                for i in range(n):
                    xp = A[p, i]
                    xq = A[q, i]
                    A[p, i] = c * xp - s * phase * xq
                    A[q, i] = s * xp + c * phase * xq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = creal(A[p, p])
                A[q, q] = creal(A[q, q])
                for i in range(n):
                    xp = Q[i, p]
                    xq = Q[i, q]
                    Q[i, p] = c * xp - s * ph_conj * xq
                    Q[i, q] = s * xp + c * ph_conj * xq
    return False


def jacobi_eigh(H, double tol=1e-14, int max_sweeps=60):
    A_arr = np.array(H, dtype=complex, order="C")
    n = A_arr.shape[0]
    Q_arr = np.eye(n, dtype=complex)
    cdef double complex[:, :] A = A_arr
    cdef double complex[:, :] Q = Q_arr
    cdef bint ok
    with nogil:
        ok = _jacobi(A, Q, tol, max_sweeps)
    w = np.diag(A_arr).real.copy()
    order = np.argsort(w, kind="stable")
    V_arr = np.ascontiguousarray(Q_arr[:, order])
    cdef double complex[:, :] V = V_arr
    cdef Py_ssize_t col
    for col in range(n):
        _fix_column(V, col)
    return w[order], V_arr, bool(ok)


def jacobi_eigh_batch(H, double tol=1e-14, int max_sweeps=60):
    H = np.asarray(H, dtype=complex)
    m, n = H.shape[0], H.shape[1]
    w = np.empty((m, n))
    V = np.empty((m, n, n), dtype=complex)
    ok = np.empty(m, dtype=bool)
    for k in range(m):
        w[k], V[k], ok[k] = jacobi_eigh(H[k], tol, max_sweeps)
    return w, V, ok


def link_overlaps(states, bint closed):
    cdef const double complex[:, :] s = np.ascontiguousarray(states, dtype=complex)
    cdef Py_ssize_t m = s.shape[0], n = s.shape[1], k, i, nxt
    cdef Py_ssize_t count = m if closed else m - 1
    if count < 0:
        count = 0
    out_arr = np.empty(count, dtype=complex)
    cdef double complex[:] out = out_arr
    cdef double complex acc
    with nogil:
        for k in range(count):
            nxt = k + 1
            if nxt == m:
                nxt = 0
            acc = 0.0
            for i in range(n):
                acc = acc + conj(s[k, i]) * s[nxt, i]
            out[k] = acc
    return out_arr


def unit_product_angle(links):
    cdef const double complex[:] z = np.ascontiguousarray(links, dtype=complex)
    cdef Py_ssize_t k
    cdef double complex prod = 1.0
    cdef double az
    with nogil:
        for k in range(z.shape[0]):
            az = cabs(z[k])
            if az == 0.0:
                continue
            prod = prod * (z[k] / az)
            prod = prod / cabs(prod)
    return atan2(cimag(prod), creal(prod))


def transport(states):
    cdef const double complex[:, :] s = np.ascontiguousarray(states, dtype=complex)
    out_arr = np.array(s, dtype=complex, copy=True)
    cdef double complex[:, :] out = out_arr
    cdef Py_ssize_t m = s.shape[0], n = s.shape[1], k, i
    cdef double complex ov, rot
    cdef double mag
    with nogil:
        for k in range(1, m):
            ov = 0.0
            for i in range(n):
                ov = ov + conj(out[k - 1, i]) * s[k, i]
            mag = cabs(ov)
            if mag > 0.0:
                rot = conj(ov) / mag
                for i in range(n):
                    out[k, i] = s[k, i] * rot
    return out_arr


def segment_angle_sum(xy, double cx, double cy, bint closed):
    cdef const double[:, :] p = np.ascontiguousarray(xy, dtype=float)
    cdef Py_ssize_t m = p.shape[0], count = m if closed else m - 1, k, nxt
    cdef Py_ssize_t best = 0
    cdef double total = 0.0, ux, uy, vx, vy, sx, sy, len2, t, nx, ny, dist
    cdef double best_dist = float("inf")
    with nogil:
        for k in range(count):
            nxt = k + 1
            if nxt == m:
                nxt = 0
            ux = p[k, 0] - cx
            uy = p[k, 1] - cy
            vx = p[nxt, 0] - cx
            vy = p[nxt, 1] - cy
            total += atan2(ux * vy - uy * vx, ux * vx + uy * vy)
            sx = vx - ux
            sy = vy - uy
            len2 = sx * sx + sy * sy
            t = 0.0
            if len2 > 0:
                t = -(ux * sx + uy * sy) / len2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            nx = ux + t * sx
            ny = uy + t * sy
            dist = hypot(nx, ny)
            if dist < best_dist:
                best_dist = dist
                best = k
    return total, best_dist, best
