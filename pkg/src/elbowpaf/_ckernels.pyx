# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``; same signatures."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sqrt, fabs

cnp.import_array()


cdef inline Py_ssize_t _lo(double x, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t x0
    if n <= 1:
        return 0
    x0 = <Py_ssize_t>floor(x)
    if x0 > n - 2:
        x0 = n - 2
    return x0


cdef inline double _bilin(const double[:, ::1] v, double x, double y) noexcept nogil:
    cdef Py_ssize_t h = v.shape[0], w = v.shape[1]
    cdef Py_ssize_t x0 = _lo(x, w), y0 = _lo(y, h)
    cdef Py_ssize_t x1 = x0 + 1 if x0 + 1 < w else w - 1
    cdef Py_ssize_t y1 = y0 + 1 if y0 + 1 < h else h - 1
    cdef double fx = x - x0, fy = y - y0
    cdef double top = (1.0 - fx) * v[y0, x0] + fx * v[y0, x1]
    cdef double bot = (1.0 - fx) * v[y1, x0] + fx * v[y1, x1]
    return (1.0 - fy) * top + fy * bot


cdef inline void _bilin_vec(const double[:, :, ::1] v, double x, double y,
                            double *ox, double *oy) noexcept nogil:
    cdef Py_ssize_t h = v.shape[0], w = v.shape[1]
    cdef Py_ssize_t x0 = _lo(x, w), y0 = _lo(y, h)
    cdef Py_ssize_t x1 = x0 + 1 if x0 + 1 < w else w - 1
    cdef Py_ssize_t y1 = y0 + 1 if y0 + 1 < h else h - 1
    cdef double fx = x - x0, fy = y - y0
    cdef double top, bot
    cdef int c
    for c in range(2):
        top = (1.0 - fx) * v[y0, x0, c] + fx * v[y0, x1, c]
        bot = (1.0 - fx) * v[y1, x0, c] + fx * v[y1, x1, c]
        if c == 0:
            ox[0] = (1.0 - fy) * top + fy * bot
        else:
            oy[0] = (1.0 - fy) * top + fy * bot


def bilinear_scalar(const double[:, ::1] values, double x, double y):
    return _bilin(values, x, y)


def bilinear_vec(const double[:, :, ::1] values, double x, double y):
    cdef double ox, oy
    _bilin_vec(values, x, y, &ox, &oy)
    return (ox, oy)


def line_integral(const double[:, :, ::1] values, double x1, double y1,
                  double x2, double y2, Py_ssize_t n):
    cdef Py_ssize_t h = values.shape[0], w = values.shape[1], i
    cdef double dx = x2 - x1, dy = y2 - y1
    cdef double norm = sqrt(dx * dx + dy * dy)
    cdef double ux = dx / norm, uy = dy / norm
    cdef double a, px, py, qx, qy, wgt, total = 0.0
    with nogil:
        for i in range(n):
            a = <double>i / (n - 1)
            px = x1 + a * dx
            py = y1 + a * dy
            if px < 0.0:
                px = 0.0
            elif px > w - 1.0:
                px = w - 1.0
            if py < 0.0:
                py = 0.0
            elif py > h - 1.0:
                py = h - 1.0
            _bilin_vec(values, px, py, &qx, &qy)
            wgt = 0.5 if (i == 0 or i == n - 1) else 1.0
            total += wgt * (qx * ux + qy * uy)
    return total / (n - 1)


def peak_scan(const double[:, ::1] values, double threshold):
    cdef Py_ssize_t h = values.shape[0], w = values.shape[1]
    cdef Py_ssize_t r, c, rr, cc, count = 0
    cdef double v, nb
    cdef bint ok, smaller
    rows = np.empty(h * w, dtype=np.intp)
    cols = np.empty(h * w, dtype=np.intp)
    flags = np.empty(h * w, dtype=np.bool_)
    cdef Py_ssize_t[::1] rv = rows
    cdef Py_ssize_t[::1] cv = cols
    cdef cnp.npy_bool[::1] fv = flags
    with nogil:
        for r in range(h):
            for c in range(w):
                v = values[r, c]
                if not v > threshold:
                    continue
                ok = True
                smaller = False
                for rr in range(r - 1, r + 2):
                    if rr < 0 or rr >= h:
                        continue
                    for cc in range(c - 1, c + 2):
                        if cc < 0 or cc >= w or (rr == r and cc == c):
                            continue
                        nb = values[rr, cc]
                        if nb > v:
                            ok = False
                            break
                        if nb < v:
                            smaller = True
                    if not ok:
                        break
                if ok:
                    rv[count] = r
                    cv[count] = c
                    fv[count] = smaller
                    count += 1
    return rows[:count], cols[:count], flags[:count]


def paf_render(Py_ssize_t h, Py_ssize_t w, double x1, double y1,
               double x2, double y2, double sigma_r):
    cdef double dx = x2 - x1, dy = y2 - y1
    cdef double r = sqrt(dx * dx + dy * dy)
    cdef double vx = dx / r, vy = dy / r
    cdef double px, py, along, perp
    cdef Py_ssize_t i, j
    out = np.zeros((h, w, 2))
    cdef double[:, :, ::1] o = out
    with nogil:
        for i in range(h):
            py = <double>i - y1
            for j in range(w):
                px = <double>j - x1
                along = px * vx + py * vy
                if along < 0.0 or along > r:
                    continue
                perp = py * vx - px * vy
                if fabs(perp) <= sigma_r:
                    o[i, j, 0] = vx
                    o[i, j, 1] = vy
    return out
