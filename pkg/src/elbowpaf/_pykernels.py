"""numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, and as the
reference the compiled kernels are checked against. Callers validate
arguments; these functions assume well-formed input.
"""
import math

import numpy as np


def _corner(x, n):
    x0 = min(int(math.floor(x)), n - 2) if n > 1 else 0
    return x0, min(x0 + 1, n - 1), x - x0


def bilinear_scalar(values, x, y):
    h, w = values.shape
    x0, x1, fx = _corner(x, w)
    y0, y1, fy = _corner(y, h)
    top = (1.0 - fx) * values[y0, x0] + fx * values[y0, x1]
    bot = (1.0 - fx) * values[y1, x0] + fx * values[y1, x1]
    return float((1.0 - fy) * top + fy * bot)


def bilinear_vec(values, x, y):
    return (bilinear_scalar(values[:, :, 0], x, y),
            bilinear_scalar(values[:, :, 1], x, y))


def line_integral(values, x1, y1, x2, y2, n):
    """Trapezoidal estimate of the mean of field . unit(s2 - s1) along the segment."""
    h, w = values.shape[:2]
    dx, dy = x2 - x1, y2 - y1
    norm = math.sqrt(dx * dx + dy * dy)
    ux, uy = dx / norm, dy / norm
    a = np.arange(n, dtype=np.float64) / (n - 1)
    xs = np.clip(x1 + a * dx, 0.0, w - 1.0)
    ys = np.clip(y1 + a * dy, 0.0, h - 1.0)

    if w > 1:
        x0 = np.minimum(np.floor(xs).astype(np.intp), w - 2)
    else:
        x0 = np.zeros(n, dtype=np.intp)
    if h > 1:
        y0 = np.minimum(np.floor(ys).astype(np.intp), h - 2)
    else:
        y0 = np.zeros(n, dtype=np.intp)
    xn = np.minimum(x0 + 1, w - 1)
    yn = np.minimum(y0 + 1, h - 1)
    fx = (xs - x0)[:, None]
    fy = (ys - y0)[:, None]
    top = (1.0 - fx) * values[y0, x0] + fx * values[y0, xn]
    bot = (1.0 - fx) * values[yn, x0] + fx * values[yn, xn]
    q = (1.0 - fy) * top + fy * bot

    dots = q[:, 0] * ux + q[:, 1] * uy
    weights = np.ones(n)
    weights[0] = weights[-1] = 0.5
    return float(np.sum(weights * dots) / (n - 1))


def _shifted(padded, dr, dc, h, w):
    return padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]


_OFFSETS = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]


def peak_scan(values, threshold):
    """Cells >= all 8 neighbours and > threshold.

    Returns ``(rows, cols, has_smaller)`` in raster order; ``has_smaller``
    flags cells with at least one strictly smaller neighbour.
    """
    h, w = values.shape
    lo = np.pad(values, 1, constant_values=-np.inf)
    hi = np.pad(values, 1, constant_values=np.inf)
    ge = values > threshold
    smaller = np.zeros_like(ge)
    for dr, dc in _OFFSETS:
        ge &= values >= _shifted(lo, dr, dc, h, w)
        smaller |= _shifted(hi, dr, dc, h, w) < values
    rows, cols = np.nonzero(ge)
    return rows.astype(np.intp), cols.astype(np.intp), smaller[rows, cols]


def paf_render(h, w, x1, y1, x2, y2, sigma_r):
    dx, dy = x2 - x1, y2 - y1
    r = math.sqrt(dx * dx + dy * dy)
    vx, vy = dx / r, dy / r
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    px = xs - x1
    py = ys - y1
    along = px * vx + py * vy
    perp = py * vx - px * vy
    on = (along >= 0.0) & (along <= r) & (np.abs(perp) <= sigma_r)
    out = np.zeros((h, w, 2))
    out[on] = (vx, vy)
    return out
