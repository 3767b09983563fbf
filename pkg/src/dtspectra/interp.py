"""Monotone-preserving piecewise-cubic Hermite interpolation."""

import numpy as np

from . import _kernels


def _edge_slope(h0, h1, m0, m1):
    d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1)
    if np.sign(d) != np.sign(m0):
        return 0.0
    if np.sign(m0) != np.sign(m1) and abs(d) > abs(3.0 * m0):
        return 3.0 * m0
    return d


def pchip_slopes(x, y):
    """Knot slopes of the Fritsch-Butland monotone cubic through ``(x, y)``.

    Interior slopes are weighted harmonic means of the adjacent secants
    (zero at local extrema); end slopes use the shape-preserving
    three-point formula.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    h = np.diff(x)
    m = np.diff(y) / h
    d = np.zeros_like(y)
    w1 = 2.0 * h[1:] + h[:-1]
    w2 = h[1:] + 2.0 * h[:-1]
    same = (np.sign(m[:-1]) * np.sign(m[1:])) > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        harm = (w1 + w2) / (w1 / m[:-1] + w2 / m[1:])
    d[1:-1] = np.where(same, harm, 0.0)
    d[0] = _edge_slope(h[0], h[1], m[0], m[1])
    d[-1] = _edge_slope(h[-1], h[-2], m[-1], m[-2])
    return d


def limit_slopes(x, y, d):
    """Apply the Fritsch-Carlson limiter to externally supplied slopes.

    Intervals where the data are flat get zero end slopes; slopes whose
    sign opposes the local secant are zeroed; pairs outside the circle of
    radius 3 are scaled back onto it. Slopes of a smooth monotone function
    sampled finely pass through unchanged.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    d = np.array(d, dtype=np.float64)
    m = np.diff(y) / np.diff(x)
    for k, mk in enumerate(m):
        if mk == 0.0:
            d[k] = d[k + 1] = 0.0
            continue
        a = d[k] / mk
        b = d[k + 1] / mk
        if a < 0.0:
            d[k] = 0.0
            a = 0.0
        if b < 0.0:
            d[k + 1] = 0.0
            b = 0.0
        rad = a * a + b * b
        if rad > 9.0:
            scale = 3.0 / np.sqrt(rad)
            d[k] = scale * a * mk
            d[k + 1] = scale * b * mk
    return d


def hermite_integral(x, y, d, a, b):
    """Exact integral of the Hermite cubic over ``[a, b]`` inside the knots."""
    x = np.asarray(x, dtype=np.float64)
    if a > b:
        return -hermite_integral(x, y, d, b, a)
    if a < x[0] or b > x[-1]:
        raise ValueError("integration limits outside the knot range")
    cuts = np.concatenate(([a], x[(x > a) & (x < b)], [b]))
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        # Simpson's rule is exact for cubics.
        mid = 0.5 * (lo + hi)
        vals = _kernels.hermite_numpy(x, y, d, _kernels.EXTRAP_ERROR, np.array([lo, mid, hi]), False)
        total += (hi - lo) / 6.0 * (vals[0] + 4.0 * vals[1] + vals[2])
    return total
