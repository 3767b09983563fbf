"""Closed-form potentials and their radial derivatives.

Every function works on a float or on a float64 array, and is callable
from numba-compiled kernels. No domain checking happens here.
"""

import numpy as np

from ._backend import jitable


@jitable
def coulomb_u(r, alpha):
    return -alpha / r


@jitable
def coulomb_du(r, alpha):
    return alpha / (r * r)


@jitable
def linear_u(r, alpha):
    return alpha * r


@jitable
def linear_du(r, alpha):
    return alpha + 0.0 * r


@jitable
def log_u(r, alpha):
    return alpha * np.log(r)


@jitable
def log_du(r, alpha):
    return alpha / r


@jitable
def poly_u(r, alpha, sigma):
    return alpha * r**sigma


@jitable
def poly_du(r, alpha, sigma):
    return alpha * sigma * r ** (sigma - 1.0)


@jitable
def hydrogen_u(r, gamma, beta, xi):
    return -np.exp(4.0 * beta * xi) / (4.0 * gamma + 2.0 * r * r * xi)


@jitable
def hydrogen_du(r, gamma, beta, xi):
    d = 4.0 * gamma + 2.0 * r * r * xi
    return np.exp(4.0 * beta * xi) * 4.0 * xi * r / (d * d)


@jitable
def _osc_radical(r, alpha, beta, xi):
    # V**3 = a + q with a = 27 r^2 alpha^2 xi, q = sqrt(a^2 + c^3), c = 6 alpha beta xi.
    # V^2 - c is rewritten as 2 a V^3 / (V^4 + V^2 c + c^2) (same value, no cancellation).
    a = 27.0 * r * r * alpha * alpha * xi
    c = 6.0 * alpha * beta * xi
    q = np.sqrt(a * a + c * c * c)
    s = a + q
    v = np.cbrt(s)
    w = 2.0 * a * s / (v**4 + v * v * c + c * c)
    return a, c, q, v, w


@jitable
def osc_u(r, alpha, beta, xi):
    if beta == 0.0:
        return 1.5 * np.cbrt(r * r * alpha * alpha * xi / 4.0)
    a, c, q, v, w = _osc_radical(r, alpha, beta, xi)
    return (
        v / 3.0
        - 2.0 * alpha * beta * xi / v
        - 9.0 * r * r * v * v * alpha * alpha * xi / (2.0 * w * w)
    )


@jitable
def osc_du(r, alpha, beta, xi):
    if beta == 0.0:
        return np.cbrt(alpha * alpha * xi / 4.0) / np.cbrt(r)
    a, c, q, v, w = _osc_radical(r, alpha, beta, xi)
    dv = 2.0 * a * v / (3.0 * r * q)
    dw = 2.0 * v * dv
    k = 9.0 * alpha * alpha * xi / 2.0
    last = (
        2.0 * r * v * v / (w * w)
        + 2.0 * r * r * v * dv / (w * w)
        - 2.0 * r * r * v * v * dw / (w * w * w)
    )
    return dv / 3.0 + 2.0 * alpha * beta * xi * dv / (v * v) - k * last
