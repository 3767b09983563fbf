"""Hot loops: potential dispatch, Hermite evaluation and the discrete stepper.

Each kernel has a numba implementation (``*_numba``) and a numpy one
(``*_numpy``). The module-level names without suffix point at whichever
backend ``_backend`` selected. Both paths share the scalar formulas, so
they agree to rounding.
"""

import numpy as np

from . import _formulas as F
from ._backend import USE_NUMBA, jitable, njit

COULOMB = 0
LINEAR = 1
LOGARITHMIC = 2
POLYNOMIAL = 3
HYDROGEN = 4
OSCILLATOR = 5
TABULATED = 6

EXTRAP_ERROR = 0
EXTRAP_CLAMP_SLOPE = 1

STATUS_OK = 0
STATUS_COLLAPSE = 1
STATUS_DOMAIN = 2

EMPTY = np.zeros(0)


@jitable
def hermite_scalar(tx, ty, td, extrap, x, deriv):
    n = tx.shape[0]
    if x < tx[0] or x > tx[n - 1]:
        if extrap == EXTRAP_ERROR or not np.isfinite(x):
            return np.nan
        j = 0 if x < tx[0] else n - 1
        if deriv:
            return td[j]
        return ty[j] + td[j] * (x - tx[j])
    i = np.searchsorted(tx, x, side="right") - 1
    if i > n - 2:
        i = n - 2
    h = tx[i + 1] - tx[i]
    t = (x - tx[i]) / h
    y0 = ty[i]
    y1 = ty[i + 1]
    d0 = td[i]
    d1 = td[i + 1]
    if deriv:
        return (
            (6.0 * t * t - 6.0 * t) * (y0 - y1) / h
            + (3.0 * t * t - 4.0 * t + 1.0) * d0
            + (3.0 * t * t - 2.0 * t) * d1
        )
    s = 1.0 - t
    return (
        (1.0 + 2.0 * t) * s * s * y0
        + t * t * (3.0 - 2.0 * t) * y1
        + h * (t * s * s * d0 - t * t * s * d1)
    )


def hermite_numpy(tx, ty, td, extrap, x, deriv):
    x = np.asarray(x, dtype=np.float64)
    n = tx.shape[0]
    i = np.clip(np.searchsorted(tx, x, side="right") - 1, 0, n - 2)
    h = tx[i + 1] - tx[i]
    t = (x - tx[i]) / h
    y0, y1, d0, d1 = ty[i], ty[i + 1], td[i], td[i + 1]
    if deriv:
        out = (
            (6.0 * t * t - 6.0 * t) * (y0 - y1) / h
            + (3.0 * t * t - 4.0 * t + 1.0) * d0
            + (3.0 * t * t - 2.0 * t) * d1
        )
    else:
        s = 1.0 - t
        out = (
            (1.0 + 2.0 * t) * s * s * y0
            + t * t * (3.0 - 2.0 * t) * y1
            + h * (t * s * s * d0 - t * t * s * d1)
        )
    below = x < tx[0]
    above = x > tx[n - 1]
    if extrap == EXTRAP_ERROR:
        out = np.where(below | above | ~np.isfinite(x), np.nan, out)
    else:
        if deriv:
            out = np.where(below, td[0], np.where(above, td[n - 1], out))
        else:
            out = np.where(below, ty[0] + td[0] * (x - tx[0]), out)
            out = np.where(above, ty[n - 1] + td[n - 1] * (x - tx[n - 1]), out)
    return out


@jitable
def u_scalar(kind, p, tx, ty, td, extrap, r):
    if kind == COULOMB:
        return F.coulomb_u(r, p[0])
    if kind == LINEAR:
        return F.linear_u(r, p[0])
    if kind == LOGARITHMIC:
        return F.log_u(r, p[0])
    if kind == POLYNOMIAL:
        return F.poly_u(r, p[0], p[1])
    if kind == HYDROGEN:
        return F.hydrogen_u(r, p[0], p[1], p[2])
    if kind == OSCILLATOR:
        return F.osc_u(r, p[0], p[1], p[2])
    return hermite_scalar(tx, ty, td, extrap, r, False)


@jitable
def du_scalar(kind, p, tx, ty, td, extrap, r):
    if kind == COULOMB:
        return F.coulomb_du(r, p[0])
    if kind == LINEAR:
        return F.linear_du(r, p[0])
    if kind == LOGARITHMIC:
        return F.log_du(r, p[0])
    if kind == POLYNOMIAL:
        return F.poly_du(r, p[0], p[1])
    if kind == HYDROGEN:
        return F.hydrogen_du(r, p[0], p[1], p[2])
    if kind == OSCILLATOR:
        return F.osc_du(r, p[0], p[1], p[2])
    return hermite_scalar(tx, ty, td, extrap, r, True)


_VALUE = {
    COULOMB: (F.coulomb_u, F.coulomb_du, 1),
    LINEAR: (F.linear_u, F.linear_du, 1),
    LOGARITHMIC: (F.log_u, F.log_du, 1),
    POLYNOMIAL: (F.poly_u, F.poly_du, 2),
    HYDROGEN: (F.hydrogen_u, F.hydrogen_du, 3),
    OSCILLATOR: (F.osc_u, F.osc_du, 3),
}


def evaluate_numpy(kind, p, tx, ty, td, extrap, r, deriv):
    r = np.asarray(r, dtype=np.float64)
    if kind == TABULATED:
        return hermite_numpy(tx, ty, td, extrap, r, deriv)
    u, du, nparams = _VALUE[kind]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.asarray((du if deriv else u)(r, *p[:nparams]), dtype=np.float64)


def _evaluate_loop(kind, p, tx, ty, td, extrap, r, deriv):
    out = np.empty(r.shape[0])
    for i in range(r.shape[0]):
        if deriv:
            out[i] = du_scalar(kind, p, tx, ty, td, extrap, r[i])
        else:
            out[i] = u_scalar(kind, p, tx, ty, td, extrap, r[i])
    return out


def _simulate_loop(r0, pr0, phi0, pphi, tau, mass, steps, kind, p, tx, ty, td, extrap, out):
    # out[k] = (r, p_r, phi) after k steps; returns (status, failing step index)
    r = r0
    pr = pr0
    phi = phi0
    out[0, 0] = r
    out[0, 1] = pr
    out[0, 2] = phi
    for k in range(steps):
        du = du_scalar(kind, p, tx, ty, td, extrap, r)
        if not np.isfinite(du):
            return STATUS_DOMAIN, k
        r_next = r + tau * pr / mass
        pr_next = pr + tau * (pphi * pphi / (mass * r * r * r) - du)
        phi_next = phi + tau * pphi / (mass * r * r)
        if not r_next > 0.0:
            return STATUS_COLLAPSE, k
        r = r_next
        pr = pr_next
        phi = phi_next
        out[k + 1, 0] = r
        out[k + 1, 1] = pr
        out[k + 1, 2] = phi
    return STATUS_OK, steps


simulate_numpy = _simulate_loop
simulate_numba = njit(_simulate_loop)
evaluate_numba_loop = njit(_evaluate_loop)


def evaluate_numba(kind, p, tx, ty, td, extrap, r, deriv):
    r = np.ascontiguousarray(r, dtype=np.float64)
    return evaluate_numba_loop(kind, p, tx, ty, td, extrap, r.ravel(), deriv).reshape(r.shape)


if USE_NUMBA:
    simulate = simulate_numba
    evaluate = evaluate_numba
else:
    simulate = simulate_numpy
    evaluate = evaluate_numpy
