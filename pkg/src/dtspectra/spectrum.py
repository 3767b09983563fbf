"""Forward problem: orbit radii and discrete energy levels of a potential.

The ``n``-th circular orbit balances ``xi r / n^2 = U'(r)``; its energy is
``r U'(r) / 2 + U(r)``.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .catalog import CatalogEntry, catalog_radius
from .core import DiscreteParams, Extrapolation, OrbitSolution, PotentialModel, Tabulated, angular_momentum
from .errors import AmbiguityError, BracketError, DomainError, ResidualError, SolverError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for :func:`solve_orbit_radius`.

    Attributes:
        tol: relative bound on the force-balance residual.
        rel_width: relative bracket width at which refinement stops.
        max_doublings: bracket expansion cap (2**60 by default).
        ambiguity_samples: log-spaced probes used to detect extra roots.
        closed_form: use the catalog formula when the variant has one.
    """

    tol: float = 1e-12
    rel_width: float = 4.0 * EPS
    max_doublings: int = 60
    ambiguity_samples: int = 32
    closed_form: bool = True


DEFAULT_OPTIONS = SolverOptions()


def balance_residual(r, n, pot: PotentialModel, xi: float):
    """``g(r) = xi r / n^2 - U'(r)`` and its magnitude scale."""
    centripetal = xi * r / (n * n)
    du = pot.derivative(r)
    return centripetal - du, np.abs(centripetal) + np.abs(du)


def _start_and_limits(pot: PotentialModel):
    if isinstance(pot, Tabulated):
        lo, hi = float(pot.r_grid[0]), float(pot.r_grid[-1])
        start = math.sqrt(lo * hi) if lo > 0.0 else 0.5 * hi
        if pot.extrapolation is Extrapolation.ERROR:
            return start, lo, hi
        return start, 0.0, math.inf
    return 1.0, 0.0, math.inf


def _probe(g, r):
    try:
        return float(g(r))
    except DomainError:
        return None


def _bracket(g, pot: PotentialModel, opts: SolverOptions):
    start, lo_lim, hi_lim = _start_and_limits(pot)
    g0 = _probe(g, start)
    if g0 is None:
        raise BracketError(f"potential undefined at the starting radius {start!r}")
    if g0 == 0.0:
        return start, start, (start, start)
    upward = g0 < 0.0
    prev, g_prev = start, g0
    for _ in range(opts.max_doublings):
        nxt = prev * 2.0 if upward else prev * 0.5
        nxt = min(nxt, hi_lim) if upward else max(nxt, lo_lim)
        if nxt == prev or nxt <= 0.0:
            break
        g_next = _probe(g, nxt)
        if g_next is None:
            break
        if g_next == 0.0:
            return nxt, nxt, (min(start, nxt), max(start, nxt))
        if (g_next > 0.0) != (g_prev > 0.0):
            a, b = (prev, nxt) if upward else (nxt, prev)
            return a, b, (min(start, nxt), max(start, nxt))
        prev, g_prev = nxt, g_next
    direction = "upward" if upward else "downward"
    raise BracketError(f"no sign change of the force balance found expanding {direction} from r={start!r}")


def _count_sign_changes(values):
    s = np.sign(values[np.isfinite(values)])
    s = s[s != 0.0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _polish(g, x, ulps=8):
    """Float within ``ulps`` of ``x`` where ``|g|`` is smallest."""
    up = np.nextafter(x, np.inf) - x
    candidates = x + up * np.arange(-ulps, ulps + 1)
    try:
        values = np.abs(g(candidates))
    except DomainError:
        return x
    return float(candidates[int(np.argmin(values))])


def _stepper_balance(n, pot, params):
    # radial force exactly as the discrete stepper evaluates it on a circular state
    def h(r):
        p_phi = angular_momentum(n, r, params)
        return p_phi * p_phi / (params.mass * r * r * r) - pot.derivative(r)

    return h


def _closed_form_radius(n, pot, params, opts):
    entry = CatalogEntry.from_potential(pot)
    if entry is None:
        return None
    xi = params.xi
    r = _polish(_stepper_balance(n, pot, params), catalog_radius(entry, n, xi))
    res, scale = balance_residual(r, n, pot, xi)
    if abs(res) <= opts.tol * scale:
        return r
    return None


def solve_orbit_radius(
    n: int,
    pot: PotentialModel,
    params: DiscreteParams,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> float:
    """Radius of the ``n``-th circular orbit.

    Catalog variants use their closed form (kept only if its residual
    passes). Otherwise the root is bracketed by doubling/halving from
    ``r = 1`` and refined with Brent's method.

    Raises:
        BracketError: no sign change within ``2**±max_doublings``.
        AmbiguityError: the explored range holds more than one root.
        ResidualError: the refined root misses the residual bound.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"orbit index must be a positive integer, got {n!r}")
    n = int(n)
    xi = params.xi
    if opts.closed_form:
        r = _closed_form_radius(n, pot, params, opts)
        if r is not None:
            return r

    def g(r):
        return balance_residual(r, n, pot, xi)[0]

    a, b, (lo, hi) = _bracket(g, pot, opts)
    if a == b:
        root = a
    else:
        probes = np.geomspace(lo, hi, opts.ambiguity_samples)
        try:
            changes = _count_sign_changes(g(probes))
        except DomainError:
            changes = 1
        if changes > 1:
            raise AmbiguityError(f"n={n}: {changes} sign changes of the force balance on [{lo!r}, {hi!r}]")
        root = brentq(g, a, b, xtol=1e-300, rtol=max(opts.rel_width, 4.0 * EPS), maxiter=500)
    root = _polish(_stepper_balance(n, pot, params), float(root))
    res, scale = balance_residual(root, n, pot, xi)
    if not abs(res) <= opts.tol * scale:
        raise ResidualError(f"n={n}: residual {res!r} exceeds {opts.tol!r} x {scale!r}")
    return float(root)


def orbit_energy(r_n: float, pot: PotentialModel) -> float:
    """Energy ``r U'(r) / 2 + U(r)`` of a circular orbit of radius ``r_n``."""
    if not r_n > 0.0:
        raise DomainError(f"orbit radius must be positive, got {r_n!r}")
    return 0.5 * r_n * pot.derivative(r_n) + pot.value(r_n)


def energy_scale(e_n: float, u_rn: float) -> float:
    """Magnitude used to relativize energy errors (robust when E_n crosses 0)."""
    return abs(e_n) + abs(u_rn) + 1.0


@dataclass(frozen=True)
class SpectrumTable:
    """Circular orbits ``n_min..n_max`` of one potential under one ``params``.

    ``skipped`` lists leading indices without a real orbit (only filled when
    :func:`compute_spectrum` is asked to skip them).
    """

    params: DiscreteParams
    potential: PotentialModel
    rows: tuple[OrbitSolution, ...]
    skipped: tuple[int, ...] = field(default=())

    @property
    def n(self) -> np.ndarray:
        return np.array([row.n for row in self.rows])

    @property
    def radii(self) -> np.ndarray:
        return np.array([row.r_n for row in self.rows])

    @property
    def energies(self) -> np.ndarray:
        return np.array([row.e_n for row in self.rows])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write("n,r_n,E_n,p_phi\n")
        for row in self.rows:
            buf.write(f"{row.n},{row.r_n!r},{row.e_n!r},{row.p_phi!r}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "potential": self.potential.describe(),
            "skipped": list(self.skipped),
            "rows": [{"n": r.n, "r_n": r.r_n, "E_n": r.e_n, "p_phi": r.p_phi} for r in self.rows],
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def compute_spectrum(
    pot: PotentialModel,
    params: DiscreteParams,
    n_min: int,
    n_max: int,
    opts: SolverOptions = DEFAULT_OPTIONS,
    skip_no_orbit: bool = False,
) -> SpectrumTable:
    """Solve every orbit ``n_min..n_max`` and attach energies.

    With ``skip_no_orbit`` the leading indices for which no circular orbit
    exists (no sign change) are dropped and recorded in ``skipped``; a
    failure after the first solved orbit still raises.
    """
    if not (1 <= n_min <= n_max):
        raise DomainError(f"need 1 <= n_min <= n_max, got {n_min}..{n_max}")
    rows = []
    skipped = []
    for n in range(int(n_min), int(n_max) + 1):
        try:
            r = solve_orbit_radius(n, pot, params, opts)
        except BracketError as exc:
            if skip_no_orbit and not rows:
                skipped.append(n)
                continue
            raise type(exc)(f"n={n}: {exc}") from exc
        except SolverError as exc:
            raise type(exc)(f"n={n}: {exc}") from exc
        rows.append(OrbitSolution.build(n, r, orbit_energy(r, pot), params))
    if not rows:
        raise BracketError(f"no circular orbit exists for any n in {n_min}..{n_max}")
    return SpectrumTable(params, pot, tuple(rows), tuple(skipped))
