"""Inverse problem: potentials that reproduce a prescribed spectrum ``E(n)``.

Treating ``n`` as continuous, the orbit radius obeys

    r(n)^2 = n (n E(n) - E(1) - int_1^n E(k) dk + epsilon) / xi

with ``epsilon = xi r(1)^2``. Inverting ``r(n)`` and using
``U(r_n) = E(n) - xi r_n^2 / (2 n^2)`` gives ``U`` on any radius grid.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from . import _kernels as K
from .core import DiscreteParams, Extrapolation, HydrogenReconstructed, OscillatorReconstructed, Tabulated
from .errors import (
    DomainError,
    MonotonicityError,
    NegativeRadicandError,
    RangeError,
    ReconstructionCheckError,
)
from .interp import pchip_slopes

EPS = np.finfo(float).eps


class SpectrumSpec:
    """A prescribed energy law ``E(n)`` for real ``n >= 1``."""

    name = "spectrum"

    def _check(self, n):
        if not n >= 1.0:
            raise DomainError(f"{self.name}: n must be >= 1, got {n!r}")

    def energy(self, n: float) -> float:
        raise NotImplementedError

    def energy_derivative(self, n: float) -> float:
        raise NotImplementedError

    def integral(self, n: float) -> float:
        """``int_1^n E(k) dk``."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class HydrogenLaw(SpectrumSpec):
    """``E(n) = -gamma / n^2``."""

    gamma: float
    name = "hydrogen"

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma!r}")

    def energy(self, n):
        self._check(n)
        return -self.gamma / (n * n)

    def energy_derivative(self, n):
        self._check(n)
        return 2.0 * self.gamma / (n * n * n)

    def integral(self, n):
        self._check(n)
        return self.gamma * (1.0 / n - 1.0)

    def describe(self):
        return {"law": self.name, "gamma": self.gamma}


@dataclass(frozen=True)
class LinearLaw(SpectrumSpec):
    """``E(n) = alpha n`` (equally spaced levels)."""

    alpha: float
    name = "linear"

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")

    def energy(self, n):
        self._check(n)
        return self.alpha * n

    def energy_derivative(self, n):
        self._check(n)
        return self.alpha

    def integral(self, n):
        self._check(n)
        return 0.5 * self.alpha * (n * n - 1.0)

    def describe(self):
        return {"law": self.name, "alpha": self.alpha}


@dataclass(frozen=True)
class PowerLaw(SpectrumSpec):
    """``E(n) = coef * n**exponent``; covers the Coulomb-induced ``n^(-2/3)`` law."""

    coef: float
    exponent: float
    name = "power"

    def __post_init__(self):
        if not (math.isfinite(self.coef) and math.isfinite(self.exponent)):
            raise DomainError("power law needs finite coef and exponent")

    def energy(self, n):
        self._check(n)
        return self.coef * n**self.exponent

    def energy_derivative(self, n):
        self._check(n)
        return self.coef * self.exponent * n ** (self.exponent - 1.0)

    def integral(self, n):
        self._check(n)
        p = self.exponent
        if p == -1.0:
            return self.coef * math.log(n)
        return self.coef * (n ** (p + 1.0) - 1.0) / (p + 1.0)

    def describe(self):
        return {"law": self.name, "coef": self.coef, "exponent": self.exponent}


@dataclass(frozen=True, eq=False)
class TabulatedLaw(SpectrumSpec):
    """Levels ``E(1..N)`` joined by a monotone cubic in ``n``.

    The antiderivative is computed by adaptive Gauss-Kronrod quadrature.
    """

    energies: np.ndarray
    name = "tabulated"

    def __post_init__(self):
        e = np.array(self.energies, dtype=np.float64)
        if e.ndim != 1 or e.size < 4:
            raise DomainError("tabulated law needs at least 4 levels")
        if not np.all(np.isfinite(e)):
            raise DomainError("tabulated law levels must be finite")
        n = np.arange(1.0, e.size + 1.0)
        d = pchip_slopes(n, e)
        for arr in (e, n, d):
            arr.setflags(write=False)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_d", d)
        # int_1^k E for k = 1..N, one adaptive quadrature per unit piece
        pieces = [self._quad(k, k + 1.0) for k in range(1, e.size)]
        cum = np.concatenate(([0.0], np.cumsum(pieces)))
        cum.setflags(write=False)
        object.__setattr__(self, "_cum", cum)

    @property
    def n_max(self) -> int:
        return int(self.energies.size)

    def _check(self, n):
        if not 1.0 <= n <= self.n_max:
            raise DomainError(f"tabulated law covers 1 <= n <= {self.n_max}, got {n!r}")

    def _eval(self, n, deriv):
        return float(K.hermite_scalar(self._n, self.energies, self._d, K.EXTRAP_ERROR, float(n), deriv))

    def energy(self, n):
        self._check(n)
        return self._eval(n, False)

    def energy_derivative(self, n):
        self._check(n)
        return self._eval(n, True)

    def _quad(self, a, b):
        if b - a <= 1e-6:
            # QUADPACK returns nan on ulp-wide intervals; trapezoid error is O(h^3)
            return 0.5 * (b - a) * (self._eval(a, False) + self._eval(b, False))
        atol = 1e-12 * (1.0 + abs(self.energies[0]))
        # the relative floor avoids roundoff stalls once a piece is large
        value, _ = integrate.quad(lambda k: self._eval(k, False), a, b, epsabs=atol, epsrel=1e-14)
        return value

    def integral(self, n):
        self._check(n)
        n = float(n)
        k = min(int(n), self.n_max - 1)
        cum = self._cum
        if n == k:
            return float(cum[k - 1])
        return float(cum[k - 1]) + self._quad(float(k), n)

    def describe(self):
        return {"law": self.name, "energies": [float(e) for e in self.energies]}


def read_law_csv(source) -> TabulatedLaw:
    """Parse an ``n,E`` CSV whose ``n`` column is 1, 2, 3, ..."""
    text = Path(source).read_text() if "\n" not in str(source) else source
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows or [c.strip() for c in rows[0]] != ["n", "E"]:
        raise DomainError("spectrum CSV must start with the header 'n,E'")
    try:
        ns = [int(row[0]) for row in rows[1:]]
        es = [float(row[1]) for row in rows[1:]]
    except (ValueError, IndexError) as exc:
        raise DomainError(f"malformed spectrum row: {exc}") from exc
    if ns != list(range(1, len(ns) + 1)):
        raise DomainError("spectrum CSV n column must be consecutive integers starting at 1")
    return TabulatedLaw(np.array(es))


@dataclass(frozen=True)
class RadiusProfile:
    """Orbit radius ``r(n)`` implied by a spectrum and an integration constant."""

    spec: SpectrumSpec
    params: DiscreteParams
    epsilon: float

    def radicand(self, n: float) -> float:
        """``n (n E(n) - E(1) - int_1^n E + epsilon)``, equal to ``xi r(n)^2``."""
        if not n >= 1.0:
            raise DomainError(f"radius profile is defined for n >= 1, got {n!r}")
        s = self.spec
        return n * (n * s.energy(n) - s.energy(1.0) - s.integral(n) + self.epsilon)

    def radius_squared(self, n: float) -> float:
        return self.radicand(n) / self.params.xi

    def radius(self, n: float) -> float:
        rad = self.radicand(n)
        if not rad > 0.0:
            raise NegativeRadicandError(f"radius radicand {rad!r} <= 0 at n={n!r}", n)
        return math.sqrt(rad / self.params.xi)

    __call__ = radius


def radius_profile(spec: SpectrumSpec, params: DiscreteParams, epsilon: float) -> RadiusProfile:
    """Build ``r(n)``; ``epsilon`` fixes the innermost radius via ``xi r(1)^2``."""
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive so that r(1) is real, got {epsilon!r}")
    return RadiusProfile(spec, params, float(epsilon))


def invert_radius(profile: RadiusProfile, r: float, n_cap: float = 2.0**40) -> float:
    """Real ``n`` with ``r(n) = r``, for a profile increasing on ``[1, n_cap]``.

    Raises:
        RangeError: ``r`` below ``r(1)`` or beyond ``r(n_cap)``.
        MonotonicityError: ``r(n)`` stops increasing while bracketing.
    """
    r = float(r)
    n_cap = min(float(n_cap), float(getattr(profile.spec, "n_max", math.inf)))
    r1 = profile.radius(1.0)
    if r == r1:
        return 1.0
    if not r > r1:
        raise RangeError(f"r={r!r} is below the innermost radius r(1)={r1!r}")
    lo, r_lo = 1.0, r1
    hi = min(2.0, n_cap)
    while True:
        try:
            r_hi = profile.radius(hi)
        except NegativeRadicandError as exc:
            raise MonotonicityError(f"radius profile collapses at n={hi!r}") from exc
        if not r_hi > r_lo:
            raise MonotonicityError(f"r(n) not increasing between n={lo!r} and n={hi!r}")
        if r_hi >= r:
            break
        if hi >= n_cap:
            raise RangeError(f"r={r!r} exceeds r(n_cap)={r_hi!r}")
        lo, r_lo = hi, r_hi
        hi = min(2.0 * hi, n_cap)
    if r_hi == r:
        return hi
    n = brentq(lambda m: profile.radius(m) - r, lo, hi, xtol=1e-300, rtol=4.0 * EPS, maxiter=500)
    if not abs(profile.radius(n) - r) <= 1e-12 * r:
        raise MonotonicityError(f"inversion at r={r!r} did not converge (n={n!r})")
    return n


def default_radius_grid(profile: RadiusProfile, n_max: float, points: int = 512) -> np.ndarray:
    """Log-spaced radii from ``r(1)`` to ``r(n_max)``."""
    return np.geomspace(profile.radius(1.0), profile.radius(float(n_max)), points)


def reconstruct_potential(
    spec: SpectrumSpec,
    params: DiscreteParams,
    epsilon: float,
    r_grid=None,
    *,
    n_max: float = 64.0,
    extrapolation: Extrapolation = Extrapolation.CLAMP_SLOPE,
    self_check: bool = True,
    check_tol: float = 1e-6,
) -> Tabulated:
    """Tabulate the potential whose circular orbits have energies ``E(n)``.

    Each grid radius is mapped to its real index ``n``; the value is
    ``E(n) - xi r^2 / (2 n^2)`` and the knot slope is the exact
    force-balance derivative ``xi r / n^2``. The self-check compares the
    interpolant's derivative with ``xi r / n(r)^2`` at interval midpoints.

    Raises:
        RangeError, MonotonicityError: from the radius inversion.
        ReconstructionCheckError: the self-check exceeds ``check_tol``.
    """
    profile = radius_profile(spec, params, epsilon)
    if r_grid is None:
        r_grid = default_radius_grid(profile, n_max)
    grid = np.asarray(r_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 4 or np.any(np.diff(grid) <= 0.0) or grid[0] <= 0.0:
        raise DomainError("r_grid must be a strictly increasing array of at least 4 positive radii")
    xi = params.xi
    ns = np.array([invert_radius(profile, r) for r in grid])
    values = np.array([spec.energy(n) for n in ns]) - xi * grid**2 / (2.0 * ns**2)
    slopes = xi * grid / ns**2
    pot = Tabulated(grid, values, extrapolation=extrapolation, slopes=slopes)
    if self_check and grid.size > 2:
        mids = 0.5 * (grid[1:-2] + grid[2:-1])
        if mids.size:
            n_mid = np.array([invert_radius(profile, r) for r in mids])
            expected = xi * mids / n_mid**2
            got = pot.derivative(mids)
            worst = float(np.max(np.abs(got - expected) / np.abs(expected)))
            if worst > check_tol:
                raise ReconstructionCheckError(
                    f"interpolated force balance off by {worst:.3g} (relative) > {check_tol:g}"
                )
    return pot


def hydrogen_potential(gamma: float, beta: float, xi: float) -> HydrogenReconstructed:
    """Closed-form potential with levels ``-gamma / n^2``."""
    return HydrogenReconstructed(gamma, beta, xi)


def oscillator_potential(alpha: float, beta: float, xi: float) -> OscillatorReconstructed:
    """Closed-form potential with levels ``alpha n``."""
    return OscillatorReconstructed(alpha, beta, xi)


def hydrogen_orbit_radius(n: float, gamma: float, beta: float, xi: float) -> float:
    """``sqrt((exp(2 beta xi) n - 2 gamma) / xi)``; NaN when no real orbit exists."""
    rad = math.exp(2.0 * beta * xi) * n - 2.0 * gamma
    return math.sqrt(rad / xi) if rad > 0.0 else math.nan


def oscillator_orbit_radius(n: float, alpha: float, beta: float, xi: float) -> float:
    """``sqrt(beta n + alpha n^3 / (2 xi))``."""
    return math.sqrt(beta * n + alpha * n**3 / (2.0 * xi))


def oscillator_orbit_index(r, alpha: float, beta: float, xi: float):
    """Real root ``n`` of ``alpha n^3 / (2 xi) + beta n = r^2`` in radical form."""
    r = np.asarray(r, dtype=np.float64)
    a = 27.0 * r * r * alpha * alpha * xi
    v = np.cbrt(a + np.sqrt(a * a + (6.0 * alpha * beta * xi) ** 3))
    return v / (3.0 * alpha) - 2.0 * beta * xi / v


@dataclass(frozen=True)
class BetaConversion:
    """Integration constant ``beta`` implied by ``epsilon``.

    For hydrogen, ``printed`` is ``ln(epsilon + gamma) / (2 xi)`` and
    ``derived`` is ``ln(epsilon + 2 gamma) / (2 xi)``, which follows from
    ``epsilon = xi r(1)^2`` applied to the closed-form radius; only the
    derived one reproduces the tabulated reconstruction. For the
    oscillator both coincide.
    """

    kind: str
    epsilon: float
    printed: float
    derived: float


def beta_epsilon_conversions(kind: str, epsilon: float, gamma_or_alpha: float, xi: float) -> BetaConversion:
    """``beta`` from ``epsilon`` for the hydrogen or oscillator closed forms."""
    if not (gamma_or_alpha > 0.0 and xi > 0.0):
        raise DomainError("gamma/alpha and xi must be positive")
    if kind == "hydrogen":
        gamma = gamma_or_alpha
        if not epsilon + gamma > 0.0:
            raise DomainError(f"log argument epsilon + gamma = {epsilon + gamma!r} must be positive")
        printed = math.log(epsilon + gamma) / (2.0 * xi)
        derived = math.log(epsilon + 2.0 * gamma) / (2.0 * xi)
        return BetaConversion(kind, epsilon, printed, derived)
    if kind == "oscillator":
        alpha = gamma_or_alpha
        printed = (epsilon - 0.5 * alpha) / xi
        # r(1)^2 = beta + alpha / (2 xi) = epsilon / xi
        derived = epsilon / xi - alpha / (2.0 * xi)
        return BetaConversion(kind, epsilon, printed, derived)
    raise DomainError(f"kind must be 'hydrogen' or 'oscillator', got {kind!r}")


def epsilon_from_beta(kind: str, beta: float, gamma_or_alpha: float, xi: float) -> float:
    """Inverse of the derived ``beta(epsilon)`` relation."""
    if kind == "hydrogen":
        return math.exp(2.0 * beta * xi) - 2.0 * gamma_or_alpha
    if kind == "oscillator":
        return beta * xi + 0.5 * gamma_or_alpha
    raise DomainError(f"kind must be 'hydrogen' or 'oscillator', got {kind!r}")


def reconstruction_sidecar(spec: SpectrumSpec, params: DiscreteParams, epsilon: float) -> dict:
    """Metadata written next to a reconstructed potential CSV."""
    meta = {"spec": spec.describe(), "epsilon": epsilon, **params.to_dict()}
    conv = None
    if isinstance(spec, HydrogenLaw):
        conv = beta_epsilon_conversions("hydrogen", epsilon, spec.gamma, params.xi)
    elif isinstance(spec, LinearLaw):
        conv = beta_epsilon_conversions("oscillator", epsilon, spec.alpha, params.xi)
    if conv is not None:
        meta["beta"] = {"printed": conv.printed, "derived": conv.derived}
    return meta


def write_sidecar(meta: dict, path) -> str:
    text = json.dumps(meta, indent=2) + "\n"
    Path(path).write_text(text)
    return text
