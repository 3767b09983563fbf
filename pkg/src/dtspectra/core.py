"""Shared domain types: discreteness parameters, phase states, potentials."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import ClassVar

import numpy as np

from . import _kernels as K
from .errors import DomainError
from .interp import limit_slopes, pchip_slopes

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DiscreteParams:
    """Time quantum ``tau`` and particle ``mass``; ``xi`` is derived.

    ``xi = 4 pi^2 mass / tau^2`` appears in every radius and energy formula.
    """

    tau: float
    mass: float = 1.0
    xi: float = field(init=False)

    def __post_init__(self):
        tau = float(self.tau)
        mass = float(self.mass)
        if not (tau > 0.0 and math.isfinite(tau)):
            raise DomainError(f"tau must be positive and finite, got {self.tau!r}")
        if not (mass > 0.0 and math.isfinite(mass)):
            raise DomainError(f"mass must be positive and finite, got {self.mass!r}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "xi", 4.0 * math.pi**2 * mass / tau**2)

    @classmethod
    def from_xi(cls, xi: float, mass: float = 1.0) -> DiscreteParams:
        """Pick ``tau`` so that the derived ``xi`` matches the requested value."""
        if not xi > 0.0:
            raise DomainError(f"xi must be positive, got {xi!r}")
        return cls(tau=TWO_PI * math.sqrt(mass / xi), mass=mass)

    def to_dict(self) -> dict:
        return {"tau": self.tau, "mass": self.mass, "xi": self.xi}


@dataclass(frozen=True)
class PhaseState:
    """Polar phase-space point. ``phi`` is cumulative, never wrapped."""

    r: float
    p_r: float
    phi: float
    p_phi: float

    def __post_init__(self):
        if not self.r >= 0.0:
            raise DomainError(f"r must be nonnegative, got {self.r!r}")


@dataclass(frozen=True)
class OrbitSolution:
    """The ``n``-th stationary circular orbit: radius, energy, angular momentum."""

    n: int
    r_n: float
    e_n: float
    p_phi: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"orbit index must be a positive integer, got {self.n!r}")
        if not self.r_n > 0.0:
            raise DomainError(f"orbit radius must be positive, got {self.r_n!r}")

    @classmethod
    def build(cls, n: int, r_n: float, e_n: float, params: DiscreteParams) -> OrbitSolution:
        return cls(n=int(n), r_n=float(r_n), e_n=float(e_n), p_phi=angular_momentum(n, r_n, params))


def angular_momentum(n, r_n, params: DiscreteParams) -> float:
    """Angular momentum that closes an ``n``-step circular orbit of radius ``r_n``."""
    return TWO_PI * params.mass * r_n * r_n / (n * params.tau)


class Extrapolation(enum.Enum):
    ERROR = K.EXTRAP_ERROR
    CLAMP_SLOPE = K.EXTRAP_CLAMP_SLOPE


class PotentialModel:
    """Base class for central potentials ``U(r)``.

    Subclasses are frozen dataclasses. ``value`` and ``derivative`` accept
    a float or an array and raise :class:`DomainError` outside the domain.
    """

    kind: ClassVar[int]
    name: ClassVar[str]

    def _params(self) -> np.ndarray:
        raise NotImplementedError

    def _tables(self):
        return K.EMPTY, K.EMPTY, K.EMPTY, K.EXTRAP_ERROR

    def _domain_mask(self, r, deriv: bool):
        return r > 0.0

    def kernel_args(self):
        """Arguments for the ``_kernels`` dispatch functions."""
        tx, ty, td, extrap = self._tables()
        return self.kind, self._params(), tx, ty, td, extrap

    def _eval(self, r, deriv):
        arr = np.asarray(r, dtype=np.float64)
        ok = self._domain_mask(arr, deriv) & np.isfinite(arr)
        if not np.all(ok):
            bad = arr[~ok] if arr.ndim else arr
            raise DomainError(f"{self.name}: r={np.ravel(bad)[0]!r} outside the potential domain")
        args = self.kernel_args()
        if arr.ndim == 0:
            fn = K.du_scalar if deriv else K.u_scalar
            out = float(fn(*args, float(arr)))
            if not math.isfinite(out):
                raise DomainError(f"{self.name}: undefined at r={float(arr)!r}")
            return out
        out = K.evaluate(*args, arr, deriv)
        if not np.all(np.isfinite(out)):
            raise DomainError(f"{self.name}: undefined at some sampled r")
        return out

    def value(self, r):
        return self._eval(r, False)

    def derivative(self, r):
        return self._eval(r, True)

    def describe(self) -> dict:
        """JSON-friendly descriptor of the variant and its parameters."""
        raise NotImplementedError


def _check_real(label, value):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{label} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Coulomb(PotentialModel):
    """``U(r) = -alpha / r``."""

    alpha: float
    kind: ClassVar[int] = K.COULOMB
    name: ClassVar[str] = "coulomb"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_real("alpha", self.alpha))

    def _params(self):
        return np.array([self.alpha, 0.0, 0.0])

    def describe(self):
        return {"kind": self.name, "alpha": self.alpha}


@dataclass(frozen=True)
class Linear(PotentialModel):
    """``U(r) = alpha * r``; defined at the origin."""

    alpha: float
    kind: ClassVar[int] = K.LINEAR
    name: ClassVar[str] = "linear"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_real("alpha", self.alpha))

    def _params(self):
        return np.array([self.alpha, 0.0, 0.0])

    def _domain_mask(self, r, deriv):
        return r >= 0.0

    def describe(self):
        return {"kind": self.name, "alpha": self.alpha}


@dataclass(frozen=True)
class Logarithmic(PotentialModel):
    """``U(r) = alpha * ln r``."""

    alpha: float
    kind: ClassVar[int] = K.LOGARITHMIC
    name: ClassVar[str] = "logarithmic"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_real("alpha", self.alpha))

    def _params(self):
        return np.array([self.alpha, 0.0, 0.0])

    def describe(self):
        return {"kind": self.name, "alpha": self.alpha}


@dataclass(frozen=True)
class Polynomial(PotentialModel):
    """``U(r) = alpha * r**sigma`` with ``sigma`` in (-2, 2), nonzero, ``alpha*sigma > 0``."""

    alpha: float
    sigma: float
    kind: ClassVar[int] = K.POLYNOMIAL
    name: ClassVar[str] = "polynomial"

    def __post_init__(self):
        alpha = _check_real("alpha", self.alpha)
        sigma = _check_real("sigma", self.sigma)
        if not (-2.0 < sigma < 2.0) or sigma == 0.0:
            raise DomainError(f"polynomial exponent sigma must lie in (-2, 2) and be nonzero, got {sigma!r}")
        if not alpha * sigma > 0.0:
            raise DomainError(f"polynomial potential needs alpha*sigma > 0, got alpha={alpha!r}, sigma={sigma!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "sigma", sigma)

    def _params(self):
        return np.array([self.alpha, self.sigma, 0.0])

    def _domain_mask(self, r, deriv):
        # the derivative at 0 is finite only for sigma >= 1
        if self.sigma > 0.0 and (not deriv or self.sigma >= 1.0):
            return r >= 0.0
        return r > 0.0

    def describe(self):
        return {"kind": self.name, "alpha": self.alpha, "sigma": self.sigma}


@dataclass(frozen=True)
class HydrogenReconstructed(PotentialModel):
    """``U(r) = -exp(4 beta xi) / (4 gamma + 2 xi r^2)``, finite at the origin.

    ``xi`` is frozen at reconstruction time and may differ from the
    ``DiscreteParams`` the potential is later used with.
    """

    gamma: float
    beta: float
    xi: float
    kind: ClassVar[int] = K.HYDROGEN
    name: ClassVar[str] = "hydrogen-reconstructed"

    def __post_init__(self):
        gamma = _check_real("gamma", self.gamma)
        beta = _check_real("beta", self.beta)
        xi = _check_real("xi", self.xi)
        if not (gamma > 0.0 and xi > 0.0):
            raise DomainError("hydrogen-reconstructed potential needs gamma > 0 and xi > 0")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "xi", xi)

    def _params(self):
        return np.array([self.gamma, self.beta, self.xi])

    def _domain_mask(self, r, deriv):
        return r >= 0.0

    def min_orbit_index(self, xi: float) -> float:
        """Orbits exist under ``xi`` only for ``n`` strictly above this value."""
        return 2.0 * self.gamma * math.sqrt(xi / self.xi) * math.exp(-2.0 * self.beta * self.xi)

    def describe(self):
        return {"kind": self.name, "gamma": self.gamma, "beta": self.beta, "xi": self.xi}


@dataclass(frozen=True)
class OscillatorReconstructed(PotentialModel):
    """Potential whose discrete spectrum is ``alpha * n``.

    ``beta == 0`` gives ``U = 1.5 (r^2 alpha^2 xi / 4)^(1/3)``; ``beta > 0``
    uses the real cubic-root (radical) form, which diverges at ``r = 0``.
    """

    alpha: float
    beta: float
    xi: float
    kind: ClassVar[int] = K.OSCILLATOR
    name: ClassVar[str] = "oscillator-reconstructed"

    def __post_init__(self):
        alpha = _check_real("alpha", self.alpha)
        beta = _check_real("beta", self.beta)
        xi = _check_real("xi", self.xi)
        if not (alpha > 0.0 and xi > 0.0 and beta >= 0.0):
            raise DomainError("oscillator-reconstructed potential needs alpha > 0, xi > 0, beta >= 0")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "xi", xi)

    def _params(self):
        return np.array([self.alpha, self.beta, self.xi])

    def _domain_mask(self, r, deriv):
        if self.beta == 0.0 and not deriv:
            return r >= 0.0
        return r > 0.0

    def describe(self):
        return {"kind": self.name, "alpha": self.alpha, "beta": self.beta, "xi": self.xi}


@dataclass(frozen=True, eq=False)
class Tabulated(PotentialModel):
    """Potential sampled on a grid and interpolated by a monotone cubic.

    ``slopes`` defaults to Fritsch-Butland estimates; exact slopes may be
    supplied (they still pass through the Fritsch-Carlson limiter).
    """

    r_grid: np.ndarray
    u_values: np.ndarray
    extrapolation: Extrapolation = Extrapolation.ERROR
    slopes: np.ndarray | None = None
    kind: ClassVar[int] = K.TABULATED
    name: ClassVar[str] = "tabulated"

    def __post_init__(self):
        x = np.array(self.r_grid, dtype=np.float64)
        y = np.array(self.u_values, dtype=np.float64)
        if x.ndim != 1 or x.shape != y.shape:
            raise DomainError("r_grid and u_values must be 1-D arrays of equal length")
        if x.size < 4:
            raise DomainError(f"tabulated potential needs at least 4 points, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("tabulated potential values must be finite")
        if x[0] < 0.0 or np.any(np.diff(x) <= 0.0):
            raise DomainError("r_grid must be nonnegative and strictly increasing")
        if self.slopes is None:
            d = pchip_slopes(x, y)
        else:
            d = limit_slopes(x, y, self.slopes)
        for arr in (x, y, d):
            arr.setflags(write=False)
        object.__setattr__(self, "r_grid", x)
        object.__setattr__(self, "u_values", y)
        object.__setattr__(self, "slopes", d)
        object.__setattr__(self, "extrapolation", Extrapolation(self.extrapolation))

    def _params(self):
        return np.zeros(3)

    def _tables(self):
        return self.r_grid, self.u_values, self.slopes, self.extrapolation.value

    def _domain_mask(self, r, deriv):
        if self.extrapolation is Extrapolation.ERROR:
            return (r >= self.r_grid[0]) & (r <= self.r_grid[-1])
        return r >= 0.0

    def describe(self):
        return {
            "kind": self.name,
            "points": int(self.r_grid.size),
            "r_min": float(self.r_grid[0]),
            "r_max": float(self.r_grid[-1]),
            "extrapolation": self.extrapolation.name.lower(),
        }


def evaluate_potential(pot: PotentialModel, r):
    """``U(r)`` for any potential variant."""
    return pot.value(r)


def potential_derivative(pot: PotentialModel, r):
    """``dU/dr`` for any potential variant."""
    return pot.derivative(r)


@dataclass(frozen=True)
class PhysicalityReport:
    """Force-shape diagnostics on a sampled radius range.

    ``admissible`` combines the two hard requirements (attractive and
    monotone); ``vanishing`` is informational.
    """

    attractive: bool
    monotone: bool
    vanishing: bool
    radii: np.ndarray = field(repr=False)
    force: np.ndarray = field(repr=False)

    @property
    def admissible(self) -> bool:
        return self.attractive and self.monotone

    @property
    def passed(self) -> bool:
        return self.attractive and self.monotone and self.vanishing


def check_physical(
    pot: PotentialModel,
    r_min: float,
    r_max: float,
    samples: int = 64,
    vanishing_threshold: float = 1e-2,
) -> PhysicalityReport:
    """Sample ``F = -U'`` on a log grid and classify its shape.

    ``monotone`` means ``|F|`` never increases between samples (a constant
    force passes). ``vanishing`` means ``|F(r_max)|`` has dropped below
    ``vanishing_threshold`` times the largest sampled ``|F|``.
    """
    if not 0.0 < r_min < r_max:
        raise DomainError("need 0 < r_min < r_max")
    if samples < 3:
        raise DomainError("need at least 3 samples")
    radii = np.geomspace(r_min, r_max, samples)
    force = -np.asarray(pot.derivative(radii), dtype=np.float64)
    mag = np.abs(force)
    attractive = bool(np.all(force < 0.0))
    # tolerate rounding-level wiggles of a constant force
    monotone = bool(np.all(np.diff(mag) <= 4.0 * np.finfo(float).eps * mag[:-1]))
    peak = mag.max()
    vanishing = bool(peak > 0.0 and mag[-1] <= vanishing_threshold * peak)
    return PhysicalityReport(attractive, monotone, vanishing, radii, force)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_tabulated_csv(pot: Tabulated, path=None, slopes: bool = False) -> str:
    """Serialize a tabulated potential as ``r,U`` CSV; returns the text.

    With ``slopes`` a third ``dU`` column keeps the knot slopes, so a
    reloaded table interpolates exactly like the original.
    """
    buf = io.StringIO()
    if slopes:
        buf.write("r,U,dU\n")
        for r, u, d in zip(pot.r_grid, pot.u_values, pot.slopes):
            buf.write(f"{_fmt(r)},{_fmt(u)},{_fmt(d)}\n")
    else:
        buf.write("r,U\n")
        for r, u in zip(pot.r_grid, pot.u_values):
            buf.write(f"{_fmt(r)},{_fmt(u)}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_tabulated_csv(source, extrapolation=Extrapolation.ERROR) -> Tabulated:
    """Parse an ``r,U`` or ``r,U,dU`` CSV (path or text). Non-monotone ``r`` is rejected.

    Without a ``dU`` column the knot slopes are estimated by PCHIP.
    """
    text = Path(source).read_text() if isinstance(source, Path) or "\n" not in str(source) else source
    rows = list(csv.reader(io.StringIO(text)))
    header = [c.strip() for c in rows[0]] if rows else []
    if header not in (["r", "U"], ["r", "U", "dU"]):
        raise DomainError("tabulated potential CSV must start with the header 'r,U' or 'r,U,dU'")
    width = len(header)
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:] if row])
    except ValueError as exc:
        raise DomainError(f"malformed tabulated potential row: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != width:
        raise DomainError(f"every tabulated potential row needs {width} columns")
    if data.shape[0] < 4:
        raise DomainError("tabulated potential CSV needs at least 4 rows")
    if np.any(np.diff(data[:, 0]) <= 0.0):
        raise DomainError("r column must be strictly increasing")
    if width == 3:
        return Tabulated(data[:, 0], data[:, 1], extrapolation=extrapolation, slopes=data[:, 2])
    return Tabulated(data[:, 0], data[:, 1], extrapolation=extrapolation)
