"""Closed-form orbit radii and energies for the four catalog potentials.

Kept apart from the numeric solver so that each can check the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Coulomb, Linear, Logarithmic, Polynomial, PotentialModel
from .errors import DomainError

KINDS = ("coulomb", "linear", "logarithmic", "polynomial")


@dataclass(frozen=True)
class CatalogEntry:
    """One catalog potential: ``kind`` plus ``alpha`` (and ``sigma`` for polynomial)."""

    kind: str
    alpha: float
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown catalog kind {self.kind!r}")
        if self.kind == "polynomial":
            if self.sigma is None:
                raise DomainError("polynomial entry needs sigma")
            # reuse the potential's own domain validation
            Polynomial(self.alpha, self.sigma)
        elif not self.alpha > 0.0:
            raise DomainError(f"{self.kind} entry needs alpha > 0 (attraction), got {self.alpha!r}")

    def potential(self) -> PotentialModel:
        if self.kind == "coulomb":
            return Coulomb(self.alpha)
        if self.kind == "linear":
            return Linear(self.alpha)
        if self.kind == "logarithmic":
            return Logarithmic(self.alpha)
        return Polynomial(self.alpha, self.sigma)

    @classmethod
    def from_potential(cls, pot: PotentialModel) -> CatalogEntry | None:
        """Entry matching ``pot``, or ``None`` when the variant has no closed form."""
        if isinstance(pot, Polynomial):
            return cls("polynomial", pot.alpha, pot.sigma)
        for kind, typ in (("coulomb", Coulomb), ("linear", Linear), ("logarithmic", Logarithmic)):
            if isinstance(pot, typ):
                if pot.alpha > 0.0:
                    return cls(kind, pot.alpha)
                return None
        return None


def _check(n, xi):
    if int(n) != n or n < 1:
        raise DomainError(f"orbit index must be a positive integer, got {n!r}")
    if not xi > 0.0:
        raise DomainError(f"xi must be positive, got {xi!r}")


def catalog_radius(entry: CatalogEntry, n: int, xi: float) -> float:
    """Radius of the ``n``-th circular orbit."""
    _check(n, xi)
    a = entry.alpha
    if entry.kind == "coulomb":
        return n ** (2.0 / 3.0) * (a / xi) ** (1.0 / 3.0)
    if entry.kind == "linear":
        return n * n * a / xi
    if entry.kind == "logarithmic":
        return n * math.sqrt(a / xi)
    s = entry.sigma
    return (n * n * a * s / xi) ** (1.0 / (2.0 - s))


def catalog_energy(entry: CatalogEntry, n: int, xi: float) -> float:
    """Energy of the ``n``-th circular orbit."""
    _check(n, xi)
    a = entry.alpha
    if entry.kind == "coulomb":
        return -0.5 * n ** (-2.0 / 3.0) * (a * a * xi) ** (1.0 / 3.0)
    if entry.kind == "linear":
        return 3.0 * n * n * a * a / (2.0 * xi)
    if entry.kind == "logarithmic":
        return a * (0.5 + math.log(n * math.sqrt(a / xi)))
    s = entry.sigma
    return 0.5 * a * (2.0 + s) * (n * n * a * s / xi) ** (s / (2.0 - s))
