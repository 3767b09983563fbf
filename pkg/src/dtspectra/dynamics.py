"""Discrete-time evolution in a central potential.

One step advances every phase variable by ``tau`` times its Poisson
bracket with the Hamiltonian, all evaluated at the pre-step state::

    r'     = r + tau p_r / m
    p_r'   = p_r + tau (p_phi^2 / (m r^3) - U'(r))
    phi'   = phi + tau p_phi / (m r^2)
    p_phi' = p_phi
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from .core import DiscreteParams, OrbitSolution, PhaseState, PotentialModel, angular_momentum
from .errors import CollapseError, DomainError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States sampled at ``t = 0, tau, 2 tau, ...``; ``p_phi`` is shared by all."""

    params: DiscreteParams
    potential: PotentialModel
    r: np.ndarray
    p_r: np.ndarray
    phi: np.ndarray
    p_phi: float

    def __post_init__(self):
        for name in ("r", "p_r", "phi"):
            getattr(self, name).setflags(write=False)

    def __len__(self):
        return self.r.shape[0]

    def state(self, k: int) -> PhaseState:
        return PhaseState(float(self.r[k]), float(self.p_r[k]), float(self.phi[k]), self.p_phi)

    @property
    def states(self) -> list[PhaseState]:
        return [self.state(k) for k in range(len(self))]

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) * self.params.tau

    def cartesian(self) -> tuple[np.ndarray, np.ndarray]:
        return self.r * np.cos(self.phi), self.r * np.sin(self.phi)

    def to_csv(self, path=None) -> str:
        x, y = self.cartesian()
        buf = io.StringIO()
        buf.write("k,t,r,p_r,phi,p_phi,x,y\n")
        pphi = repr(float(self.p_phi))
        for k, t in enumerate(self.times):
            buf.write(
                f"{k},{float(t)!r},{float(self.r[k])!r},{float(self.p_r[k])!r},"
                f"{float(self.phi[k])!r},{pphi},{float(x[k])!r},{float(y[k])!r}\n"
            )
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def simulate(s0: PhaseState, pot: PotentialModel, params: DiscreteParams, steps: int) -> Trajectory:
    """Iterate the discrete update ``steps`` times starting from ``s0``.

    Raises:
        DomainError: ``s0.r <= 0`` or ``U'`` undefined at a visited radius.
        CollapseError: an update drove ``r`` to zero or below.
    """
    if int(steps) != steps or steps < 0:
        raise DomainError(f"steps must be a nonnegative integer, got {steps!r}")
    if not s0.r > 0.0:
        raise DomainError(f"stepping needs r > 0, got r={s0.r!r}")
    steps = int(steps)
    out = np.empty((steps + 1, 3))
    status, k = K.simulate(
        float(s0.r), float(s0.p_r), float(s0.phi), float(s0.p_phi),
        params.tau, params.mass, steps, *pot.kernel_args(), out,
    )
    if status == K.STATUS_DOMAIN:
        raise DomainError(f"step {k}: {pot.name} derivative undefined at r={float(out[k, 0])!r}")
    if status == K.STATUS_COLLAPSE:
        raise CollapseError(f"step {k}: radius crossed the origin (r={float(out[k, 0])!r} before the step)", step=k)
    return Trajectory(params, pot, out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(), float(s0.p_phi))


def step(s: PhaseState, pot: PotentialModel, params: DiscreteParams) -> PhaseState:
    """One simultaneous update of ``(r, p_r, phi, p_phi)``."""
    return simulate(s, pot, params, 1).state(1)


def circular_orbit_state(orbit: OrbitSolution, params: DiscreteParams) -> PhaseState:
    """Phase point on the ``n``-th circular orbit at ``phi = 0``."""
    return PhaseState(orbit.r_n, 0.0, 0.0, angular_momentum(orbit.n, orbit.r_n, params))


@dataclass(frozen=True)
class ClosureReport:
    phi_residual: float
    r_residual: float
    p_r_residual: float
    phi_ok: bool
    r_ok: bool
    p_r_ok: bool

    @property
    def passed(self) -> bool:
        return self.phi_ok and self.r_ok and self.p_r_ok


def check_closure(
    traj: Trajectory,
    n: int,
    tol: float,
    *,
    phi_tol: float | None = None,
    r_tol: float | None = None,
    p_r_tol: float | None = None,
) -> ClosureReport:
    """Check that the first ``n`` steps trace exactly one circular revolution.

    Residuals: ``|phi_n - phi_0 - 2 pi|``, ``max_k |r_k - r_0|`` and
    ``max_k |p_r_k|`` over ``k = 0..n``. Per-component tolerances default
    to ``tol``.
    """
    if len(traj) < n + 1:
        raise DomainError(f"trajectory has {len(traj)} states, closure at n={n} needs {n + 1}")
    phi_res = abs(traj.phi[n] - traj.phi[0] - TWO_PI)
    r_res = float(np.max(np.abs(traj.r[: n + 1] - traj.r[0])))
    pr_res = float(np.max(np.abs(traj.p_r[: n + 1])))
    phi_tol = tol if phi_tol is None else phi_tol
    r_tol = tol if r_tol is None else r_tol
    p_r_tol = tol if p_r_tol is None else p_r_tol
    return ClosureReport(
        float(phi_res), r_res, pr_res,
        bool(phi_res <= phi_tol), bool(r_res <= r_tol), bool(pr_res <= p_r_tol),
    )
