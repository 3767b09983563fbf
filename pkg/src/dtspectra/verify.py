"""End-to-end verification suites (used by ``dtspectra verify`` and the tests).

Each check returns a :class:`CheckResult` holding the measured error
metrics, the tolerance it was held to and the wall time.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .catalog import CatalogEntry, catalog_energy, catalog_radius
from .core import Coulomb, DiscreteParams, Extrapolation, OrbitSolution, Polynomial
from .dynamics import check_closure, circular_orbit_state, simulate
from .inverse import (
    HydrogenLaw,
    LinearLaw,
    PowerLaw,
    beta_epsilon_conversions,
    default_radius_grid,
    hydrogen_potential,
    oscillator_orbit_radius,
    oscillator_potential,
    radius_profile,
    reconstruct_potential,
)
from .spectrum import SolverOptions, compute_spectrum

GENERIC = SolverOptions(closed_form=False)
GRID_VALUES = (0.5, 1.0, 7.3)
POLY_SIGMAS = (-1.0, -0.5, 0.5, 2.0 / 3.0, 1.5)


@dataclass
class CheckResult:
    name: str
    passed: bool
    metric: float
    tolerance: float
    detail: str = ""
    elapsed: float = 0.0
    orbits: list = field(default_factory=list, repr=False)
    extra: dict = field(default_factory=dict, repr=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.metric:.3e} (tol {self.tolerance:.1e}, {self.elapsed:.2f}s) {self.detail}"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        result.elapsed = time.perf_counter() - t0
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _orbits(table):
    return [(table.params, table.potential, row) for row in table.rows]


@_timed
def hydrogen_spectrum(gamma=13.6, n_max=50, tol=1e-8) -> CheckResult:
    """Levels of the reconstructed hydrogen potential equal -gamma/n^2."""
    params = DiscreteParams.from_xi(1.0)
    betas = [beta_epsilon_conversions("hydrogen", 1.0, gamma, params.xi).derived, 1.0]
    worst = 0.0
    orbits = []
    skipped = {}
    for beta in betas:
        pot = hydrogen_potential(gamma, beta, params.xi)
        table = compute_spectrum(pot, params, 1, n_max, skip_no_orbit=True)
        expected = -gamma / table.n.astype(float) ** 2
        worst = max(worst, float(np.max(np.abs(table.energies / expected - 1.0))))
        orbits += _orbits(table)
        skipped[beta] = table.skipped
    detail = "; ".join(f"beta={b:.4g}: {len(s)} inadmissible n" for b, s in skipped.items())
    return CheckResult("hydrogen spectrum -gamma/n^2", worst <= tol, worst, tol, detail, orbits=orbits)


@_timed
def oscillator_spectrum(alpha=1.0, n_max=50, tol=1e-8) -> CheckResult:
    """Reconstructed oscillator levels are alpha*n; beta>0 keeps the spacing."""
    params = DiscreteParams.from_xi(1.0)
    table = compute_spectrum(oscillator_potential(alpha, 0.0, params.xi), params, 1, n_max)
    n = table.n.astype(float)
    worst = float(np.max(np.abs(table.energies / (alpha * n) - 1.0)))
    orbits = _orbits(table)
    offsets = {}
    for beta in (0.5, 2.0):
        t = compute_spectrum(oscillator_potential(alpha, beta, params.xi), params, 1, n_max)
        worst = max(worst, float(np.max(np.abs(np.diff(t.energies) - alpha))))
        offsets[beta] = float(np.max(np.abs(t.energies - alpha * t.n)))
        orbits += _orbits(t)
    detail = "offsets E_n - alpha n: " + ", ".join(f"beta={b}: {o:.1e}" for b, o in offsets.items())
    return CheckResult("oscillator spectrum alpha*n", worst <= tol, worst, tol, detail, orbits=orbits,
                       extra={"offsets": offsets})


def catalog_entries(alpha):
    yield CatalogEntry("coulomb", alpha)
    yield CatalogEntry("linear", alpha)
    yield CatalogEntry("logarithmic", alpha)
    for s in POLY_SIGMAS:
        yield CatalogEntry("polynomial", math.copysign(alpha, s), s)


@_timed
def catalog_equivalence(n_max=20, tol=1e-10) -> CheckResult:
    """Generic bracketing solver versus the four closed forms."""
    worst = 0.0
    orbits = []
    count = 0
    for alpha in GRID_VALUES:
        for xi in GRID_VALUES:
            params = DiscreteParams.from_xi(xi)
            for entry in catalog_entries(alpha):
                table = compute_spectrum(entry.potential(), params, 1, n_max, GENERIC)
                for row in table.rows:
                    r_ref = catalog_radius(entry, row.n, params.xi)
                    e_ref = catalog_energy(entry, row.n, params.xi)
                    worst = max(worst, abs(row.r_n / r_ref - 1.0), abs(row.e_n / e_ref - 1.0))
                    count += 1
                orbits += _orbits(table)
    return CheckResult("catalog closed forms vs generic solver", worst <= tol, worst, tol,
                       f"{count} orbits", orbits=orbits)


@_timed
def coulomb_slope(n_max=64, tol=1e-6) -> CheckResult:
    """Least-squares log-log slope of the Coulomb levels is -2/3."""
    params = DiscreteParams.from_xi(1.0)
    table = compute_spectrum(Coulomb(1.0), params, 1, n_max, GENERIC)
    slope = np.polyfit(np.log(table.n), np.log(np.abs(table.energies)), 1)[0]
    err = abs(slope + 2.0 / 3.0)
    return CheckResult("Coulomb log-log slope -2/3", err <= tol, err, tol, f"slope={slope:.12f}",
                       orbits=_orbits(table), extra={"slope": float(slope)})


@_timed
def two_thirds_linearity(n_max=50, tol=1e-10) -> CheckResult:
    """Polynomial potential with sigma=2/3 has E_n proportional to n."""
    params = DiscreteParams.from_xi(1.0)
    table = compute_spectrum(Polynomial(1.0, 2.0 / 3.0), params, 1, n_max, GENERIC)
    ratio = table.energies / table.n
    err = float(np.max(np.abs(ratio / ratio[0] - 1.0)))
    return CheckResult("sigma=2/3 linear spectrum", err <= tol, err, tol,
                       f"E_n/n={ratio[0]:.12g}", orbits=_orbits(table))


ROUND_TRIP_LAWS = (
    ("hydrogen", HydrogenLaw(13.6), 1.0),
    ("linear", LinearLaw(1.0), 0.5),
    ("coulomb-induced", PowerLaw(-0.5, -2.0 / 3.0), 1.0),
)


@_timed
def inverse_round_trip(n_lo=2, n_hi=20, points=2048, tol=1e-6) -> CheckResult:
    """Spectrum -> tabulated potential -> spectrum reproduces the law."""
    params = DiscreteParams.from_xi(1.0)
    worst = 0.0
    per_law = {}
    for label, law, eps in ROUND_TRIP_LAWS:
        profile = radius_profile(law, params, eps)
        grid = default_radius_grid(profile, n_hi + 4, points)
        pot = reconstruct_potential(law, params, eps, grid, extrapolation=Extrapolation.CLAMP_SLOPE)
        table = compute_spectrum(pot, params, n_lo, n_hi)
        expected = np.array([law.energy(float(n)) for n in table.n])
        err = float(np.max(np.abs(table.energies / expected - 1.0)))
        per_law[label] = err
        worst = max(worst, err)
    detail = ", ".join(f"{k}: {v:.1e}" for k, v in per_law.items())
    return CheckResult("inverse round trip", worst <= tol, worst, tol, detail, extra=per_law)


def _reconstruction_error(law, params, eps, closed, n_max=64, points=512):
    profile = radius_profile(law, params, eps)
    grid = default_radius_grid(profile, n_max, points)
    pot = reconstruct_potential(law, params, eps, grid)
    ref = closed.value(grid)
    return float(np.max(np.abs(pot.u_values / ref - 1.0)))


@_timed
def closed_form_reconstruction(tol=1e-8, convention="derived") -> CheckResult:
    """512-point tabulated reconstruction versus the closed-form potentials."""
    params = DiscreteParams.from_xi(1.0)
    errs = {}
    for gamma, eps in ((13.6, 1.0), (1.0, 1.0)):
        beta = getattr(beta_epsilon_conversions("hydrogen", eps, gamma, params.xi), convention)
        errs[f"hydrogen gamma={gamma}"] = _reconstruction_error(
            HydrogenLaw(gamma), params, eps, hydrogen_potential(gamma, beta, params.xi))
    for eps in (0.5, 0.5 + params.xi):
        beta = getattr(beta_epsilon_conversions("oscillator", eps, 1.0, params.xi), convention)
        errs[f"oscillator beta={beta:g}"] = _reconstruction_error(
            LinearLaw(1.0), params, eps, oscillator_potential(1.0, beta, params.xi))
    worst = max(errs.values())
    detail = ", ".join(f"{k}: {v:.1e}" for k, v in errs.items())
    return CheckResult("closed-form vs tabulated reconstruction", worst <= tol, worst, tol, detail, extra=errs)


@_timed
def closure(orbits, phi_tol=1e-12, r_tol=1e-12) -> CheckResult:
    """Circular start + n steps closes the orbit (phi tol x n, r/p_r tol x r_n)."""
    worst = 0.0
    failures = 0
    for params, pot, orbit in orbits:
        traj = simulate(circular_orbit_state(orbit, params), pot, params, orbit.n)
        rep = check_closure(traj, orbit.n, phi_tol * orbit.n,
                            r_tol=r_tol * orbit.r_n, p_r_tol=r_tol * orbit.r_n)
        # normalized so that pass <=> metric <= tolerance when phi_tol == r_tol
        worst = max(worst, rep.phi_residual / orbit.n, rep.r_residual / orbit.r_n, rep.p_r_residual / orbit.r_n)
        failures += not rep.passed
    return CheckResult("exact discrete closure", failures == 0, worst, r_tol,
                       f"{len(orbits)} orbits, {failures} failed")


def closure_table(n_max=100):
    """Closure residuals for n = 1..n_max on a few reference potentials."""
    params = DiscreteParams.from_xi(1.0)
    pots = [Coulomb(1.0), Polynomial(1.0, 2.0 / 3.0),
            hydrogen_potential(13.6, beta_epsilon_conversions("hydrogen", 1.0, 13.6, 1.0).derived, 1.0),
            oscillator_potential(1.0, 0.5, 1.0)]
    rows = []
    for pot in pots:
        table = compute_spectrum(pot, params, 1, n_max)
        for row in table.rows:
            traj = simulate(circular_orbit_state(row, params), pot, params, row.n)
            rep = check_closure(traj, row.n, 1e-12 * row.n, r_tol=1e-12 * row.r_n, p_r_tol=1e-12 * row.r_n)
            rows.append((pot.name, row.n, rep))
    return rows


@_timed
def beta_convention(tol=1e-8) -> CheckResult:
    """Which hydrogen beta(epsilon) relation makes the reconstruction match."""
    params = DiscreteParams.from_xi(1.0)
    outcomes = {"printed": [], "derived": []}
    for gamma in (13.6, 1.0):
        for eps in (1.0, 0.3, 5.0):
            conv = beta_epsilon_conversions("hydrogen", eps, gamma, params.xi)
            for name in outcomes:
                closed = hydrogen_potential(gamma, getattr(conv, name), params.xi)
                outcomes[name].append(_reconstruction_error(HydrogenLaw(gamma), params, eps, closed, n_max=32))
    ok = {name: max(errs) <= tol for name, errs in outcomes.items()}
    winners = [name for name, good in ok.items() if good]
    verified = winners[0] if len(winners) == 1 else None
    detail = f"verified convention: {verified}; " + ", ".join(
        f"{k} worst={max(v):.1e}" for k, v in outcomes.items())
    metric = min(max(v) for v in outcomes.values())
    return CheckResult("hydrogen beta-epsilon convention", verified is not None, metric, tol, detail,
                       extra={"verified": verified, "worst": {k: max(v) for k, v in outcomes.items()}})


def cubic_root_oracle(r, alpha, beta, xi):
    """Real root of ``alpha n^3/(2 xi) + beta n - r^2`` via companion-matrix eigenvalues."""
    roots = np.roots([alpha / (2.0 * xi), 0.0, beta, -r * r])
    real = roots[np.abs(roots.imag) <= 1e-9 * np.abs(roots)].real
    n = float(real[np.argmax(real)])
    # one Newton step to polish the eigenvalue estimate
    f = alpha * n**3 / (2.0 * xi) + beta * n - r * r
    return n - f / (1.5 * alpha * n * n / xi + beta)


@_timed
def oscillator_cubic_identity(samples=256, tol=1e-10) -> CheckResult:
    """Radical-form oscillator potential equals alpha n(r) - xi r^2/(2 n(r)^2)."""
    worst = 0.0
    for alpha, beta, xi in ((1.0, 0.5, 1.0), (1.0, 2.0, 1.0), (2.5, 0.7, 3.0)):
        pot = oscillator_potential(alpha, beta, xi)
        radii = np.geomspace(oscillator_orbit_radius(1.0, alpha, beta, xi),
                             oscillator_orbit_radius(50.0, alpha, beta, xi), samples)
        got = pot.value(radii)
        n = np.array([cubic_root_oracle(r, alpha, beta, xi) for r in radii])
        ref = alpha * n - xi * radii**2 / (2.0 * n * n)
        worst = max(worst, float(np.max(np.abs(got / ref - 1.0))))
    return CheckResult("oscillator cubic identity", worst <= tol, worst, tol, f"{samples} radii x 3 parameter sets")


SUITES = {
    "spectra": ("hydrogen", "oscillator", "sigma"),
    "oracle": ("catalog", "slope"),
    "round-trip": ("round-trip",),
    "reconstruction": ("reconstruction",),
    "closure": ("closure",),
    "beta-convention": ("beta",),
    "cubic": ("cubic",),
}


def run(suite: str = "all", n_max: int | None = None) -> list[CheckResult]:
    """Run a named suite (or everything) and return one result per check."""
    wanted = set(k for v in SUITES.values() for k in v) if suite == "all" else set(SUITES[suite])
    results = []
    orbits: list[tuple[DiscreteParams, object, OrbitSolution]] = []
    producers = {
        "hydrogen": hydrogen_spectrum,
        "oscillator": oscillator_spectrum,
        "catalog": catalog_equivalence,
        "slope": coulomb_slope,
        "sigma": two_thirds_linearity,
    }
    need_orbits = "closure" in wanted
    for key, fn in producers.items():
        if key in wanted or need_orbits:
            res = fn()
            orbits += res.orbits
            if key in wanted:
                results.append(res)
    if "round-trip" in wanted:
        results.append(inverse_round_trip())
    if "beta" in wanted or "reconstruction" in wanted:
        beta = beta_convention()
        if "beta" in wanted:
            results.append(beta)
        if "reconstruction" in wanted:
            convention = beta.extra["verified"] or "derived"
            results.append(closed_form_reconstruction(convention=convention))
    if "closure" in wanted:
        if n_max is not None:
            results.append(_closure_scan(n_max))
        else:
            results.append(closure(orbits))
    if "cubic" in wanted:
        results.append(oscillator_cubic_identity())
    return results


@_timed
def _closure_scan(n_max):
    rows = closure_table(n_max)
    failures = sum(not rep.passed for _, _, rep in rows)
    worst = max(max(rep.phi_residual, rep.r_residual, rep.p_r_residual) for _, _, rep in rows)
    lines = ["potential,n,phi_residual,r_residual,p_r_residual,passed"]
    lines += [f"{name},{n},{rep.phi_residual:.3e},{rep.r_residual:.3e},{rep.p_r_residual:.3e},{rep.passed}"
              for name, n, rep in rows]
    return CheckResult(f"closure scan n=1..{n_max}", failures == 0, worst, 1e-12,
                       f"{len(rows)} orbits, {failures} failed", extra={"table": "\n".join(lines)})
