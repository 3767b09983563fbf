import json
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dtspectra import (
    AmbiguityError,
    BracketError,
    CatalogEntry,
    Coulomb,
    DiscreteParams,
    DomainError,
    Extrapolation,
    HydrogenReconstructed,
    Linear,
    Logarithmic,
    OscillatorReconstructed,
    Polynomial,
    SolverOptions,
    Tabulated,
    beta_epsilon_conversions,
    catalog_energy,
    catalog_radius,
    check_closure,
    circular_orbit_state,
    compute_spectrum,
    hydrogen_potential,
    orbit_energy,
    simulate,
    solve_orbit_radius,
)
from dtspectra.spectrum import balance_residual, energy_scale

GENERIC = SolverOptions(closed_form=False)


@pytest.fixture
def xi1():
    return DiscreteParams.from_xi(1.0)


@pytest.mark.parametrize("n, pot, expected", [
    (1, Coulomb(1.0), 1.0),
    (8, Coulomb(1.0), 4.0),
    (2, Linear(1.0), 4.0),
])
@pytest.mark.parametrize("opts", [SolverOptions(), GENERIC], ids=["closed", "generic"])
def test_solve_examples(xi1, n, pot, expected, opts):
    assert solve_orbit_radius(n, pot, xi1, opts) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("r, pot, expected", [
    (1.0, Coulomb(1.0), -0.5),
    (1.0, Logarithmic(1.0), 0.5),
    (1.0, Linear(0.0), 0.0),
])
def test_orbit_energy_examples(r, pot, expected):
    assert orbit_energy(r, pot) == expected


def test_orbit_energy_rejects_nonpositive_radius():
    with pytest.raises(DomainError):
        orbit_energy(0.0, Coulomb(1.0))


def test_hydrogen_spectrum_first_levels(xi1):
    beta = beta_epsilon_conversions("hydrogen", 1.0, 13.6, xi1.xi).derived
    table = compute_spectrum(hydrogen_potential(13.6, beta, xi1.xi), xi1, 1, 5)
    np.testing.assert_allclose(table.energies, -13.6 / np.arange(1, 6) ** 2, rtol=1e-12)


def test_oscillator_first_levels(xi1):
    table = compute_spectrum(OscillatorReconstructed(1.0, 0.0, xi1.xi), xi1, 1, 5)
    np.testing.assert_allclose(table.energies, np.arange(1, 6), rtol=1e-12)


def test_two_thirds_polynomial_first_levels(xi1):
    table = compute_spectrum(Polynomial(1.0, 2 / 3), xi1, 1, 5)
    ratio = table.energies / table.n
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-13)


def test_table_rows_sorted_without_gaps(xi1):
    table = compute_spectrum(Coulomb(1.0), xi1, 3, 9)
    assert list(table.n) == list(range(3, 10))


ENTRIES = st.one_of(
    st.builds(CatalogEntry, st.sampled_from(["coulomb", "linear", "logarithmic"]), st.floats(0.1, 10.0)),
    st.floats(0.1, 10.0).flatmap(lambda a: st.builds(
        lambda s: CatalogEntry("polynomial", math.copysign(a, s), s),
        st.floats(-1.9, 1.9).filter(lambda s: abs(s) > 0.05))),
)


@given(ENTRIES, st.integers(1, 40), st.floats(0.1, 20.0))
def test_residual_bound(entry, n, xi):
    params = DiscreteParams.from_xi(xi)
    assume(2.0**-55 < catalog_radius(entry, n, params.xi) < 2.0**55)
    pot = entry.potential()
    for opts in (SolverOptions(), GENERIC):
        r = solve_orbit_radius(n, pot, params, opts)
        g, scale = balance_residual(r, n, pot, params.xi)
        assert abs(g) <= 1e-12 * scale


@given(ENTRIES, st.integers(1, 20), st.floats(0.2, 10.0))
def test_generic_solver_matches_closed_form(entry, n, xi):
    params = DiscreteParams.from_xi(xi)
    assume(2.0**-55 < catalog_radius(entry, n, params.xi) < 2.0**55)
    r = solve_orbit_radius(n, entry.potential(), params, GENERIC)
    assert r == pytest.approx(catalog_radius(entry, n, params.xi), rel=1e-10)
    pot = entry.potential()
    e = orbit_energy(r, pot)
    ref = catalog_energy(entry, n, params.xi)
    # logarithmic levels can cross zero, so the error is relativized by |E| + |U| + 1
    assert abs(e - ref) <= 1e-10 * energy_scale(ref, pot.value(r))


@given(st.floats(0.2, 5.0), st.floats(-1.5, 1.5).filter(lambda s: abs(s) > 0.05), st.floats(0.1, 5.0))
def test_spectrum_scaling_in_xi(alpha, sigma, tau):
    pot = Polynomial(math.copysign(alpha, sigma), sigma)
    a = compute_spectrum(pot, DiscreteParams(tau), 1, 10, GENERIC)
    b = compute_spectrum(pot, DiscreteParams(2 * tau), 1, 10, GENERIC)
    factor = 0.25 ** (-sigma / (2 - sigma))
    np.testing.assert_allclose(b.energies, a.energies * factor, rtol=1e-10)


@pytest.mark.parametrize("pot", [Coulomb(1.0), Logarithmic(2.0), Polynomial(1.0, 0.5),
                                 OscillatorReconstructed(1.0, 0.7, 1.0)], ids=lambda p: p.name)
def test_rows_close_under_dynamics(pot):
    params = DiscreteParams(0.8, 1.7)
    for row in compute_spectrum(pot, params, 1, 25).rows:
        traj = simulate(circular_orbit_state(row, params), pot, params, row.n)
        assert check_closure(traj, row.n, 1e-9 * row.r_n).passed


def test_tabulated_potential_spectrum(xi1):
    r = np.geomspace(0.05, 50.0, 2000)
    pot = Tabulated(r, -1.0 / r, slopes=1.0 / r**2)
    got = compute_spectrum(pot, xi1, 1, 10).energies
    ref = compute_spectrum(Coulomb(1.0), xi1, 1, 10).energies
    # cubic Hermite derivative error ~h^3 on this grid
    np.testing.assert_allclose(got, ref, rtol=3e-8)


def test_bracket_error_when_no_orbit(xi1):
    with pytest.raises(BracketError):
        solve_orbit_radius(1, Coulomb(-1.0), xi1)


def test_bracket_error_beyond_expansion_cap():
    # r_40 = (1600 * 3.75 / 0.1)^8 lies far beyond 2^60
    params = DiscreteParams.from_xi(0.1)
    with pytest.raises(BracketError):
        solve_orbit_radius(40, Polynomial(2.0, 1.875), params, GENERIC)


def test_bracket_error_outside_table(xi1):
    r = np.linspace(10.0, 20.0, 16)
    with pytest.raises(BracketError):
        solve_orbit_radius(1, Tabulated(r, -1.0 / r), xi1)


def test_ambiguity_error_for_three_roots(xi1):
    # U' = r - (r - 2.3)(r - 2.9)(r - 3.5) / 2 balances xi r at three radii inside (2, 4)
    cubic = np.polynomial.Polynomial.fromroots([2.3, 2.9, 3.5]) * 0.5
    du = np.polynomial.Polynomial([0.0, 1.0]) - cubic
    r = np.geomspace(0.1, 10.0, 1000)
    pot = Tabulated(r, du.integ()(r), slopes=du(r))
    with pytest.raises(AmbiguityError):
        solve_orbit_radius(1, pot, xi1, GENERIC)


def test_hydrogen_skips_inadmissible_levels(xi1):
    pot = HydrogenReconstructed(13.6, 1.0, xi1.xi)
    with pytest.raises(BracketError):
        compute_spectrum(pot, xi1, 1, 5)
    table = compute_spectrum(pot, xi1, 1, 12, skip_no_orbit=True)
    assert table.skipped == tuple(range(1, 4))
    assert table.n[0] == 4 > pot.min_orbit_index(xi1.xi)
    np.testing.assert_allclose(table.energies, -13.6 / table.n**2, rtol=1e-12)


def test_solver_errors_name_the_level(xi1):
    with pytest.raises(BracketError, match="n=1"):
        compute_spectrum(Coulomb(-1.0), xi1, 1, 3)


def test_bad_index(xi1):
    with pytest.raises(DomainError):
        solve_orbit_radius(0, Coulomb(1.0), xi1)
    with pytest.raises(DomainError):
        compute_spectrum(Coulomb(1.0), xi1, 3, 2)


def test_energy_scale_handles_zero_crossing():
    assert energy_scale(0.0, 0.0) == 1.0


def test_exports(xi1, tmp_path):
    table = compute_spectrum(Coulomb(1.0), xi1, 1, 3)
    text = table.to_csv(tmp_path / "s.csv")
    lines = text.splitlines()
    assert lines[0] == "n,r_n,E_n,p_phi"
    n, r, e, p = lines[2].split(",")
    assert int(n) == 2 and float(r) == table.rows[1].r_n and float(e) == table.rows[1].e_n
    data = json.loads(table.to_json())
    assert data["potential"] == {"kind": "coulomb", "alpha": 1.0}
    assert data["params"]["xi"] == xi1.xi
    assert [row["n"] for row in data["rows"]] == [1, 2, 3]


def test_output_is_deterministic(xi1):
    a = compute_spectrum(Logarithmic(1.0), xi1, 1, 20, GENERIC).to_csv()
    b = compute_spectrum(Logarithmic(1.0), xi1, 1, 20, GENERIC).to_csv()
    assert a == b
