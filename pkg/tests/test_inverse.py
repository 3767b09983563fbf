import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from dtspectra import (
    Coulomb,
    DiscreteParams,
    DomainError,
    HydrogenLaw,
    LinearLaw,
    MonotonicityError,
    NegativeRadicandError,
    PowerLaw,
    RangeError,
    ReconstructionCheckError,
    TabulatedLaw,
    beta_epsilon_conversions,
    compute_spectrum,
    epsilon_from_beta,
    hydrogen_orbit_radius,
    hydrogen_potential,
    invert_radius,
    oscillator_orbit_index,
    oscillator_orbit_radius,
    oscillator_potential,
    radius_profile,
    read_law_csv,
    reconstruct_potential,
)
from dtspectra.interp import hermite_integral, pchip_slopes
from dtspectra.inverse import default_radius_grid, reconstruction_sidecar, write_sidecar
from dtspectra.verify import cubic_root_oracle

COULOMB_LAW = PowerLaw(-0.5, -2.0 / 3.0)


@pytest.fixture
def xi1():
    return DiscreteParams.from_xi(1.0)


# --- laws -------------------------------------------------------------------

@pytest.mark.parametrize("law", [HydrogenLaw(13.6), LinearLaw(2.0), COULOMB_LAW, PowerLaw(1.0, -1.0)],
                         ids=lambda s: s.name)
def test_analytic_integrals_match_quadrature(law):
    for n in (1.0, 1.5, 7.0, 30.25):
        ref, _ = integrate.quad(law.energy, 1.0, n, epsabs=1e-14, epsrel=1e-13)
        assert law.integral(n) == pytest.approx(ref, rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("law", [HydrogenLaw(13.6), LinearLaw(2.0), COULOMB_LAW], ids=lambda s: s.name)
def test_energy_derivative_matches_difference(law):
    for n in (1.5, 4.0, 17.0):
        h = 1e-6 * n
        fd = (law.energy(n + h) - law.energy(n - h)) / (2 * h)
        assert law.energy_derivative(n) == pytest.approx(fd, rel=1e-7)


def test_laws_reject_n_below_one():
    with pytest.raises(DomainError):
        HydrogenLaw(1.0).energy(0.5)


def test_tabulated_law_interpolates_levels():
    e = -13.6 / np.arange(1, 11) ** 2
    law = TabulatedLaw(e)
    for k in range(1, 11):
        assert law.energy(float(k)) == e[k - 1]
    with pytest.raises(DomainError):
        law.energy(10.5)


def test_tabulated_law_integral_matches_exact_hermite_integral():
    e = -13.6 / np.arange(1, 21) ** 2
    law = TabulatedLaw(e)
    n = np.arange(1.0, 21.0)
    d = pchip_slopes(n, e)
    for upper in (1.0, 2.0, 3.7, 12.0, 20.0):
        exact = hermite_integral(n, e, d, 1.0, upper)
        assert law.integral(upper) == pytest.approx(exact, abs=1e-12 * (1 + abs(e[0])))


def test_tabulated_law_integral_on_tiny_partial_pieces():
    e = -13.6 / np.arange(1, 21) ** 2
    law = TabulatedLaw(e)
    n = np.arange(1.0, 21.0)
    d = pchip_slopes(n, e)
    for upper in (np.nextafter(1.0, 2.0), 1.0 + 1e-9, 1.0 + 1e-6, 7.0 + 5e-7, np.nextafter(20.0, 0.0)):
        value = law.integral(upper)
        assert math.isfinite(value)
        assert value == pytest.approx(hermite_integral(n, e, d, 1.0, upper), abs=1e-12 * (1 + abs(e[0])))


def test_tabulated_law_close_to_analytic_law():
    law = TabulatedLaw(1.7 * np.arange(1, 13))
    assert law.integral(9.5) == pytest.approx(LinearLaw(1.7).integral(9.5), rel=1e-12)


def test_tabulated_law_needs_four_levels():
    with pytest.raises(DomainError):
        TabulatedLaw(np.array([1.0, 2.0, 3.0]))


def test_law_csv(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("n,E\n1,-1\n2,-0.25\n3,-0.1111111111111111\n4,-0.0625\n")
    law = read_law_csv(path)
    assert law.n_max == 4 and law.energy(2.0) == -0.25
    with pytest.raises(DomainError):
        read_law_csv("n,E\n1,0\n3,0\n4,0\n5,0\n")
    with pytest.raises(DomainError):
        read_law_csv("k,E\n1,0\n2,0\n3,0\n4,0\n")


# --- radius profile -----------------------------------------------------------

def test_coulomb_law_profile(xi1):
    profile = radius_profile(COULOMB_LAW, xi1, 1.0)
    assert profile(4.0) == pytest.approx(4.0 ** (2 / 3), rel=1e-14)


def test_hydrogen_profile_anchor(xi1):
    assert radius_profile(HydrogenLaw(13.6), xi1, 0.7)(1.0) == pytest.approx(math.sqrt(0.7), rel=1e-15)


def test_linear_profile_matches_closed_form(xi1):
    profile = radius_profile(LinearLaw(1.0), xi1, 0.5)
    for n in (1.0, 2.0, 5.5, 40.0):
        assert profile(n) == pytest.approx(math.sqrt(n**3 / 2), rel=1e-14)


def test_hydrogen_profile_matches_closed_form(xi1):
    gamma, eps = 13.6, 1.0
    beta = beta_epsilon_conversions("hydrogen", eps, gamma, xi1.xi).derived
    profile = radius_profile(HydrogenLaw(gamma), xi1, eps)
    for n in (1.0, 2.5, 50.0):
        assert profile(n) == pytest.approx(hydrogen_orbit_radius(n, gamma, beta, xi1.xi), rel=1e-13)


LAWS = st.sampled_from([HydrogenLaw(1.0), HydrogenLaw(13.6), LinearLaw(0.3), LinearLaw(4.0), COULOMB_LAW,
                        TabulatedLaw(-2.0 / np.arange(1, 9) ** 2)])


@given(LAWS, st.floats(1e-3, 1e3), st.floats(0.01, 100.0))
def test_n1_anchor(law, eps, xi):
    params = DiscreteParams.from_xi(xi)
    profile = radius_profile(law, params, eps)
    assert params.xi * profile(1.0) ** 2 == pytest.approx(eps, rel=1e-12)


@given(st.floats(0.1, 20.0), st.floats(0.01, 5.0), st.floats(0.1, 10.0), st.floats(1.0, 200.0))
def test_hydrogen_radius_solves_its_ode(gamma, beta, xi, n):
    r = hydrogen_orbit_radius(n, gamma, beta, xi)
    if math.isnan(r):
        return
    c = math.exp(2 * beta * xi)
    dr = c / (2 * xi * r)
    residual = 2 * xi * n * r * dr - xi * r * r - 2 * gamma
    assert abs(residual) <= 1e-12 * (xi * r * r + 2 * gamma)


def test_hydrogen_profile_solves_ode_numerically(xi1):
    gamma = 2.0
    profile = radius_profile(HydrogenLaw(gamma), xi1, 0.8)
    for n in (1.5, 3.0, 20.0):
        h = 1e-4
        drr = (profile.radius_squared(n + h) - profile.radius_squared(n - h)) / (2 * h)
        residual = xi1.xi * n * drr - xi1.xi * profile.radius_squared(n) - 2 * gamma
        assert abs(residual) <= 1e-9 * (2 * gamma)


def test_epsilon_must_be_positive(xi1):
    with pytest.raises(DomainError):
        radius_profile(HydrogenLaw(1.0), xi1, 0.0)


def test_negative_radicand(xi1):
    # E = 1/n makes the radicand n (eps - ln n), negative past n = e^eps
    profile = radius_profile(PowerLaw(1.0, -1.0), xi1, 1.0)
    with pytest.raises(NegativeRadicandError) as info:
        profile(10.0)
    assert info.value.n == 10.0


# --- inversion --------------------------------------------------------------

def test_invert_coulomb_profile(xi1):
    assert invert_radius(radius_profile(COULOMB_LAW, xi1, 1.0), 4.0) == pytest.approx(8.0, rel=1e-13)


def test_invert_left_endpoint(xi1):
    profile = radius_profile(HydrogenLaw(13.6), xi1, 2.0)
    assert invert_radius(profile, profile(1.0)) == 1.0


def test_invert_hydrogen_closed_form_endpoint():
    params = DiscreteParams.from_xi(1.0)
    c = 5.0
    # closed form r(n)^2 = c n - 2 gamma with gamma = 1 corresponds to eps = c - 2
    profile = radius_profile(HydrogenLaw(1.0), params, c - 2.0)
    assert invert_radius(profile, math.sqrt((c - 2.0) / params.xi)) == pytest.approx(1.0, abs=1e-15)


@given(LAWS, st.floats(1.0, 500.0))
def test_invert_round_trip(law, n):
    if isinstance(law, TabulatedLaw):
        n = min(n, float(law.n_max))
    profile = radius_profile(law, DiscreteParams.from_xi(1.0), 1.0)
    r = profile(n)
    m = invert_radius(profile, r)
    assert abs(profile(m) - r) <= 1e-12 * r


def test_invert_below_range(xi1):
    with pytest.raises(RangeError):
        invert_radius(radius_profile(HydrogenLaw(1.0), xi1, 1.0), 0.5)


def test_invert_beyond_cap(xi1):
    profile = radius_profile(LinearLaw(1.0), xi1, 0.5)
    with pytest.raises(RangeError):
        invert_radius(profile, profile(100.0), n_cap=64.0)


def test_invert_non_monotone_profile(xi1):
    profile = radius_profile(PowerLaw(1.0, -1.0), xi1, 1.0)
    # r(n)^2 = n (1 - ln n) peaks at n = 1; anything above r(1) is unreachable
    with pytest.raises(MonotonicityError):
        invert_radius(profile, 1.01 * profile(1.0))


# --- reconstruction -----------------------------------------------------------

def _rel(a, b):
    return float(np.max(np.abs(a / b - 1.0)))


def test_reconstructed_hydrogen_matches_closed_form(xi1):
    gamma, eps = 13.6, 1.0
    pot = reconstruct_potential(HydrogenLaw(gamma), xi1, eps)
    beta = beta_epsilon_conversions("hydrogen", eps, gamma, xi1.xi).derived
    assert pot.r_grid.size == 512
    assert _rel(pot.u_values, hydrogen_potential(gamma, beta, xi1.xi).value(pot.r_grid)) <= 1e-8


def test_printed_hydrogen_beta_does_not_match(xi1):
    gamma, eps = 13.6, 1.0
    pot = reconstruct_potential(HydrogenLaw(gamma), xi1, eps)
    beta = beta_epsilon_conversions("hydrogen", eps, gamma, xi1.xi).printed
    assert _rel(pot.u_values, hydrogen_potential(gamma, beta, xi1.xi).value(pot.r_grid)) > 1e-2


def test_reconstructed_oscillator_matches_closed_form(xi1):
    pot = reconstruct_potential(LinearLaw(1.0), xi1, 0.5)
    assert _rel(pot.u_values, oscillator_potential(1.0, 0.0, xi1.xi).value(pot.r_grid)) <= 1e-8


def test_reconstructed_oscillator_beta_positive(xi1):
    eps = 0.5 + 2.0 * xi1.xi
    beta = beta_epsilon_conversions("oscillator", eps, 1.0, xi1.xi).derived
    assert beta == pytest.approx(2.0, rel=1e-14)
    pot = reconstruct_potential(LinearLaw(1.0), xi1, eps)
    assert _rel(pot.u_values, oscillator_potential(1.0, beta, xi1.xi).value(pot.r_grid)) <= 1e-8


def test_coulomb_law_reconstructs_coulomb(xi1):
    pot = reconstruct_potential(COULOMB_LAW, xi1, 1.0, n_max=40)
    assert _rel(pot.u_values, Coulomb(1.0).value(pot.r_grid)) <= 1e-12
    table = compute_spectrum(pot, xi1, 2, 20)
    np.testing.assert_allclose(table.energies, [COULOMB_LAW.energy(float(n)) for n in table.n], rtol=1e-6)


def test_tabulated_law_reconstruction(xi1):
    law = TabulatedLaw(1.0 * np.arange(1, 41))
    pot = reconstruct_potential(law, xi1, 0.5, n_max=40)
    assert _rel(pot.u_values, oscillator_potential(1.0, 0.0, xi1.xi).value(pot.r_grid)) <= 1e-10


def test_reconstruction_self_check_trips_on_coarse_grid(xi1):
    profile = radius_profile(HydrogenLaw(13.6), xi1, 1.0)
    grid = default_radius_grid(profile, 64.0, 6)
    with pytest.raises(ReconstructionCheckError):
        reconstruct_potential(HydrogenLaw(13.6), xi1, 1.0, grid)
    reconstruct_potential(HydrogenLaw(13.6), xi1, 1.0, grid, self_check=False)


def test_reconstruction_rejects_grid_below_r1(xi1):
    with pytest.raises(RangeError):
        reconstruct_potential(HydrogenLaw(1.0), xi1, 1.0, np.geomspace(0.1, 5.0, 32))


def test_reconstruction_rejects_unsorted_grid(xi1):
    with pytest.raises(DomainError):
        reconstruct_potential(HydrogenLaw(1.0), xi1, 1.0, np.array([2.0, 1.5, 3.0, 4.0]))


# --- closed forms and conversions ---------------------------------------------

def test_hydrogen_radius_nan_without_orbit():
    assert math.isnan(hydrogen_orbit_radius(1.0, 13.6, 0.0, 1.0))


def test_oscillator_index_matches_eigenvalue_oracle():
    for alpha, beta, xi in ((1.0, 0.5, 1.0), (2.5, 0.7, 3.0), (1.0, 0.0, 1.0)):
        n = np.linspace(1.0, 60.0, 40)
        r = np.array([oscillator_orbit_radius(k, alpha, beta, xi) for k in n])
        got = oscillator_orbit_index(r, alpha, beta, xi)
        ref = np.array([cubic_root_oracle(x, alpha, beta, xi) for x in r])
        np.testing.assert_allclose(got, ref, rtol=1e-12)
        np.testing.assert_allclose(got, n, rtol=1e-12)


@pytest.mark.parametrize("beta", [0.5, 2.0])
def test_oscillator_beta_family_keeps_levels(xi1, beta):
    table = compute_spectrum(oscillator_potential(1.0, beta, xi1.xi), xi1, 1, 10)
    np.testing.assert_allclose(np.diff(table.energies), 1.0, rtol=1e-10)
    np.testing.assert_allclose(table.energies, table.n, rtol=1e-12)


def test_beta_examples():
    assert beta_epsilon_conversions("oscillator", 0.5, 1.0, 2.0).derived == 0.0
    assert beta_epsilon_conversions("hydrogen", 1.0 - 13.6, 13.6, 1.0).printed == pytest.approx(0.0, abs=1e-15)
    assert beta_epsilon_conversions("oscillator", 0.5 + 3.0, 1.0, 3.0).derived == pytest.approx(1.0, rel=1e-15)


def test_beta_domain():
    with pytest.raises(DomainError):
        beta_epsilon_conversions("hydrogen", -20.0, 13.6, 1.0)
    with pytest.raises(DomainError):
        beta_epsilon_conversions("helium", 1.0, 1.0, 1.0)


@given(st.sampled_from(["hydrogen", "oscillator"]), st.floats(0.01, 50.0), st.floats(0.1, 20.0), st.floats(0.1, 10.0))
def test_epsilon_beta_round_trip(kind, eps, g, xi):
    beta = beta_epsilon_conversions(kind, eps, g, xi).derived
    assert epsilon_from_beta(kind, beta, g, xi) == pytest.approx(eps, rel=1e-9, abs=1e-9 * g)


def test_sidecar_records_both_conventions(xi1, tmp_path):
    meta = reconstruction_sidecar(HydrogenLaw(13.6), xi1, 1.0)
    assert set(meta["beta"]) == {"printed", "derived"}
    assert meta["epsilon"] == 1.0 and meta["xi"] == xi1.xi and meta["tau"] == xi1.tau
    text = write_sidecar(meta, tmp_path / "m.json")
    assert (tmp_path / "m.json").read_text() == text
