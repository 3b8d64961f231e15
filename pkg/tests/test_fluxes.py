import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shocklab.errors import IncompatibleFunctions, MissingLambda, NoWaveSpeed
from shocklab.fluxes import (
    ConvexFlux,
    NumericalFlux,
    burgers,
    cfl_timestep,
    check_contractivity_conditions,
    contractivity_cfl_ok,
    linearization_coefficients,
    monotone_cfl_ok,
    numerical_flux,
)
from shocklab.grid import Grid, GridFunction

states = st.floats(-2.0, 2.0, allow_nan=False)


def generic_burgers():
    """Burgers without closed-form hints, forcing the quadrature paths."""
    return ConvexFlux("burgers-generic", lambda u: 0.5 * np.asarray(u) ** 2, lambda u: np.asarray(u, float))


def burgers_with_minimizer_only():
    return ConvexFlux("burgers-min", lambda u: 0.5 * np.asarray(u) ** 2, lambda u: np.asarray(u, float), minimizer=0.0)


def quartic():
    return ConvexFlux("quartic", lambda u: 0.25 * np.asarray(u) ** 4 + np.asarray(u), lambda u: np.asarray(u) ** 3 + 1.0)


def brute_godunov(f, a, b, samples=200001):
    u = np.linspace(min(a, b), max(a, b), samples)
    vals = f(u)
    return vals.max() if a >= b else vals.min()


def test_burgers_flux_properties():
    f = burgers()
    assert f.is_convex_on(-3, 3)
    assert f.derivative_defect(-3, 3) < 1e-8
    assert f.max_speed(0, 2) == 2.0
    assert f.max_speed(-1, 1) == 1.0


@pytest.mark.parametrize(
    "scheme,lam,expected",
    [("godunov", None, 2.0), ("eo", None, 2.0), ("lxf", 0.15, 1.0 + 20.0 / 3.0)],
)
def test_flux_value_examples(scheme, lam, expected):
    nf = NumericalFlux(scheme, burgers(), lam)
    assert numerical_flux(nf, 2.0, 0.0) == pytest.approx(expected, rel=1e-14)


def test_lxf_needs_lambda():
    with pytest.raises(MissingLambda):
        NumericalFlux("lxf", burgers())(1.0, 0.0)
    assert NumericalFlux("lxf", burgers()).with_lambda(0.5)(1.0, 1.0) == 0.5


def test_unknown_scheme():
    with pytest.raises(ValueError):
        NumericalFlux("roe", burgers())


@given(st.sampled_from(["lxf", "eo", "godunov"]), states)
def test_consistency(scheme, u):
    nf = NumericalFlux(scheme, burgers(), 0.2)
    assert nf(u, u) == pytest.approx(0.5 * u * u, abs=1e-14)


@given(st.sampled_from(["lxf", "eo", "godunov"]), states, states, st.floats(-0.5, 0.5))
def test_monotone_flux(scheme, a, b, h):
    # non-decreasing in a, non-increasing in b under the CFL restriction
    nf = NumericalFlux(scheme, burgers(), 0.2)
    assert nf(a + abs(h), b) >= nf(a, b) - 1e-12
    assert nf(a, b + abs(h)) <= nf(a, b) + 1e-12


@given(states, states)
def test_godunov_matches_brute_force_extremum(a, b):
    f = burgers()
    assert NumericalFlux("godunov", f)(a, b) == pytest.approx(brute_godunov(f.f, a, b), abs=1e-9)


@given(states, states)
def test_generic_paths_match_closed_forms(a, b):
    for scheme in ("eo", "godunov"):
        closed = NumericalFlux(scheme, burgers())(a, b)
        generic = NumericalFlux(scheme, generic_burgers())(a, b)
        assert generic == pytest.approx(closed, abs=1e-10)


def test_quartic_eo_and_godunov():
    f = quartic()
    for a, b in [(1.0, -1.5), (-1.5, 0.5), (0.3, 0.2)]:
        god = NumericalFlux("godunov", f)(a, b)
        assert god == pytest.approx(brute_godunov(f.f, a, b), abs=1e-8)
        eo = NumericalFlux("eo", f)(a, b)
        u = np.linspace(min(a, b), max(a, b), 200001)
        integral = np.trapezoid(np.abs(f.f_prime(u)), u) * np.sign(b - a)
        assert eo == pytest.approx(0.5 * (f.f(a) + f.f(b)) - 0.5 * integral, abs=1e-8)


def test_cfl_timestep_examples():
    nf = NumericalFlux("godunov", burgers())
    g = Grid.uniform(0, 1, 32)
    assert cfl_timestep(nf, g, 0, 2, 0.3) == pytest.approx(3 / 640)
    assert cfl_timestep(nf, g, 0, 2, 0.15) == pytest.approx(3 / 1280)
    assert cfl_timestep(nf, g, -1, 1, 0.3) == pytest.approx(0.3 / 32)
    with pytest.raises(NoWaveSpeed):
        cfl_timestep(nf, g, 0, 0, 0.3)
    with pytest.raises(ValueError):
        cfl_timestep(nf, g, 0, 1, 1.5)


def test_cfl_predicates():
    nf = NumericalFlux("lxf", burgers(), 0.25)
    assert monotone_cfl_ok(nf, 0.25, -2, 2)
    assert not monotone_cfl_ok(nf, 0.6, -2, 2)
    assert contractivity_cfl_ok(NumericalFlux("godunov", burgers()), 0.25, -2, 2)
    # the stricter half-CFL restriction cannot hold for LxF: lam*(f'+1/lam)/2 > 1/2
    assert not contractivity_cfl_ok(NumericalFlux("lxf", burgers(), 0.15), 0.15, 0, 2)


def _pair(rng, n=12):
    g = Grid.uniform(0, 1, n)
    u = np.sort(rng.uniform(-1, 2, n))[::-1]
    v = np.sort(rng.uniform(-1, 2, n))[::-1]
    return GridFunction(g, u, 2.0, -1.0), GridFunction(g, v, 2.0, -1.0)


def test_lxf_linearization_closed_form(rng):
    u, v = _pair(rng)
    lam = 0.2
    nf = NumericalFlux("lxf", burgers(), lam)
    A, B = linearization_coefficients(nf, u, v)
    ue, ve = u.extended(1), v.extended(1)
    np.testing.assert_allclose(A, 0.5 * ((ue[:-1] + ve[:-1]) / 2 + 1 / lam), rtol=1e-14)
    np.testing.assert_allclose(B, 0.5 * ((ue[1:] + ve[1:]) / 2 - 1 / lam), rtol=1e-14)


@pytest.mark.parametrize("scheme", ["lxf", "eo", "godunov"])
def test_linearization_degenerate_path(scheme, rng):
    u, _ = _pair(rng)
    nf = NumericalFlux(scheme, burgers(), 0.2)
    A, B = linearization_coefficients(nf, u, u)
    ue = u.extended(1)
    da, db = nf.partials(ue[:-1], ue[1:])
    np.testing.assert_allclose(A, da, atol=1e-14)
    np.testing.assert_allclose(B, db, atol=1e-14)


@pytest.mark.parametrize("scheme", ["lxf", "eo", "godunov"])
@pytest.mark.parametrize("flux_factory", [burgers, burgers_with_minimizer_only, generic_burgers])
def test_linearization_identity(scheme, flux_factory, rng):
    nf = NumericalFlux(scheme, flux_factory(), 0.2)
    for _ in range(10):
        u, v = _pair(rng)
        A, B = linearization_coefficients(nf, u, v)
        ue, ve = u.extended(1), v.extended(1)
        lhs = nf(ue[:-1], ue[1:]) - nf(ve[:-1], ve[1:])
        rhs = A * (ue[:-1] - ve[:-1]) + B * (ue[1:] - ve[1:])
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


@pytest.mark.parametrize("scheme", ["eo", "godunov"])
def test_generic_linearization_matches_closed_form(scheme, rng):
    for _ in range(5):
        u, v = _pair(rng)
        A1, B1 = linearization_coefficients(NumericalFlux(scheme, burgers()), u, v)
        A2, B2 = linearization_coefficients(NumericalFlux(scheme, generic_burgers()), u, v)
        np.testing.assert_allclose(A1, A2, atol=1e-10)
        np.testing.assert_allclose(B1, B2, atol=1e-10)


def test_linearization_grid_mismatch(rng):
    u, v = _pair(rng)
    w = GridFunction(Grid.uniform(0, 2, 12), v.values, 2.0, -1.0)
    with pytest.raises(IncompatibleFunctions):
        linearization_coefficients(NumericalFlux("eo", burgers()), u, w)


def test_condition_checker_examples():
    z = np.zeros(4)
    assert check_contractivity_conditions(z, z, 0.5)
    rep = check_contractivity_conditions([1.0, 2.0], [0.0, 0.0], 0.1)
    assert not rep and rep.index == 1 and rep.failed == "A non-increasing"
    rep = check_contractivity_conditions([1.0, 1.0], [-0.5, -0.5], 1.0)
    assert not rep and rep.failed == "lam*(A - B) <= 1" and rep.margin == pytest.approx(0.5)
    rep = check_contractivity_conditions([0.0, 0.0], [0.0, 0.1], 1.0)
    assert not rep and rep.failed in ("B <= 0", "B non-increasing") and rep.index == 1


@pytest.mark.parametrize("scheme", ["eo", "godunov"])
def test_conditions_hold_on_decreasing_data(scheme, rng):
    nf = NumericalFlux(scheme, burgers())
    for _ in range(20):
        u, v = _pair(rng)
        A, B = linearization_coefficients(nf, u, v)
        assert check_contractivity_conditions(A, B, 0.25)


def test_lxf_conditions_fail_on_strictly_decreasing_data():
    # lam*(A_{i-1} - B_i) = 1 + lam/2 * (mean slope left - mean slope right) > 1
    g = Grid.uniform(0, 1, 6)
    u = GridFunction(g, [1.5, 1.2, 0.8, 0.3, -0.2, -0.6], 2.0, -1.0)
    nf = NumericalFlux("lxf", burgers(), 0.2)
    A, B = linearization_coefficients(nf, u, u)
    rep = check_contractivity_conditions(A, B, 0.2)
    assert not rep and rep.failed == "lam*(A - B) <= 1"
