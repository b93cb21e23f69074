import numpy as np
import pytest

from gkw import (MapParam, build_Psi, delta, estimate_Theta, evolve_cdf,
                 interpolation_check, lambda_by_power, montecarlo_cdf,
                 stationary_cdf)
from gkw.evolution import binomial_se
from gkw.funcspace import fit


@pytest.fixture(scope="module")
def trace2():
    return evolve_cdf(MapParam(2), n=20)


@pytest.fixture(scope="module")
def eig2():
    return lambda_by_power(MapParam(2))


def test_evolve_validates_cdf_input():
    param = MapParam(2)
    with pytest.raises(ValueError):
        evolve_cdf(param, phi0=fit(lambda x: 0.5 * x, 32))  # phi0(1) != 1
    with pytest.raises(ValueError):
        evolve_cdf(param, phi0=fit(lambda x: x + 0.3 * np.sin(
            2 * np.pi * x), 32))  # not monotone
    with pytest.raises(ValueError):
        evolve_cdf(param, n=-1)


def test_deviations_decay_at_rate_lambda(trace2, eig2):
    x = trace2.grid
    sups = [np.abs(d.values(x)).max() for d in trace2.deltas]
    assert all(b < a for a, b in zip(sups, sups[1:]))
    for n in range(5, 15):
        assert sups[n + 1] / sups[n] == pytest.approx(eig2.lam, rel=1e-3)


def test_deviations_pinned_at_endpoints(trace2):
    for n in (0, 5, 20):
        d = delta(trace2, n)
        assert abs(d(0.0)) < 1e-14
        assert abs(d(1.0)) < 1e-14


def test_iterates_are_cdfs(trace2):
    x = trace2.grid
    for n in (1, 5, 10):
        v = trace2.phi[n].values(x)
        assert abs(v[0]) < 1e-12 and abs(v[-1] - 1.0) < 1e-12
        assert np.all(np.diff(v) > -1e-12)


def test_stationary_start_is_fixed():
    param = MapParam(3)
    phi0 = fit(lambda x: stationary_cdf(param, x), 64)
    trace = evolve_cdf(param, phi0=phi0, n=5)
    x = trace.grid
    assert np.abs(delta(trace, 5).values(x)).max() < 1e-13


def test_build_Psi_solves_the_profile_equation(eig2):
    param = MapParam(2)
    Psi = build_Psi(param, eig2)
    assert abs(Psi(0.0)) < 1e-12
    assert abs(Psi(1.0)) < 1e-8
    # ((p+x) Psi')' = psi
    x = np.linspace(0, 1, 401)
    lhs_inner = fit(lambda t: (2.0 + t) * Psi.derivative()(t), 64)
    resid = np.abs(lhs_inner.derivative().values(x) - eig2.psi.values(x)).max()
    assert resid < 1e-8


def test_estimate_Theta_profile(trace2, eig2):
    prof = estimate_Theta(trace2, eig2, 20)
    x = trace2.grid
    assert abs(prof.Theta(0.0)) < 1e-8
    assert abs(prof.Theta(1.0)) < 1e-8
    assert prof.residual < 1e-6 * np.abs(prof.Theta.values(x)).max()
    with pytest.raises(ValueError):
        estimate_Theta(trace2, eig2, 21)


def test_interpolation_check(eig2):
    Psi = build_Psi(MapParam(2), eig2)
    res = interpolation_check(Psi)
    assert res.passed
    assert res.sup_second_derivative > 0
    with pytest.raises(ValueError):
        interpolation_check(fit(lambda x: x + 1.0, 16))


def test_montecarlo_reproducible_and_valid():
    param = MapParam(2)
    xs = np.linspace(0, 1, 11)
    a = montecarlo_cdf(param, 3, 50_000, 42, xs)
    b = montecarlo_cdf(param, 3, 50_000, 42, xs)
    assert np.array_equal(a, b)
    c = montecarlo_cdf(param, 3, 50_000, 43, xs)
    assert not np.array_equal(a, c)
    assert a[0] == 0.0 and a[-1] == 1.0
    assert np.all(np.diff(a) >= 0)
    with pytest.raises(ValueError):
        montecarlo_cdf(param, 3, 100, 42, xs)
    with pytest.raises(ValueError):
        montecarlo_cdf(param, -1, 50_000, 42, xs)
    with pytest.raises(ValueError):
        montecarlo_cdf(param, 1, 50_000, 42, [1.5])


def test_montecarlo_uniform_start():
    xs = np.linspace(0, 1, 11)
    emp = montecarlo_cdf(MapParam(2), 0, 200_000, 7, xs)
    for x, e in zip(xs, emp):
        assert abs(e - x) < 5 * binomial_se(x, 200_000) + 1e-9
