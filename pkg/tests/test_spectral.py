import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkw import (MapParam, alpha_root, analyze_aux, apply_V, bounds,
                 functional_F, functional_L, lambda_by_power, lambda_by_ratio,
                 min_max_ratio, rho, rho_expanded, spectrum_collocation,
                 tau_bound, verify_sandwich)
from gkw.auxfun import aux_xi, v_image_of_xi
from gkw.funcspace import fit
from gkw.spectral import (min_ratio_display_form, rho_exact,
                          sandwich_test_function)


@given(p=st.integers(1, 60), a=st.floats(0, 1, allow_nan=False))
@settings(max_examples=80)
def test_rho_two_forms_agree(p, a):
    param = MapParam(p)
    scale = max(1.0, 2.0 * (p + 1.0) ** 4)
    assert abs(rho(param, a) - rho_expanded(param, a)) < 1e-13 * scale


@pytest.mark.parametrize("p", [2, 3, 10, 25, 50])
def test_alpha_root_is_correctly_rounded(p):
    param = MapParam(p)
    al = alpha_root(param)
    assert 0.32 < al < 1.0 / 3.0
    # the returned float brackets the true root with its neighbour
    ulp = np.spacing(al)
    slope = 8.0 * (p + al) ** 3 - (2.0 * p ** 3 + p * p)
    assert abs(float(rho_exact(param, al))) <= slope * ulp


def test_alpha_root_requires_p_ge_2():
    with pytest.raises(ValueError):
        alpha_root(MapParam(1))


@pytest.mark.parametrize("p", [2, 5, 20])
def test_min_max_closed_forms_match_brute_force(p):
    param = MapParam(p)
    x = np.linspace(0, 1, 200_001)
    for a in (alpha_root(param), 1.0 / 3.0):
        ratio = aux_xi(param, a)(x) / v_image_of_xi(param, a)(x)
        m, M, x0, gamma = min_max_ratio(param, a)
        assert abs(ratio.min() - m) < 1e-6
        assert abs(ratio.max() - M) < 1e-6
        assert 0.0 < x0 < 1.0 and gamma > 1.0
        assert abs(min_ratio_display_form(param, a) - m) < 1e-10 * m
    with pytest.raises(ValueError):
        min_max_ratio(param, 0.1)


def test_analyze_aux_bundle():
    aux = analyze_aux(MapParam(2))
    assert aux.a == aux.alpha
    assert aux.m_a < aux.M_a
    assert aux.v_p < aux.w_p
    # the sandwich bounds are the reciprocal extremes at a = 1/3
    m3, M3, _, _ = min_max_ratio(MapParam(2), 1.0 / 3.0)
    assert aux.v_p == pytest.approx(1.0 / M3, abs=1e-15)


@pytest.mark.parametrize("p", [1, 2, 7, 30])
def test_bounds_order_and_magnitude(p):
    v, w = bounds(MapParam(p))
    assert 0.0 < v < w < 1.0
    assert v == pytest.approx(1.0 / (2 * p), rel=0.5)


@pytest.mark.parametrize("p", [2, 4, 9])
def test_sandwich_grid_check(p):
    res = verify_sandwich(MapParam(p))
    assert res.passed
    assert res.v_p - 1e-9 <= res.min_ratio <= res.max_ratio <= res.w_p + 1e-9


def test_sandwich_requires_p_ge_2():
    with pytest.raises(ValueError):
        verify_sandwich(MapParam(1))


@pytest.mark.parametrize("p", [1, 2, 6])
def test_eigen_solvers_cross_validate(p):
    param = MapParam(p)
    a = lambda_by_ratio(param)
    b = lambda_by_power(param)
    assert abs(a.lam - b.lam) < 1e-10
    for eig in (a, b):
        assert eig.residual < 1e-9
        assert 0.0 < eig.lam < 1.0
        x = np.linspace(0, 1, 501)
        psi = eig.psi.values(x)
        assert psi.min() > 0.0
        assert psi.max() == pytest.approx(1.0, abs=1e-6)
    if p >= 2:
        v, w = bounds(param)
        assert v <= b.lam <= w


def test_ratio_solver_rejects_non_increasing_start():
    with pytest.raises(ValueError):
        lambda_by_ratio(MapParam(2), f0=fit(lambda x: 1.0 - x, 16))


def test_functional_F_is_positive_and_linear():
    param = MapParam(2)
    f = fit(lambda x: 1.0 / (2 + x) ** 2, 32)
    g = fit(lambda x: np.cos(x), 32)
    Ff, Fg = functional_F(param, f), functional_F(param, g)
    assert Ff > 0.0
    combo = functional_F(param, f + 2.0 * g)
    assert combo == pytest.approx(Ff + 2.0 * Fg, abs=1e-12)
    with pytest.raises(ValueError):
        functional_F(MapParam(1), f)


@pytest.mark.parametrize("p", [2, 5, 12])
def test_tau_bound_sits_below_lambda(p):
    param = MapParam(p)
    eig = lambda_by_power(param)
    tau = tau_bound(param, eig)
    assert 0.0 < tau < eig.lam
    assert tau / eig.lam < 189.0 / 198.0


def test_functional_L_normalizes_the_eigenfunction():
    param = MapParam(2)
    eig = lambda_by_power(param)
    L = functional_L(param, eig.psi, eig)
    assert L.value == pytest.approx(1.0, abs=1e-9)
    assert L.spread < 1e-8
    # homogeneity
    L3 = functional_L(param, eig.psi * 3.0, eig)
    assert L3.value == pytest.approx(3.0, abs=1e-8)
    # V xi sits between v_p xi and w_p xi, so L(xi) is pinned near lambda-scale
    xi = sandwich_test_function(param)
    Lxi = functional_L(param, xi, eig)
    assert Lxi.spread < 1e-8
    assert Lxi.value > 0.0


@pytest.mark.parametrize("p", [1, 2])
def test_spectrum_heads(p):
    param = MapParam(p)
    spec = spectrum_collocation(param, 64)
    lam = lambda_by_power(param).lam
    assert abs(spec.eigenvalues[0] - 1.0) < 1e-10
    assert abs(spec.eigenvalues[1] + lam) < 1e-8
    assert spec.reliable[0] and spec.reliable[1]
    assert np.all(np.isfinite(spec.conjecture_ratios))
    # reliable moduli decrease
    good = np.abs(spec.eigenvalues[spec.reliable])
    assert np.all(np.diff(good) < 0)


def test_spectrum_dim_validation():
    with pytest.raises(ValueError):
        spectrum_collocation(MapParam(2), 4)


def test_rho_signs_bracket_the_root():
    for p in range(2, 51):
        param = MapParam(p)
        assert rho(param, 0.32) < 0.0
        assert rho(param, 1.0 / 3.0) > 0.0


def test_lambda_p1_reference_value():
    eig = lambda_by_power(MapParam(1))
    assert eig.lam == pytest.approx(0.3036630029, abs=1e-9)
