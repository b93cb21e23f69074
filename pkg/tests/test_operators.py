import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkw import (DEFAULT_POLICY, MapParam, TruncationPolicy,
                 UnderResolvedWarning, apply_evolution_step, apply_gkw,
                 apply_U, apply_V, apply_V_via_U, stationary_density)
from gkw.auxfun import aux_g, aux_H, aux_xi, v_image_of_xi
from gkw.funcspace import FuncRep, fit

X = np.linspace(0.0, 1.0, 801)


def test_policy_validation():
    with pytest.raises(ValueError):
        TruncationPolicy(cutoff=1)
    with pytest.raises(ValueError):
        TruncationPolicy(target_tol=0.0)
    with pytest.raises(ValueError):
        TruncationPolicy(cutoff=5).check(MapParam(7))


@pytest.mark.parametrize("p", [1, 2, 3, 5])
def test_U_fixes_constants(p):
    param = MapParam(p)
    one = fit(lambda t: np.ones_like(np.asarray(t, float)))
    img = apply_U(param, one)
    assert np.abs(img.values(X) - 1.0).max() < 1e-12


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("a", [0.0, 0.25, 1.0 / 3.0, 0.8])
def test_U_on_auxiliary_family(p, a):
    param = MapParam(p)
    img = apply_U(param, fit(aux_g(param, a)))
    assert np.abs(img.values(X) - aux_H(param, a)(X)).max() < 1e-10


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("a", [0.0, 1.0 / 3.0, 0.6])
def test_V_on_auxiliary_family(p, a):
    param = MapParam(p)
    img = apply_V(param, fit(aux_xi(param, a)))
    assert np.abs(img.values(X) - v_image_of_xi(param, a)(X)).max() < 1e-10


@pytest.mark.parametrize("p", [1, 2, 5])
def test_gkw_fixes_stationary_density(p):
    param = MapParam(p)
    dens = fit(lambda t: stationary_density(param, t))
    img = apply_gkw(param, dens)
    assert np.abs(img.values(X) - dens.values(X)).max() < 1e-12


@given(c1=st.lists(st.floats(-2, 2, allow_nan=False), min_size=9, max_size=9),
       c2=st.lists(st.floats(-2, 2, allow_nan=False), min_size=9, max_size=9),
       s=st.floats(-3, 3, allow_nan=False))
@settings(max_examples=25, deadline=None)
def test_operators_are_linear(c1, c2, s):
    param = MapParam(2)
    f, g = FuncRep(np.array(c1)), FuncRep(np.array(c2))
    import warnings as _w
    with _w.catch_warnings():
        # random degree-8 coefficient vectors are legitimately under-resolved
        _w.simplefilter("ignore", UnderResolvedWarning)
        for op in (apply_gkw, apply_U, apply_V):
            lhs = op(param, FuncRep(f.coeffs + s * g.coeffs))
            rhs = op(param, f).coeffs + s * op(param, g).coeffs
            assert np.allclose(lhs.coeffs, rhs, atol=1e-9)


def test_operators_preserve_positivity():
    param = MapParam(3)
    f = fit(lambda x: 1.0 / (1.0 + x) + 0.2 * np.sin(3 * x) ** 2, 48)
    assert f.values(X).min() > 0
    for op in (apply_gkw, apply_U, apply_V):
        assert op(param, f).values(X).min() > 0


@pytest.mark.parametrize("p", [2, 5])
def test_V_route_equivalence(p):
    param = MapParam(p)
    f = fit(lambda x: np.exp(-x) + 0.3 * np.cos(2 * x), 64)
    a = apply_V(param, f)
    b = apply_V_via_U(param, f)
    assert np.abs(a.values(X) - b.values(X)).max() < 1e-10


def test_tail_correction_beats_bare_truncation():
    param = MapParam(5)
    f = fit(lambda x: 1.0 / (1.0 + x), 48)
    ref = apply_U(param, f, TruncationPolicy(200_000))
    bare = apply_U(param, f, TruncationPolicy(2_000, tail_correction=False))
    corr = apply_U(param, f, TruncationPolicy(2_000))
    err_bare = np.abs(bare.values(X) - ref.values(X)).max()
    err_corr = np.abs(corr.values(X) - ref.values(X)).max()
    assert err_corr < 1e-9
    assert err_bare > 100 * err_corr


def test_doubling_cutoff_is_stable():
    f = fit(lambda x: np.exp(x), 48)
    for p in (2, 5):
        param = MapParam(p)
        for op in (apply_gkw, apply_U, apply_V, apply_evolution_step):
            a = op(param, f, TruncationPolicy(10_000))
            b = op(param, f, TruncationPolicy(20_000))
            assert np.abs(a.values(X) - b.values(X)).max() < 1e-10


def test_evolution_step_matches_brute_force():
    param = MapParam(2)
    f = fit(lambda x: x * (1 - x) * np.exp(x), 48)
    img = apply_evolution_step(param, f)
    k = np.arange(2, 3_000_001, dtype=float)
    for x in (0.0, 0.37, 1.0):
        brute = np.sum(f.values(2.0 / k) - f.values(2.0 / (k + x)))
        # the brute force itself truncates with tail ~ f'(0) p x / K ~ 7e-7
        assert img(x) == pytest.approx(brute, abs=1.5e-6)


def test_under_resolved_warning():
    param = MapParam(2)
    wiggly = fit(lambda x: np.cos(25 * x), 12)
    with pytest.warns(UnderResolvedWarning):
        apply_gkw(param, wiggly)


def test_unknown_kind_rejected():
    from gkw.operators import operator_matrix
    with pytest.raises(ValueError):
        operator_matrix("Q", MapParam(2), 16, DEFAULT_POLICY)
