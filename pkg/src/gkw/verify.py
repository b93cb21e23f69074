"""Self-check suites: each check returns a structured pass/fail row.

These back the `verify` CLI command (exit 1 on any failure) and are reused by
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from .auxfun import aux_g, aux_H, aux_xi, v_image_of_xi
from .funcspace import fit
from .gauss import (MapParam, kuzmin_rate, kuzmin_rate_bound,
                    stationary_density)
from .operators import (DEFAULT_POLICY, TruncationPolicy, apply_gkw, apply_U,
                        apply_V)
from .spectral import (bounds, lambda_by_power, lambda_by_ratio,
                       sandwich_test_function, spectrum_collocation,
                       verify_sandwich)

LAMBDA_P1_REFERENCE = 0.3036630029  # classical p = 1 second eigenvalue


@dataclass(frozen=True)
class CheckRow:
    name: str
    p: int
    value: float
    threshold: float
    passed: bool


def _row(name: str, p: int, value: float, threshold: float) -> CheckRow:
    return CheckRow(name, p, float(value), float(threshold),
                    bool(value <= threshold))


def suite_bounds(p_values: Iterable[int]) -> List[CheckRow]:
    rows = []
    for p in p_values:
        param = MapParam(p)
        v, w = bounds(param)
        rows.append(CheckRow("v_p<w_p", p, v - w, 0.0, v < w))
        if p >= 2:
            q = kuzmin_rate(param)
            rows.append(CheckRow("kuzmin_rate<bound", p,
                                 q - kuzmin_rate_bound(param), 0.0,
                                 q < kuzmin_rate_bound(param)))
    return rows


def suite_sandwich(p_values: Iterable[int],
                   policy: TruncationPolicy = DEFAULT_POLICY,
                   grid_size: int = 1001) -> List[CheckRow]:
    rows = []
    for p in p_values:
        res = verify_sandwich(MapParam(p), grid_size, policy)
        rows.append(CheckRow("sandwich_lower", p, res.v_p - res.min_ratio,
                             1e-9, res.min_ratio >= res.v_p - 1e-9))
        rows.append(CheckRow("sandwich_upper", p, res.max_ratio - res.w_p,
                             1e-9, res.max_ratio <= res.w_p + 1e-9))
    return rows


def suite_estimators(p_values: Iterable[int],
                     policy: TruncationPolicy = DEFAULT_POLICY,
                     tol: float = 1e-8) -> List[CheckRow]:
    rows = []
    for p in p_values:
        param = MapParam(p)
        a = lambda_by_ratio(param, policy=policy)
        b = lambda_by_power(param, policy=policy)
        rows.append(_row("estimator_agreement", p, abs(a.lam - b.lam), tol))
    return rows


def suite_identities(p_values: Iterable[int] = (2, 3, 5),
                     policy: TruncationPolicy = DEFAULT_POLICY,
                     tol: float = 1e-8) -> List[CheckRow]:
    """Exact operator images: U1 = 1, U g_a = H_a, V xi_a = (p+a+x)^-2,
    and invariance of the stationary density under G_p."""
    rows = []
    x = np.linspace(0.0, 1.0, 801)
    for p in p_values:
        param = MapParam(p)
        one = fit(lambda t: np.ones_like(np.asarray(t, dtype=float)))
        r = np.abs(apply_U(param, one, policy).values(x) - 1.0).max()
        rows.append(_row("U(1)=1", p, r, tol))
        for a in (0.0, 0.25, 1.0 / 3.0):
            g = fit(aux_g(param, a))
            r = np.abs(apply_U(param, g, policy).values(x)
                       - aux_H(param, a)(x)).max()
            rows.append(_row(f"U(g_{a:.2f})=H", p, r, tol))
            xi = fit(aux_xi(param, a))
            r = np.abs(apply_V(param, xi, policy).values(x)
                       - v_image_of_xi(param, a)(x)).max()
            rows.append(_row(f"V(xi_{a:.2f})", p, r, tol))
        dens = fit(lambda t: stationary_density(param, t))
        r = np.abs(apply_gkw(param, dens, policy).values(x)
                   - dens.values(x)).max()
        rows.append(_row("G(density)=density", p, r, tol))
    return rows


def suite_tail_control(p_values: Iterable[int] = (2, 5),
                       policy: TruncationPolicy = DEFAULT_POLICY) -> List[CheckRow]:
    """Doubling the cutoff must not move operator images beyond target_tol."""
    rows = []
    x = np.linspace(0.0, 1.0, 801)
    for p in p_values:
        param = MapParam(p)
        xi = sandwich_test_function(param)
        doubled = TruncationPolicy(policy.cutoff * 2, policy.tail_correction,
                                   policy.target_tol)
        for name, op in (("U", apply_U), ("V", apply_V), ("G", apply_gkw)):
            r = np.abs(op(param, xi, policy).values(x)
                       - op(param, xi, doubled).values(x)).max()
            rows.append(_row(f"tail_{name}_K_vs_2K", p, r, policy.target_tol))
    return rows


def suite_anchor(policy: TruncationPolicy = DEFAULT_POLICY) -> List[CheckRow]:
    eig = lambda_by_power(MapParam(1), policy=policy)
    return [_row("lambda_1_reference", 1,
                 abs(eig.lam - LAMBDA_P1_REFERENCE), 1e-5)]


def suite_spectrum(p_values: Iterable[int] = (1, 2),
                   policy: TruncationPolicy = DEFAULT_POLICY,
                   dim: int = 64) -> List[CheckRow]:
    rows = []
    for p in p_values:
        param = MapParam(p)
        spec = spectrum_collocation(param, dim, policy)
        rows.append(_row("spectrum_leading=1", p,
                         abs(spec.eigenvalues[0] - 1.0), 1e-10))
        lam = lambda_by_power(param, policy=policy).lam
        rows.append(_row("spectrum_second=-lambda", p,
                         abs(spec.eigenvalues[1] + lam), 1e-8))
    return rows


def verify_all(p_values: Iterable[int] = range(2, 11),
               policy: TruncationPolicy = DEFAULT_POLICY) -> List[CheckRow]:
    ps = sorted(set(int(p) for p in p_values))
    if any(p < 1 for p in ps):
        raise ValueError("p must be >= 1")
    rows: List[CheckRow] = []
    rows += suite_bounds(ps)
    rows += suite_sandwich([p for p in ps if p >= 2], policy)
    rows += suite_estimators(ps, policy)
    rows += suite_identities([p for p in (2, 3, 5) if p in ps or not ps], policy)
    rows += suite_tail_control([p for p in (2, 5) if p in ps] or [ps[0]], policy)
    if 1 in ps:
        rows += suite_anchor(policy)
    rows += suite_spectrum([p for p in (1, 2) if p in ps] or ps[:1], policy)
    return rows
