"""Everything about lambda_p: auxiliary construction, bounds, estimators.

The two independent estimators (endpoint-difference ratio under U, power
iteration under V) both act on the cached coefficient-space operator
matrices, so a single application costs a small matrix-vector product.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .auxfun import aux_g, aux_H, aux_xi
from .funcspace import DEFAULT_DEGREE, FuncRep, fit, integrate_function
from .gauss import MapParam
from .operators import (DEFAULT_POLICY, TruncationPolicy, operator_matrix,
                        apply_V)

_RATIO_CAP = 189.0 / 198.0  # analytic ceiling for tau_p / lambda_p, p >= 2


@dataclass(frozen=True)
class AuxAnalysis:
    """Closed-form quantities of the auxiliary-function construction."""

    p: int
    a: float
    alpha: float
    gamma: float
    x0: float
    m_a: float
    M_a: float
    v_p: float
    w_p: float


@dataclass(frozen=True)
class EigenResult:
    p: int
    lam: float
    psi: FuncRep
    residual: float
    contraction_ratio: float
    iterations: int


@dataclass(frozen=True)
class SpectrumResult:
    p: int
    dim: int
    eigenvalues: np.ndarray          # sorted by descending modulus
    conjecture_ratios: np.ndarray    # Lambda(n) / ((-1)^(n-1) p^-n phi^2n)
    reliable: np.ndarray             # False once below the noise cutoff


@dataclass(frozen=True)
class SandwichResult:
    p: int
    min_ratio: float
    max_ratio: float
    v_p: float
    w_p: float
    passed: bool


@dataclass(frozen=True)
class LEstimate:
    """Grid-median estimate of the limit functional, with its grid spread."""

    value: float
    spread: float
    iterations: int

    def __float__(self):
        return self.value


def rho(param: MapParam, a: float) -> float:
    """Quartic 2(p+a)^4 - (2p^3+p^2)(p+a) - p^2(p+1), root-finding target."""
    p = param.p
    u = p + a
    return 2.0 * u ** 4 - (2.0 * p ** 3 + p ** 2) * u - p * p * (p + 1.0)


def rho_expanded(param: MapParam, a: float) -> float:
    """Expanded form (6a-2)p^3 + (12a^2-a-1)p^2 + 8a^3 p + 2a^4."""
    p = param.p
    return ((6.0 * a - 2.0) * p ** 3 + (12.0 * a * a - a - 1.0) * p ** 2
            + 8.0 * a ** 3 * p + 2.0 * a ** 4)


def rho_exact(param: MapParam, a: float) -> Fraction:
    """rho evaluated in exact rational arithmetic (a taken as an exact float)."""
    p = Fraction(param.p)
    u = p + Fraction(a)
    return 2 * u ** 4 - (2 * p ** 3 + p ** 2) * u - p * p * (p + 1)


def alpha_root(param: MapParam) -> float:
    """Unique positive root of rho, bracketed in (0.32, 1/3).

    Bisection with exact rational sign evaluation down to adjacent floats;
    the returned value is within one float spacing of the true root.
    """
    if param.p < 2:
        raise ValueError("alpha_root is defined for p >= 2")
    lo, hi = 0.32, 1.0 / 3.0
    if not (rho_exact(param, lo) < 0 < rho_exact(param, hi)):
        raise RuntimeError("root bracket failure; rho signs are wrong")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if rho_exact(param, mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(rho_exact(param, lo)) < abs(rho_exact(param, hi)) else hi


def aux_functions(param: MapParam, a: float,
                  degree: int = DEFAULT_DEGREE) -> Tuple[FuncRep, FuncRep, FuncRep]:
    """Fitted (g_a, H_a, xi_a)."""
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1]")
    return (fit(aux_g(param, a), degree),
            fit(aux_H(param, a), degree),
            fit(aux_xi(param, a), degree))


def min_max_ratio(param: MapParam, a: float) -> Tuple[float, float, float, float]:
    """Closed-form extremes of xi_a / (V xi_a) on [0, 1] for a in [alpha_p, 1/3].

    Returns (m, M, x0, gamma): minimum m at x0, maximum M = (2/p)(p+a)^2 at 0.
    """
    p = param.p
    alpha = alpha_root(param)
    if not (alpha - 1e-12 <= a <= 1.0 / 3.0 + 1e-12):
        raise ValueError("closed-form extremes hold for a in [alpha_p, 1/3]")
    A = p - p * a - a * a
    B = p * a + a + a * a
    gamma = ((1.0 + a) * B / ((1.0 - a) * A)) ** (1.0 / 3.0)
    x0 = (gamma - 1.0) * p / (1.0 + a - a * gamma)
    m = ((1.0 - a) * (A * gamma + B) ** 2
         + (1.0 + a) * (A + B / gamma) ** 2) / p
    M = 2.0 * (p + a) ** 2 / p
    return m, M, x0, gamma


def min_ratio_display_form(param: MapParam, a: float) -> float:
    """The alternative closed form of the minimum, for cross-checking."""
    p = param.p
    A = p - p * a - a * a
    B = p * a + a + a * a
    gamma = ((1.0 + a) * B / ((1.0 - a) * A)) ** (1.0 / 3.0)
    return ((1.0 - a) * p * p + a * a * (1.0 + a)
            + 3.0 * A * B * ((1.0 - a) * gamma + (1.0 + a) / gamma)) / p


def bounds(param: MapParam) -> Tuple[float, float]:
    """Closed-form sandwich (v_p, w_p) for lambda_p."""
    p = param.p
    v = p / (2.0 * (p * p + 2.0 * p / 3.0 + 1.0 / 9.0))
    w = p / (2.0 * (p * p + 2.0 * p / 3.0 - 2.0 / 9.0))
    return v, w


def sandwich_test_function(param: MapParam,
                           degree: int = DEFAULT_DEGREE) -> FuncRep:
    """The explicit positive test function xi(x) = 1/(p + 1/3 + x)^2."""
    p = param.p
    return fit(lambda x: 1.0 / (p + 1.0 / 3.0 + x) ** 2, degree)


def verify_sandwich(param: MapParam, grid_size: int = 1001,
                    policy: TruncationPolicy = DEFAULT_POLICY,
                    degree: int = DEFAULT_DEGREE) -> SandwichResult:
    """Checks v_p <= (V xi)/xi <= w_p on a dense grid."""
    if param.p < 2:
        raise ValueError("the explicit sandwich function requires p >= 2")
    xi = sandwich_test_function(param, degree)
    img = apply_V(param, xi, policy)
    x = np.linspace(0.0, 1.0, grid_size)
    ratio = img.values(x) / xi.values(x)
    v, w = bounds(param)
    lo, hi = float(ratio.min()), float(ratio.max())
    return SandwichResult(param.p, lo, hi, v, w,
                          lo >= v - 1e-9 and hi <= w + 1e-9)


def _endpoint_rows(degree: int) -> Tuple[np.ndarray, np.ndarray]:
    j = np.arange(degree + 1)
    at1 = np.ones(degree + 1)
    at0 = (-1.0) ** j
    return at0, at1


def _contraction_from_history(diffs) -> float:
    ratios = [b / a for a, b in zip(diffs, diffs[1:]) if a > 0 and b > 0]
    if not ratios:
        return 0.0
    tail = ratios[-4:]
    return float(np.exp(np.mean(np.log(tail))))


def lambda_by_power(param: MapParam, tol: float = 1e-11, n_max: int = 1000,
                    policy: TruncationPolicy = DEFAULT_POLICY,
                    degree: int = DEFAULT_DEGREE,
                    grid_size: int = 1001) -> EigenResult:
    """Power iteration on V started from xi, sup-norm normalized each step."""
    m = operator_matrix("V", param, degree, policy)
    x = np.linspace(0.0, 1.0, grid_size)
    v = sandwich_test_function(param, degree).coeffs.copy()
    v /= np.abs(FuncRep(v).values(x)).max()
    lam_prev = None
    diffs = []
    lam = math.nan
    it = 0
    for it in range(1, n_max + 1):
        w = m @ v
        lam = float(FuncRep(w).values(x).max())
        v = w / lam
        if lam_prev is not None:
            diffs.append(abs(lam - lam_prev))
            if diffs[-1] < tol:
                lam_prev = lam
                break
        lam_prev = lam
    else:
        warnings.warn(f"power iteration did not converge in {n_max} steps "
                      f"(p={param.p}); returning best iterate")
    psi = FuncRep(v)
    residual = float(np.abs(FuncRep(m @ v).values(x) - lam * psi.values(x)).max())
    return EigenResult(param.p, lam, psi, residual,
                       _contraction_from_history(diffs), it)


def lambda_by_ratio(param: MapParam, f0: Optional[FuncRep] = None,
                    n_max: int = 1000, tol: float = 1e-11,
                    policy: TruncationPolicy = DEFAULT_POLICY,
                    degree: int = DEFAULT_DEGREE,
                    grid_size: int = 1001) -> EigenResult:
    """Endpoint-difference ratio of U-iterates; converges to -(-lambda_p)."""
    if f0 is None:
        f0 = fit(lambda x: x, degree)
    x = np.linspace(0.0, 1.0, grid_size)
    if f0.derivative().values(x).min() <= 0.0:
        raise ValueError("starting function must be strictly increasing")
    degree = f0.degree
    m = operator_matrix("U", param, degree, policy)
    at0, at1 = _endpoint_rows(degree)
    # U fixes constants, its dominant mode; endpoint differences ignore
    # constants, so pin that mode by keeping g(0) = 0 throughout.  Otherwise
    # the per-step normalization by r ~ -lambda amplifies the constant
    # component until the difference g(1) - g(0) is cancellation noise.
    g = f0.coeffs.copy()
    g[0] -= float(at0 @ g)
    g = g / float(at1 @ g)
    r_prev = None
    diffs = []
    r = math.nan
    it = 0
    for it in range(1, n_max + 1):
        g = m @ g
        g[0] -= float(at0 @ g)
        r = float(at1 @ g)  # previous iterate normalized to difference 1
        if abs(r) < 1e-300:
            warnings.warn("endpoint difference underflow; stopping early")
            r = r_prev if r_prev is not None else r
            break
        if r_prev is not None:
            diffs.append(abs(r - r_prev))
            if diffs[-1] < tol:
                g = g / r
                break
        g = g / r
        r_prev = r
    else:
        warnings.warn(f"ratio iteration did not converge in {n_max} steps "
                      f"(p={param.p})")
    lam = -r
    # (U^n f)' = (-1)^n V^n f' is proportional to the positive eigenfunction.
    h = FuncRep(g).derivative()
    hx = h.values(x)
    if hx.mean() < 0:
        h = h * -1.0
        hx = -hx
    psi = h * (1.0 / np.abs(hx).max())
    mv = operator_matrix("V", param, psi.degree, policy)
    residual = float(np.abs(FuncRep(mv @ psi.coeffs).values(x)
                            - lam * psi.values(x)).max())
    return EigenResult(param.p, lam, psi, residual,
                       _contraction_from_history(diffs), it)


def functional_F(param: MapParam, f: FuncRep, degree: int = DEFAULT_DEGREE) -> float:
    """Three-piece positive linear functional minorizing V on positive inputs."""
    p = param.p
    if p < 2:
        raise ValueError("the functional's kernel bounds require p >= 2")
    b1 = p / (2.0 * p + 1.0)
    b2 = 0.5
    b3 = p / (p + 1.0)
    piece1 = integrate_function(
        lambda y: p * y * (1.0 - y) / (p + y) ** 2 * f(y), 0.0, b1, degree)
    piece2 = integrate_function(
        lambda y: p / (2.0 * p + 1.0) ** 2 * f(y), b1, b2, degree)
    piece3 = integrate_function(
        lambda y: y * (p - (p + 1.0) * y) / p ** 2 * f(y), b2, b3, degree)
    return piece1 + piece2 + piece3


def tau_bound(param: MapParam, eig: EigenResult) -> float:
    """Upper bound lambda - F(psi)/||psi|| on the second-order rate tau_p."""
    val = eig.lam - functional_F(param, eig.psi) / eig.psi.sup_norm()
    if not 0.0 < val < eig.lam:
        raise ArithmeticError("tau bound escaped (0, lambda); "
                              "eigen data is inconsistent")
    return val


def functional_L(param: MapParam, f: FuncRep, eig: EigenResult,
                 n: Optional[int] = None,
                 policy: TruncationPolicy = DEFAULT_POLICY,
                 grid_size: int = 1001) -> LEstimate:
    """Limit functional L(f) = lim (V^n f)/(lambda^n psi), grid-median estimate."""
    degree = eig.psi.degree
    m = operator_matrix("V", param, degree, policy)
    if n is None:
        c = min(max(eig.contraction_ratio, 0.05), _RATIO_CAP)
        n = max(8, math.ceil(math.log(1e-8) / math.log(c)))
    from .operators import _project
    w = _project(f, degree)
    for _ in range(n):
        w = (m @ w) / eig.lam
    x = np.linspace(0.0, 1.0, grid_size)
    ratio = FuncRep(w).values(x) / eig.psi.values(x)
    spread = float(ratio.max() - ratio.min())
    if spread > 1e-4:
        warnings.warn(f"functional_L under-converged: grid spread {spread:.2e}")
    return LEstimate(float(np.median(ratio)), spread, n)


def spectrum_collocation(param: MapParam, dim: int = 64,
                         policy: TruncationPolicy = DEFAULT_POLICY) -> SpectrumResult:
    """Eigenvalues of the collocated G_p and the conjectured-decay ratios."""
    if dim < 8:
        raise ValueError("dim must be >= 8")
    m = operator_matrix("G", param, dim - 1, policy)
    ev = np.linalg.eigvals(np.asarray(m))
    ev = ev[np.argsort(-np.abs(ev))]
    cutoff = 10.0 * np.finfo(float).eps * np.linalg.norm(m, 2)
    reliable = np.abs(ev) >= cutoff
    # Finite sections of the operator carry slowly-drifting pollution
    # eigenvalues alongside the physical point spectrum.  Physical
    # eigenvalues reproduce when the section grows; polluted ones move.
    ev2 = np.linalg.eigvals(np.asarray(
        operator_matrix("G", param, dim + 15, policy)))
    dist = np.abs(ev[:, None] - ev2[None, :]).min(axis=1)
    reliable &= dist <= 1e-3 * np.abs(ev)
    p, phi = param.p, param.fixed_point
    good = ev[reliable]
    n_keep = min(dim // 4, good.size)
    ns = np.arange(1, n_keep + 1)
    predicted = (-1.0) ** (ns - 1) * p ** (-ns.astype(float)) * phi ** (2 * ns)
    ratios = good[:n_keep].real / predicted
    return SpectrumResult(param.p, dim, ev, ratios, reliable)


def analyze_aux(param: MapParam, a: Optional[float] = None) -> AuxAnalysis:
    """Bundle of the closed-form auxiliary quantities at a (default alpha_p)."""
    alpha = alpha_root(param)
    if a is None:
        a = alpha
    m, M, x0, gamma = min_max_ratio(param, a)
    v, w = bounds(param)
    return AuxAnalysis(param.p, a, alpha, gamma, x0, m, M, v, w)
