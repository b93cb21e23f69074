"""Distribution-function evolution under the map and its error profile.

The recursion phi_{n+1}(x) = sum_k [phi_n(p/k) - phi_n(p/(k+x))] fixes the
stationary CDF Phi_p.  Because the recursion is linear, the deviation
Delta_n = phi_n - Phi_p obeys the same recursion; evolving Delta directly
keeps full relative accuracy even when |Delta_n| ~ lambda_p^n falls many
orders below 1, which direct subtraction of two O(1) functions cannot.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .funcspace import DEFAULT_DEGREE, FuncRep, fit
from .gauss import MapParam, stationary_cdf
from .operators import DEFAULT_POLICY, TruncationPolicy, apply_evolution_step, apply_U
from .spectral import EigenResult


@dataclass(frozen=True)
class EvolutionTrace:
    p: int
    steps: int
    grid: np.ndarray
    phi: List[FuncRep]     # phi[0] .. phi[steps]
    deltas: List[FuncRep]  # deltas[n] = phi[n] - stationary CDF, exact evolution


@dataclass(frozen=True)
class WirsingProfile:
    """Leading-order error shape: Delta_n ~ (-lambda)^n * L * Psi."""

    p: int
    Psi: FuncRep
    Theta: FuncRep
    L_g0: float
    residual: float


@dataclass(frozen=True)
class InterpolationCheck:
    passed: bool
    worst_margin: float
    sup_second_derivative: float


def evolve_cdf(param: MapParam, phi0: Optional[FuncRep] = None, n: int = 30,
               policy: TruncationPolicy = DEFAULT_POLICY,
               degree: int = DEFAULT_DEGREE,
               grid_size: int = 1001) -> EvolutionTrace:
    """Evolve a starting CDF n steps; returns all iterates and deviations."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if phi0 is None:
        phi0 = fit(lambda x: x, degree)
    grid = np.linspace(0.0, 1.0, grid_size)
    v = phi0.values(grid)
    if abs(phi0(0.0)) > 1e-10 or abs(phi0(1.0) - 1.0) > 1e-10:
        raise ValueError("phi0 must satisfy phi0(0) = 0 and phi0(1) = 1")
    if np.any(np.diff(v) < -1e-12):
        raise ValueError("phi0 must be nondecreasing")
    cdf_rep = fit(lambda x: stationary_cdf(param, x), degree)
    from .operators import _project
    d = FuncRep(_project(phi0 - cdf_rep, degree))
    deltas = [d]
    for _ in range(n):
        d = apply_evolution_step(param, d, policy)
        # The recursion conserves d(1) - d(0) (its eigenvalue-1 component,
        # zero for CDF data).  Truncation residue injects ~1e-13 of it per
        # step and it never decays, so re-pin it to keep d purely decaying.
        d = d - float(d(1.0) - d(0.0)) * cdf_rep
        deltas.append(d)
    phis = [cdf_rep + dd for dd in deltas]
    return EvolutionTrace(param.p, n, grid, phis, deltas)


def delta(trace: EvolutionTrace, k: int) -> FuncRep:
    """Deviation Delta_k = phi_k - Phi_p, carried at full relative accuracy."""
    return trace.deltas[k]


def build_Psi(param: MapParam, eig: EigenResult,
              policy: TruncationPolicy = DEFAULT_POLICY,
              osc_tol: float = 1e-10, max_iter: int = 200) -> FuncRep:
    """The profile Psi with ((p+x) Psi')' = psi, Psi(0) = Psi(1) = 0.

    Construction: tilde = int psi; iterate U on tilde until flat (U preserves
    endpoint values in the limit, and the limit is the constant fixing the
    boundary condition); then Psi(x) = int_0^x (tilde - const)/(p + t) dt.
    """
    tilde = eig.psi.antiderivative()
    grid = np.linspace(0.0, 1.0, 1001)
    g = tilde
    const = None
    for _ in range(max_iter):
        g = apply_U(param, g, policy)
        vals = g.values(grid)
        if vals.max() - vals.min() < osc_tol:
            const = float(vals.mean())
            break
    if const is None:
        raise RuntimeError("U-iteration of int(psi) failed to flatten")
    p = param.p
    integrand = fit(lambda t: (tilde(t) - const) / (p + t), eig.psi.degree)
    Psi = integrand.antiderivative()
    if abs(Psi(1.0)) > 1e-8:
        warnings.warn(f"Psi(1) = {Psi(1.0):.2e} is not as small as expected")
    return Psi


def estimate_Theta(trace: EvolutionTrace, eig: EigenResult, n: int,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> WirsingProfile:
    """Rescale Delta_n by (-lambda)^(-n) and fit the profile L * Psi."""
    if not 0 <= n <= trace.steps:
        raise ValueError("n outside the recorded range")
    param = MapParam(trace.p)
    scale = (-1.0 / eig.lam) ** n
    Theta = delta(trace, n) * scale
    Psi = build_Psi(param, eig, policy)
    x = trace.grid
    inner = (x >= 0.05) & (x <= 0.95)  # skip the end zones where Psi -> 0
    ratio = Theta.values(x[inner]) / Psi.values(x[inner])
    L = float(np.median(ratio))
    residual = float(np.abs(Theta.values(x) - L * Psi.values(x)).max())
    if residual > 1e-3:
        warnings.warn(f"Theta profile residual {residual:.2e}; "
                      "n may be too small for the leading term to dominate")
    return WirsingProfile(trace.p, Psi, Theta, L, residual)


def interpolation_check(f: FuncRep, grid_size: int = 1001) -> InterpolationCheck:
    """Check |f(y)| <= y(1-y)/2 * sup|f''| for a function vanishing at 0 and 1."""
    if abs(f(0.0)) > 1e-10 or abs(f(1.0)) > 1e-10:
        raise ValueError("f must vanish at both endpoints")
    m2 = f.derivative().derivative().sup_norm(grid_size)
    y = np.linspace(0.0, 1.0, grid_size)
    margin = 0.5 * y * (1.0 - y) * m2 - np.abs(f.values(y))
    worst = float(margin.min())
    return InterpolationCheck(worst >= -1e-12 * max(1.0, m2), worst, m2)


def montecarlo_cdf(param: MapParam, n: int, samples: int, seed: int,
                   xs: Sequence[float]) -> np.ndarray:
    """Empirical CDF of the n-th map iterate of uniform starting points.

    Counter-based generator (Philox) keyed by the seed, so results are
    bit-reproducible across runs and platforms.
    """
    if samples < 10_000:
        raise ValueError("samples must be >= 10000 for a meaningful estimate")
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    x = rng.random(samples)
    p = float(param.p)
    for _ in range(n):
        alive = x > 0.0
        q = np.divide(p, x, out=np.zeros_like(x), where=alive)
        x = np.where(alive, q - np.floor(q), 0.0)
    x.sort()
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise ValueError("abscissae must lie in [0, 1]")
    return np.searchsorted(x, xs, side="right") / samples


def binomial_se(fraction: float, samples: int) -> float:
    """Standard error of an empirical CDF value."""
    f = min(max(fraction, 0.0), 1.0)
    return math.sqrt(max(f * (1.0 - f), 1.0 / samples) / samples)
