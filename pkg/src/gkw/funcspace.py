"""Chebyshev function representations on [0, 1].

Everything downstream (transfer operators, eigen-solvers, distribution
evolution) manipulates functions through this representation: values at
Chebyshev-Lobatto nodes, stored as Chebyshev coefficients on the mapped
variable t = 2x - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy.fft import dct

DEFAULT_DEGREE = 64
_DOMAIN_SLACK = 1e-12


def lobatto_nodes(degree: int) -> np.ndarray:
    """Chebyshev-Lobatto nodes on [0, 1], ascending, endpoints included."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    j = np.arange(degree + 1)
    return 0.5 * (1.0 - np.cos(np.pi * j / degree))


def _to_t(x):
    return 2.0 * np.asarray(x, dtype=float) - 1.0


@dataclass(frozen=True)
class FuncRep:
    """Immutable Chebyshev interpolant of a continuous function on [0, 1]."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a 1-d array")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficients")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(xa)):
            raise ValueError("evaluation point is not finite")
        if np.any(xa < -_DOMAIN_SLACK) or np.any(xa > 1.0 + _DOMAIN_SLACK):
            raise ValueError("evaluation point outside [0, 1]")
        out = _cheb.chebval(_to_t(np.clip(xa, 0.0, 1.0)), self.coeffs)
        return float(out) if np.isscalar(x) or xa.ndim == 0 else out

    def values(self, x):
        """Evaluation without the domain guard (internal fast path)."""
        return _cheb.chebval(_to_t(x), self.coeffs)

    def derivative(self) -> "FuncRep":
        if self.degree == 0:
            return FuncRep(np.zeros(1))
        return FuncRep(2.0 * _cheb.chebder(self.coeffs))

    def antiderivative(self) -> "FuncRep":
        ci = 0.5 * _cheb.chebint(self.coeffs)
        ci[0] -= _cheb.chebval(-1.0, ci)
        return FuncRep(ci)

    def integral(self) -> float:
        """Integral over [0, 1] (Clenshaw-Curtis value of the interpolant)."""
        ci = 0.5 * _cheb.chebint(self.coeffs)
        return float(_cheb.chebval(1.0, ci) - _cheb.chebval(-1.0, ci))

    def osc(self, grid_size: int = 1001) -> float:
        v = self.values(np.linspace(0.0, 1.0, grid_size))
        return float(v.max() - v.min())

    def sup_norm(self, grid_size: int = 1001) -> float:
        v = self.values(np.linspace(0.0, 1.0, grid_size))
        return float(np.abs(v).max())

    def decay_diagnostic(self) -> float:
        """Trailing-coefficient size relative to the largest coefficient.

        Large values mean the declared degree under-resolves the function.
        """
        c = np.abs(self.coeffs)
        top = max(c.max(), np.finfo(float).tiny)
        tail = c[-3:] if c.size >= 3 else c
        return float(tail.max() / top)

    def __add__(self, other: "FuncRep") -> "FuncRep":
        a, b = self.coeffs, other.coeffs
        n = max(a.size, b.size)
        out = np.zeros(n)
        out[: a.size] += a
        out[: b.size] += b
        return FuncRep(out)

    def __sub__(self, other: "FuncRep") -> "FuncRep":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "FuncRep":
        return FuncRep(self.coeffs * float(scalar))

    __rmul__ = __mul__


def fit(f: Union[Callable, Sequence[float], np.ndarray],
        degree: int = DEFAULT_DEGREE) -> FuncRep:
    """Interpolate through the degree+1 Chebyshev-Lobatto nodes on [0, 1].

    `f` is either a callable on [0, 1] or the samples at `lobatto_nodes(degree)`
    (ascending order).
    """
    if degree < 2:
        raise ValueError("degree must be >= 2")
    x = lobatto_nodes(degree)
    if callable(f):
        v = np.asarray([f(xi) for xi in x], dtype=float) \
            if not _vectorized_ok(f, x) else np.asarray(f(x), dtype=float)
    else:
        v = np.asarray(f, dtype=float)
        if v.shape != x.shape:
            raise ValueError("sample count must equal degree + 1")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite sample values")
    return FuncRep(coeffs_from_lobatto_values(v))


def _vectorized_ok(f, x) -> bool:
    try:
        out = np.asarray(f(x), dtype=float)
        return out.shape == x.shape
    except Exception:
        return False


def coeffs_from_lobatto_values(v: np.ndarray) -> np.ndarray:
    """DCT-I Chebyshev coefficients from values at ascending Lobatto nodes."""
    n = v.size - 1
    u = v[::-1]  # values at t_j = cos(pi j / n)
    c = dct(u, type=1) / n
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def evaluate(f: FuncRep, x):
    return f(x)


def derivative(f: FuncRep) -> FuncRep:
    return f.derivative()


def antiderivative(f: FuncRep) -> FuncRep:
    return f.antiderivative()


def integral(f: FuncRep) -> float:
    return f.integral()


def osc(f: FuncRep, grid_size: int = 1001) -> float:
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    return f.osc(grid_size)


def sup_norm(f: FuncRep, grid_size: int = 1001) -> float:
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    return f.sup_norm(grid_size)


def integrate_function(f: Callable, lo: float, hi: float,
                       degree: int = DEFAULT_DEGREE) -> float:
    """Clenshaw-Curtis integral of a callable over [lo, hi]."""
    if hi <= lo:
        raise ValueError("need hi > lo")
    x = lo + (hi - lo) * lobatto_nodes(degree)
    v = np.asarray([f(xi) for xi in x], dtype=float)
    c = coeffs_from_lobatto_values(v)
    ci = _cheb.chebint(c)
    return 0.5 * (hi - lo) * float(_cheb.chebval(1.0, ci) - _cheb.chebval(-1.0, ci))
