"""The map T_p(x) = {p/x}, its invariant measure, and closed-form constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

_MIN_X = 1e-300  # below this p/x overflows; no experiment needs such inputs


@dataclass(frozen=True)
class MapParam:
    """Integer parameter p >= 1 with its derived constants."""

    p: int
    log_norm: float = field(init=False)
    fixed_point: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or self.p < 1:
            raise ValueError("p must be a positive integer")
        p = int(self.p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "log_norm", math.log1p(1.0 / p))
        object.__setattr__(self, "fixed_point",
                           0.5 * (math.sqrt(p * p + 4.0 * p) - p))


@dataclass(frozen=True)
class DigitSeq:
    """Digits a_i = floor(p / x_{i-1}) along an orbit of T_p."""

    p: int
    digits: tuple

    def __post_init__(self):
        if any(a < self.p for a in self.digits):
            raise ValueError("every digit must be >= p")


def _check_unit_interval(x: float, closed_left: bool = True) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    lo_ok = (x >= 0.0) if closed_left else (x > 0.0)
    if not (lo_ok and x <= 1.0):
        raise ValueError("x outside the admissible interval")
    return x


def apply_map(param: MapParam, x: float) -> float:
    """T_p(x): 0 at x = 0, otherwise the fractional part of p/x."""
    x = _check_unit_interval(x)
    if x == 0.0:
        return 0.0
    if x < _MIN_X:
        raise ValueError("x too small: p/x overflows double precision")
    q = param.p / x
    return q - math.floor(q)


def digits(param: MapParam, x: float, n: int) -> DigitSeq:
    """First n digits of the orbit of x; stops early if an iterate hits 0."""
    x = _check_unit_interval(x, closed_left=False)
    if n < 1:
        raise ValueError("n must be >= 1")
    p = param.p
    out = []
    for _ in range(n):
        a = math.floor(p / x)
        out.append(int(a))
        x = p / x - a
        if x <= 0.0:
            break
    return DigitSeq(p, tuple(out))


def from_digits(param: MapParam, seq: Sequence[int]) -> float:
    """Finite continued fraction x = p/(a_1 + p/(a_2 + ...))."""
    x = 0.0
    for a in reversed(list(seq)):
        x = param.p / (a + x)
    return x


def stationary_cdf(param: MapParam, x: float) -> float:
    """Phi_p(x), the invariant-measure mass of [0, x]."""
    x = _check_unit_interval(x)
    return math.log1p(x / param.p) / param.log_norm


def stationary_density(param: MapParam, x: float) -> float:
    """eta_p(x) = 1 / ((ln(p+1) - ln p)(p + x))."""
    x = _check_unit_interval(x)
    return 1.0 / (param.log_norm * (param.p + x))


def zeta_tail(s: int, z) -> "np.ndarray | float":
    """Hurwitz-style tail sum_{k=0..inf} (z+k)^(-s) for s in {2, 3}, real z >= 1.

    Partial summation over 50 terms plus an Euler-Maclaurin tail; absolute
    accuracy is well below 1e-14 on the arguments used here.
    """
    if s not in (2, 3):
        raise ValueError("only s = 2 and s = 3 are supported")
    z = np.asarray(z, dtype=float)
    if np.any(z < 1.0):
        raise ValueError("z must be >= 1")
    m = 50
    ks = z[..., None] + np.arange(m)
    head = np.sum(ks ** (-float(s)), axis=-1)
    a = z + m
    tail = (a ** (1 - s) / (s - 1)
            + 0.5 * a ** (-s)
            + s * a ** (-s - 1) / 12.0
            - s * (s + 1) * (s + 2) * a ** (-s - 3) / 720.0
            + s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * a ** (-s - 5) / 30240.0)
    out = head + tail
    return float(out) if out.ndim == 0 else out


def hurwitz_zeta(s: int, param: MapParam) -> float:
    """zeta(s, p) = sum_{k >= p} k^(-s) for s in {2, 3}."""
    return float(zeta_tail(s, float(param.p)))


def kuzmin_rate(param: MapParam) -> float:
    """Q_p = 2 p^2 zeta(3, p) - p zeta(2, p), the Levy-type convergence rate."""
    p = param.p
    return 2.0 * p * p * hurwitz_zeta(3, param) - p * hurwitz_zeta(2, param)


def kuzmin_rate_bound(param: MapParam) -> float:
    """Closed-form majorant 1/(2p) + 3/(8 p^2), valid for p >= 2."""
    if param.p < 2:
        raise ValueError("bound stated for p >= 2")
    p = param.p
    return 1.0 / (2.0 * p) + 3.0 / (8.0 * p * p)
