"""Closed-form auxiliary function family used for operator tail control.

For each a in [0, 1]:

    H_a(x)  = 1 / (p + a + x)
    g_a(x)  = (p + x)/(p + a x) - p/(p + (1+a) x)
    xi_a(x) = g_a'(x) = p(1-a)/(p + a x)^2 + p(1+a)/(p + (1+a) x)^2

with the exact operator images U g_a = H_a and V xi_a = 1/(p + a + x)^2.
These identities also anchor several tests.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .gauss import MapParam


def aux_H(param: MapParam, a: float) -> Callable:
    p = param.p

    def H(x):
        return 1.0 / (p + a + np.asarray(x, dtype=float))

    return H


def aux_g(param: MapParam, a: float) -> Callable:
    p = param.p

    def g(x):
        x = np.asarray(x, dtype=float)
        return (p + x) / (p + a * x) - p / (p + (1.0 + a) * x)

    return g


def aux_xi(param: MapParam, a: float) -> Callable:
    p = param.p

    def xi(x):
        x = np.asarray(x, dtype=float)
        return (p * (1.0 - a) / (p + a * x) ** 2
                + p * (1.0 + a) / (p + (1.0 + a) * x) ** 2)

    return xi


def v_image_of_xi(param: MapParam, a: float) -> Callable:
    """The exact image V xi_a = 1/(p + a + x)^2."""
    p = param.p

    def img(x):
        return 1.0 / (p + a + np.asarray(x, dtype=float)) ** 2

    return img
