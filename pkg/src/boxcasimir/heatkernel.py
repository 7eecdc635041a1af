"""The Dirichlet heat kernel of the box in its two truncated representations.

``heat_large`` is the eigenfunction expansion, fast for large diffusion time.
``heat_small`` is the method-of-images sum, fast for small diffusion time.
Both are kept so each can check the other.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .boxmodel import FULL, POSITIVE, BoxGeometry, enumerate_shell, image_sign, image_shifts, sine_factors
from .errors import DomainError


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise DomainError("diffusion time must be positive")
    return t


def default_radius_large(t: float, g: BoxGeometry) -> float:
    return max(6.0, math.ceil(8.0 * g.A / math.sqrt(t)))


def default_radius_small(t: float, g: BoxGeometry) -> float:
    return max(6.0, math.ceil(8.0 * math.sqrt(t)) / g.a + 2.0 * math.sqrt(g.d))


def heat_large(t, x, y, g: BoxGeometry, N: float | None = None) -> float:
    """(2^d / prod a_i) sum_{|n| <= N} exp(-omega_n^2 t) C_n(x, y)."""
    t = _check_t(t)
    x, y = g.check_point(x), g.check_point(y)
    if N is None:
        N = default_radius_large(t, g)
    n = enumerate_shell(g.d, POSITIVE, N)
    k = n * (np.pi / np.asarray(g.sides))
    c = np.prod(sine_factors(k, x, g) * sine_factors(k, y, g), axis=1)
    terms = np.exp(-t * (k ** 2).sum(axis=1)) * c
    return 2.0 ** g.d / g.volume * math.fsum(terms)


def heat_small(t, x, y, g: BoxGeometry, N: float | None = None) -> float:
    """(4 pi t)^(-d/2) sum_{|h| <= N} sum_l delta_l exp(-b_hl(x, y) / t)."""
    t = _check_t(t)
    x, y = g.check_point(x), g.check_point(y)
    if N is None:
        N = default_radius_small(t, g)
    h = enumerate_shell(g.d, FULL, N)
    sides2 = np.asarray(g.sides) ** 2
    parts = []
    for l in itertools.product((1, 2), repeat=g.d):
        b = ((h - image_shifts(l, x, y, g)) ** 2) @ sides2
        parts.append(image_sign(l) * np.exp(-b / t))
    return (4.0 * math.pi * t) ** (-0.5 * g.d) * math.fsum(np.concatenate(parts))
