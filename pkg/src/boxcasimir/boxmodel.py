"""Box geometry, Dirichlet eigendata, lattice enumeration and side-subset weights.

Axes are numbered from 0 throughout the Python API.  A point is any
sequence of ``d`` floats inside the closed box.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError

POSITIVE = "positive-orthant"
FULL = "full-lattice"


@dataclass(frozen=True)
class BoxGeometry:
    """The box (0, a_1) x ... x (0, a_d) with Dirichlet walls."""

    sides: tuple[float, ...]

    def __post_init__(self):
        sides = tuple(float(a) for a in self.sides)
        if len(sides) < 1:
            raise DomainError("a box needs at least one side")
        if not all(math.isfinite(a) and a > 0 for a in sides):
            raise DomainError(f"side lengths must be positive and finite, got {sides}")
        object.__setattr__(self, "sides", sides)

    @property
    def d(self) -> int:
        return len(self.sides)

    @property
    def a(self) -> float:
        """Shortest side."""
        return min(self.sides)

    @property
    def A(self) -> float:
        """Longest side."""
        return max(self.sides)

    @property
    def volume(self) -> float:
        return math.prod(self.sides)

    def with_side(self, axis: int, length: float) -> "BoxGeometry":
        sides = list(self.sides)
        sides[axis] = length
        return BoxGeometry(tuple(sides))

    def permuted(self, order: Sequence[int]) -> "BoxGeometry":
        return BoxGeometry(tuple(self.sides[i] for i in order))

    def scaled(self, lam: float) -> "BoxGeometry":
        return BoxGeometry(tuple(lam * a for a in self.sides))

    def check_point(self, x: Sequence[float]) -> tuple[float, ...]:
        """Validate a point of the closed box and return it as a tuple."""
        x = tuple(float(v) for v in x)
        if len(x) != self.d:
            raise DomainError(f"point has {len(x)} coordinates, box has d = {self.d}")
        for xi, ai in zip(x, self.sides):
            if not (0.0 <= xi <= ai):
                raise DomainError(f"point {x} is outside the box {self.sides}")
        return x

    def is_interior(self, x: Sequence[float]) -> bool:
        return all(0.0 < xi < ai for xi, ai in zip(x, self.sides))


@dataclass(frozen=True)
class SideId:
    """The side where coordinate ``axis`` equals 0 (lam = 0) or a_axis (lam = 1)."""

    axis: int
    lam: int = 0

    def __post_init__(self):
        if self.lam not in (0, 1):
            raise DomainError("side label lam must be 0 or 1")
        if self.axis < 0:
            raise DomainError("axis index must be non-negative")

    def outward_normal(self) -> float:
        """Component of the unit outer normal along ``axis``."""
        return -1.0 if self.lam == 0 else 1.0

    def coordinate(self, g: BoxGeometry) -> float:
        return 0.0 if self.lam == 0 else g.sides[self.axis]


def omega_sq(n, g: BoxGeometry):
    """Dirichlet eigenvalue sum_i n_i^2 pi^2 / a_i^2; ``n`` may be a tuple or an (M, d) array."""
    n = np.asarray(n, dtype=float)
    k2 = (np.pi / np.asarray(g.sides)) ** 2
    return n ** 2 @ k2


def sine_factors(k: np.ndarray, x: Sequence[float], g: BoxGeometry) -> np.ndarray:
    """sin(k_i x_i) per column, exactly zero when x_i sits on a wall."""
    s = np.sin(k * np.asarray(x, dtype=float))
    for i, (xi, ai) in enumerate(zip(x, g.sides)):
        if xi == 0.0 or xi == ai:
            s[..., i] = 0.0
    return s


def c_n(n, x, y, g: BoxGeometry):
    """Product of Dirichlet sines prod_i sin(n_i pi y_i / a_i) sin(n_i pi x_i / a_i)."""
    n = np.asarray(n, dtype=float)
    k = n * np.pi / np.asarray(g.sides)
    return np.prod(sine_factors(k, x, g) * sine_factors(k, y, g), axis=-1)


def image_shifts(l: Sequence[int], x, y, g: BoxGeometry) -> np.ndarray:
    """U_{l_i}(x_i, y_i): (x-y)/(2a) for l_i = 1 and (x+y)/(2a) for l_i = 2."""
    out = np.empty(len(l))
    for i, li in enumerate(l):
        if li == 1:
            out[i] = (x[i] - y[i]) / (2 * g.sides[i])
        elif li == 2:
            out[i] = (x[i] + y[i]) / (2 * g.sides[i])
        else:
            raise DomainError("image labels must be 1 or 2")
    return out


def image_sign(l: Sequence[int]) -> int:
    """delta_l = (-1)^(number of reflected axes)."""
    return -1 if sum(1 for li in l if li == 2) % 2 else 1


def b_hl(h, l, x, y, g: BoxGeometry):
    """Image distance sum_i a_i^2 (h_i - U_{l_i})^2; ``h`` may be a tuple or an (M, d) array."""
    h = np.asarray(h, dtype=float)
    u = image_shifts(l, x, y, g)
    sides = np.asarray(g.sides)
    return ((h - u) ** 2) @ sides ** 2


def zero_mask(h: np.ndarray, l: Sequence[int], x, y, g: BoxGeometry) -> np.ndarray:
    """Rows of ``h`` whose image distance vanishes, decided on exact coordinates."""
    h = np.atleast_2d(np.asarray(h))
    mask = np.ones(h.shape[0], dtype=bool)
    for i, li in enumerate(l):
        if li == 1:
            ok = h[:, i] == 0 if x[i] == y[i] else np.zeros(h.shape[0], dtype=bool)
        elif x[i] == y[i] == 0.0:
            ok = h[:, i] == 0
        elif x[i] == y[i] == g.sides[i]:
            ok = h[:, i] == 1
        else:
            ok = np.zeros(h.shape[0], dtype=bool)
        mask &= ok
    return mask


def classify_zero(h, l, x, y, g: BoxGeometry) -> bool:
    """True iff b_hl(x, y) = 0 exactly."""
    return bool(zero_mask(np.asarray(h)[None, :], l, x, y, g)[0])


@lru_cache(maxsize=256)
def _shell(d: int, kind: str, n2max: int) -> np.ndarray:
    r = math.isqrt(n2max)
    lo = 1 if kind == POSITIVE else -r
    axis = np.arange(lo, r + 1)
    if axis.size == 0:
        return np.zeros((0, d), dtype=np.int64)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([gr.ravel() for gr in grids], axis=1)
    pts = pts[(pts ** 2).sum(axis=1) <= n2max]
    pts.setflags(write=False)
    return pts


def enumerate_shell(d: int, kind: str, N: float) -> np.ndarray:
    """Integer tuples with Euclidean norm <= N, in lexicographic order.

    ``kind`` is ``"positive-orthant"`` (all entries >= 1) or ``"full-lattice"``.
    Returns a read-only (M, d) integer array.
    """
    if kind not in (POSITIVE, FULL):
        raise DomainError(f"unknown lattice kind {kind!r}")
    if not N > 0:
        raise DomainError("shell radius must be positive")
    if d < 1:
        raise DomainError("dimension must be at least 1")
    return _shell(d, kind, int(math.floor(N * N)))


def shell_between(d: int, kind: str, n_lo: float, n_hi: float) -> np.ndarray:
    """Tuples with n_lo < |n| <= n_hi, lexicographic."""
    pts = enumerate_shell(d, kind, n_hi)
    return pts[(pts ** 2).sum(axis=1) > math.floor(n_lo * n_lo)]


def subset_coefficients(g: BoxGeometry, p: int, among: Sequence[int] | None = None):
    """Products a_S = prod_{i in S} a_i over the p-element subsets S of the axes.

    ``among`` restricts the candidate axes (all axes by default).  Entries are
    (product, subset) pairs in lexicographic order of the subset; p = 0 gives
    the single entry (1.0, ()).
    """
    axes = tuple(range(g.d)) if among is None else tuple(among)
    if not 0 <= p <= len(axes):
        raise DomainError(f"subset size {p} out of range for {len(axes)} axes")
    return [(math.prod(g.sides[i] for i in sub), sub) for sub in itertools.combinations(axes, p)]
