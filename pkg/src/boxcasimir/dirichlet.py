"""Certified evaluation of the Dirichlet kernel D_s(x, y) of (-Laplacian)^(-s) on the box.

The Mellin integral over the heat kernel is cut at diffusion time T.  The part
above the cut is an eigenmode sum (``d_sup``), entire in s.  The part below
the cut is an image sum built from P_s (``d_inf``) and carries the only pole.
Each truncated sum comes with a rigorous bound on the dropped tail.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .boxmodel import FULL, POSITIVE, BoxGeometry, enumerate_shell, image_shifts, image_sign, shell_between, zero_mask
from .errors import DomainError, PoleError
from .specfun import log_upper_gamma, p_values, rgamma, upper_gamma

ALPHA_GRID = tuple(round(0.01 * k, 2) for k in range(1, 21))
RADIUS_INFLATION = 1e-14
# relative error allowed per computed term: special functions are good to
# about 1e-13 and each term adds a few roundings on top
TERM_ROUNDING = 1e-13


def default_alpha(d: int) -> float:
    return 0.03 if d == 1 else 0.04


@dataclass(frozen=True)
class TruncationParams:
    """Mellin cut T, shell radius N and the tail-bound parameter alpha.

    ``N=None`` lets each routine pick the smallest radius meeting ``tol``.
    ``alpha=None`` uses the dimension default; ``alpha="auto"`` minimises the
    bound over a coarse grid.  ``T=None`` balances the two halves of the split
    with T = a A / pi.
    """

    T: float | None = 1.0
    N: float | None = None
    alpha: float | str | None = None
    tol: float = 1e-12

    def __post_init__(self):
        if self.T is not None and not (math.isfinite(self.T) and self.T > 0):
            raise DomainError("Mellin cut T must be positive")
        if self.N is not None and not (math.isfinite(self.N) and self.N > 0):
            raise DomainError("shell radius N must be positive")
        if self.alpha is not None and self.alpha != "auto" and not 0 < self.alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")
        if not self.tol > 0:
            raise DomainError("tolerance must be positive")

    def cut(self, g: BoxGeometry) -> float:
        return self.T if self.T is not None else g.a * g.A / math.pi

    def alphas(self, d: int) -> tuple[float, ...]:
        if self.alpha == "auto":
            return ALPHA_GRID
        return (self.alpha if self.alpha is not None else default_alpha(d),)

    def with_N(self, N: float | None) -> "TruncationParams":
        return replace(self, N=N)

    def with_T(self, T: float | None) -> "TruncationParams":
        return replace(self, T=T)


@dataclass(frozen=True)
class CertifiedValue:
    """A value with a bound on its truncation error.

    ``radius`` is ``inf`` when no bound is available.
    """

    value: float | complex
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise DomainError(f"radius must be non-negative, got {self.radius}")

    def __add__(self, other):
        if isinstance(other, CertifiedValue):
            return CertifiedValue(self.value + other.value, self.radius + other.radius)
        return CertifiedValue(self.value + other, self.radius)

    __radd__ = __add__

    def __neg__(self):
        return CertifiedValue(-self.value, self.radius)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, CertifiedValue):
            return NotImplemented
        return CertifiedValue(self.value * c, self.radius * abs(c) if self.radius else 0.0)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    @property
    def real(self) -> "CertifiedValue":
        return CertifiedValue(complex(self.value).real, self.radius)

    @property
    def lo(self) -> float:
        return complex(self.value).real - self.radius

    @property
    def hi(self) -> float:
        return complex(self.value).real + self.radius

    def contains(self, x, slack: float = 0.0) -> bool:
        return abs(self.value - x) <= self.radius + slack

    def overlaps(self, other: "CertifiedValue") -> bool:
        return abs(self.value - other.value) <= self.radius + other.radius

    def __str__(self):
        v = self.value
        if isinstance(v, complex) and v.imag == 0:
            v = v.real
        return f"{v:.12g} ± {self.radius:.2g}"


@dataclass(frozen=True)
class DerivSelector:
    """Two spatial variables for a second derivative, e.g. (("x", 0), ("y", 0))."""

    first: tuple[str, int]
    second: tuple[str, int]

    def __post_init__(self):
        for which, axis in (self.first, self.second):
            if which not in ("x", "y") or axis < 0:
                raise DomainError(f"bad derivative variable {(which, axis)}")

    def check(self, d: int):
        if max(self.first[1], self.second[1]) >= d:
            raise DomainError("derivative axis out of range")

    @property
    def same_axis(self) -> bool:
        return self.first[1] == self.second[1]


def xy(i: int, j: int | None = None) -> DerivSelector:
    """Selector for d^2 / dx^i dy^j."""
    return DerivSelector(("x", i), ("y", i if j is None else j))


def xx(i: int, j: int | None = None) -> DerivSelector:
    """Selector for d^2 / dx^i dx^j."""
    return DerivSelector(("x", i), ("x", i if j is None else j))


# ---------------------------------------------------------------- tail bounds

def log_h_bound(d: int, N: float, alpha: float, beta: float, sigma: float, rho: float) -> float:
    """Natural log of ``h_bound``; stays finite where the bound itself underflows.

    Raises DomainError outside the regime where the bound is proved:
    N <= 2 sqrt(d), or rho > 0 with N <= 2 sqrt(d) + sqrt(rho / (2 alpha beta)).
    """
    sd = math.sqrt(d)
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    if not beta > 0:
        raise DomainError("beta must be positive")
    if not N > 2 * sd:
        raise DomainError(f"shell radius N = {N} must exceed 2 sqrt(d) = {2 * sd:.6g}")
    if rho > 0:
        need = 2 * sd + math.sqrt(rho / (2 * alpha * beta))
        if not N > need:
            raise DomainError(f"shell radius N = {N} must exceed {need:.6g} for rho = {rho}")
    return (0.5 * d * math.log(math.pi) - sigma * math.log1p(-alpha)
            - 0.5 * (d + rho) * math.log(alpha * beta) - math.lgamma(0.5 * d)
            + (d - 1) * math.log((N - sd) / (N - 2 * sd))
            + log_upper_gamma(sigma, (1 - alpha) * beta * N * N)
            + log_upper_gamma(0.5 * (d + rho), alpha * beta * (N - 2 * sd) ** 2))


def h_bound(d: int, N: float, alpha: float, beta: float, sigma: float, rho: float) -> float:
    """Upper bound for sum_{h in Z^d, |h| > N} |h|^rho |Gamma(s, beta |h|^2)|, Re s = sigma."""
    return math.exp(log_h_bound(d, N, alpha, beta, sigma, rho))


def log_h_asymptotic(d: int, N: float, alpha: float, beta: float, sigma: float, rho: float) -> float:
    """Natural log of the leading large-N behaviour of ``h_bound``."""
    return (0.5 * d * math.log(math.pi) + (sigma - 2) * math.log(beta) - 4 * alpha * beta * d
            - math.log(alpha * (1 - alpha)) - math.lgamma(0.5 * d)
            - beta * N * N + 4 * alpha * beta * math.sqrt(d) * N + (2 * sigma + rho + d - 4) * math.log(N))


def h_asymptotic(d: int, N: float, alpha: float, beta: float, sigma: float, rho: float) -> float:
    """Leading large-N behaviour of ``h_bound``."""
    return math.exp(log_h_asymptotic(d, N, alpha, beta, sigma, rho))


def c_const(g: BoxGeometry, sigma: float, N: float) -> float:
    """max((a (1 - sqrt(d)/N))^(2 sigma), (A (1 + sqrt(d)/N))^(2 sigma))."""
    r = math.sqrt(g.d) / N
    if not r < 1:
        raise DomainError("c_const needs N > sqrt(d)")
    return max((g.a * (1 - r)) ** (2 * sigma), (g.A * (1 + r)) ** (2 * sigma))


def best_over_alpha(bound: Callable[[float], float], alphas: Sequence[float]) -> float:
    """Smallest bound over the admissible alphas; DomainError if none is admissible."""
    best = math.inf
    err = None
    for al in alphas:
        try:
            best = min(best, bound(al))
        except DomainError as exc:
            err = exc
    if best == math.inf and err is not None:
        raise err
    return best


def _maxpow(g: BoxGeometry, e: float) -> float:
    return max(g.a ** e, g.A ** e)


# ---------------------------------------------------------------- summation

def fsum(v: np.ndarray):
    """Correctly rounded sum of a 1-D array, real or complex."""
    if np.iscomplexobj(v):
        return complex(math.fsum(v.real), math.fsum(v.imag))
    return math.fsum(v)


def certified_lattice_sum(terms: Callable[[np.ndarray], np.ndarray], d: int, kind: str, N: float,
                          tail: Callable[[float], np.ndarray], extend: bool = False):
    """Sum ``terms`` over the shell |idx| <= N and bound what is left out.

    ``terms`` maps an (M, d) index array to an (M, K) array of K series at
    once; ``tail(N)`` returns K radii for the part |idx| > N or raises
    DomainError when N is too small for the bound.  With ``extend`` the gap
    up to the first admissible radius is summed in absolute value instead.
    The radii also carry TERM_ROUNDING times the sum of |terms|.
    Returns (values, radii) as lists.
    """
    idx = enumerate_shell(d, kind, N)
    block = terms(idx) if len(idx) else None
    try:
        radii = np.asarray(tail(N), dtype=float)
    except DomainError:
        if not extend:
            raise
        M = math.floor(N) + 1
        while True:
            try:
                radii = np.asarray(tail(M), dtype=float)
                break
            except DomainError:
                M += 1
                if M > N + 5000:
                    raise
        gap = shell_between(d, kind, N, M)
        if len(gap):
            absgap = np.abs(terms(gap))
            radii = radii + np.array([math.fsum(absgap[:, k]) for k in range(absgap.shape[1])])
    if block is None:
        values = [0.0] * len(radii)
    else:
        values = [fsum(block[:, k]) for k in range(block.shape[1])]
        mags = np.abs(block)
        radii = radii + TERM_ROUNDING * np.array([math.fsum(mags[:, k]) for k in range(mags.shape[1])])
    return values, [float(r) * (1 + RADIUS_INFLATION) for r in radii]


def choose_radius(tail: Callable[[float], float], tol: float, start: float, limit: float = 4000) -> float:
    """Smallest integer radius >= start whose admissible tail bound is <= tol."""
    N = float(math.ceil(start))
    while N <= limit:
        try:
            if tail(N) <= tol:
                return N
        except DomainError:
            pass
        N += 1
    raise DomainError(f"no shell radius up to {limit} meets tolerance {tol}")


# ---------------------------------------------------------------- eigenmode part

def _sin_deriv(k: np.ndarray, xi: float, ai: float, order: int) -> np.ndarray:
    if order == 0:
        return np.zeros_like(k) if xi == 0.0 or xi == ai else np.sin(k * xi)
    if order == 1:
        return k * np.cos(k * xi)
    if order == 2:
        return np.zeros_like(k) if xi == 0.0 or xi == ai else -k * k * np.sin(k * xi)
    raise DomainError("only derivatives up to second order are supported")


def _mode_factor(k: np.ndarray, x, y, g: BoxGeometry, sel: DerivSelector | None) -> np.ndarray:
    """C_n(x, y) or its second derivative for every row of wave numbers ``k``."""
    out = np.ones(k.shape[0])
    for i in range(g.d):
        ox = oy = 0
        if sel is not None:
            for which, axis in (sel.first, sel.second):
                if axis == i:
                    if which == "x":
                        ox += 1
                    else:
                        oy += 1
        out = out * _sin_deriv(k[:, i], x[i], g.sides[i], ox) * _sin_deriv(k[:, i], y[i], g.sides[i], oy)
    return out


# Tail bounds depend on the order, geometry and truncation parameters but
# not on the points, so both the bound builders and their values are cached.

@lru_cache(maxsize=1024)
def _sup_tail(s: complex, sel: DerivSelector | None, g: BoxGeometry, T: float, alphas) -> Callable[[float], float]:
    sr = s.real
    rg = abs(rgamma(s))
    beta = math.pi ** 2 * T / g.A ** 2
    if sel is None:
        pref = _maxpow(g, 2 * sr) / (g.volume * math.pi ** (2 * sr)) * rg
        rho = -2 * sr
    else:
        pref = _maxpow(g, 2 * sr) / (g.volume * g.a ** 2 * math.pi ** (2 * (sr - 1))) * rg
        rho = 2 * (1 - sr)

    @lru_cache(maxsize=None)
    def tail(N):
        return pref * best_over_alpha(lambda al: h_bound(g.d, N, al, beta, sr, rho), alphas)
    return tail


def sup_batch(s, sels: Sequence[DerivSelector | None], x, y, g: BoxGeometry, tp: TruncationParams,
              extend: bool = False) -> list[CertifiedValue]:
    """Eigenmode part of D_s (selector None) and of its second derivatives."""
    s = complex(s)
    x, y = g.check_point(x), g.check_point(y)
    for sel in sels:
        if sel is not None:
            sel.check(g.d)
    T = tp.cut(g)
    alphas = tp.alphas(g.d)
    rg = rgamma(s)
    sides = np.asarray(g.sides)
    real = s.imag == 0
    pref = 2.0 ** g.d / g.volume * (rg.real if real else rg)
    Ts = T ** (s.real if real else s)
    tails = [_sup_tail(s, sel, g, T, alphas) for sel in sels]

    def terms(n):
        k = n * (np.pi / sides)
        w = Ts * p_values(-s, (k ** 2).sum(axis=1) * T)
        return pref * np.stack([w * _mode_factor(k, x, y, g, sel) for sel in sels], axis=1)

    def tail(N):
        return [t(N) for t in tails]

    N = tp.N
    if N is None:
        N = max(choose_radius(t, tp.tol, 2 * math.sqrt(g.d) + 1) for t in tails)
    values, radii = certified_lattice_sum(terms, g.d, POSITIVE, N, tail, extend)
    return [CertifiedValue(v, r) for v, r in zip(values, radii)]


# ---------------------------------------------------------------- image part

def _b_first(which: str, li: int, ai: float, diff: np.ndarray) -> np.ndarray:
    # d b / d x^i = -a_i (h_i - U); d/dy flips sign for direct images
    if which == "x" or li == 2:
        return -ai * diff
    return ai * diff


def _b_second(sel: DerivSelector, li: int) -> float:
    if not sel.same_axis:
        return 0.0
    if sel.first[0] == sel.second[0]:
        return 0.5
    return -0.5 if li == 1 else 0.5


@lru_cache(maxsize=1024)
def _inf_tail(s: complex, sel: DerivSelector | None, g: BoxGeometry, T: float, alphas) -> Callable[[float], float]:
    d = g.d
    sr = s.real
    sd = math.sqrt(d)
    rg = abs(rgamma(s))
    shift = 0 if sel is None else 1

    def regime(N, al):
        excess = sr - 0.5 * d - shift
        if excess <= 0:
            if not N > 2 * sd:
                raise DomainError(f"shell radius N = {N} must exceed 2 sqrt(d)")
        else:
            need = 3 * sd + math.sqrt(excess * T / al) / g.a
            if not N > need:
                raise DomainError(f"shell radius N = {N} must exceed {need:.6g}")

    if sel is None:
        def at_value(N, al):
            regime(N, al)
            beta = (g.a * (1 - sd / N)) ** 2 / T
            return c_const(g, sr - 0.5 * d, N) * h_bound(d, N, al, beta, 0.5 * d - sr, 2 * sr - d)

        @lru_cache(maxsize=None)
        def tail(N):
            return rg / math.pi ** (0.5 * d) * best_over_alpha(lambda al: at_value(N, al), alphas)
        return tail

    same = sel.same_axis

    def at_deriv(N, al):
        regime(N, al)
        beta = (g.a * (1 - sd / N)) ** 2 / T
        rho = 2 * sr - d - 2
        val = ((1 + sd / N) ** 2 * g.A ** 2 * c_const(g, sr - 0.5 * d - 2, N)
               * h_bound(d, N, al, beta, 0.5 * d + 2 - sr, rho))
        if same:
            val += 0.5 * c_const(g, sr - 0.5 * d - 1, N) * h_bound(d, N, al, beta, 0.5 * d + 1 - sr, rho)
        return val

    @lru_cache(maxsize=None)
    def tail(N):
        return rg / math.pi ** (0.5 * d) * best_over_alpha(lambda al: at_deriv(N, al), alphas)
    return tail


def inf_batch(s, sels: Sequence[DerivSelector | None], x, y, g: BoxGeometry, tp: TruncationParams,
              extend: bool = False) -> list[CertifiedValue]:
    """Image part of D_s (selector None) and of its second derivatives."""
    s = complex(s)
    x, y = g.check_point(x), g.check_point(y)
    for sel in sels:
        if sel is not None:
            sel.check(g.d)
    d = g.d
    T = tp.cut(g)
    alphas = tp.alphas(d)
    real = s.imag == 0
    sig = s - 0.5 * d
    rg = rgamma(s)
    pref = (rg.real if real else rg) / (4 * math.pi) ** (0.5 * d)
    if real:
        sig = sig.real
    sides = np.asarray(g.sides)
    images = [(l, image_shifts(l, x, y, g), image_sign(l)) for l in itertools.product((1, 2), repeat=d)]
    need_value = any(sel is None for sel in sels)
    need_deriv = any(sel is not None for sel in sels)
    tails = [_inf_tail(s, sel, g, T, alphas) for sel in sels]

    def zero_term(sel, li_vec):
        # terms with b = 0: only the pole part 1/sigma survives
        if sel is None:
            if sig == 0:
                raise PoleError(f"D_s has a pole on the diagonal at s = {0.5 * d:g}")
            return T ** sig / sig
        coef = _b_second(sel, li_vec[sel.first[1]])
        if coef == 0.0:
            return 0.0
        if sig - 1 == 0:
            raise PoleError(f"second derivatives of D_s have a diagonal pole at s = {0.5 * d + 1:g}")
        return -T ** (sig - 1) * coef / (sig - 1)

    def terms(h):
        out = np.zeros((h.shape[0], len(sels)), dtype=float if real else complex)
        # one special-function call per order for all images together
        masks, diffs = [], []
        for l, u, sign in images:
            zero = zero_mask(h, l, x, y, g)
            masks.append(zero)
            diffs.append(h[~zero] - u)
        bT = np.concatenate([(df ** 2) @ sides ** 2 for df in diffs]) / T
        cuts = np.cumsum([0] + [len(df) for df in diffs])
        if need_value:
            p0_all = T ** sig * p_values(sig, bT)
        if need_deriv:
            p1_all = T ** (sig - 1) * p_values(sig - 1, bT)
            p2_all = T ** (sig - 2) * p_values(sig - 2, bT)
        for j, ((l, u, sign), zero, diff) in enumerate(zip(images, masks, diffs)):
            live = ~zero
            part = slice(cuts[j], cuts[j + 1])
            for k, sel in enumerate(sels):
                if sel is None:
                    col = p0_all[part]
                else:
                    (wz, iz), (ww, iw) = sel.first, sel.second
                    dz = _b_first(wz, l[iz], g.sides[iz], diff[:, iz])
                    dw = _b_first(ww, l[iw], g.sides[iw], diff[:, iw])
                    col = p2_all[part] * dz * dw - p1_all[part] * _b_second(sel, l[iz])
                out[live, k] += sign * col
                if np.any(zero):
                    out[zero, k] += sign * zero_term(sel, l)
        return pref * out

    def tail(N):
        return [t(N) for t in tails]

    N = tp.N
    if N is None:
        N = max(choose_radius(t, tp.tol, 2 * math.sqrt(d) + 1) for t in tails)
    values, radii = certified_lattice_sum(terms, d, FULL, N, tail, extend)
    return [CertifiedValue(v, r) for v, r in zip(values, radii)]


# ---------------------------------------------------------------- public API

def d_sup(s, x, y, g: BoxGeometry, tp: TruncationParams, extend: bool = False) -> CertifiedValue:
    """Eigenmode part of D_s(x, y) with its tail bound; entire in s."""
    return sup_batch(s, [None], x, y, g, tp, extend)[0]


def d_sup_deriv(s, sel: DerivSelector, x, y, g: BoxGeometry, tp: TruncationParams,
                extend: bool = False) -> CertifiedValue:
    """Second derivative of the eigenmode part, term by term."""
    return sup_batch(s, [sel], x, y, g, tp, extend)[0]


def d_inf(s, x, y, g: BoxGeometry, tp: TruncationParams, extend: bool = False) -> CertifiedValue:
    """Image part of D_s(x, y); PoleError on the diagonal at s = d/2."""
    return inf_batch(s, [None], x, y, g, tp, extend)[0]


def d_inf_deriv(s, sel: DerivSelector, x, y, g: BoxGeometry, tp: TruncationParams,
                extend: bool = False) -> CertifiedValue:
    """Second derivative of the image part; PoleError on the diagonal at s = d/2 + 1."""
    return inf_batch(s, [sel], x, y, g, tp, extend)[0]


def kernel(s, x, y, g: BoxGeometry, tp: TruncationParams, sel: DerivSelector | None = None,
           extend: bool = False) -> CertifiedValue:
    """D_s(x, y), or a second derivative of it, as the sum of both parts."""
    return sup_batch(s, [sel], x, y, g, tp, extend)[0] + inf_batch(s, [sel], x, y, g, tp, extend)[0]
