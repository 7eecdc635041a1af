"""Scans of the energy and force against one side length, and the features read off them.

The free length is the second side (axis 1) of a template box; the force is
the one acting on the side at x^1 = 0 unless another side is given.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .boxmodel import BoxGeometry, SideId
from .dirichlet import CertifiedValue, TruncationParams
from .errors import BracketError, DomainError, FitError
from .observables import energy_ren, force_ren

KINDS = ("energy", "force")
SQUARE = BoxGeometry((1.0, 1.0))


@dataclass(frozen=True)
class ScanResult:
    kind: str
    abscissas: tuple[float, ...]
    values: tuple[CertifiedValue, ...]

    def __post_init__(self):
        if len(self.abscissas) != len(self.values):
            raise DomainError("abscissas and values differ in length")
        if any(b <= a for a, b in zip(self.abscissas, self.abscissas[1:])):
            raise DomainError("abscissas must be strictly increasing")


def observable(kind, g: BoxGeometry = SQUARE, tp: TruncationParams | None = None, axis: int = 1,
               side: SideId = SideId(0)) -> Callable[[float], CertifiedValue]:
    """Map a side length to the certified observable; callables pass through unchanged."""
    if callable(kind):
        return kind
    tp = tp or TruncationParams(T=None)
    if kind == "energy":
        return lambda length: energy_ren(g.with_side(axis, length), tp)
    if kind == "force":
        return lambda length: force_ren(side, g.with_side(axis, length), tp)
    raise DomainError(f"unknown observable kind {kind!r}; expected one of {KINDS}")


def _as_cv(v) -> CertifiedValue:
    return v if isinstance(v, CertifiedValue) else CertifiedValue(float(v), 0.0)


def grid(lo: float, hi: float, count: int, spacing: str = "linear") -> np.ndarray:
    if not 0 < lo < hi:
        raise DomainError("need 0 < lo < hi")
    if count < 2:
        raise DomainError("need at least two grid points")
    if spacing == "linear":
        pts = np.linspace(lo, hi, count)
    elif spacing == "log":
        pts = np.geomspace(lo, hi, count)
    else:
        raise DomainError(f"unknown spacing {spacing!r}")
    pts[0], pts[-1] = lo, hi
    return pts


def scan(kind, g: BoxGeometry = SQUARE, lo: float = 0.1, hi: float = 10.0, count: int = 50,
         tp: TruncationParams | None = None, spacing: str = "linear", axis: int = 1,
         side: SideId = SideId(0), threads: int = 1) -> ScanResult:
    """Evaluate an observable on a grid of side lengths; results are in grid order."""
    f = observable(kind, g, tp, axis, side)
    xs = [float(v) for v in grid(lo, hi, count, spacing)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(f, xs))
    else:
        values = [f(x) for x in xs]
    name = kind if isinstance(kind, str) else getattr(kind, "__name__", "custom")
    return ScanResult(name, tuple(xs), tuple(_as_cv(v) for v in values))


def _slope(f, x: float, h: float) -> float:
    return (_as_cv(f(x + h)).value.real - _as_cv(f(x - h)).value.real) / (2 * h)


def find_extremum(kind, bracket: tuple[float, float], tol: float = 1e-6, tp: TruncationParams | None = None,
                  g: BoxGeometry = SQUARE, axis: int = 1,
                  side: SideId = SideId(0)) -> tuple[CertifiedValue, CertifiedValue]:
    """Golden-section search for the single extremum inside ``bracket``.

    Returns (location, value); the location radius is half the final interval.
    """
    f = observable(kind, g, tp, axis, side)
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise BracketError("bracket must satisfy lo < hi")
    h = 1e-3 * (hi - lo)
    left, right = _slope(f, lo + h, h), _slope(f, hi - h, h)
    if not left * right < 0:
        raise BracketError(f"the derivative does not change sign on [{lo}, {hi}]")
    sign = -1.0 if left > 0 else 1.0

    def objective(x):
        return sign * _as_cv(f(x)).value.real

    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    e = a + invphi * (b - a)
    fc, fe = objective(c), objective(e)
    while b - a > 2 * tol:
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - invphi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, e, fe
            e = a + invphi * (b - a)
            fe = objective(e)
    x = 0.5 * (a + b)
    return CertifiedValue(x, 0.5 * (b - a)), _as_cv(f(x))


def find_zero(kind, bracket: tuple[float, float], tol: float = 1e-6, tp: TruncationParams | None = None,
              g: BoxGeometry = SQUARE, axis: int = 1, side: SideId = SideId(0)) -> CertifiedValue:
    """Root of an observable inside ``bracket``, located to within ``tol``."""
    f = observable(kind, g, tp, axis, side)
    lo, hi = map(float, bracket)
    flo, fhi = _as_cv(f(lo)), _as_cv(f(hi))
    for end in (flo, fhi):
        if not end.radius < abs(end.value):
            raise BracketError("an endpoint value is not certified away from zero")
    if not flo.value.real * fhi.value.real < 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]")
    rtol = 4 * np.finfo(float).eps
    root = optimize.brentq(lambda x: _as_cv(f(x)).value.real, lo, hi, xtol=tol, rtol=rtol)
    return CertifiedValue(root, tol + rtol * abs(root))


def _lstsq(design: np.ndarray, y: np.ndarray) -> np.ndarray:
    scale = np.linalg.norm(design, axis=0)
    if np.any(scale == 0):
        raise FitError("degenerate design matrix")
    scaled = design / scale
    if len(y) < design.shape[1]:
        raise FitError(f"need at least {design.shape[1]} samples")
    if np.linalg.cond(scaled) > 1e12:
        raise FitError("fit is too poorly conditioned")
    coef, *_ = np.linalg.lstsq(scaled, y, rcond=None)
    return coef / scale


def _values(values: Sequence) -> np.ndarray:
    return np.array([_as_cv(v).value.real for v in values])


def _small_design(x: np.ndarray, extra: bool = False) -> np.ndarray:
    cols = [x ** -2, x ** -1, np.ones_like(x)] + ([x] if extra else [])
    return np.stack(cols, axis=1)


def _tail_design(x: np.ndarray, extra: bool = False) -> np.ndarray:
    cols = [x, np.ones_like(x)] + ([1 / x] if extra else [])
    return np.stack(cols, axis=1)


def _small_x(abscissas) -> np.ndarray:
    x = np.asarray(abscissas, dtype=float)
    if np.any(x <= 0) or np.any(x > 0.2):
        raise FitError("small-length samples must lie in (0, 0.2]")
    return x


def _tail_x(abscissas) -> np.ndarray:
    x = np.asarray(abscissas, dtype=float)
    if np.any(x < 20):
        raise FitError("asymptote samples must have length >= 20")
    return x


def fit_small_a2(abscissas: Sequence[float], values: Sequence) -> float:
    """Leading coefficient c of c / x^2 + c1 / x + c0 fitted to samples in (0, 0.2].

    The 1/x and constant terms absorb the next orders of the small-x expansion.
    """
    return float(_lstsq(_small_design(_small_x(abscissas)), _values(values))[0])


def fit_asymptote(abscissas: Sequence[float], values: Sequence) -> tuple[float, float]:
    """Slope and intercept of the straight line fitted to large-length samples."""
    m, q = _lstsq(_tail_design(_tail_x(abscissas)), _values(values))
    return float(m), float(q)


def _with_spread(design, x, values) -> list[CertifiedValue]:
    """Fit coefficients with the shift caused by one extra basis term as the spread.

    The spread is a diagnostic estimate of the model error, not a certified bound.
    """
    y = _values(values)
    base = _lstsq(design(x), y)
    wider = _lstsq(design(x, True), y)[:len(base)]
    return [CertifiedValue(float(b), float(abs(b - w))) for b, w in zip(base, wider)]


def features(tp: TruncationParams | None = None, tol: float = 1e-7, threads: int = 1) -> dict[str, CertifiedValue]:
    """Maximum, zeros and limiting behaviour of the energy and force for the box (1, a2).

    Locations and observable values carry certified radii; fitted
    coefficients carry the diagnostic spread of ``_with_spread``.
    """
    tp = tp or TruncationParams(T=None)
    loc, top = find_extremum("energy", (0.5, 1.0), tol, tp)
    out = {
        "energy_max_a2": loc,
        "energy_max": top,
        "energy_zero_1": find_zero("energy", (0.2, 0.5), tol, tp),
        "energy_zero_2": find_zero("energy", (2.0, 3.5), tol, tp),
        "force_zero": find_zero("force", (1.0, 2.0), tol, tp),
    }
    small = scan("energy", SQUARE, 0.02, 0.2, 10, tp, threads=threads)
    out["e0"] = _with_spread(_small_design, _small_x(small.abscissas), small.values)[0]
    small = scan("force", SQUARE, 0.02, 0.2, 10, tp, threads=threads)
    out["f0"] = _with_spread(_small_design, _small_x(small.abscissas), small.values)[0]
    tail = scan("energy", SQUARE, 20.0, 100.0, 9, tp, threads=threads)
    out["energy_slope"], out["energy_intercept"] = _with_spread(_tail_design, _tail_x(tail.abscissas), tail.values)
    tail = scan("force", SQUARE, 20.0, 100.0, 9, tp, threads=threads)
    out["force_slope"], out["force_intercept"] = _with_spread(_tail_design, _tail_x(tail.abscissas), tail.values)
    return out
