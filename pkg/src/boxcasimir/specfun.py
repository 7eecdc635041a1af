"""Gamma, upper incomplete gamma and the P_s family for complex order.

All routines take a scalar order ``s`` (real or complex) and are vectorized
over the real argument.  Real orders are evaluated in real arithmetic, which
is the hot path for every lattice sum in the package.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.special import zeta as _riemann_zeta

from .errors import ContinuationNote, DomainError, PoleError

_EPS = 2.0 ** -53
_TINY = 1e-300
_MAXITER = 5000

# Lanczos approximation, g = 607/128, 15 terms
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EULER_GAMMA = 0.57721566490153286061

# Taylor coefficients of log Gamma(1+a) about a = 0
_LOGGAMMA1P = [0.0, -_EULER_GAMMA] + [
    (-1) ** k * float(_riemann_zeta(k, 1)) / k for k in range(2, 40)
]


def _as_order(s) -> complex:
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError(f"order must be finite, got {s}")
    return s


def _is_real(s: complex) -> bool:
    return s.imag == 0.0


def _is_pole(s: complex) -> bool:
    return s.imag == 0.0 and s.real <= 0.0 and s.real == math.floor(s.real)


def _loggamma_right(s):
    # valid for Re s >= 1/2
    z = s - 1.0
    acc = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    if isinstance(s, complex):
        return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def _sin_pi(s):
    # sin(pi s) with the argument reduced first, exact near the integers
    n = round(s.real)
    sign = -1.0 if n % 2 else 1.0
    if isinstance(s, complex):
        return sign * complex(np.sin(np.pi * (s - n)))
    return sign * math.sin(math.pi * (s - n))


def _gamma_value(s: complex):
    if _is_real(s):
        x = s.real
        if x >= 0.5:
            return math.exp(_loggamma_right(x))
        return math.pi / (_sin_pi(x) * math.exp(_loggamma_right(1.0 - x)))
    if s.real >= 0.5:
        return complex(np.exp(_loggamma_right(s)))
    return complex(np.pi / (_sin_pi(s) * np.exp(_loggamma_right(1.0 - s))))


def gamma(s):
    """Complete gamma function.

    Returns a float for real ``s`` and a complex number otherwise.
    Raises PoleError at the non-positive integers.
    """
    s = _as_order(s)
    if _is_pole(s):
        raise PoleError(f"gamma has a pole at s = {s.real:g}")
    return _gamma_value(s)


def rgamma(s):
    """Reciprocal gamma function, entire, exactly zero at the non-positive integers."""
    s = _as_order(s)
    if _is_pole(s):
        return 0.0
    return 1.0 / _gamma_value(s)


def _use_fraction(a: complex, z: np.ndarray) -> np.ndarray:
    return z > max(1.5, a.real + 1.0)


def _fraction_scaled(a, z):
    """h(a, z) with Gamma(a, z) = exp(-z) z^a h, by Legendre's continued fraction."""
    b = z + 1.0 - a
    c = np.full_like(b, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    out = h.copy()
    live = np.arange(z.size)
    for i in range(1, _MAXITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        d = 1.0 / d
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        delta = d * c
        h = h * delta
        done = np.abs(delta - 1.0) <= 2.0 * _EPS
        if np.any(done):
            out[live[done]] = h[done]
            keep = ~done
            live, b, c, d, h = live[keep], b[keep], c[keep], d[keep], h[keep]
            if live.size == 0:
                break
    out[live] = h
    return out


def _lower_series(a, z):
    """sum_k z^k / (a (a+1) ... (a+k)); the lower gamma is z^a e^-z times this."""
    term = np.ones_like(z) / a
    total = term.copy()
    k = 1
    while k < _MAXITER:
        term = term * z / (a + k)
        total = total + term
        if np.all(np.abs(term) <= _EPS * np.abs(total)):
            break
        k += 1
    return total


def _gamma1p_minus_one_over(a):
    """(Gamma(1+a) - 1)/a, regular at a = 0."""
    if abs(a) >= 0.2:
        return (_gamma_value(complex(1.0 + a)) - 1.0) / a
    if a == 0:
        return -_EULER_GAMMA
    lg = 0.0
    for k in range(len(_LOGGAMMA1P) - 1, 0, -1):
        lg = (lg + _LOGGAMMA1P[k]) * a
    return np.expm1(lg) / a


def _upper_small_order(a, z):
    """Gamma(a, z) for |Re a| < 1/2 and small z, without cancellation near a = 0."""
    g1 = _gamma1p_minus_one_over(a)
    logz = np.log(z)
    if a == 0:
        g2 = logz
    else:
        g2 = np.expm1(a * logz) / a
    term = np.ones_like(z) * (1.0 + 0.0 * a)
    tail = np.zeros_like(term)
    k = 1
    while k < _MAXITER:
        term = term * (-z) / k
        add = term / (a + k)
        tail = tail + add
        if np.all(np.abs(add) <= _EPS * np.maximum(np.abs(tail), _TINY)):
            break
        k += 1
    return g1 - g2 - np.exp(a * logz) * tail


def _upper_small(a, z):
    """Gamma(a, z) away from the continued-fraction region."""
    if a.real >= 0.5:
        lower = np.exp(a * np.log(z) - z) * _lower_series(a, z)
        return _gamma_value(complex(a)) - lower
    shift = int(math.ceil(-a.real - 0.5))
    a0 = a + shift
    if a0.real >= 0.5:
        shift -= 1
        a0 -= 1
    g = _upper_small_order(a0, z)
    logz = np.log(z)
    for j in range(1, shift + 1):
        aj = a0 - j
        g = (g - np.exp(aj * logz - z)) / aj
    return g


def _upper_gamma_array(s: complex, z: np.ndarray) -> np.ndarray:
    a = s.real if _is_real(s) else s
    dtype = float if _is_real(s) else complex
    out = np.empty(z.shape, dtype=dtype)
    cf = _use_fraction(s, z)
    if np.any(cf):
        zc = z[cf]
        out[cf] = np.exp(a * np.log(zc) - zc) * _fraction_scaled(a, zc.astype(dtype))
    if np.any(~cf):
        zs = z[~cf]
        out[~cf] = _upper_small(a, zs.astype(dtype)) if dtype is complex else _upper_small(a, zs)
    return out


def upper_gamma(s, z):
    """Upper incomplete gamma function Gamma(s, z) = int_z^inf e^-w w^(s-1) dw.

    ``z`` may be a scalar or an array of positive reals.  The result is real
    when ``s`` is real.
    """
    s = _as_order(s)
    zarr = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(zarr)) or np.any(zarr <= 0.0):
        raise DomainError("upper_gamma needs z > 0")
    res = _upper_gamma_array(s, np.atleast_1d(zarr))
    return res[0] if zarr.ndim == 0 else res.reshape(zarr.shape)


def log_upper_gamma(s: float, z: float) -> float:
    """log Gamma(s, z) for real ``s`` and ``z > 0``, finite where Gamma(s, z) underflows."""
    a = float(s)
    z = float(z)
    if not (math.isfinite(z) and z > 0.0):
        raise DomainError("log_upper_gamma needs z > 0")
    zarr = np.array([z])
    if _use_fraction(complex(a), zarr)[0]:
        return -z + a * math.log(z) + math.log(_fraction_scaled(a, zarr)[0])
    g = upper_gamma(a, z)
    if not g > 0.0:
        raise DomainError(f"Gamma({a}, {z}) is not positive")
    return math.log(g)


def p_values(s, beta) -> np.ndarray:
    """Vectorized P_s(beta) for beta >= 0, continuing silently through beta = 0.

    Raises PoleError if some beta is zero and s = 0.
    """
    s = _as_order(s)
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    real = _is_real(s)
    out = np.empty(beta.shape, dtype=float if real else complex)
    zero = beta == 0.0
    if np.any(zero):
        if s == 0:
            raise PoleError("P_s(0) has a pole at s = 0")
        out[zero] = 1.0 / (s.real if real else s)
    pos = ~zero
    if np.any(pos):
        b = beta[pos]
        a = -s
        cf = _use_fraction(a, b)
        vals = np.empty(b.shape, dtype=out.dtype)
        av = a.real if real else a
        if np.any(cf):
            bc = b[cf] if real else b[cf].astype(complex)
            vals[cf] = np.exp(-b[cf]) * _fraction_scaled(av, bc)
        if np.any(~cf):
            bs = b[~cf] if real else b[~cf].astype(complex)
            vals[~cf] = np.exp(-av * np.log(bs)) * _upper_small(av, bs)
        out[pos] = vals
    return out


def p_func(s, beta):
    """P_s(beta) = int_0^1 tau^(s-1) exp(-beta/tau) dtau.

    Equals beta^s Gamma(-s, beta) for beta > 0 and 1/s at beta = 0.  At
    beta = 0 with Re s <= 0 the integral diverges and the analytic
    continuation 1/s is returned with a ContinuationNote warning.
    """
    s = _as_order(s)
    barr = np.asarray(beta, dtype=float)
    if np.any(~np.isfinite(barr)) or np.any(barr < 0.0):
        raise DomainError("p_func needs beta >= 0")
    if np.any(barr == 0.0) and s != 0 and s.real <= 0.0:
        warnings.warn(f"P_s(0) continued to 1/s at s = {s}", ContinuationNote, stacklevel=2)
    res = p_values(s, barr)
    return res[0] if barr.ndim == 0 else res.reshape(barr.shape)
