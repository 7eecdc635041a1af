"""Renormalized vacuum observables of a massless Dirichlet scalar in a box.

Everything is returned as CertifiedValue.  The regularization exponent ``u``
defaults to 0, where the renormalized quantities are read off directly; the
mass scale ``kappa`` only enters through kappa**u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boxmodel import FULL, POSITIVE, BoxGeometry, SideId, subset_coefficients
from .dirichlet import (CertifiedValue, TruncationParams, best_over_alpha, certified_lattice_sum, choose_radius,
                        h_bound, inf_batch, sup_batch, xx, xy)
from .errors import DomainError, EdgeError, PoleError
from .specfun import p_values, rgamma

ZERO = CertifiedValue(0.0, 0.0)


def xi_critical(d: int) -> float:
    """Conformal coupling (d - 1) / (4 d)."""
    return (d - 1) / (4 * d)


def _order(u) -> complex:
    u = complex(u)
    if not (math.isfinite(u.real) and math.isfinite(u.imag)):
        raise DomainError("u must be finite")
    return u


def _scalar(z: complex):
    return z.real if z.imag == 0 else z


def _kappa_power(kappa: float, u: complex):
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    return _scalar(complex(kappa) ** u) if u != 0 else 1.0


@dataclass(frozen=True)
class StressTensorVEV:
    """Stress-energy expectation value split at the conformal coupling.

    ``conformal`` and ``nonconformal`` are (d+1) x (d+1) nested tuples of
    CertifiedValue, index 0 being time.  The tensor at coupling xi is
    conformal + (xi - xi_d) nonconformal.
    """

    conformal: tuple
    nonconformal: tuple
    xi: float

    @property
    def d(self) -> int:
        return len(self.conformal) - 1

    def at(self, xi: float | None = None) -> tuple:
        xi = self.xi if xi is None else xi
        shift = xi - xi_critical(self.d)
        return tuple(tuple(c + shift * n for c, n in zip(rc, rn))
                     for rc, rn in zip(self.conformal, self.nonconformal))

    @property
    def total(self) -> tuple:
        return self.at(self.xi)


def _interior(x, g: BoxGeometry):
    x = g.check_point(x)
    if not g.is_interior(x):
        raise EdgeError(f"point {x} lies on the boundary; the tensor is only defined inside the box")
    return x


def _both(s, sels, x, g, tp, extend):
    sup = sup_batch(s, sels, x, x, g, tp, extend)
    inf = inf_batch(s, sels, x, x, g, tp, extend)
    return [a + b for a, b in zip(sup, inf)]


def stress_energy(x: Sequence[float], g: BoxGeometry, xi: float | None = None, tp: TruncationParams | None = None,
                  u=0, kappa: float = 1.0, extend: bool = True) -> StressTensorVEV:
    """Renormalized stress-energy tensor at an interior point."""
    tp = tp or TruncationParams()
    u = _order(u)
    d = g.d
    x = _interior(x, g)
    xi_d = xi_critical(d)
    kap = _kappa_power(kappa, u)
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    sels = [xy(i, j) for i, j in pairs] + [xx(i, j) for i, j in pairs]
    d0 = _both(0.5 * (u - 1), [None], x, g, tp, extend)[0] * kap
    vals = [v * kap for v in _both(0.5 * (u + 1), sels, x, g, tp, extend)]
    dxy = {}
    dxx = {}
    for k, (i, j) in enumerate(pairs):
        dxy[i, j] = dxy[j, i] = vals[k]
        dxx[i, j] = dxx[j, i] = vals[len(pairs) + k]
    lap = sum((dxy[l, l] for l in range(d)), ZERO)
    trace_free = d0 - lap
    conf = [[ZERO] * (d + 1) for _ in range(d + 1)]
    non = [[ZERO] * (d + 1) for _ in range(d + 1)]
    conf[0][0] = (0.25 + xi_d) * d0 + (0.25 - xi_d) * lap
    non[0][0] = trace_free
    for i in range(d):
        for j in range(d):
            diag = trace_free if i == j else ZERO
            conf[i + 1][j + 1] = (0.25 - xi_d) * diag + (0.5 - xi_d) * dxy[i, j] - xi_d * dxx[i, j]
            non[i + 1][j + 1] = -diag - dxy[i, j] - dxx[i, j]
    return StressTensorVEV(tuple(map(tuple, conf)), tuple(map(tuple, non)), xi_d if xi is None else float(xi))


def _side_point(side: SideId, xb, g: BoxGeometry):
    if side.axis >= g.d:
        raise DomainError(f"side axis {side.axis} out of range for d = {g.d}")
    xb = g.check_point(xb)
    if xb[side.axis] != side.coordinate(g):
        raise DomainError(f"point {xb} does not lie on side {side}")
    for i, (xi, ai) in enumerate(zip(xb, g.sides)):
        if i != side.axis and (xi == 0.0 or xi == ai):
            raise EdgeError(f"point {xb} lies on an edge of the box")
    return xb


def pressure(side: SideId, xb: Sequence[float], g: BoxGeometry, tp: TruncationParams | None = None,
             u=0, kappa: float = 1.0, extend: bool = True) -> list[CertifiedValue]:
    """Renormalized pressure vector at a point of a side; only the normal component is nonzero."""
    tp = tp or TruncationParams()
    u = _order(u)
    xb = _side_point(side, xb, g)
    p = side.axis
    dd = _both(0.5 * (u + 1), [xy(p)], xb, g, tp, extend)[0]
    normal = dd * (0.25 * side.outward_normal() * _kappa_power(kappa, u))
    return [normal if i == p else ZERO for i in range(g.d)]


def pressure_prescription_check(side: SideId, xb: Sequence[float], g: BoxGeometry, tp: TruncationParams | None = None,
                                eps: float = 4e-3, xi: float | None = None,
                                extend: bool = True) -> tuple[CertifiedValue, CertifiedValue]:
    """Normal pressure on the side versus the wall limit of the interior stress.

    The interior stress is taken at distances eps and eps/2 along the inward
    normal.  It is even in that distance, so one Richardson step in eps^2
    gives the wall limit; the size of that step is added to the radius as an
    error allowance (an estimate, not a certified bound).  Much smaller eps
    loses accuracy: the interior stress is a difference of pieces growing
    like eps^-(d+1), and the rounding allowance in the radius grows with them.
    """
    tp = tp or TruncationParams()
    if eps < 0:
        raise DomainError("eps must be non-negative")
    on_side = pressure(side, xb, g, tp, extend=extend)[side.axis]
    if eps == 0:
        return on_side, on_side
    p = side.axis
    n = side.outward_normal()

    def normal_stress(dist):
        inner = list(xb)
        inner[p] = inner[p] - n * dist
        return stress_energy(inner, g, xi, tp, extend=extend).total[p + 1][p + 1] * n

    far = normal_stress(eps)
    near = normal_stress(0.5 * eps)
    step = (near - far) * (1.0 / 3.0)
    limit = near + step
    return on_side, CertifiedValue(limit.value, limit.radius + abs(step.value))


# ---------------------------------------------------------------- energy and force

def _check_poles(u: complex, poles: Sequence[int], what: str):
    if u.imag == 0 and u.real in poles:
        raise PoleError(f"{what} has a pole at u = {u.real:g}")


def _unavailable(N):
    return math.inf


def _sum_parts(parts: list[tuple]) -> CertifiedValue:
    values = [v for v, _ in parts]
    radii = [r for _, r in parts]
    if any(isinstance(v, complex) for v in values):
        value = complex(math.fsum(complex(v).real for v in values), math.fsum(complex(v).imag for v in values))
    else:
        value = math.fsum(values)
    return CertifiedValue(value, math.fsum(radii) if all(math.isfinite(r) for r in radii) else math.inf)


def _run(terms, d, kind, N, tail, tol, extend, fallback_N):
    if N is None:
        try:
            N = choose_radius(tail, tol, 2 * math.sqrt(d) + 1)
        except DomainError:
            N = fallback_N
    values, radii = certified_lattice_sum(lambda idx: terms(idx)[:, None], d, kind, N, lambda M: [tail(M)], extend)
    return values[0], radii[0], N


def energy_ren(g: BoxGeometry, tp: TruncationParams | None = None, u=0, kappa: float = 1.0,
               extend: bool = True) -> CertifiedValue:
    """Renormalized total vacuum energy of the box."""
    tp = tp or TruncationParams()
    u = _order(u)
    d = g.d
    _check_poles(u, range(1, d + 2), "the energy")
    T = tp.cut(g)
    alphas = tp.alphas(d)
    ur = u.real
    s = 0.5 * (u - 1)
    rg = rgamma(s)
    kap = _kappa_power(kappa, u)
    ks = _scalar(s)
    sides = np.asarray(g.sides)

    sup_pref = 0.5 * kap * _scalar(complex(rg))
    Ts = _scalar(complex(T) ** s)

    def sup_terms(n):
        om2 = ((n * (np.pi / sides)) ** 2).sum(axis=1)
        return sup_pref * Ts * p_values(-ks, om2 * T)

    sup_bound = kappa ** ur * max(g.a ** (ur - 1), g.A ** (ur - 1)) / (2 ** (d + 1) * math.pi ** (ur - 1)) * abs(rg)

    def sup_tail(N):
        beta = math.pi ** 2 * T / g.A ** 2
        return sup_bound * best_over_alpha(lambda al: h_bound(d, N, al, beta, 0.5 * (ur - 1), 1 - ur), alphas)

    v, r, n_sup = _run(sup_terms, d, POSITIVE, tp.N, sup_tail, tp.tol, extend, None)
    parts = [(v, r)]

    inf_pref = kap * _scalar(complex(T) ** s) / 2 ** (d + 1) * _scalar(complex(rg))
    # p = 0: the single constant term (-1)^d P_s(0) = (-1)^d / s
    parts.append((inf_pref * (-1) ** d / ks, 0.0))
    for p in range(1, d + 1):
        order = _scalar(0.5 * (u - p - 1))
        for prod, sub in subset_coefficients(g, p):
            sub_sides = sides[list(sub)]
            coef = inf_pref * (-1) ** (d - p) * prod / (math.pi * T) ** (0.5 * p)

            def terms(h, sub_sides=sub_sides, coef=coef, order=order):
                bT = ((h * sub_sides) ** 2).sum(axis=1) / T
                return coef * p_values(order, bT)

            if ur <= 2:
                bound = (kappa ** ur * abs(rg) / 2 ** (d + 1) * max(g.a ** (ur - p - 1), g.A ** (ur - p - 1))
                         / math.pi ** (0.5 * p) * prod)

                def tail(N, p=p, bound=bound):
                    return bound * best_over_alpha(
                        lambda al: h_bound(p, N, al, g.a ** 2 / T, 0.5 * (p + 1 - ur), ur - p - 1), alphas)
            else:
                tail = _unavailable
            v, r, _ = _run(terms, p, FULL, tp.N, tail, tp.tol, extend, n_sup)
            parts.append((v, r))
    return _sum_parts(parts)


def force_ren(side: SideId, g: BoxGeometry, tp: TruncationParams | None = None, u=0, kappa: float = 1.0,
              extend: bool = True) -> CertifiedValue:
    """Renormalized total force on a side, positive when pushing outward."""
    tp = tp or TruncationParams()
    u = _order(u)
    if side.axis >= g.d:
        raise DomainError(f"side axis {side.axis} out of range for d = {g.d}")
    order = [side.axis] + [i for i in range(g.d) if i != side.axis]
    g = g.permuted(order)
    d = g.d
    _check_poles(u, range(2, d + 2), "the force")
    T = tp.cut(g)
    alphas = tp.alphas(d)
    ur = u.real
    a1 = g.sides[0]
    s = 0.5 * (u + 1)
    rg = rgamma(s)
    kap = _kappa_power(kappa, u)
    ks = _scalar(s)
    sides = np.asarray(g.sides)

    sup_pref = kap / (2 * a1) * _scalar(complex(rg)) * _scalar(complex(T) ** s)

    def sup_terms(n):
        k = n * (np.pi / sides)
        return sup_pref * k[:, 0] ** 2 * p_values(-ks, (k ** 2).sum(axis=1) * T)

    sup_bound = (kappa ** ur * math.pi ** (1 - ur) * max(g.a ** (ur + 1), g.A ** (ur + 1))
                 / (2 ** (d + 1) * a1 ** 3) * abs(rg))

    def sup_tail(N):
        beta = math.pi ** 2 * T / g.A ** 2
        return sup_bound * best_over_alpha(lambda al: h_bound(d, N, al, beta, 0.5 * (ur + 1), 1 - ur), alphas)

    v, r, n_sup = _run(sup_terms, d, POSITIVE, tp.N, sup_tail, tp.tol, extend, None)
    parts = [(v, r)]

    inf_pref = -kap * _scalar(complex(T) ** (0.5 * (u - 3))) / 2 ** (d + 1) * _scalar(complex(rg))
    for p in range(1, d + 1):
        o_hi = _scalar(0.5 * (u - p - 3))
        o_lo = _scalar(0.5 * (u - p - 1))
        for prod, sub in subset_coefficients(g, p - 1, among=range(1, d)):
            axes = [0] + list(sub)
            sub_sides = sides[axes]
            coef = inf_pref * (-1) ** (d - p) * prod / (math.pi * T) ** (0.5 * p)

            def terms(h, sub_sides=sub_sides, coef=coef, o_hi=o_hi, o_lo=o_lo):
                bT = ((h * sub_sides) ** 2).sum(axis=1) / T
                out = np.empty(len(h), dtype=float if isinstance(o_lo, float) else complex)
                zero = bT == 0.0
                live = ~zero
                n1 = (a1 * h[live, 0]) ** 2
                out[live] = n1 * p_values(o_hi, bT[live]) - 0.5 * T * p_values(o_lo, bT[live])
                out[zero] = -0.5 * T / o_lo
                return coef * out

            if ur <= 2:
                bound = kappa ** ur * abs(rg) / 2 ** (d + 1) * prod / math.pi ** (0.5 * p)
                m_hi = max(g.a ** (ur - p - 3), g.A ** (ur - p - 3))
                m_lo = max(g.a ** (ur - p - 1), g.A ** (ur - p - 1))

                def tail(N, p=p, bound=bound, m_hi=m_hi, m_lo=m_lo):
                    beta = g.a ** 2 / T

                    def at(al):
                        return (a1 ** 2 * m_hi * h_bound(p, N, al, beta, 0.5 * (p + 3 - ur), ur - p - 1)
                                + 0.5 * m_lo * h_bound(p, N, al, beta, 0.5 * (p + 1 - ur), ur - p - 1))
                    return bound * best_over_alpha(at, alphas)
            else:
                tail = _unavailable
            v, r, _ = _run(terms, p, FULL, tp.N, tail, tp.tol, extend, n_sup)
            parts.append((v, r))
    return _sum_parts(parts)


def rescale(kind: str, g: BoxGeometry, lam: float) -> float:
    """Factor multiplying an observable when every side of ``g`` is scaled by ``lam``."""
    if not lam > 0:
        raise DomainError("scale factor must be positive")
    powers = {"tensor": g.d + 1, "pressure": g.d + 1, "energy": 1, "force": 2}
    if kind not in powers:
        raise DomainError(f"unknown observable kind {kind!r}")
    return lam ** (-powers[kind])
