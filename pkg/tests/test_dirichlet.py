import math

import mpmath
import pytest

from boxcasimir.boxmodel import BoxGeometry
from boxcasimir.dirichlet import (CertifiedValue, DerivSelector, TruncationParams, c_const, choose_radius, d_inf,
                                  d_inf_deriv, d_sup, h_bound, kernel, log_h_asymptotic, log_h_bound, xx, xy)
from boxcasimir.errors import DomainError, PoleError

ONE = BoxGeometry((1.0,))
# frozen from tests/oracles.py: brute-force eigen-sums in 1D
KERNEL_S3_MID = 0.0020833333333333337
KERNEL_DXDY_S3_AT_03 = 0.007522222222222222


def kernel_1d_polylog(s, x, y, a=1.0):
    """(1/a)(pi/a)^(-2s) sum_n n^(-2s) [cos(n pi (x-y)/a) - cos(n pi (x+y)/a)] via polylog continuation."""
    mpmath.mp.dps = 40

    def cos_series(theta):
        return mpmath.re(mpmath.polylog(2 * s, mpmath.exp(1j * theta)))
    val = (cos_series(math.pi * (x - y) / a) - cos_series(math.pi * (x + y) / a)) / a
    return float(val * (math.pi / a) ** (-2 * s))


def test_convergent_kernel_oracles():
    tp = TruncationParams(N=16)
    k = kernel(3.0, (0.5,), (0.5,), ONE, tp)
    assert k.contains(KERNEL_S3_MID, 1e-15)
    kd = kernel(3.0, (0.3,), (0.3,), ONE, tp, xy(0))
    assert kd.contains(KERNEL_DXDY_S3_AT_03, 1e-15)


@pytest.mark.parametrize("s", [-0.5, -1.25, 0.25, 0.8, 2.0])
def test_continued_kernel_off_diagonal(s):
    x, y = (0.3,), (0.55,)
    got = kernel(s, x, y, ONE, TruncationParams(N=12))
    assert got.contains(kernel_1d_polylog(s, 0.3, 0.55), 1e-13)


@pytest.mark.parametrize("T", [0.5, 1.0, 2.0, None])
def test_split_is_independent_of_cut(T):
    g = BoxGeometry((1.0, 2.0))
    x, y = (0.2, 0.9), (0.6, 1.5)
    ref = kernel(-0.5, x, y, g, TruncationParams(T=1.0, N=10))
    got = kernel(-0.5, x, y, g, TruncationParams(T=T, N=10))
    assert got.overlaps(ref)
    assert got.radius < 1e-8
    # the two halves move with T while their sum does not
    parts = d_sup(-0.5, x, y, g, TruncationParams(T=T, N=10)) + d_inf(-0.5, x, y, g, TruncationParams(T=T, N=10))
    assert parts.value == pytest.approx(got.value, abs=1e-15)


def test_diagonal_pole_is_reported():
    g = BoxGeometry((1.0, 1.0))
    with pytest.raises(PoleError):
        kernel(1.0, (0.3, 0.4), (0.3, 0.4), g, TruncationParams(N=6))
    # off the diagonal the same order is regular
    assert math.isfinite(kernel(1.0, (0.3, 0.4), (0.35, 0.4), g, TruncationParams(N=6)).value)


def test_symmetry_in_arguments():
    g = BoxGeometry((1.0, 1.5))
    tp = TruncationParams(N=8)
    x, y = (0.2, 0.3), (0.7, 1.1)
    a, b = kernel(-0.5, x, y, g, tp, xx(1)), kernel(-0.5, y, x, g, tp, DerivSelector(("y", 1), ("y", 1)))
    assert a.overlaps(b)


def test_tail_bound_needs_regime():
    with pytest.raises(DomainError):
        h_bound(2, 2.0, 0.04, 1.0, 0.5, 0.0)
    assert h_bound(2, 8.0, 0.04, 1.0, 0.5, 0.0) > h_bound(2, 9.0, 0.04, 1.0, 0.5, 0.0) > 0
    assert c_const(BoxGeometry((1.0, 2.0)), 0.5, 6.0) > 0


def test_extension_gives_a_rigorous_radius_below_regime():
    g = BoxGeometry((1.0, 5.0))
    x = (0.4, 2.0)
    with pytest.raises(DomainError):
        d_inf(-0.5, x, x, g, TruncationParams(N=2))
    short = d_inf(-0.5, x, x, g, TruncationParams(N=2), extend=True)
    long = d_inf(-0.5, x, x, g, TruncationParams(N=14))
    assert short.overlaps(long)


def test_auto_radius_meets_tolerance():
    g = BoxGeometry((1.0, 1.0))
    got = kernel(-0.5, (0.3, 0.6), (0.4, 0.6), g, TruncationParams(tol=1e-10))
    assert got.radius <= 2e-10
    assert choose_radius(lambda N: 10.0 ** (-N), 1e-5, 1) == 5.0


def test_truncation_params_validation():
    for bad in [dict(T=0), dict(N=-1), dict(alpha=1.5), dict(tol=0)]:
        with pytest.raises(DomainError):
            TruncationParams(**bad)
    assert TruncationParams(alpha="auto").alphas(2)[0] == 0.01
    assert TruncationParams().alphas(1) == (0.03,)
    assert TruncationParams().alphas(2) == (0.04,)
    assert TruncationParams(T=None).cut(BoxGeometry((1.0, 5.0))) == pytest.approx(5 / math.pi)


def test_certified_value_arithmetic():
    a, b = CertifiedValue(1.0, 0.1), CertifiedValue(2.0, 0.2)
    s = a + b
    assert s.value == 3.0 and s.radius == pytest.approx(0.3)
    assert (a - b).value == -1.0 and (a - b).radius == pytest.approx(0.3)
    assert (a * -3).radius == pytest.approx(0.3)
    assert (b / 2).value == 1.0
    assert a.contains(1.05) and not a.contains(1.2)
    assert str(CertifiedValue(0.5, 1e-9)) == "0.5 ± 1e-09"
    with pytest.raises(DomainError):
        CertifiedValue(1.0, -1.0)


def test_selector_validation():
    with pytest.raises(DomainError):
        xy(2).check(2)
    with pytest.raises(DomainError):
        DerivSelector(("z", 0), ("x", 0))


def test_tail_bound_matches_its_asymptotic_form():
    # both underflow in double precision here, so compare logs
    ratio = math.exp(log_h_bound(1, 80, 0.03, 1.0, 1.0, 0.0) - log_h_asymptotic(1, 80, 0.03, 1.0, 1.0, 0.0))
    assert 0.9 <= ratio <= 1.1
    assert h_bound(1, 80, 0.03, 1.0, 1.0, 0.0) == 0.0


def test_mixed_derivative_vanishes_at_the_centre():
    g = BoxGeometry((1.0, 1.0))
    v = kernel(-0.5, (0.5, 0.5), (0.5, 0.5), g, TruncationParams(N=8), xy(0, 1))
    assert abs(v.value) <= v.radius + 1e-12


def test_second_derivative_pole_on_the_diagonal():
    g = BoxGeometry((1.0, 1.0))
    x = (0.3, 0.4)
    with pytest.raises(PoleError):
        d_inf_deriv(2.0, xx(0), x, x, g, TruncationParams(N=6))
    # the off-axis pole coefficient vanishes, so the mixed derivative stays finite
    assert math.isfinite(d_inf_deriv(2.0, xy(0, 1), x, x, g, TruncationParams(N=6)).value)
