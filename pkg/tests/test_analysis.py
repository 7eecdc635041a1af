import numpy as np
import pytest

from boxcasimir.analysis import (ScanResult, find_extremum, find_zero, fit_asymptote, fit_small_a2, grid, observable,
                                 scan)
from boxcasimir.boxmodel import BoxGeometry
from boxcasimir.dirichlet import CertifiedValue, TruncationParams
from boxcasimir.errors import BracketError, DomainError, FitError
from boxcasimir.observables import stress_energy


def test_scan_endpoints_only():
    res = scan("energy", lo=0.5, hi=2.0, count=2)
    assert res.abscissas == (0.5, 2.0)
    assert len(res.values) == 2 and res.kind == "energy"


def test_scan_threads_do_not_change_results():
    one = scan("force", lo=0.3, hi=3.0, count=6, spacing="log")
    many = scan("force", lo=0.3, hi=3.0, count=6, spacing="log", threads=3)
    assert one == many


def test_scan_result_invariants():
    v = CertifiedValue(0.0, 0.0)
    with pytest.raises(DomainError):
        ScanResult("energy", (1.0, 1.0), (v, v))
    with pytest.raises(DomainError):
        ScanResult("energy", (1.0,), (v, v))


def test_grid_validation():
    assert grid(1.0, 10.0, 3, "log")[1] == pytest.approx(np.sqrt(10.0))
    for args in [(0.0, 1.0, 3), (2.0, 1.0, 3), (0.1, 1.0, 1)]:
        with pytest.raises(DomainError):
            grid(*args)
    with pytest.raises(DomainError):
        observable("pressure")


def test_extremum_of_energy_density_on_the_diagonal():
    g = BoxGeometry((1.0, 1.0))
    tp = TruncationParams(tol=1e-10)

    def density(t):
        return stress_energy((t, t), g, tp=tp).conformal[0][0]
    loc, value = find_extremum(density, (0.3, 0.7), tol=1e-6)
    assert loc.contains(0.5, 1e-6)
    assert loc.radius <= 1e-6


def test_extremum_of_a_flat_function_is_rejected():
    with pytest.raises(BracketError):
        find_extremum(lambda x: CertifiedValue(1.0, 0.0), (0.0, 1.0))


def test_zero_needs_certified_sign_change():
    with pytest.raises(BracketError):
        find_zero(lambda x: CertifiedValue(x * x + 1, 0.0), (-1.0, 1.0))
    with pytest.raises(BracketError):
        find_zero(lambda x: CertifiedValue(x, 2.0), (-1.0, 1.0))
    root = find_zero(lambda x: CertifiedValue(x ** 3 - 2, 0.0), (0.0, 2.0), tol=1e-10)
    assert root.contains(2 ** (1 / 3))


def test_energy_zeros_are_reciprocal():
    tp = TruncationParams(T=None)
    z1 = find_zero("energy", (0.2, 0.5), 1e-8, tp)
    z2 = find_zero("energy", (2.0, 3.5), 1e-8, tp)
    assert z1.value * z2.value == pytest.approx(1.0, abs=1e-5)


def test_fits_recover_synthetic_coefficients():
    x = np.linspace(0.02, 0.2, 10)
    assert abs(fit_small_a2(x, 0.7 / x ** 2) - 0.7) <= 1e-12
    assert fit_small_a2(x, -0.3 / x ** 2 + 0.1 / x + 2.0) == pytest.approx(-0.3, rel=1e-10)
    xs = np.linspace(20, 100, 9)
    m, q = fit_asymptote(xs, 0.5 * xs - 1.0)
    assert m == pytest.approx(0.5) and q == pytest.approx(-1.0)


def test_fit_preconditions():
    with pytest.raises(FitError):
        fit_small_a2([0.1, 0.3, 0.05], [1.0, 1.0, 1.0])
    with pytest.raises(FitError):
        fit_small_a2([0.1, 0.05], [1.0, 1.0])
    with pytest.raises(FitError):
        fit_small_a2([0.1, 0.1, 0.1], [1.0, 1.0, 1.0])
    with pytest.raises(FitError):
        fit_asymptote([5.0, 30.0], [1.0, 2.0])
