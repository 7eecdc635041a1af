import math

import pytest

from boxcasimir.boxmodel import BoxGeometry, SideId
from boxcasimir.dirichlet import TruncationParams
from boxcasimir.errors import DomainError, EdgeError, PoleError
from boxcasimir.observables import (energy_ren, force_ren, pressure, pressure_prescription_check, rescale,
                                    stress_energy, xi_critical)

ONE = BoxGeometry((1.0,))
PI24 = math.pi / 24


def test_critical_coupling():
    assert xi_critical(1) == 0.0
    assert xi_critical(3) == pytest.approx(1 / 6)


def test_one_dimensional_tensor_closed_form():
    tp = TruncationParams(N=10)
    for x in (0.1, 0.25, 0.5, 0.9):
        t = stress_energy((x,), ONE, tp=tp)
        assert t.conformal[0][0].contains(-PI24, 1e-14)
        assert t.conformal[1][1].contains(-PI24, 1e-14)
        assert t.nonconformal[0][0].contains(math.pi / (2 * math.sin(math.pi * x) ** 2), 1e-12)
        assert t.nonconformal[1][1].contains(0.0, 1e-12)


def test_coupling_shift():
    t = stress_energy((0.3,), ONE, tp=TruncationParams(N=10))
    shifted = t.at(0.25)
    expected = t.conformal[0][0].value + 0.25 * t.nonconformal[0][0].value
    assert shifted[0][0].value == pytest.approx(expected, rel=1e-14)
    assert t.total[0][0] == t.conformal[0][0]


def test_conformal_part_is_traceless():
    for sides, x in [((1.0, 1.7), (0.3, 0.4)), ((1.0, 1.2, 0.8), (0.3, 0.4, 0.5))]:
        c = stress_energy(x, BoxGeometry(sides), tp=TruncationParams(tol=1e-10)).conformal
        trace = -c[0][0].value + sum(c[i][i].value for i in range(1, len(sides) + 1))
        assert abs(trace) < 1e-12


def test_reflection_symmetry():
    g = BoxGeometry((1.0, 1.7))
    a, b = stress_energy((0.3, 0.4), g), stress_energy((0.7, 0.4), g)
    assert a.conformal[0][0].overlaps(b.conformal[0][0])
    assert a.conformal[2][2].overlaps(b.conformal[2][2])
    # the off-diagonal stress is odd under x1 -> a1 - x1
    assert a.conformal[1][2].overlaps(-b.conformal[1][2])


def test_scaling_laws():
    g, lam = BoxGeometry((1.0, 1.7)), 2.5
    big = g.scaled(lam)
    t, tb = stress_energy((0.3, 0.4), g), stress_energy((0.75, 1.0), big)
    assert tb.conformal[0][0].value == pytest.approx(t.conformal[0][0].value * rescale("tensor", g, lam), rel=1e-11)
    assert energy_ren(big).value == pytest.approx(energy_ren(g).value * rescale("energy", g, lam), rel=1e-11)
    f, fb = force_ren(SideId(0), g), force_ren(SideId(0), big)
    assert fb.value == pytest.approx(f.value * rescale("force", g, lam), rel=1e-11)
    with pytest.raises(DomainError):
        rescale("energy", g, 0.0)


def test_tensor_rejects_boundary_points():
    with pytest.raises(EdgeError):
        stress_energy((0.0, 0.5), BoxGeometry((1.0, 1.0)))
    with pytest.raises(DomainError):
        stress_energy((1.5, 0.5), BoxGeometry((1.0, 1.0)))


def test_one_dimensional_pressure():
    # the pressure vector points into the box on both walls
    for lam in (0, 1):
        side = SideId(0, lam)
        p = pressure(side, (float(lam),), ONE, TruncationParams(N=10))
        assert (p[0] * -side.outward_normal()).contains(PI24, 1e-14)


def test_pressure_vector_shape_and_side_symmetry():
    g = BoxGeometry((1.0, 2.0))
    low = pressure(SideId(0, 0), (0.0, 0.6), g)
    high = pressure(SideId(0, 1), (1.0, 0.6), g)
    assert low[1].value == 0.0 and low[1].radius == 0.0
    assert low[0].overlaps(-high[0])


def test_pressure_argument_errors():
    g = BoxGeometry((1.0, 1.0))
    with pytest.raises(DomainError):
        pressure(SideId(0), (0.5, 0.5), g)
    with pytest.raises(EdgeError):
        pressure(SideId(0), (0.0, 0.0), g)
    with pytest.raises(DomainError):
        pressure(SideId(2), (0.0, 0.5), g)


def test_prescriptions_agree_mid_side():
    on_side, limit = pressure_prescription_check(SideId(0), (0.0, 0.5), BoxGeometry((1.0, 1.0)))
    assert on_side.overlaps(limit)
    assert on_side.contains(0.15023947023872314, 1e-10)


def test_one_dimensional_energy_and_force():
    tp = TruncationParams(N=20)
    assert energy_ren(ONE, tp).contains(-PI24, 1e-15)
    # the force is -dE/da1, hence negative when E = -pi / (24 a)
    assert force_ren(SideId(0), ONE, tp).contains(-PI24, 1e-15)


def test_energy_force_duality():
    for sides in [(1.0, 0.5), (1.0, 3.0), (0.8, 1.1, 1.3)]:
        g = BoxGeometry(sides)
        h = 1e-4
        dE = (energy_ren(g.with_side(0, sides[0] + h)).value - energy_ren(g.with_side(0, sides[0] - h)).value) / (2 * h)
        assert force_ren(SideId(0), g).value == pytest.approx(-dE, abs=1e-5)


def test_force_on_other_axis_by_permutation():
    g = BoxGeometry((1.0, 3.0))
    assert force_ren(SideId(1), g).overlaps(force_ren(SideId(0), g.permuted((1, 0))))
    assert force_ren(SideId(0, 1), g).overlaps(force_ren(SideId(0, 0), g))


def test_independent_of_cut():
    g = BoxGeometry((1.0, 2.0))
    ref = energy_ren(g, TruncationParams(T=1.0))
    for T in (0.5, 2.0, None):
        assert energy_ren(g, TruncationParams(T=T)).overlaps(ref)


def test_regularized_energy_poles_and_unavailable_bounds():
    g = BoxGeometry((1.0, 1.0))
    for u in (1, 2, 3):
        with pytest.raises(PoleError):
            energy_ren(g, u=u)
    assert energy_ren(g, u=0.5).radius < 1e-10
    assert math.isinf(energy_ren(g, u=2.5).radius)


def test_one_dimensional_prescription_check():
    on_side, limit = pressure_prescription_check(SideId(0), (0.0,), ONE, eps=1e-3)
    assert abs(on_side.value - PI24) <= 1e-10
    assert abs(limit.value - PI24) <= 1e-5
    assert abs(on_side.value - limit.value) <= 1e-5
