import cmath

import pytest

from schottky_dimer.errors import QuadratureError
from schottky_dimer.quadrature import (
    circle_integral,
    polyline_integral,
    segment_integral,
)


def test_segment_polynomial_exact():
    # Simpson is exact on cubics, adaptivity should not disturb that
    val = segment_integral(lambda z: z * z, 0.0, 1.0 + 1.0j)
    assert abs(val - (1.0 + 1.0j) ** 3 / 3.0) < 1e-14


def test_segment_oscillatory():
    val = segment_integral(cmath.exp, -1.0, 1.0j)
    assert abs(val - (cmath.exp(1.0j) - cmath.exp(-1.0))) < 1e-10


def test_degenerate_segment_is_zero():
    assert segment_integral(lambda z: 1.0 / z, 2.0, 2.0) == 0.0


def test_polyline_winding_pole():
    corners = [1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]
    val = polyline_integral(lambda z: 1.0 / z, corners)
    assert abs(val - 2j * cmath.pi) < 1e-9


def test_polyline_needs_two_points():
    with pytest.raises(QuadratureError):
        polyline_integral(lambda z: z, [1.0])


def test_near_pole_bails_out():
    with pytest.raises(QuadratureError):
        segment_integral(lambda z: 1.0 / (z - 1e-30j), -1.0, 1.0)


def test_circle_residue():
    val = circle_integral(lambda z: 1.0 / z, 0.0, 2.0)
    assert abs(val - 2j * cmath.pi) < 1e-12


def test_circle_analytic_integrand_vanishes():
    val = circle_integral(cmath.exp, 0.5 + 0.5j, 1.0)
    assert abs(val) < 1e-12


def test_circle_rejects_bad_radius():
    with pytest.raises(QuadratureError):
        circle_integral(lambda z: z, 0.0, 0.0)
