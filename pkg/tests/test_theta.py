import math

import numpy as np
import pytest

from helpers import random_group, symmetric_genus2
from schottky_dimer.abelian import AbelianData
from schottky_dimer.errors import AdmissibilityError, TruncationError
from schottky_dimer.theta import ThetaEvaluator, lattice_radius, theta_order1


def test_genus0_is_one():
    ev = ThetaEvaluator(np.zeros((0, 0)))
    assert ev.theta([]) == 1.0
    value, grad = ev.theta_and_grad([])
    assert value == 1.0 and grad.shape == (0,)


def test_genus1_oracle_value():
    ev = ThetaEvaluator(np.array([[0.04]]))
    oracle = sum(0.2 ** (n * n) for n in range(-10, 11))
    assert abs(ev.theta([0.0]) - oracle) < 1e-12
    assert abs(oracle - 1.4032010240) < 1e-9


def test_real_positive_on_real_arguments():
    rng = np.random.default_rng(3)
    data = AbelianData(random_group(2, rng), 6)
    ev = ThetaEvaluator(data.period_matrix()[0])
    for _ in range(100):
        z = rng.uniform(-2, 2, 2)
        val = ev.theta(z)
        assert abs(val.imag) < 1e-12 * abs(val)
        assert val.real > 0.0


def test_periodicity_and_evenness():
    ev = ThetaEvaluator(np.array([[0.05, 0.8], [0.8, 0.03]]))
    z = np.array([0.37 + 0.02j, -0.81 + 0.01j])
    base = ev.theta(z)
    for k in range(2):
        shift = np.zeros(2)
        shift[k] = 1.0
        assert abs(ev.theta(z + shift) - base) < 1e-10 * abs(base)
    assert abs(ev.theta(-z) - base) < 1e-12 * abs(base)


def test_quasi_periodicity_against_period_matrix():
    data = AbelianData(symmetric_genus2(0.05), 6)
    q, omega = data.period_matrix()
    ev = ThetaEvaluator(q)
    z = np.array([0.21, 0.43], dtype=complex)
    for k in range(2):
        lhs = ev.theta(z + omega[:, k])
        rhs = (
            q[k, k] ** -0.5
            * np.exp(-2j * np.pi * z[k])
            * ev.theta(z)
        )
        assert abs(lhs - rhs) < 1e-8 * abs(rhs)


def test_lattice_radius_margin_oracle():
    q = np.array([[0.05, 0.8], [0.8, 0.08]])
    tight = ThetaEvaluator(q, eps=1e-10)
    wide = ThetaEvaluator(q, eps=1e-10, radius=tight.radius + 4)
    for z in ([0.1, 0.7], [0.45, -0.2]):
        assert abs(tight.theta(z) - wide.theta(z)) < 5e-10


def test_dlog_vanishes_at_origin():
    ev = ThetaEvaluator(np.array([[0.04]]))
    assert abs(ev.dlog_theta([0.0], 1)) < 1e-13


def test_dlog_matches_finite_difference_genus1():
    ev = ThetaEvaluator(np.array([[0.04]]))
    z, h = 0.3, 1e-5
    fd = (np.log(ev.theta([z + h])) - np.log(ev.theta([z - h]))) / (2 * h)
    assert abs(ev.dlog_theta([z], 1) - fd) < 1e-7


def test_dlog_matches_finite_difference_genus2():
    rng = np.random.default_rng(5)
    data = AbelianData(random_group(2, rng), 6)
    ev = ThetaEvaluator(data.period_matrix()[0])
    z = rng.uniform(-1, 1, 2)
    grad = ev.dlog_theta(z)
    h = 1e-6
    for j in range(2):
        step = np.zeros(2)
        step[j] = h
        fd = (np.log(ev.theta(z + step)) - np.log(ev.theta(z - step))) / (2 * h)
        assert abs(grad[j] - fd) < 1e-6


def test_conditioning_error_at_exact_zero():
    q = 0.3
    ev = ThetaEvaluator(np.array([[q]]))
    omega_11 = math.log(q) / (2.0 * math.pi) * 1j  # purely imaginary
    with pytest.raises(TruncationError):
        ev.theta([0.5 + omega_11 / 2.0])


def test_dlog_refuses_near_zero():
    q = 0.3
    ev = ThetaEvaluator(np.array([[q]]))
    omega_11 = math.log(q) / (2.0 * math.pi) * 1j
    with pytest.raises(TruncationError):
        ev.dlog_theta([0.5 + omega_11 / 2.0], 1)


def test_validation_rejects_bad_period_matrices():
    with pytest.raises(AdmissibilityError):
        ThetaEvaluator(np.array([[0.5, 0.1], [0.2, 0.5]]))  # not symmetric
    with pytest.raises(AdmissibilityError):
        ThetaEvaluator(np.array([[1.2]]))  # diagonal out of range
    with pytest.raises(AdmissibilityError):
        ThetaEvaluator(np.array([[0.9, 3.0], [3.0, 0.9]]))  # divergent coupling
    with pytest.raises(AdmissibilityError):
        lattice_radius(0.0, 1e-10)


def test_order1_truncation_values():
    assert theta_order1([0.0], [0.3]) == 1.0
    assert abs(theta_order1([0.04], [0.0]) - 1.4) < 1e-15


def test_order1_error_scales_linearly_genus2():
    z = np.array([0.13, 0.29])
    errs = []
    for s in (0.02, 0.01, 0.005):
        data = AbelianData(symmetric_genus2(s), 6)
        ev = ThetaEvaluator(data.period_matrix()[0])
        errs.append(abs(ev.theta(z) - theta_order1([s, s], z)))
    r1 = errs[0] / errs[1]
    r2 = errs[1] / errs[2]
    assert 1.6 < r1 < 2.5
    assert 1.6 < r2 < 2.5
