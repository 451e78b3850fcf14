import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dliouville import qdilog
from dliouville.errors import DomainError, ModeError, PoleError, SectorError
from dliouville.qdilog import CouplingParams, QuadratureSpec

PI = math.pi
B1 = CouplingParams(1.0)
B08 = CouplingParams(0.8)
BC = CouplingParams(cmath.exp(1j * PI / 6))


def test_constants_consistent():
    for P in (B1, B08, BC):
        assert abs(P.c_b - 0.5j * (P.b + 1 / P.b)) < 1e-15
        assert abs(P.zeta_inv - cmath.exp(1j * PI * P.c_b ** 2) * P.zeta_o ** 2) < 1e-14
        assert abs(P.zeta - cmath.exp(1j * PI * P.c_b ** 2 / 3)) < 1e-15


def test_modes():
    assert B1.modes == ("unitary",)
    assert "product-convergent" in BC.modes and "unitary" in BC.modes
    with pytest.raises(ModeError):
        CouplingParams(0.5 - 0.5j)  # neither mode
    with pytest.raises(DomainError):
        CouplingParams(-1.0)


def test_value_at_zero_b1():
    v = qdilog.eval_integral(B1, 0)
    assert abs(v * v - B1.zeta_inv) < 1e-13
    # regression constant: the branch picked by the integral itself
    assert abs(v - cmath.exp(-1j * PI / 12)) < 1e-13


def test_unit_modulus_on_real_axis():
    assert abs(abs(qdilog.eval_integral(B1, 0.5)) - 1) < 1e-13
    x = np.random.default_rng(3).uniform(-4, 4, 200)
    for P in (B1, B08):
        assert np.max(np.abs(np.abs(qdilog.eval(P, x)) - 1)) < 1e-10


def test_inversion_integral():
    z = 0.3 + 0.2j
    lhs = qdilog.eval_integral(B1, z) * qdilog.eval_integral(B1, -z)
    assert abs(lhs - cmath.exp(-1j * PI * z * z) * B1.zeta_inv) < 1e-12


def test_integral_strip_check():
    with pytest.raises(DomainError):
        qdilog.eval_integral(B1, 1.5j)
    with pytest.raises(DomainError):
        qdilog.eval_integral(B1, 0.0, QuadratureSpec(contour_offset=10.0))


def test_product_examples():
    v = qdilog.eval_product(BC, 0)
    assert abs(v * v - BC.zeta_inv) < 1e-13
    rel = abs(qdilog.eval_product(BC, 0.2) / qdilog.eval_integral(BC, 0.2) - 1)
    assert rel < 1e-8
    assert qdilog.eval_product(BC, BC.c_b) == 0
    with pytest.raises(ModeError):
        qdilog.eval_product(B1, 0.1)
    with pytest.raises(PoleError):
        qdilog.eval_product(BC, -BC.c_b)


def test_eval_shift_reduction():
    z = 0.4 + 0.5j
    lhs = qdilog.eval(B1, z)
    rhs = (1 + cmath.exp(2 * PI * (z - 0.5j))) * qdilog.eval(B1, z - 1j)
    assert abs(lhs / rhs - 1) < 1e-12
    assert abs(qdilog.eval(B1, 0.5) - qdilog.eval_integral(B1, 0.5)) < 1e-12


def test_eval_far_inversion_b08():
    z = 1.2j
    r = qdilog.eval(B08, z) * qdilog.eval(B08, -z)
    assert abs(r / (cmath.exp(-1j * PI * z * z) * B08.zeta_inv) - 1) < 1e-8


def test_pole_and_overflow():
    with pytest.raises(PoleError):
        qdilog.eval(B1, -B1.c_b - 1j)
    with pytest.raises(OverflowError):
        qdilog.eval(B1, 40.0 + 3j)


def test_zero_lattice_small():
    for m in range(2):
        for n in range(2):
            z = BC.c_b + 1j * m * BC.b + 1j * n / BC.b
            assert abs(qdilog.eval_product(BC, z)) < 1e-6


def test_product_and_integral_agree_inside_strip():
    h = BC.c_b.imag
    re, im = np.meshgrid(np.linspace(-1.5, 1.5, 6), np.linspace(-0.8 * h, 0.8 * h, 5))
    z = (re + 1j * im).ravel()
    a, b = qdilog.eval_integral(BC, z), qdilog.eval_product(BC, z)
    assert np.max(np.abs(a / b - 1)) < 1e-8


def test_product_at_removable_factor_pair():
    # z = c_b + i/b - 2ib is real here: a numerator and a denominator factor
    # of the product vanish together
    z0 = BC.c_b + 1j / BC.b - 2j * BC.b
    assert abs(z0.imag) < 1e-14
    z = np.array([z0.real, z0.real + 1e-9, z0.real + 0.1])
    a, b = qdilog.eval_integral(BC, z), qdilog.eval_product(BC, z)
    assert np.max(np.abs(a / b - 1)) < 1e-10


def test_strategy_option_is_honoured():
    z = np.array([0.1 + 0.05j, -0.4j])
    a = qdilog.eval(BC, z, QuadratureSpec(strategy="integral"))
    b = qdilog.eval(BC, z, QuadratureSpec(strategy="product"))
    assert np.max(np.abs(a / b - 1)) < 1e-10


def test_extended_precision_matches():
    z = 0.3 - 0.1j
    a = qdilog.eval_integral(B1, z)
    b = qdilog.eval_integral(B1, z, QuadratureSpec(extended_precision=True))
    assert abs(a / b - 1) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_shift_property(x, y):
    z = complex(x, y)
    for s in (B08.b, 1 / B08.b):
        lhs = qdilog.log_eval(B08, z + 0.5j * s)
        rhs = qdilog.log_eval(B08, z - 0.5j * s) + np.log1p(cmath.exp(2 * PI * z * s))
        assert abs(cmath.exp(lhs - rhs) - 1) < 1e-8


def test_duality():
    z = np.array([0.2 + 0.3j, -1.1 - 0.6j, 2.0j])
    for P in (B08, BC):
        np.testing.assert_allclose(qdilog.eval(P, z), qdilog.eval(P.dual(), z), rtol=1e-10)


def test_theta():
    z, tau = 0.3 + 0.1j, 1j
    assert abs(qdilog.theta(z + 1, tau) - qdilog.theta(z, tau)) < 1e-14
    v0 = qdilog.theta(0, 1j)
    assert abs(v0.imag) < 1e-15 and v0.real > 0
    tau = 0.1 + 0.9j
    brute = sum(cmath.exp(1j * PI * tau * n * n + 2j * PI * n * 0.3) for n in range(-100, 101))
    assert abs(qdilog.theta(0.3, tau) - brute) < 1e-12
    with pytest.raises(DomainError):
        qdilog.theta(0, -1j)


def test_asymptotic_sectors():
    v, tag = qdilog.asymptotic(BC, -10)
    assert tag == "left" and v == 1
    v, tag = qdilog.asymptotic(BC, 10)
    assert tag == "right" and abs(v - cmath.exp(-1j * PI * 100) * BC.zeta_inv) < 1e-12
    v, tag = qdilog.asymptotic(BC, 8j)
    assert tag == "upper"
    assert abs(v / qdilog.eval(BC, 8j) - 1) < 1e-4
    edge = 10 * cmath.exp(1j * (PI / 2 - PI / 6))
    with pytest.raises(SectorError):
        qdilog.asymptotic(BC, edge)
    with pytest.raises(DomainError):
        qdilog.asymptotic(BC, 1.0)


def test_reduce_argument_moves_into_strip():
    z = np.array([0.3 + 2.7j, -0.2 - 3.1j])
    zr, pref = qdilog.reduce_argument(B08, z)
    assert np.all(np.abs(zr.imag) <= 0.5 * qdilog.shift_parameter(B08).real + 1e-12)
    np.testing.assert_allclose(np.exp(pref + qdilog.log_eval(B08, zr)), qdilog.eval(B08, z),
                               rtol=1e-10)


def test_shift_parameter_tie_goes_to_b():
    assert qdilog.shift_parameter(B1) == 1.0
