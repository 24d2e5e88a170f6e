import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from cvpsi import kernels as K
from cvpsi.exceptions import InvalidArgumentError, UnsupportedOrderError
from cvpsi.quadrature import integrate

PHI0 = 0.3989422804014327
L = K.standard_normal()

scales = st.floats(0.05, 5.0)
coeffs = st.floats(-3.0, 3.0)
combs = st.lists(st.tuples(coeffs, scales), min_size=1, max_size=3).map(
    lambda a: K.GaussianComb(tuple(c for c, _ in a), tuple(s for _, s in a)))


def test_scaled_identity_and_value():
    assert K.scaled(L, 1.0) == L
    for g in (0.1, 0.7, 3.0):
        assert float(K.scaled(L, g)(0.0)) == pytest.approx(PHI0 / g, rel=1e-15)
        val, _ = integrate(K.scaled(L, g), [-15 * g, 0.0, 15 * g])
        assert val == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        K.scaled(L, 0.0)


def test_convolution_of_standard_normals():
    c = K.convolve(L, L)
    assert c.coeffs == (1.0,)
    assert c.scales[0] == pytest.approx(math.sqrt(2.0), rel=1e-15)


def test_convolution_matches_quadrature():
    a = K.GaussianComb((1.5, -0.5), (0.7, 2.0))
    b = K.GaussianComb((1.0, 0.3), (1.0, 0.4))
    x = 1.0
    val, _ = integrate(lambda t: a(t) * b(x - t), [-30.0, 0.0, 1.0, 30.0])
    assert float(K.convolve(a, b)(x)) == pytest.approx(val, abs=1e-12)


def test_twicing_at_zero():
    assert float(K.twicing()(0.0)) == pytest.approx(0.5157898, abs=5e-8)
    assert float(K.twicing()(0.0)) == pytest.approx(2 * PHI0 - 1 / (2 * math.sqrt(math.pi)), rel=1e-14)


def test_twicing_char_fn_bounded_by_one():
    t = np.linspace(-20, 20, 2001)
    phi_l = L.char_fn(t)
    m = K.twicing().char_fn(t)
    assert np.allclose(m, (2 - phi_l) * phi_l, atol=1e-15)
    assert np.all(m <= 1.0 + 1e-15)


def test_pointwise_product():
    p = K.pointwise_product_integrals(L, L)
    assert p.integral() == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-14)
    x = np.linspace(-4, 4, 41)
    M = K.twicing()
    assert np.allclose(K.pointwise_product_integrals(M, M)(x), M(x) ** 2, atol=1e-14)
    val, _ = integrate(lambda t: M(t) ** 2, [-30.0, 0.0, 30.0])
    assert K.pointwise_product_integrals(M, M).integral() == pytest.approx(val, rel=1e-12)


@given(combs, combs, st.floats(-4, 4))
def test_pointwise_product_property(a, b, x):
    assert float(K.pointwise_product_integrals(a, b)(x)) == pytest.approx(float(a(x) * b(x)), abs=1e-12)


@given(combs, combs, combs, st.floats(-5, 5), st.floats(0.2, 4.0))
@settings(max_examples=60)
def test_convolution_algebra(a, b, c, x, g):
    assert float(K.convolve(a, b)(x)) == pytest.approx(float(K.convolve(b, a)(x)), abs=1e-12)
    left = K.convolve(K.convolve(a, b), c)
    right = K.convolve(a, K.convolve(b, c))
    assert float(left(x)) == pytest.approx(float(right(x)), abs=1e-12)
    lhs = K.scaled(K.convolve(a, b), g)
    rhs = K.convolve(K.scaled(a, g), K.scaled(b, g))
    assert float(lhs(x)) == pytest.approx(float(rhs(x)), abs=1e-12)


def test_roughness():
    assert K.roughness(L, 0) == pytest.approx(0.2820948, abs=1e-7)
    assert K.roughness(L, 1) == pytest.approx(0.1410474, abs=1e-7)
    assert K.ROUGHNESS_L < 2 * PHI0
    for r in range(5):
        val, _ = integrate(lambda x: K.gaussian_deriv(L, x, r) ** 2, [-30.0, 0.0, 30.0])
        assert K.roughness(L, r) == pytest.approx(val, rel=1e-11)
    with pytest.raises(UnsupportedOrderError):
        K.roughness(L, 5)


def test_gaussian_deriv():
    assert float(K.gaussian_deriv(L, 0.0, 1)) == 0.0
    assert float(K.gaussian_deriv(L, 0.0, 2)) == pytest.approx(-PHI0, rel=1e-15)
    comb = K.GaussianComb((1.0, -0.4), (0.8, 1.7))
    x = np.linspace(-3, 3, 13)
    h = 1e-4
    for r in range(1, 8):
        fd = (K.gaussian_deriv(comb, x + h, r - 1) - K.gaussian_deriv(comb, x - h, r - 1)) / (2 * h)
        assert np.allclose(K.gaussian_deriv(comb, x, r), fd, atol=1e-6 * 10 ** (r // 3))
    with pytest.raises(UnsupportedOrderError):
        K.gaussian_deriv(L, 0.0, 9)


def test_bessel_against_scipy():
    x = np.concatenate([np.linspace(0, 40, 801), [1e3, 1e5]])
    assert np.allclose(K.bessel_i0e(x), special.i0e(x), rtol=1e-13, atol=0)
    assert np.allclose(K.log_bessel_i0(x), np.log(special.i0e(x)) + x, rtol=1e-13)


def test_bessel_branches_agree_at_switch():
    s = np.array([K.BESSEL_SWITCH])
    series = K._i0_series(s) * np.exp(-s)
    asym = K._i0e_asymptotic(s)
    assert series[0] == pytest.approx(asym[0], rel=1e-12)


@pytest.mark.parametrize("nu", [1e-6, 0.5, 5.0, 50.0, 800.0])
def test_vonmises_normalised(nu):
    k = K.VonMisesKernel(nu)
    pts = [0.0, 0.01, 0.1, math.pi, 2 * math.pi - 0.1, 2 * math.pi - 0.01, 2 * math.pi]
    val, _ = integrate(lambda t: K.vonmises_eval(k, t), pts)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_vonmises_uniform_limit():
    k = K.VonMisesKernel(1e-12)
    assert float(K.vonmises_eval(k, 1.3)) == pytest.approx(1 / (2 * math.pi), rel=1e-10)
    with pytest.raises(InvalidArgumentError):
        K.VonMisesKernel(0.0)


@pytest.mark.parametrize("nu", [0.5, 5.0, 50.0])
@pytest.mark.parametrize("delta", [0.0, 0.4, 2.5, math.pi])
def test_vonmises_convolution_identity(nu, delta):
    k = K.VonMisesKernel(nu)
    t = np.linspace(0, 2 * math.pi, 2049)[:-1]
    trap = float(np.sum(K.vonmises_eval(k, t) * K.vonmises_eval(k, t - delta))) * (2 * math.pi / 2048)
    assert float(K.vonmises_convolution_at(k, delta)) == pytest.approx(trap, abs=1e-8)


def test_dirac_tag():
    assert K.DiracTag().present
