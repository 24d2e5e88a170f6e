import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvpsi import cv_core as cc
from cvpsi.exceptions import DegenerateSampleError, InvalidArgumentError
from cvpsi.kernels import ROUGHNESS_L, gauss
from cvpsi.mixtures import catalog, sample
from cvpsi.quadrature import integrate
from cvpsi.sample import Sample

PSI = 1 / (2 * math.sqrt(math.pi))
PAIR = Sample([0.0, 1.0])


def test_two_point_values():
    # direct evaluation: phi(1), phi_sqrt2(0), phi_sqrt2(1)
    phi1 = math.exp(-0.5) / math.sqrt(2 * math.pi)
    n0 = 1 / (2 * math.sqrt(math.pi))
    n1 = math.exp(-0.25) / (2 * math.sqrt(math.pi))
    assert cc.psi_tilde_ND(PAIR, 1.0) == pytest.approx(phi1, rel=1e-14)
    assert cc.psi_tilde_ND(PAIR, 1.0) == pytest.approx(0.2419707, abs=1e-7)
    assert cc.psi_tilde_D_star(PAIR, 1.0) == pytest.approx((2 * n0 + 2 * n1) / 4, rel=1e-14)
    assert cc.psi_tilde_D_star(PAIR, 1.0) == pytest.approx(0.2508952, abs=1e-7)
    assert cc.cv(PAIR, 1.0) == pytest.approx(-0.2330462, abs=1e-7)
    assert cc.psi_tilde_D_star(Sample([0.0, 0.0]), 1.0) == pytest.approx(0.2820948, abs=1e-7)


def test_constant_sample_nd():
    s = Sample(np.full(6, 2.5))
    assert cc.psi_tilde_ND(s, 0.7) == pytest.approx(0.3989423 / 0.7, rel=1e-6)
    w = cc.penalty_w(s, 1.0)
    assert math.isfinite(w) and 0 <= w <= ROUGHNESS_L / 6 + 1e-15
    with pytest.raises(DegenerateSampleError):
        cc.psi_hat(s)


def test_bandwidth_validation():
    with pytest.raises(InvalidArgumentError):
        cc.cv(PAIR, 0.0)
    with pytest.raises(InvalidArgumentError):
        cc.psi_tilde_D(PAIR, -1.0)


@pytest.mark.parametrize("n", [5, 50])
def test_identity_suite(n, rng):
    for _ in range(10):
        s = Sample(rng.normal(size=n))
        for g in np.exp(rng.uniform(np.log(0.02), np.log(5), 10)):
            cv = cc.cv(s, g)
            assert abs(cv - (cc.psi_tilde_D_star(s, g) - 2 * cc.psi_tilde_ND(s, g))) < 1e-12
            w = cc.penalty_w(s, g)
            assert abs(-cv - (cc.psi_tilde_ND_twicing(s, g) - w)) < 1e-12
            d = cc.psi_tilde_D(s, g)
            assert abs(d - ((1 - 1 / n) * cc.psi_tilde_ND(s, g) + gauss(0.0, g) / n)) < 1e-14 * max(1, d)
            assert -1e-12 <= w <= ROUGHNESS_L / (n * g) + 1e-12


def test_d_star_is_integral_of_kde_squared(rng):
    x = rng.normal(size=12)
    g = 0.4
    kde = lambda t: np.mean(gauss(t[:, None] - x[None, :], g), axis=1)
    val, _ = integrate(lambda t: kde(t) ** 2, np.concatenate([[-12.0], np.sort(x), [12.0]]))
    assert cc.psi_tilde_D_star(Sample(x), g) == pytest.approx(val, abs=1e-10)


def test_psi_hat_is_max_of_negated_criterion(rng):
    s = Sample(rng.normal(size=200))
    est, g, curve = cc.psi_hat(s)
    assert est == pytest.approx(2 * cc.psi_tilde_ND(s, g) - cc.psi_tilde_D_star(s, g), rel=1e-14)
    assert -est <= curve.values.min()
    grid = np.linspace(0.5 * g, 2 * g, 50)
    assert est >= max(-cc.cv(s, h) for h in grid) - 1e-9
    w_form = max(cc.psi_tilde_ND_twicing(s, h) - cc.penalty_w(s, h) for h in curve.params)
    assert w_form <= est + 1e-12 and w_form == pytest.approx(est, rel=1e-4)


@given(st.floats(0.1, 10), st.floats(-100, 100), st.floats(0.05, 3.0))
@settings(max_examples=30, deadline=None)
def test_scale_equivariance_of_criterion(a, b, g):
    x = np.random.default_rng(4).normal(size=40)
    s, t = Sample(x), Sample(a * x + b)
    assert cc.cv(t, a * g) == pytest.approx(cc.cv(s, g) / a, rel=1e-10, abs=1e-12)


def test_scale_equivariance_of_estimate(rng):
    x = rng.normal(size=300)
    e1 = cc.psi_hat(Sample(x)).estimate
    e2 = cc.psi_hat(Sample(4.0 * x - 7.0)).estimate
    assert e2 * 4.0 == pytest.approx(e1, rel=1e-8)


def test_ties_use_smallest_nonzero_gap():
    x = np.array([0.0, 0.0, 0.5, 1.0, 1.0, 2.0, 3.5])
    lo, hi = cc.bandwidth_range(Sample(x))
    assert lo == pytest.approx(0.5 / 3) and hi == 3.5
    assert math.isfinite(cc.psi_hat(Sample(x)).estimate)


def test_median_estimate_density_1():
    f = catalog(1)
    est = [cc.psi_hat(sample(f, 1000, 1000 + r)).estimate for r in range(100)]
    assert abs(np.median(est) - PSI) < 0.01


def test_large_sample_runs():
    s = sample(catalog(2), 5000, 8)
    est, g, _ = cc.psi_hat(s)
    assert g > 0 and abs(est - 0.2) < 0.2
