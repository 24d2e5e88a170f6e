import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvpsi import competitors as C
from cvpsi.cv_core import psi_hat
from cvpsi.exceptions import DegenerateSampleError
from cvpsi.mixtures import catalog, sample, true_psi
from cvpsi.sample import Sample

PSI = 1 / (2 * math.sqrt(math.pi))


def test_normal_scale_functionals():
    # psi_r of N(0, sigma^2) by quadrature-free identities
    assert C.psi_normal_scale(0, 1.0) == pytest.approx(PSI, rel=1e-15)
    assert C.psi_normal_scale(2, 1.0) == pytest.approx(-1 / (4 * math.sqrt(math.pi)), rel=1e-15)
    assert C.psi_normal_scale(4, 1.0) == pytest.approx(3 / (8 * math.sqrt(math.pi)), rel=1e-15)
    assert C.psi_normal_scale(4, 2.0) == pytest.approx(C.psi_normal_scale(4, 1.0) / 2 ** 5, rel=1e-15)


def test_robust_scale():
    x = np.random.default_rng(0).normal(size=100000)
    assert C.robust_scale(x) == pytest.approx(1.0, rel=0.02)
    heavy = np.concatenate([x[:1000], [1e4]])
    assert C.robust_scale(heavy) < 2.0


def test_amse_bandwidth_orders():
    assert C.amse_bandwidth(0, -1.0, 1) == pytest.approx((2 * 0.3989422804014327) ** (1 / 3), rel=1e-14)
    assert C.amse_bandwidth(2, C.psi_normal_scale(4, 1.0), 1000) > 0


@pytest.mark.parametrize("fn", [C.psi_js, C.psi_shd])
def test_equivariance_and_determinism(fn, rng):
    x = rng.normal(size=300)
    a, tr = fn(Sample(x))
    b, _ = fn(Sample(3.0 * x - 4.0))
    assert b * 3.0 == pytest.approx(a, rel=1e-10)
    c, tr2 = fn(Sample(x.copy()))
    assert c == a and tr2.to_dict() == tr.to_dict()
    assert all(v > 0 for v in tr.bandwidths.values())


def test_shd_fixed_point_residual(rng):
    for seed in range(5):
        est, tr = C.psi_shd(sample(catalog(1 + seed), 400, seed))
        assert not tr.fallback
        assert tr.residual < 1e-8
        g, a = tr.bandwidths["g0"], tr.bandwidths["pilot"]
        rhs = C.amse_bandwidth(0, C.psi_r_hat(sample(catalog(1 + seed), 400, seed), a, 2), 400)
        assert g == pytest.approx(rhs, rel=1e-8)


def test_js_staging(rng):
    s = Sample(rng.normal(size=500))
    est, tr = C.psi_js(s)
    sig = C.robust_scale(s.values)
    assert tr.bandwidths["g2"] == pytest.approx(C.amse_bandwidth(2, C.psi_normal_scale(4, sig), 500))
    assert tr.functionals["psi2"] < 0
    assert est == pytest.approx(C.psi_r_hat(s, tr.bandwidths["g0"], 0))


def test_degenerate():
    for fn in (C.psi_js, C.psi_shd):
        with pytest.raises(DegenerateSampleError):
            fn(Sample(np.zeros(5)))


@pytest.mark.parametrize("fn", [C.psi_js, C.psi_shd])
def test_median_density_1(fn):
    est = [fn(sample(catalog(1), 1000, 40 + r))[0] for r in range(100)]
    assert abs(np.median(est) / PSI - 1) < 0.05


def test_loader_density_hurts_plug_in():
    f = catalog(16)
    psi = true_psi(f)
    e = {"ct": [], "js": [], "shd": []}
    for r in range(60):
        s = sample(f, 100, 600 + r)
        e["ct"].append(psi_hat(s).estimate)
        e["js"].append(C.psi_js(s)[0])
        e["shd"].append(C.psi_shd(s)[0])
    rr = {k: math.sqrt(np.mean((np.array(v) - psi) ** 2)) / psi for k, v in e.items()}
    assert rr["js"] > 2 * rr["ct"] and rr["shd"] > 2 * rr["ct"]


def test_easy_group_js_close_to_ct():
    for d in (1, 2, 6, 7, 8, 9):
        f = catalog(d)
        psi = true_psi(f)
        ct, js = [], []
        for r in range(30):
            s = sample(f, 1000, 700 + r)
            ct.append(psi_hat(s).estimate)
            js.append(C.psi_js(s)[0])
        r_ct = math.sqrt(np.mean((np.array(ct) - psi) ** 2))
        r_js = math.sqrt(np.mean((np.array(js) - psi) ** 2))
        assert r_js < 2 * r_ct, d
