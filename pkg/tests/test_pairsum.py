import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvpsi.exceptions import InvalidArgumentError
from cvpsi.kernels import gauss_deriv
from cvpsi.mixtures import catalog, sample
from cvpsi.pairsum import PairSums, loo_gauss_sums, pair_sums


def brute(x, s, order):
    d = x[:, None] - x[None, :]
    v = gauss_deriv(d, s, order)
    np.fill_diagonal(v, 0.0)
    return float(np.sum(v))


@pytest.mark.parametrize("d, n", [(1, 400), (16, 600), (3, 500)])
def test_fast_routes_match_direct(d, n):
    x = sample(catalog(d), n, 3 + d).values
    fast = PairSums(x, direct_max_n=0)
    slow = PairSums(x, direct_max_n=10 ** 9)
    assert not fast.direct and slow.direct
    scales = np.exp(np.linspace(math.log(fast.d_min / 3), math.log(2 * fast.range), 40))
    assert scales.min() < fast.s_low < scales.max()  # both fast routes are exercised
    for order in (0, 2, 4):
        for s in scales:
            a, b = fast.offdiag(s, order), slow.offdiag(s, order)
            scale = slow.full(s, order) if order == 0 else abs(b) + n * abs(slow.diag_value(s, order))
            assert abs(a - b) <= 1e-10 * scale, (order, s, a, b)


def test_direct_matches_brute_force(rng):
    x = rng.normal(size=60)
    ps = PairSums(x)
    for order in (0, 2, 4, 6):
        for s in (0.01, 0.3, 2.0):
            assert ps.offdiag(s, order) == pytest.approx(brute(x, s, order), rel=1e-12, abs=1e-12)


def test_full_adds_diagonal(rng):
    x = rng.normal(size=30)
    ps = PairSums(x)
    assert ps.full(0.5) == pytest.approx(ps.offdiag(0.5) + 30 * gauss_deriv(0.0, 0.5, 0), rel=1e-15)


def test_constant_sample():
    ps = PairSums(np.zeros(5))
    assert ps.offdiag(1.0) == pytest.approx(20 * 0.3989422804014327, rel=1e-15)


def test_odd_order_and_bad_scale():
    ps = PairSums(np.arange(5.0))
    with pytest.raises(InvalidArgumentError):
        ps.offdiag(1.0, 1)
    with pytest.raises(InvalidArgumentError):
        ps.offdiag(0.0)


def test_translation_invariance(rng):
    x = rng.normal(size=500)
    a, b = PairSums(x), PairSums(x + 1e3)
    for s in (0.001, 0.05, 0.5, 3.0):
        assert a.offdiag(s) == pytest.approx(b.offdiag(s), rel=1e-8)


def test_loo_sums(rng):
    x = np.sort(rng.normal(size=300))
    g = 0.2
    d = (x[:, None] - x[None, :]) / g
    ref = np.exp(-0.5 * d * d) / math.sqrt(2 * math.pi)
    np.fill_diagonal(ref, 0.0)
    assert np.allclose(loo_gauss_sums(x, g, 13 * g), ref.sum(axis=1), rtol=1e-12)


def test_memoised_per_sample():
    s = sample(catalog(1), 50, 1)
    assert pair_sums(s) is pair_sums(s)


@given(st.lists(st.floats(-50, 50), min_size=2, max_size=40), st.floats(0.01, 20))
@settings(max_examples=50, deadline=None)
def test_direct_property(xs, s):
    x = np.array(xs)
    assert PairSums(x).offdiag(s) == pytest.approx(brute(x, s, 0), rel=1e-10, abs=1e-12)
