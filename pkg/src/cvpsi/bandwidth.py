"""Pilot-free bandwidth selection for the kde and binwidth selection for the histogram.

Kernel density estimation: the squared-bias part of MISE(h) is the functional
psi_alpha,h = int (alpha_h * f) f with alpha = K*K - 2K + K0 (K0 the Dirac
delta).  It is estimated, like psi itself, by maximising over g

    2/(n(n-1)) sum_{i!=j} (alpha_h * L_g)(X_i - X_j) - n^{-2} sum_{i,j} {alpha_h * (L*L)_g}(X_i - X_j),

and the bandwidth minimises Mhat(h) = R(K)/(nh) + psi_hat_alpha,h.

Histogram: cells B_k = [kb, (k+1)b) anchored at the origin.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import InvalidArgumentError
from .kernels import ROUGHNESS_L, DiracTag, GaussianComb, convolve, scaled, standard_normal
from .optimize import CriterionCurve, minimize_log_grid, refine_curve
from .pairsum import pair_sums
from .sample import as_sample
from .cv_core import N_GRID, RTOL, bandwidth_range

OUTER_GRID = 60
WARM_GRID = 25
WARM_SPAN = 8.0
HIST_GRID = 60


@dataclass(frozen=True)
class AlphaComb:
    """Gaussian atoms plus an optional Dirac component."""

    gaussian_part: GaussianComb
    dirac: DiracTag = field(default_factory=lambda: DiracTag(True))

    def convolve(self, comb):
        out = convolve(self.gaussian_part, comb) if self.gaussian_part.coeffs else None
        if self.dirac.present:
            out = comb if out is None else out + comb
        return out if out is not None else GaussianComb((), ())

    def char_fn(self, t):
        t = np.asarray(t, dtype=float)
        base = self.gaussian_part.char_fn(t) if self.gaussian_part.coeffs else np.zeros_like(t)
        return base + (1.0 if self.dirac.present else 0.0)


def scv_alpha(h):
    """alpha_h = (K*K)_h - 2 K_h + K0 for the Gaussian K."""
    if not h > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {h}")
    K = scaled(standard_normal(), h)
    return AlphaComb(convolve(K, K) - 2.0 * K, DiracTag(True))


def dirac_alpha():
    """alpha = K0 alone; then psi_alpha,h = psi for every h."""
    return AlphaComb(GaussianComb((), ()), DiracTag(True))


def _alpha_combs(alpha, g):
    L = scaled(standard_normal(), g)
    return alpha.convolve(L), alpha.convolve(convolve(L, L))


def alpha_objective(s, alpha, g):
    """The inner maximand at pilot bandwidth g."""
    s = as_sample(s)
    n = s.n
    ps = pair_sums(s)
    a_l, a_ll = _alpha_combs(alpha, g)
    return 2.0 * ps.comb_offdiag(a_l) / (n * (n - 1)) - ps.comb_full(a_ll) / n ** 2


def _inner_max(s, alpha, g_prev=None, rtol=RTOL):
    lo, hi = bandwidth_range(s)

    def neg(g):
        return -alpha_objective(s, alpha, g)

    if g_prev is not None:
        wlo, whi = max(lo, g_prev / WARM_SPAN), min(hi, g_prev * WARM_SPAN)
        if whi > wlo:
            params = np.exp(np.linspace(math.log(wlo), math.log(whi), WARM_GRID))
            values = np.array([neg(float(g)) for g in params])
            i = int(np.argmin(values))
            if 0 < i < WARM_GRID - 1:
                return refine_curve(neg, params, values, rtol=rtol)
    return minimize_log_grid(neg, lo, hi, n_grid=N_GRID, rtol=rtol)


def psi_alpha_h_hat(s, h, alpha=None, g_start=None, rtol=RTOL):
    """(estimate, g_inner): max over g of the alpha_h-smoothed CV-type objective."""
    if not h > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {h}")
    s = as_sample(s)
    alpha = scv_alpha(h) if alpha is None else alpha
    curve = _inner_max(s, alpha, g_start, rtol)
    return -curve.value, curve.minimizer


def m_hat(s, h, g_start=None):
    """Mhat(h) = R(K)/(nh) + psi_hat_alpha,h."""
    s = as_sample(s)
    est, _ = psi_alpha_h_hat(s, h, g_start=g_start)
    return ROUGHNESS_L / (s.n * h) + est


@dataclass(frozen=True)
class BandwidthChoice:
    bandwidth: float
    curve: CriterionCurve
    inner: dict  # h -> g_inner for every evaluated outer point

    def __iter__(self):
        return iter((self.bandwidth, self.curve))


def h_hat(s, n_grid=OUTER_GRID, rtol=RTOL):
    """Minimise Mhat over h in [sd/n, 2 sd]; the inner search warm-starts from the previous h."""
    s = as_sample(s)
    s.require_distinct()
    sd = float(np.std(s.values, ddof=1))
    inner = {}
    last = [None]

    def nearest_g(h):
        if not inner:
            return None
        key = min(inner, key=lambda k: abs(math.log(k / h)))
        return inner[key]

    def crit(h):
        start = last[0] if last[0] is not None else nearest_g(h)
        est, g = psi_alpha_h_hat(s, h, g_start=start)
        inner[h] = g
        last[0] = g
        return ROUGHNESS_L / (s.n * h) + est

    params = np.exp(np.linspace(math.log(sd / s.n), math.log(2.0 * sd), n_grid))
    values = np.array([crit(float(h)) for h in params])

    def refine_crit(h):
        last[0] = nearest_g(h)
        return crit(h)

    curve = refine_curve(refine_crit, params, values, rtol=rtol)
    return BandwidthChoice(curve.minimizer, curve, inner)


# -- histograms -----------------------------------------------------------

def hist_counts(s, b):
    """(cell indices k, counts nu_k) of the occupied cells [kb, (k+1)b)."""
    if not b > 0:
        raise InvalidArgumentError(f"binwidth must be positive, got {b}")
    x = as_sample(s).values
    k, counts = np.unique(np.floor(x / b).astype(np.int64), return_counts=True)
    return k, counts


def hist_cv(s, b):
    """CV(b) = 2/{(n-1)b} - (n+1)/{n^2(n-1)b} sum_k nu_k^2."""
    s = as_sample(s)
    n = s.n
    _, nu = hist_counts(s, b)
    sq = float(np.sum(nu.astype(float) ** 2))
    return 2.0 / ((n - 1) * b) - (n + 1) / (n * n * (n - 1) * b) * sq


def hist_v(s, b):
    """V(b) = (n^2 b)^{-1} sum_k nu_k^2."""
    s = as_sample(s)
    _, nu = hist_counts(s, b)
    return float(np.sum(nu.astype(float) ** 2)) / (s.n ** 2 * b)


def hist_u(s, b):
    """U(b) = (n^2 b)^{-1} sum_{i != j} 1{X_i, X_j share a cell}."""
    s = as_sample(s)
    _, nu = hist_counts(s, b)
    nu = nu.astype(float)
    return float(np.sum(nu * (nu - 1.0))) / (s.n ** 2 * b)


def hist_range(s):
    s = as_sample(s)
    lo, hi = bandwidth_range(s)
    return 3.0 * lo, 2.0 * hi


def hist_psi_breve(s, n_grid=HIST_GRID, rtol=RTOL):
    """psi_breve = -min_b CV(b)."""
    s = as_sample(s)
    lo, hi = hist_range(s)
    curve = minimize_log_grid(lambda b: hist_cv(s, b), lo, hi, n_grid=n_grid, rtol=rtol)
    return -curve.value, curve.minimizer


def exact_hist_mise(f, n, b):
    """Exact MISE(b) = (nb)^{-1} - (n+1)/n b^{-1} sum p_k^2 + R(f)."""
    from .mixtures import hist_cell_probs, hist_k_range, true_psi

    p = hist_cell_probs(f, b, hist_k_range(f, b))
    return 1.0 / (n * b) - (n + 1) / n * math.fsum(p * p) / b + true_psi(f)


def overlap(k, b, ell, c):
    """lambda(B_k cap C_ell): length of [kb, (k+1)b) cap [ell c, (ell+1)c)."""
    lo = np.maximum(np.asarray(k) * b, np.asarray(ell) * c)
    hi = np.minimum((np.asarray(k) + 1) * b, (np.asarray(ell) + 1) * c)
    return np.maximum(hi - lo, 0.0)


def _overlap_sums(s, b, c):
    """(sum_k m_k^2, sum_ell nu'_ell sum_k lambda_{k ell}^2) with m_k = sum_ell nu'_ell lambda_{k ell}.

    Each pilot cell C_ell meets a first and a last (possibly partial) B-cell
    and F fully covered cells in between; only the partial cells can be
    shared between neighbouring pilot cells.
    """
    ell, nu = hist_counts(s, c)
    nu = nu.astype(float)
    left = ell * c
    right = (ell + 1) * c
    k_lo = np.floor(left / b).astype(np.int64)
    k_hi = np.ceil(right / b).astype(np.int64) - 1  # last cell with positive overlap
    single = k_lo == k_hi
    first = np.where(single, c, np.minimum((k_lo + 1) * b, right) - left)
    last = np.where(single, 0.0, right - k_hi * b)
    full = np.where(single, 0, k_hi - k_lo - 1).astype(float)
    # partial contributions, possibly shared across pilot cells
    keys = np.concatenate([k_lo, k_hi[~single]])
    vals = np.concatenate([nu * first, (nu * last)[~single]])
    uk, inv = np.unique(keys, return_inverse=True)
    m_part = np.bincount(inv, weights=vals, minlength=uk.size)
    sum_m2 = math.fsum(m_part * m_part) + math.fsum(full * (nu * b) ** 2)
    diag = math.fsum(nu * (first ** 2 + last ** 2 + full * b * b))
    return sum_m2, diag


def v_b(s, b, c):
    """V_b(c) = b^{-1} (nc)^{-2} sum_k (sum_ell nu'_ell lambda(B_k cap C_ell))^2."""
    s = as_sample(s)
    m2, _ = _overlap_sums(s, b, c)
    return m2 / (b * (s.n * c) ** 2)


def u_b(s, b, c):
    """U_b(c): V_b(c) with the i = j terms removed."""
    s = as_sample(s)
    m2, diag = _overlap_sums(s, b, c)
    return (m2 - diag) / (b * (s.n * c) ** 2)


def v_b_naive(s, b, c):
    """Triple-sum reference for V_b(c) and U_b(c) on tiny samples: returns (V, U)."""
    s = as_sample(s)
    x = s.values
    n = s.n
    ell = np.floor(x / c).astype(np.int64)
    # every B-cell touched by an occupied pilot cell
    k_all = np.arange(int(np.floor(ell.min() * c / b)) - 1,
                      int(np.floor((ell.max() + 1) * c / b)) + 2)
    lam = overlap(k_all[:, None], b, ell[None, :], c)  # (cells, points)
    v = float(np.sum(lam.sum(axis=1) ** 2))
    u = v - float(np.sum(lam * lam))
    scale = b * (n * c) ** 2
    return v / scale, u / scale


def hist_scv_inner(s, b, n_grid=HIST_GRID, rtol=RTOL):
    """Estimate of b^{-1} sum_k p_k^2: max_c {2 U_b(c) - V_b(c)}, clipped at 0.

    Returns (estimate, c).  Grid ties go to the larger c.
    """
    s = as_sample(s)
    lo, hi = hist_range(s)

    def neg(c):
        m2, diag = _overlap_sums(s, b, c)
        return -(m2 - 2.0 * diag) / (b * (s.n * c) ** 2)

    curve = minimize_log_grid(neg, lo, hi, n_grid=n_grid, rtol=rtol, prefer="large")
    return max(0.0, -curve.value), curve.minimizer


def hist_scv_criterion(s, b):
    s = as_sample(s)
    est, _ = hist_scv_inner(s, b)
    return 1.0 / (s.n * b) - (s.n + 1) / s.n * est


def hist_scv_binwidth(s, n_grid=HIST_GRID, rtol=RTOL):
    """Binwidth minimising the smoothed-CV estimate of MISE(b) - R(f)."""
    s = as_sample(s)
    lo, hi = hist_range(s)
    curve = minimize_log_grid(lambda b: hist_scv_criterion(s, b), lo, hi,
                              n_grid=n_grid, rtol=rtol)
    return BandwidthChoice(curve.minimizer, curve, {})


__all__ = [
    "AlphaComb", "scv_alpha", "dirac_alpha", "alpha_objective", "psi_alpha_h_hat", "m_hat",
    "h_hat", "BandwidthChoice", "hist_counts", "hist_cv", "hist_v", "hist_u",
    "hist_psi_breve", "exact_hist_mise", "overlap", "v_b", "u_b", "v_b_naive",
    "hist_scv_inner", "hist_scv_criterion", "hist_scv_binwidth"
]
