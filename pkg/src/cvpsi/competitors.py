"""Plug-in kernel estimators of psi used as benchmarks.

Both use the diagonals-in estimator

    psi_hat_r(g) = n^{-2} sum_{i,j} phi_g^{(r)}(X_i - X_j),   psi_r = int f^{(r)} f,

with AMSE-optimal bandwidths for a second-order Gaussian kernel (Jones and
Sheather, 1991):

    g_r = [2 phi^{(r)}(0) / (-psi_{r+2} n)]^{1/(r+3)}.

* JS, two-stage direct plug-in: psi_4 from the normal scale rule, psi_2 at
  g_2, then psi_0 at g_0 built from the estimate of psi_2.
* SHD, two-stage solve-the-equation (Sheather, Hettmansperger and Donald,
  1994): g solves g = [2 phi(0) / (-psi_hat_2(a(g)) n)]^{1/3}, where the pilot
  a(g) = (-psi_hat_2 / psi_hat_4)^{1/5} g^{3/5} ties the pilot to g through the
  ratio of the two AMSE formulas; psi_hat_4 uses the normal-scale psi_6 and
  the ratio's psi_hat_2 is the JS stage-one estimate.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import NumericFailureError
from .kernels import gauss_deriv
from .pairsum import pair_sums
from .sample import as_sample

PHI0 = 1.0 / math.sqrt(2.0 * math.pi)
IQR_NORMAL = 1.349  # interquartile range of N(0, 1)
SHD_RTOL = 1e-8


@dataclass(frozen=True)
class PlugInTrace:
    method: str
    bandwidths: dict
    functionals: dict
    estimate: float
    fallback: bool = False
    residual: float = 0.0
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "method": self.method, "bandwidths": dict(self.bandwidths),
            "functionals": dict(self.functionals), "estimate": self.estimate,
            "fallback": self.fallback, "residual": self.residual,
        }


def robust_scale(x):
    """min(sample sd, IQR / 1.349)."""
    x = np.asarray(x, dtype=float)
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    iqr = float(q75 - q25) / IQR_NORMAL
    return min(sd, iqr) if iqr > 0 else sd


def psi_normal_scale(r, sigma):
    """psi_r for N(0, sigma^2), r even."""
    return ((-1) ** (r // 2) * math.factorial(r)
            / ((2.0 * sigma) ** (r + 1) * math.factorial(r // 2) * math.sqrt(math.pi)))


def psi_r_hat(s, g, r):
    """Diagonals-in estimate n^{-2} sum_{i,j} phi_g^{(r)}(X_i - X_j)."""
    s = as_sample(s)
    return pair_sums(s).full(g, r) / s.n ** 2


def amse_bandwidth(r, psi_next, n):
    """[2 phi^{(r)}(0) / (-psi_{r+2} n)]^{1/(r+3)}."""
    k0 = float(gauss_deriv(0.0, 1.0, r))
    return (2.0 * k0 / (-psi_next * n)) ** (1.0 / (r + 3))


def _js_stages(s):
    s.require_distinct()
    n = s.n
    sigma = robust_scale(s.values)
    psi4_ns = psi_normal_scale(4, sigma)
    g2 = amse_bandwidth(2, psi4_ns, n)
    psi2 = psi_r_hat(s, g2, 2)
    g0 = amse_bandwidth(0, psi2, n)
    return sigma, psi4_ns, g2, psi2, g0


def psi_js(s):
    """Two-stage direct plug-in estimate; returns (estimate, trace)."""
    s = as_sample(s)
    sigma, psi4_ns, g2, psi2, g0 = _js_stages(s)
    est = psi_r_hat(s, g0, 0)
    trace = PlugInTrace("js", {"g2": g2, "g0": g0},
                        {"sigma": sigma, "psi4_ns": psi4_ns, "psi2": psi2}, est)
    return est, trace


def psi_shd(s):
    """Two-stage solve-the-equation estimate; returns (estimate, trace)."""
    s = as_sample(s)
    n = s.n
    sigma, psi4_ns, g2, psi2_pilot, g_js = _js_stages(s)
    psi6_ns = psi_normal_scale(6, sigma)
    b4 = amse_bandwidth(4, psi6_ns, n)
    psi4 = psi_r_hat(s, b4, 4)
    ratio = (-psi2_pilot / psi4) ** 0.2

    def rhs(g):
        a = ratio * g ** 0.6
        return amse_bandwidth(0, psi_r_hat(s, a, 2), n)

    def h(lg):
        return lg - math.log(rhs(math.exp(lg)))

    lo = math.log(sigma * n ** (-1.0 / 3.0) * 1e-2)
    hi = math.log(10.0 * sigma)
    h_lo, h_hi = h(lo), h(hi)
    bw = {"g2": g2, "b4": b4, "g_js": g_js}
    fun = {"sigma": sigma, "psi4_ns": psi4_ns, "psi6_ns": psi6_ns,
           "psi2_pilot": psi2_pilot, "psi4": psi4}
    if not (h_lo < 0.0 < h_hi):
        est = psi_r_hat(s, g_js, 0)
        bw["g0"] = g_js
        return est, PlugInTrace("shd", bw, fun, est, fallback=True, residual=math.nan,
                                notes={"reason": "no sign change in bracket"})
    it = 0
    while hi - lo > 1e-13 and it < 200:
        it += 1
        mid = 0.5 * (lo + hi)
        hm = h(mid)
        if hm == 0.0:
            lo = hi = mid
            break
        if hm < 0.0:
            lo = mid
        else:
            hi = mid
    g = math.exp(0.5 * (lo + hi))
    residual = abs(g / rhs(g) - 1.0)
    if residual > SHD_RTOL:
        raise NumericFailureError("solve-the-equation residual above tolerance",
                                  diagnostics={"g": g, "residual": residual})
    bw["g0"] = g
    bw["pilot"] = ratio * g ** 0.6
    fun["psi2"] = psi_r_hat(s, bw["pilot"], 2)
    est = psi_r_hat(s, g, 0)
    return est, PlugInTrace("shd", bw, fun, est, residual=residual, notes={"iterations": it})
