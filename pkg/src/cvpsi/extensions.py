"""Other functionals estimated as the extremum of a cross-validation criterion.

* differential entropy, via likelihood cross-validation;
* psi for circular data, with the von Mises kernel;
* theta_r = int (f^{(r)})^2, via the derivative CV criterion CV_r.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import ive

from .exceptions import InvalidArgumentError, UnsupportedOrderError
from .kernels import VonMisesKernel, vonmises_convolution_at, vonmises_eval
from .optimize import CriterionCurve, minimize_log_grid
from .pairsum import pair_sums
from .sample import CircularSample, as_sample
from .cv_core import N_GRID, RTOL, SQRT2, bandwidth_range

TWO_PI = 2.0 * math.pi
CIRC_DIRECT_MAX_N = 256


@dataclass(frozen=True)
class Extremum:
    estimate: float
    parameter: float
    curve: CriterionCurve

    def __iter__(self):
        return iter((self.estimate, self.parameter))


# -- entropy -----------------------------------------------------------

def loo_log_likelihood(s, g):
    """-n^{-1} sum_i log fhat_{-i}(X_i; g); +inf if some leave-one-out density is 0."""
    s = as_sample(s)
    n = s.n
    sums = pair_sums(s).loo_density_sums(g)
    if np.any(sums <= 0.0):
        return math.inf
    return -float(np.mean(np.log(sums / ((n - 1) * g))))


def entropy_hat(s, n_grid=N_GRID, rtol=RTOL):
    """H_hat = min_g of the negated mean leave-one-out log density."""
    s = as_sample(s)
    lo, hi = bandwidth_range(s)
    curve = minimize_log_grid(lambda g: loo_log_likelihood(s, g), lo, hi, n_grid=n_grid, rtol=rtol)
    return Extremum(curve.value, curve.minimizer, curve)


# -- circular ------------------------------------------------------------

def as_circular(s):
    return s if isinstance(s, CircularSample) else CircularSample(s)


class _CircularSums:
    """Pair sums of the von Mises kernel and its self-convolution."""

    def __init__(self, angles, direct_max_n=CIRC_DIRECT_MAX_N):
        self.theta = np.asarray(angles, dtype=float)
        self.n = self.theta.size
        self.direct = self.n <= direct_max_n
        if self.direct:
            i, j = np.triu_indices(self.n, 1)
            self.delta = self.theta[i] - self.theta[j]
        else:
            kmax = self.kmax(float(self.n))
            self.power = np.empty(kmax)
            for start in range(0, kmax, 64):
                k = np.arange(start + 1, min(start + 64, kmax) + 1)
                ph = k[:, None] * self.theta[None, :]
                self.power[start:start + k.size] = (np.sum(np.cos(ph), axis=1) ** 2
                                                    + np.sum(np.sin(ph), axis=1) ** 2)

    @staticmethod
    def kmax(nu):
        return int(math.ceil(12.0 * math.sqrt(nu) + 20.0))

    def sums(self, nu):
        """(sum_{i != j} K_nu, sum_{i != j} (K*K)_nu) over the pairs."""
        k = VonMisesKernel(nu)
        n = self.n
        if self.direct:
            sk = 2.0 * float(np.sum(vonmises_eval(k, self.delta)))
            sc = 2.0 * float(np.sum(vonmises_convolution_at(k, self.delta)))
            return sk, sc
        kk = min(self.kmax(nu), self.power.size)
        rho = ive(np.arange(1, kk + 1), nu) / ive(0, nu)
        p = self.power[:kk]
        full_k = (n * n + 2.0 * float(np.sum(rho * p))) / TWO_PI
        full_c = (n * n + 2.0 * float(np.sum(rho * rho * p))) / TWO_PI
        return (full_k - n * float(vonmises_eval(k, 0.0)),
                full_c - n * float(vonmises_convolution_at(k, 0.0)))


def circular_cv(s, nu, _sums=None):
    """CV(nu) = int fhat^2 - 2 n^{-1} sum_i fhat_{-i}(Theta_i)."""
    if not nu > 0:
        raise InvalidArgumentError(f"concentration must be positive, got {nu}")
    s = as_circular(s)
    cs = _sums or _CircularSums(s.angles)
    n = s.n
    sk, sc = cs.sums(nu)
    k = VonMisesKernel(nu)
    int_sq = (n * float(vonmises_convolution_at(k, 0.0)) + sc) / n ** 2
    return int_sq - 2.0 * sk / (n * (n - 1))


def circular_int_fhat_sq(s, nu):
    """int_0^{2 pi} fhat(theta; nu)^2 d theta, closed form."""
    s = as_circular(s)
    k = VonMisesKernel(nu)
    d = s.angles[:, None] - s.angles[None, :]
    return float(np.sum(vonmises_convolution_at(k, d))) / s.n ** 2


def circular_psi_hat(s, n_grid=N_GRID, rtol=RTOL):
    """psi_hat = -min_nu CV(nu) over nu in [0.1, n]."""
    s = as_circular(s)
    cs = _CircularSums(s.angles)
    curve = minimize_log_grid(lambda nu: circular_cv(s, nu, cs), 0.1, float(max(s.n, 1)),
                              n_grid=n_grid, rtol=rtol)
    return Extremum(-curve.value, curve.minimizer, curve)


# -- density derivative functionals ------------------------------------

def _check_r(r):
    if r not in (1, 2):
        raise UnsupportedOrderError(f"theta_r estimation implemented for r in {{1, 2}}, got {r}")


def roughness_kde_deriv(s, g, r):
    """R(fhat^{(r)}(.; g)) = (-1)^r n^{-2} sum_{i,j} (L*L)_g^{(2r)}(X_i - X_j)."""
    s = as_sample(s)
    return (-1) ** r * pair_sums(s).full(SQRT2 * g, 2 * r) / s.n ** 2


def cv_r(s, g, r):
    """CV_r(g) = R(fhat^{(r)}) - 2 (-1)^r {n(n-1)}^{-1} sum_{i != j} L_g^{(2r)}(X_i - X_j)."""
    _check_r(r)
    if not g > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {g}")
    s = as_sample(s)
    n = s.n
    ps = pair_sums(s)
    rough = (-1) ** r * ps.full(SQRT2 * g, 2 * r) / n ** 2
    return rough - 2.0 * (-1) ** r * ps.offdiag(g, 2 * r) / (n * (n - 1))


def theta_r_hat(s, r, n_grid=N_GRID, rtol=RTOL):
    """theta_r_hat = -min_g CV_r(g)."""
    _check_r(r)
    s = as_sample(s)
    lo, hi = bandwidth_range(s)
    curve = minimize_log_grid(lambda g: cv_r(s, g, r), lo, hi, n_grid=n_grid, rtol=rtol)
    return Extremum(-curve.value, curve.minimizer, curve)
