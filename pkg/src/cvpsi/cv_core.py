"""Cross-validation criterion CV(g) and the tuning-free estimator of psi = int f^2.

With L the standard normal kernel, L*L is the N(0, 2) density, so every
kernel sum below is a pair sum of Gaussian densities at scale g or g*sqrt(2).
"""

from dataclasses import dataclass
import math

from .exceptions import InvalidArgumentError
from .kernels import ROUGHNESS_L, SQRT_2PI
from .optimize import CriterionCurve, minimize_log_grid
from .pairsum import pair_sums
from .sample import as_sample

SQRT2 = math.sqrt(2.0)
N_GRID = 120
RTOL = 1e-6


def _check_g(g):
    if not g > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {g}")


def psi_tilde_ND(s, g):
    """No-diagonals estimator: mean of L_g over the n(n-1) off-diagonal pairs."""
    _check_g(g)
    s = as_sample(s)
    n = s.n
    return pair_sums(s).offdiag(g) / (n * (n - 1))


def psi_tilde_D(s, g):
    """Diagonals-in estimator n^{-2} sum_{i,j} L_g(X_i - X_j)."""
    _check_g(g)
    s = as_sample(s)
    return pair_sums(s).full(g) / s.n ** 2


def psi_tilde_D_star(s, g):
    """n^{-2} sum_{i,j} (L*L)_g(X_i - X_j) = int fhat(x; g)^2 dx."""
    _check_g(g)
    s = as_sample(s)
    return pair_sums(s).full(SQRT2 * g) / s.n ** 2


def psi_tilde_ND_twicing(s, g):
    """No-diagonals estimator with the twicing kernel 2L - L*L."""
    _check_g(g)
    s = as_sample(s)
    n = s.n
    ps = pair_sums(s)
    return (2.0 * ps.offdiag(g) - ps.offdiag(SQRT2 * g)) / (n * (n - 1))


def cv(s, g):
    """CV(g) = R(L)/(ng) + {n(n-1)}^{-1} sum_{i!=j} {(1 - 1/n)(L*L)_g - 2 L_g}(X_i - X_j)."""
    _check_g(g)
    s = as_sample(s)
    n = s.n
    ps = pair_sums(s)
    pairs = (1.0 - 1.0 / n) * ps.offdiag(SQRT2 * g) - 2.0 * ps.offdiag(g)
    return ROUGHNESS_L / (n * g) + pairs / (n * (n - 1))


def penalty_w(s, g):
    """W(g) = twicing ND estimator - 2 ND estimator + D* estimator."""
    return psi_tilde_ND_twicing(s, g) - 2.0 * psi_tilde_ND(s, g) + psi_tilde_D_star(s, g)


def bandwidth_range(s):
    """Search interval [d_min / 3, range(X)] for the bandwidth."""
    s = as_sample(s)
    s.require_distinct()
    ps = pair_sums(s)
    return ps.d_min / 3.0, ps.range


@dataclass(frozen=True)
class PsiHat:
    estimate: float
    g_cv: float
    curve: CriterionCurve

    def __iter__(self):
        return iter((self.estimate, self.g_cv, self.curve))


def psi_hat(s, n_grid=N_GRID, rtol=RTOL):
    """psi_hat = -min_g CV(g); returns (estimate, g_cv, curve)."""
    s = as_sample(s)
    lo, hi = bandwidth_range(s)
    curve = minimize_log_grid(lambda g: cv(s, g), lo, hi, n_grid=n_grid, rtol=rtol)
    return PsiHat(-curve.value, curve.minimizer, curve)


__all__ = [
    "psi_tilde_ND", "psi_tilde_D", "psi_tilde_D_star", "psi_tilde_ND_twicing",
    "cv", "penalty_w", "psi_hat", "PsiHat", "bandwidth_range", "SQRT_2PI",
]
