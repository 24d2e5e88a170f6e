"""Exact finite-sample error of the CV-based estimator for normal mixtures.

For fixed g the negated criterion is

    psi_check(g) = -CV(g) = -R(L)/(ng) + U_M + n^{-1} U_N,

with U-statistics of the kernels M = 2L - L*L and N = L*L.  Its mean and
variance reduce to the functionals

    R_{phi,g}(f)     = int (phi_g * f) f,
    T_{phi,vphi,g}(f) = int (phi_g * f)(vphi_g * f) f,

which are finite sums of Gaussian densities when f is a normal mixture and
the kernels are Gaussian combinations.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from . import kernels
from .exceptions import InvalidArgumentError, NumericFailureError
from .kernels import ROUGHNESS_L, GaussianComb, convolve, pointwise_product_integrals
from .mixtures import true_psi, true_theta_r
from .optimize import minimize_log_grid


def _check(n, g):
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    if not g > 0:
        raise InvalidArgumentError(f"g must be positive, got {g}")


@lru_cache(maxsize=None)
def kernel_combs():
    """L, N = L*L, M = 2L - L*L and the pointwise products M^2, MN, N^2."""
    L = kernels.standard_normal()
    N = convolve(L, L)
    M = kernels.twicing(L)
    return {
        "L": L, "N": N, "M": M,
        "MM": pointwise_product_integrals(M, M),
        "MN": pointwise_product_integrals(M, N),
        "NN": pointwise_product_integrals(N, N),
    }


def r_functional(comb, f, g):
    """R_{comb,g}(f) = int (comb_g * f)(x) f(x) dx."""
    if not g > 0:
        raise InvalidArgumentError(f"g must be positive, got {g}")
    d = f.mu[:, None] - f.mu[None, :]
    var = f.sd[:, None] ** 2 + f.sd[None, :] ** 2
    ww = f.w[:, None] * f.w[None, :]
    total = 0.0
    for c, s in zip(comb.coeffs, comb.scales):
        total += c * float(np.sum(ww * kernels.gauss(d, np.sqrt((s * g) ** 2 + var))))
    return total


def _smoothed_components(comb, f, g):
    # comb_g * f as (coeff, mean, sd) arrays; g = 0 means comb is f itself
    c = np.array(comb.coeffs)[:, None] * f.w[None, :]
    m = np.broadcast_to(f.mu[None, :], c.shape)
    s = np.sqrt((np.array(comb.scales)[:, None] * g) ** 2 + f.sd[None, :] ** 2)
    return c.ravel(), m.ravel(), s.ravel()


def _triple_integral(a, b, f):
    """int A(x) B(x) f(x) dx for Gaussian mixtures A, B given as (c, m, s)."""
    ca, ma, sa = (v[:, None, None] for v in a)
    cb, mb, sb = (v[None, :, None] for v in b)
    cf, mf, sf = (v[None, None, :] for v in (f.w, f.mu, f.sd))
    va, vb = sa ** 2, sb ** 2
    # phi_sa(x-ma) phi_sb(x-mb) = phi_{sqrt(va+vb)}(ma-mb) phi_v(x - m12)
    pair = kernels.gauss(ma - mb, np.sqrt(va + vb))
    v12 = va * vb / (va + vb)
    m12 = (ma * vb + mb * va) / (va + vb)
    inner = kernels.gauss(m12 - mf, np.sqrt(v12 + sf ** 2))
    return float(np.sum(ca * cb * cf * pair * inner))


def t_functional(phi, vphi, f, g):
    """T_{phi,vphi,g}(f) = int (phi_g * f)(vphi_g * f) f."""
    if not g > 0:
        raise InvalidArgumentError(f"g must be positive, got {g}")
    return _triple_integral(_smoothed_components(phi, f, g), _smoothed_components(vphi, f, g), f)


def integral_f_cubed(f):
    """int f^3 in closed form."""
    comp = (f.w, f.mu, f.sd)
    return _triple_integral(comp, comp, f)


def var_f_of_x(f):
    """Var f(X_1) = int f^3 - psi^2."""
    return integral_f_cubed(f) - true_psi(f) ** 2


def exact_mise(f, n, g):
    """MISE of the Gaussian kde at bandwidth g: R(L)/(ng) - R_M - R_N/n + psi."""
    _check(n, g)
    k = kernel_combs()
    return (ROUGHNESS_L / (n * g) - r_functional(k["M"], f, g)
            - r_functional(k["N"], f, g) / n + true_psi(f))


def exact_mean(f, n, g):
    """E psi_check(g) = -R(L)/(ng) + R_M + R_N/n."""
    _check(n, g)
    k = kernel_combs()
    return (-ROUGHNESS_L / (n * g) + r_functional(k["M"], f, g)
            + r_functional(k["N"], f, g) / n)


def exact_bias(f, n, g):
    return exact_mean(f, n, g) - true_psi(f)


def exact_variance(f, n, g):
    """Var psi_check(g): covariance expansion of U_M + n^{-1} U_N."""
    _check(n, g)
    k = kernel_combs()
    rm, rn = r_functional(k["M"], f, g), r_functional(k["N"], f, g)
    tmm = t_functional(k["M"], k["M"], f, g)
    tmn = t_functional(k["M"], k["N"], f, g)
    tnn = t_functional(k["N"], k["N"], f, g)
    rmm = r_functional(k["MM"], f, g)
    rmn = r_functional(k["MN"], f, g)
    rnn = r_functional(k["NN"], f, g)
    nn1 = n * (n - 1.0)
    return (4.0 * (n - 2) / nn1 * (tmm + 2.0 * tmn / n + tnn / n ** 2)
            - (4.0 * n - 6.0) / nn1 * (rm ** 2 + 2.0 * rm * rn / n + rn ** 2 / n ** 2)
            + 2.0 / (g * nn1) * (rmm + 2.0 * rmn / n + rnn / n ** 2))


def exact_mse(f, n, g):
    return exact_bias(f, n, g) ** 2 + exact_variance(f, n, g)


def single_kernel_variance(f, n, g):
    """Var of the same statistic written as one U-statistic with kernel M + N/n."""
    _check(n, g)
    k = kernel_combs()
    K = k["M"] + (1.0 / n) * k["N"]
    rk = r_functional(K, f, g)
    zeta1 = t_functional(K, K, f, g) - rk ** 2
    zeta2 = r_functional(pointwise_product_integrals(K, K), f, g) / g - rk ** 2
    return (4.0 * (n - 2) * zeta1 + 2.0 * zeta2) / (n * (n - 1.0))


def mixture_scale(f):
    m = float(np.sum(f.w * f.mu))
    return math.sqrt(float(np.sum(f.w * (f.sd ** 2 + (f.mu - m) ** 2))))


def _search_range(f, n):
    return 1e-3 * min(f.sds) * n ** -0.2, 10.0 * mixture_scale(f)


def _argmin(fn, f, n, rtol):
    lo, hi = _search_range(f, n)
    curve = minimize_log_grid(fn, lo, hi, n_grid=200, rtol=rtol)
    if not curve.interior:
        raise NumericFailureError("exact error curve minimum not bracketed", diagnostics=curve)
    return curve


def g_mise(f, n, rtol=1e-10):
    return _argmin(lambda g: exact_mise(f, n, g), f, n, rtol).minimizer


def g_mse(f, n, rtol=1e-10):
    return _argmin(lambda g: exact_mse(f, n, g), f, n, rtol).minimizer


def asymptotic_c0(f):
    """c0 = (R(L) / R(f''))^{1/5} for the second-order Gaussian kernel (m_2 = 1)."""
    return (ROUGHNESS_L / true_theta_r(f, 2)) ** 0.2


def eta_4(f):
    """eta = int f'' (f^2)'' = 2 int f'' (f'^2 + f f''), by quadrature."""
    from .mixtures import integral_of, pdf, pdf_deriv

    def integrand(x):
        d1, d2 = pdf_deriv(f, x, 1), pdf_deriv(f, x, 2)
        return 2.0 * d2 * (d1 * d1 + pdf(f, x) * d2)

    return integral_of(f, integrand)


def equivalence_constant(f):
    """Limit C of n^{1/5} (g_MSE / g_MISE - 1) for the second-order Gaussian kernel.

    From the first-order expansions of MISE' and V' around g0 = c0 n^{-1/5}:
    C = -2 c0 D / (25 R(L)^2) with D = -2 R(f) R(M) - 8 c0^5 (eta - psi theta_2),
    D being the limit of n^2 g^2 V'(g0).
    """
    c0 = asymptotic_c0(f)
    psi, th2 = true_psi(f), true_theta_r(f, 2)
    d = -2.0 * psi * kernels.roughness(kernel_combs()["M"]) - 8.0 * c0 ** 5 * (eta_4(f) - psi * th2)
    return -2.0 * c0 * d / (25.0 * ROUGHNESS_L ** 2)


@dataclass(frozen=True)
class ExactErrorReport:
    n: int
    g: np.ndarray
    bias: np.ndarray
    variance: np.ndarray
    mse: np.ndarray
    mise: np.ndarray
    g_mse: float
    mse_min: float
    g_mise: float
    mise_min: float


def error_report(f, n, grid):
    grid = np.asarray(grid, dtype=float)
    bias = np.array([exact_bias(f, n, g) for g in grid])
    var = np.array([exact_variance(f, n, g) for g in grid])
    mise = np.array([exact_mise(f, n, g) for g in grid])
    gm, gi = g_mse(f, n), g_mise(f, n)
    return ExactErrorReport(n, grid, bias, var, bias ** 2 + var, mise,
                            gm, exact_mse(f, n, gm), gi, exact_mise(f, n, gi))


def equivalence_table(f, ns=(10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)):
    """Rows (n, g_mse, g_mise, ratio, n^{1/5}(ratio - 1))."""
    rows = []
    for n in ns:
        a, b = g_mse(f, n), g_mise(f, n)
        r = a / b
        rows.append((n, a, b, r, n ** 0.2 * (r - 1.0)))
    return rows


__all__ = [
    "GaussianComb", "kernel_combs", "r_functional", "t_functional", "integral_f_cubed",
    "var_f_of_x", "exact_mise", "exact_mean", "exact_bias", "exact_variance", "exact_mse",
    "single_kernel_variance", "g_mise", "g_mse", "asymptotic_c0", "ExactErrorReport",
    "error_report", "equivalence_table", "eta_4", "equivalence_constant",
]
