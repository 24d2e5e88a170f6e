"""Closed-form Gaussian kernel algebra and the von Mises circular kernel.

Every kernel-derived function used by the estimators (L, L*L, the twicing
kernel 2L - L*L, the smoothed-bias combination K*K - 2K, their scaled
versions and pointwise products) is a finite signed sum of centred Gaussian
densities.  :class:`GaussianComb` carries that representation so that
convolutions, products and roughness integrals stay exact.
"""

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import InvalidArgumentError, UnsupportedOrderError

SQRT_2PI = math.sqrt(2.0 * math.pi)
ROUGHNESS_L = 1.0 / (2.0 * math.sqrt(math.pi))  # R(L) for the standard normal kernel
MAX_DERIV = 8


def hermite_e(u, r):
    """Probabilists' Hermite polynomial He_r evaluated at ``u``."""
    u = np.asarray(u, dtype=float)
    if r == 0:
        return np.ones_like(u)
    prev, cur = np.ones_like(u), u.copy()
    for k in range(1, r):
        prev, cur = cur, u * cur - k * prev
    return cur


def gauss(x, scale=1.0):
    """Density of N(0, scale**2) at ``x``."""
    u = np.asarray(x, dtype=float) / scale
    return np.exp(-0.5 * u * u) / (SQRT_2PI * scale)


def gauss_deriv(x, scale, r):
    """r-th derivative of the N(0, scale**2) density at ``x``."""
    if r > MAX_DERIV:
        raise UnsupportedOrderError(f"derivative order {r} > {MAX_DERIV}")
    u = np.asarray(x, dtype=float) / scale
    sign = -1.0 if r % 2 else 1.0
    return sign * hermite_e(u, r) * np.exp(-0.5 * u * u) / (SQRT_2PI * scale ** (r + 1))


def _double_factorial_odd(r):
    # (2r - 1)!!
    return math.prod(range(1, 2 * r, 2)) if r > 0 else 1


@dataclass(frozen=True)
class GaussianComb:
    """x -> sum_j coeffs[j] * phi(x / scales[j]) / scales[j]."""

    coeffs: tuple
    scales: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.coeffs))
        s = tuple(float(v) for v in np.atleast_1d(self.scales))
        if len(c) != len(s):
            raise InvalidArgumentError("coeffs and scales differ in length")
        if any(not (v > 0) for v in s):
            raise InvalidArgumentError("scales must be positive")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "scales", s)

    @property
    def c(self):
        return np.array(self.coeffs)

    @property
    def s(self):
        return np.array(self.scales)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, s in zip(self.coeffs, self.scales):
            out = out + c * gauss(x, s)
        return out

    def __add__(self, other):
        return GaussianComb(self.coeffs + other.coeffs, self.scales + other.scales).simplify()

    def __neg__(self):
        return GaussianComb(tuple(-c for c in self.coeffs), self.scales)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        return GaussianComb(tuple(k * c for c in self.coeffs), self.scales)

    __rmul__ = __mul__

    def simplify(self):
        """Merge atoms sharing a scale and drop zero coefficients."""
        merged = {}
        for c, s in zip(self.coeffs, self.scales):
            merged[s] = merged.get(s, 0.0) + c
        items = [(c, s) for s, c in merged.items() if c != 0.0]
        if not items:
            return GaussianComb((), ())
        c, s = zip(*items)
        return GaussianComb(c, s)

    def integral(self):
        return math.fsum(self.coeffs)

    def char_fn(self, t):
        t = np.asarray(t, dtype=float)
        return sum(c * np.exp(-0.5 * (s * t) ** 2) for c, s in zip(self.coeffs, self.scales))


def standard_normal():
    """The kernel L = phi as a one-atom comb."""
    return GaussianComb((1.0,), (1.0,))


def scaled(comb, g):
    """L_g(x) = L(x/g)/g: every atom scale is multiplied by ``g``."""
    if not g > 0:
        raise InvalidArgumentError(f"scale factor must be positive, got {g}")
    return GaussianComb(comb.coeffs, tuple(s * g for s in comb.scales))


def convolve(a, b):
    """Exact convolution: coefficients multiply, variances add."""
    c = [ca * cb for ca in a.coeffs for cb in b.coeffs]
    s = [math.hypot(sa, sb) for sa in a.scales for sb in b.scales]
    return GaussianComb(tuple(c), tuple(s)).simplify()


def pointwise_product_integrals(a, b):
    """The pointwise product a(x) b(x), again as a GaussianComb.

    phi_s(x) phi_t(x) = phi_{sqrt(s^2+t^2)}(0) * phi_v(x) with v = s t / sqrt(s^2+t^2).
    """
    c, s = [], []
    for ca, sa in zip(a.coeffs, a.scales):
        for cb, sb in zip(b.coeffs, b.scales):
            r = math.hypot(sa, sb)
            c.append(ca * cb / (SQRT_2PI * r))
            s.append(sa * sb / r)
    return GaussianComb(tuple(c), tuple(s)).simplify()


def roughness(comb, r=0):
    """R(comb^{(r)}) = integral of the squared r-th derivative."""
    if r > 4:
        raise UnsupportedOrderError(f"roughness order {r} > 4")
    c, s = comb.c, comb.s
    big = np.hypot(s[:, None], s[None, :])
    vals = _double_factorial_odd(r) / (SQRT_2PI * big ** (2 * r + 1))
    return float(np.sum(c[:, None] * c[None, :] * vals))


def gaussian_deriv(comb, x, r):
    """r-th derivative of the comb at ``x``."""
    if r > MAX_DERIV:
        raise UnsupportedOrderError(f"derivative order {r} > {MAX_DERIV}")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c, s in zip(comb.coeffs, comb.scales):
        out = out + c * gauss_deriv(x, s, r)
    return out


def twicing(kernel=None):
    """The twicing kernel 2L - L*L."""
    L = standard_normal() if kernel is None else kernel
    return 2.0 * L - convolve(L, L)


@dataclass(frozen=True)
class DiracTag:
    """Marks a Dirac delta component; convolving it with a comb returns the comb."""

    present: bool = True


# ---------------------------------------------------------------------------
# Modified Bessel I0 and the von Mises kernel
# ---------------------------------------------------------------------------

BESSEL_SWITCH = 15.0
_ASYM_TERMS = 26


def _i0_series(x):
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = term * q / (k * k)
        total = total + term
    return total


def _i0e_asymptotic(x):
    # e^{-x} I0(x) ~ (2 pi x)^{-1/2} sum_k a_k x^{-k},  a_k = ((2k-1)!!)^2 / (k! 8^k)
    total = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, _ASYM_TERMS):
        term = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        total = total + term
    return total / np.sqrt(2.0 * math.pi * x)


def bessel_i0e(x):
    """Exponentially scaled I0: exp(-|x|) I0(x)."""
    x = np.abs(np.asarray(x, dtype=float))
    small = x <= BESSEL_SWITCH
    out = np.empty_like(x)
    xs = x[small]
    out[small] = _i0_series(xs) * np.exp(-xs)
    out[~small] = _i0e_asymptotic(x[~small])
    return out if out.ndim else float(out)


def log_bessel_i0(x):
    x = np.abs(np.asarray(x, dtype=float))
    return np.log(bessel_i0e(x)) + x


def bessel_i0(x):
    return np.exp(log_bessel_i0(x))


@dataclass(frozen=True)
class VonMisesKernel:
    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise InvalidArgumentError(f"concentration must be positive, got {self.nu}")


def vonmises_eval(k, theta):
    """exp{nu cos(theta)} / (2 pi I0(nu)), computed with the scaled Bessel."""
    theta = np.asarray(theta, dtype=float)
    return np.exp(k.nu * (np.cos(theta) - 1.0)) / (2.0 * math.pi * bessel_i0e(k.nu))


def vonmises_convolution_at(k, delta):
    """int_0^{2pi} K(t - a) K(t - b) dt with delta = a - b.

    Equals I0(2 nu |cos(delta/2)|) / (2 pi I0(nu)^2).
    """
    delta = np.asarray(delta, dtype=float)
    z = 2.0 * k.nu * np.abs(np.cos(0.5 * delta))
    return bessel_i0e(z) * np.exp(z - 2.0 * k.nu) / (2.0 * math.pi * bessel_i0e(k.nu) ** 2)
