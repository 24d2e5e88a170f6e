"""Normal-mixture test densities and their closed-form functionals."""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math
from importlib import resources

import numpy as np
from scipy.special import ndtr

from . import kernels
from .exceptions import InvalidArgumentError, NumericFailureError, UnsupportedOrderError
from .quadrature import integrate
from .sample import Sample, SampleMeta

N_CATALOG = 16
TAIL_SD = 12.0  # integration range half-width in component sd units


@dataclass(frozen=True)
class NormalMixture:
    weights: tuple
    means: tuple
    sds: tuple
    name: str = ""

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        m = tuple(float(v) for v in self.means)
        s = tuple(float(v) for v in self.sds)
        if not w or not (len(w) == len(m) == len(s)):
            raise InvalidArgumentError("mixture needs matching non-empty weight/mean/sd lists")
        if any(v <= 0 for v in w) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise InvalidArgumentError("weights must be positive and sum to 1")
        if any(not v > 0 for v in s):
            raise InvalidArgumentError("component sds must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "sds", s)

    @classmethod
    def from_components(cls, components, name=""):
        w, m, s = zip(*components)
        return cls(w, m, s, name)

    @property
    def components(self):
        return list(zip(self.weights, self.means, self.sds))

    @property
    def w(self):
        return np.array(self.weights)

    @property
    def mu(self):
        return np.array(self.means)

    @property
    def sd(self):
        return np.array(self.sds)

    def support(self, k=TAIL_SD):
        """An interval holding all but a negligible amount of mass."""
        s = max(self.sds)
        return min(self.means) - k * s, max(self.means) + k * s

    def breakpoints(self, k=TAIL_SD):
        """Quadrature breakpoints: each component centre and its sd multiples."""
        lo, hi = self.support(k)
        pts = [lo, hi]
        for mu, s in zip(self.means, self.sds):
            pts.extend(mu + s * np.arange(-k, k + 1, 1.0))
        pts = np.unique(np.clip(pts, lo, hi))
        return pts


def rescale(f, a=1.0, b=0.0):
    """Density of aX + b when X ~ f."""
    return NormalMixture(f.weights, tuple(a * m + b for m in f.means),
                         tuple(abs(a) * s for s in f.sds), f.name)


@lru_cache(maxsize=None)
def _catalog_rows():
    text = resources.files("cvpsi").joinpath("data/catalog.txt").read_text()
    rows = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fid, w, m, s = (tok.strip() for tok in line.split(","))
        rows.setdefault(int(fid), []).append((Fraction(w), Fraction(m), Fraction(s)))
    for fid, comps in rows.items():
        if sum(c[0] for c in comps) != 1:
            raise RuntimeError(f"catalog density {fid}: weights do not sum to 1")
    return rows


NAMES = {
    1: "Gaussian", 2: "Skewed unimodal", 3: "Strongly skewed", 4: "Kurtotic unimodal",
    5: "Outlier", 6: "Bimodal", 7: "Separated bimodal", 8: "Skewed bimodal",
    9: "Trimodal", 10: "Claw", 11: "Double claw", 12: "Asymmetric claw",
    13: "Asymmetric double claw", 14: "Smooth comb", 15: "Discrete comb", 16: "Ten-modal",
}


def catalog(density_id):
    """Test density #``density_id`` (1-15 Marron-Wand, 16 Loader's ten-modal)."""
    try:
        fid = int(density_id)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"unknown density id {density_id!r}") from None
    rows = _catalog_rows()
    if fid != density_id or fid not in rows:
        raise InvalidArgumentError(f"unknown density id {density_id!r}; expected 1..{N_CATALOG}")
    return NormalMixture.from_components([(float(w), float(m), float(s)) for w, m, s in rows[fid]],
                                         NAMES[fid])


def pdf(f, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for w, mu, s in f.components:
        out = out + w * kernels.gauss(x - mu, s)
    return out


def pdf_deriv(f, x, r):
    if r < 0 or r > kernels.MAX_DERIV:
        raise UnsupportedOrderError(f"derivative order {r} outside 0..{kernels.MAX_DERIV}")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for w, mu, s in f.components:
        out = out + w * kernels.gauss_deriv(x - mu, s, r)
    return out


def _pair_grid(f):
    d = f.mu[:, None] - f.mu[None, :]
    pooled = np.hypot(f.sd[:, None], f.sd[None, :])
    ww = f.w[:, None] * f.w[None, :]
    return d, pooled, ww


def true_psi(f):
    """psi = int f^2."""
    return true_theta_r(f, 0)


def true_theta_r(f, r):
    """theta_r = int (f^{(r)})^2 = (-1)^r int f^{(2r)} f."""
    if r < 0 or r > 4:
        raise UnsupportedOrderError(f"theta_r implemented for r in 0..4, got {r}")
    d, pooled, ww = _pair_grid(f)
    vals = kernels.gauss_deriv(d, pooled, 2 * r)
    return float((-1) ** r * np.sum(ww * vals))


def sample(f, n, seed, replicate=None, density=None):
    """Draw n i.i.d. points: component label first, then the Gaussian draw."""
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"sample size must be an integer >= 2, got {n}")
    n = int(n)
    rng = np.random.Generator(np.random.PCG64(seed))
    labels = rng.choice(len(f.weights), size=n, p=f.w)
    z = rng.standard_normal(n)
    x = f.mu[labels] + f.sd[labels] * z
    return Sample(x, SampleMeta(density if density is not None else "external", seed, replicate))


def component_labels(f, n, seed):
    """The component labels drawn by :func:`sample` for the same seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.choice(len(f.weights), size=int(n), p=f.w)


def rho(t):
    """E|Z - t| for standard normal Z."""
    t = np.asarray(t, dtype=float)
    return 2.0 * kernels.gauss(t) + t * (2.0 * ndtr(t) - 1.0)


def _q_integral(f, u, pts):
    u5 = u ** 5

    def integrand(x):
        fx = pdf(f, x)
        out = np.zeros_like(x)
        pos = fx > 0
        root = np.sqrt(fx[pos])
        out[pos] = root * rho(u5 * pdf_deriv(f, x[pos], 2) / root)
        return out

    val, _ = integrate(integrand, pts, rtol=1e-11)
    return val / u


def q_difficulty(f, grid_points=50, u_range=(1e-3, 1e3), rtol=1e-8):
    """Difficulty functional Q(f) = inf_u u^{-1} int f^{1/2} rho(u^5 f'' f^{-1/2})."""
    from .optimize import minimize_log_grid  # avoid cycle at import time

    pts = f.breakpoints()
    curve = minimize_log_grid(lambda u: _q_integral(f, u, pts), u_range[0], u_range[1],
                              n_grid=grid_points, rtol=rtol)
    if not curve.interior:
        raise NumericFailureError("Q(f) infimum not bracketed inside the search range",
                                  diagnostics=curve)
    return curve.value


def hist_cell_probs(f, binwidth, k_range):
    """p_k = P(X in [k b, (k+1) b)) for k = k_lo..k_hi inclusive."""
    if not binwidth > 0:
        raise InvalidArgumentError("binwidth must be positive")
    k_lo, k_hi = (int(v) for v in k_range)
    edges = np.arange(k_lo, k_hi + 2, dtype=float) * binwidth
    p = np.zeros(k_hi - k_lo + 1)
    for w, mu, s in f.components:
        z = (edges - mu) / s
        lo, hi = z[:-1], z[1:]
        # upper-tail differences where both edges sit right of the mean
        right = lo > 0
        p += w * np.where(right, ndtr(-lo) - ndtr(-hi), ndtr(hi) - ndtr(lo))
    return p


def hist_k_range(f, binwidth, k=TAIL_SD):
    lo, hi = f.support(k)
    return int(math.floor(lo / binwidth)), int(math.floor(hi / binwidth))


def integral_of(f, fn, k=TAIL_SD, rtol=1e-13):
    """Adaptive quadrature of ``fn`` over the effective support of ``f``."""
    return integrate(fn, f.breakpoints(k), rtol=rtol)[0]
