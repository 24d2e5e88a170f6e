"""One-dimensional minimisation: log-uniform grid bracket, then golden section."""

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import NumericFailureError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CriterionCurve:
    """Criterion values on a log grid plus the refined minimiser.

    ``interior`` is False when the grid minimum sat on an end point, in which
    case no refinement happened and ``converged`` is False as well.
    """

    params: np.ndarray
    values: np.ndarray
    minimizer: float
    value: float
    converged: bool
    iterations: int
    interior: bool = True

    @property
    def grid(self):
        return list(zip(self.params.tolist(), self.values.tolist()))

    def negated(self):
        """The same curve for the maximisation problem it was built from."""
        return CriterionCurve(self.params, -self.values, self.minimizer, -self.value,
                              self.converged, self.iterations, self.interior)


def golden_log(fn, a, b, c, fb, rtol=1e-6, max_iter=200):
    """Golden-section search for a minimum of fn on log scale inside (a, c), fn(b) <= ends.

    Returns (x, f(x), converged, iterations).
    """
    la, lc = math.log(a), math.log(c)
    best_x, best_f = b, fb
    tol = math.log1p(rtol)
    # place the interior points golden-style inside [la, lc]
    x1 = lc - INV_PHI * (lc - la)
    x2 = la + INV_PHI * (lc - la)
    f1, f2 = fn(math.exp(x1)), fn(math.exp(x2))
    it = 0
    while lc - la > tol and it < max_iter:
        it += 1
        if f1 <= f2:
            lc, x2, f2 = x2, x1, f1
            x1 = lc - INV_PHI * (lc - la)
            f1 = fn(math.exp(x1))
        else:
            la, x1, f1 = x1, x2, f2
            x2 = la + INV_PHI * (lc - la)
            f2 = fn(math.exp(x2))
    for x, fx in ((x1, f1), (x2, f2)):
        if fx < best_f:
            best_x, best_f = math.exp(x), fx
    return best_x, best_f, lc - la <= tol, it


def minimize_log_grid(fn, lo, hi, n_grid=120, rtol=1e-6, prefer="small", refine=True,
                      strict=False):
    """Minimise ``fn`` over [lo, hi]: log grid of ``n_grid`` points, then golden refinement.

    Non-finite criterion values are treated as +inf.  ``prefer`` breaks exact
    ties in the grid toward the smaller or larger parameter.  With
    ``strict=True`` an edge minimum raises :class:`NumericFailureError`.
    """
    if not (0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got {lo}, {hi}")
    params = np.exp(np.linspace(math.log(lo), math.log(hi), n_grid))
    values = np.array([fn(float(p)) for p in params], dtype=float)
    values = np.where(np.isnan(values), np.inf, values)
    return refine_curve(fn, params, values, rtol=rtol, prefer=prefer, refine=refine, strict=strict)


def refine_curve(fn, params, values, rtol=1e-6, prefer="small", refine=True, strict=False):
    if not np.any(np.isfinite(values)):
        raise NumericFailureError("criterion is infinite on the whole grid",
                                  diagnostics=(params, values))
    m = values.min()
    hits = np.flatnonzero(values == m)
    i = int(hits[-1] if prefer == "large" else hits[0])
    interior = 0 < i < len(params) - 1
    if not interior:
        if strict:
            raise NumericFailureError("minimum lies on the edge of the search grid",
                                      diagnostics=(params, values))
        return CriterionCurve(params, values, float(params[i]), float(m), False, 0, False)
    if not refine:
        return CriterionCurve(params, values, float(params[i]), float(m), True, 0, True)

    def safe(x):
        v = fn(x)
        return math.inf if not np.isfinite(v) else float(v)

    x, fx, conv, it = golden_log(safe, params[i - 1], params[i], params[i + 1], float(m), rtol)
    return CriterionCurve(params, values, float(x), float(fx), conv, it, True)


def maximize_log_grid(fn, lo, hi, n_grid=120, rtol=1e-6, prefer="small", refine=True,
                      strict=False):
    """Maximise via :func:`minimize_log_grid` on ``-fn``; the curve holds ``fn`` values."""
    curve = minimize_log_grid(lambda x: -fn(x), lo, hi, n_grid, rtol, prefer, refine, strict)
    return curve.negated()
