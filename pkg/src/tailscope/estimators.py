"""Tail index estimators and least squares reading of diagnostic plots.

Conventions: ``hill`` returns an estimate of the tail index alpha (the
reciprocal of the extreme-value shape), while ``pickands``, ``moment`` and
the fitted-slope transforms return the shape xi itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import ShapeScale, gpd_quantile
from .empirics import OrderedSample, PointSet2D
from .errors import (
    DegenerateDataError,
    DomainError,
    IndexRangeError,
    InsufficientDataError,
    ParameterError,
    SingularDesignError,
)

__all__ = [
    "FitResult",
    "ls_fit",
    "hill",
    "pickands",
    "moment",
    "qq_points_pos",
    "qq_points_neg",
    "EstimatorTrace",
    "trace",
]

PLOT_KINDS = ("me", "qq-pos", "raw")


@dataclass(frozen=True)
class FitResult:
    """Least squares line through a diagnostic plot.

    ``xi_hat`` is the shape implied by the slope: slope/(1+slope) for a
    mean excess plot, the slope itself for an exponential QQ plot, absent
    for a raw fit.
    """

    slope: float
    intercept: float
    rss: float
    n_points: int
    plot_kind: str
    xi_hat: float | None = None


def ls_fit(points: PointSet2D | np.ndarray, plot_kind: str = "raw") -> FitResult:
    """Ordinary least squares line y = a + b x through a point set."""
    if plot_kind not in PLOT_KINDS:
        raise ParameterError(f"plot_kind must be one of {PLOT_KINDS}")
    pts = points.points if isinstance(points, PointSet2D) else np.asarray(points, float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise SingularDesignError("need at least two (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise SingularDesignError("all abscissae coincide")
    slope = float(dx @ (y - ym)) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    rss = float(resid @ resid)

    xi_hat = None
    if plot_kind == "me":
        if abs(1.0 + slope) < 1e-12:
            raise DegenerateDataError("mean excess slope of -1 has no shape")
        xi_hat = slope / (1.0 + slope)
    elif plot_kind == "qq-pos":
        xi_hat = slope
    return FitResult(slope, intercept, rss, pts.shape[0], plot_kind, xi_hat)


def _check_m(sample: OrderedSample, m: int, upper: int) -> None:
    if not 1 <= m <= upper:
        raise IndexRangeError(f"m={m} outside 1..{upper}")


def hill(sample: OrderedSample, m: int) -> float:
    """Hill estimate of the tail index from the top m log spacings."""
    _check_m(sample, m, sample.n - 1)
    pivot = sample.x(m + 1)
    if pivot <= 0:
        raise DomainError("X_(m+1) must be positive")
    mean_log = float(np.mean(np.log(sample.values[:m] / pivot)))
    if mean_log == 0.0:
        raise DegenerateDataError("top order statistics are all tied")
    return 1.0 / mean_log


def pickands(sample: OrderedSample, m: int) -> float:
    """Pickands estimate of the shape from X_(m), X_(2m), X_(4m)."""
    if 4 * m > sample.n:
        raise IndexRangeError(f"need 4m <= n, got m={m}, n={sample.n}")
    _check_m(sample, m, sample.n)
    num = sample.x(m) - sample.x(2 * m)
    den = sample.x(2 * m) - sample.x(4 * m)
    if den == 0.0:
        raise DegenerateDataError("X_(2m) and X_(4m) coincide")
    ratio = num / den
    if ratio <= 0.0:
        raise DegenerateDataError("nonpositive Pickands ratio")
    return math.log(ratio) / math.log(2.0)


def moment(sample: OrderedSample, m: int) -> float:
    """Moment (Dekkers-Einmahl-de Haan) estimate of the shape."""
    _check_m(sample, m, sample.n - 1)
    pivot = sample.x(m + 1)
    if pivot <= 0:
        raise DomainError("X_(m+1) must be positive")
    logs = np.log(sample.values[:m] / pivot)
    h1 = float(np.mean(logs))
    h2 = float(np.mean(logs**2))
    if h2 == 0.0:
        raise DegenerateDataError("top order statistics are all tied")
    ratio = h1 * h1 / h2
    if ratio == 1.0:
        raise DegenerateDataError("degenerate log spacings (single point mass)")
    return h1 + 1.0 - 0.5 / (1.0 - ratio)


def qq_points_pos(sample: OrderedSample, m: int) -> PointSet2D:
    """Exponential QQ plot of the top m logarithms.

    Points (-log(i/m), log(X_(i)/X_(m))) for 1 <= i <= m; the least squares
    slope estimates the shape of a heavy-tailed law.
    """
    _check_m(sample, m, sample.n)
    if sample.x(m) <= 0:
        raise DomainError("X_(m) must be positive")
    i = np.arange(1, m + 1, dtype=float)
    x = -np.log(i / m)
    y = np.log(sample.values[:m] / sample.x(m))
    return PointSet2D(np.column_stack([x, y]))


def qq_points_neg(
    sample: OrderedSample,
    m: int | None = None,
    xi_pre: float | None = None,
    restrict: bool = False,
) -> PointSet2D:
    """QQ plot against a fitted negative-shape generalized Pareto reference.

    The i-th smallest observation is paired with the reference quantile at
    i/(n+1).  ``xi_pre`` defaults to the Pickands estimate at ``m``; with
    ``restrict`` only the top m observations are kept (positions intact).
    """
    if xi_pre is None:
        if m is None:
            raise ParameterError("need either xi_pre or m")
        xi_pre = pickands(sample, m)
    if xi_pre >= 0:
        raise ParameterError(f"reference shape must be negative, got {xi_pre:g}")
    n = sample.n
    asc = sample.values[::-1]
    probs = np.arange(1, n + 1, dtype=float) / (n + 1)
    ref = gpd_quantile(probs, ShapeScale(xi_pre, 1.0))
    if restrict:
        if m is None:
            raise ParameterError("restrict=True needs m")
        asc, ref = asc[n - m :], ref[n - m :]
    return PointSet2D(np.column_stack([asc, ref]))


@dataclass(frozen=True)
class EstimatorTrace:
    """An estimator evaluated along a grid of m values.

    Degenerate m (ties, nonpositive pivots) are skipped and recorded in
    ``skipped`` as (m, reason) pairs.
    """

    kind: str
    m: np.ndarray
    value: np.ndarray
    skipped: list = field(default_factory=list)

    def at(self, m: int) -> float:
        pos = np.searchsorted(self.m, m)
        if pos >= self.m.size or self.m[pos] != m:
            raise IndexRangeError(f"m={m} not in trace")
        return float(self.value[pos])


def trace(sample: OrderedSample, kind: str, stride: int = 1) -> EstimatorTrace:
    """Evaluate hill, pickands or moment along every admissible m."""
    if kind not in ("hill", "pickands", "moment"):
        raise ParameterError("kind must be hill, pickands or moment")
    n = sample.n
    if n < 8:
        raise InsufficientDataError("traces need at least 8 observations")
    if stride < 1:
        raise ParameterError("stride must be positive")
    v = sample.values

    if kind == "pickands":
        m_all = np.arange(1, n // 4 + 1)[::stride]
        num = v[m_all - 1] - v[2 * m_all - 1]
        den = v[2 * m_all - 1] - v[4 * m_all - 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
            est = np.log(ratio) / math.log(2.0)
        bad = (den == 0.0) | (ratio <= 0.0)
    else:
        n_pos = int(np.count_nonzero(v > 0))
        if n_pos < 2:
            raise DegenerateDataError("need at least two positive observations")
        logs = np.log(v[:n_pos])
        m_all = np.arange(1, min(n - 1, n_pos - 1) + 1)[::stride]
        cum1 = np.cumsum(logs)
        h1 = cum1[m_all - 1] / m_all - logs[m_all]
        if kind == "hill":
            with np.errstate(divide="ignore"):
                est = 1.0 / h1
            # ties leave h1 at rounding noise rather than exactly zero
            bad = ~(h1 > 1e-12)
        else:
            cum2 = np.cumsum(logs**2)
            # mean of (log X_(i) - log X_(m+1))^2 via the first two moments
            h2 = (
                cum2[m_all - 1] / m_all
                - 2.0 * logs[m_all] * cum1[m_all - 1] / m_all
                + logs[m_all] ** 2
            )
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = h1 * h1 / h2
                est = h1 + 1.0 - 0.5 / (1.0 - ratio)
            bad = ~(h2 > 1e-24) | (np.abs(1.0 - ratio) < 1e-9)

    skipped = [(int(mm), "degenerate spacing") for mm in m_all[bad]]
    keep = ~bad
    return EstimatorTrace(kind, m_all[keep], np.asarray(est)[keep], skipped)
