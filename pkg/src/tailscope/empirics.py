"""Empirical mean excess functions, plots and their normalizations.

The mean excess plot of a sample is the set of points
(X_(i), ME(X_(i))) over descending order statistics X_(1) >= ... >= X_(n),
where ME(u) averages the excesses X - u over the observations strictly
above u.  The normalize_* functions rescale the top-k portion of the plot
so that, depending on the extreme-value shape of the law, the rescaled
point set converges to a deterministic or random limit set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import DistributionModel, quantile_b, truncated_mean
from .errors import (
    DegenerateRangeError,
    DomainError,
    EmptyExceedanceError,
    IndexRangeError,
    InsufficientDataError,
    NormalizationError,
    ParameterError,
)

__all__ = [
    "OrderedSample",
    "order_statistics",
    "PointSet2D",
    "empirical_me",
    "me_plot",
    "tail_measure",
    "TailMeasureView",
    "normalize_positive",
    "normalize_heavy",
    "normalize_xi1",
    "normalize_negative",
    "normalize_zero",
    "centering_cnk",
    "default_k",
    "default_trim",
]


@dataclass(frozen=True)
class OrderedSample:
    """A sample stored as descending order statistics."""

    values: np.ndarray  # descending

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def x(self, i: int) -> float:
        """1-based order statistic X_(i), largest first."""
        if not 1 <= i <= self.n:
            raise IndexRangeError(f"order statistic index {i} outside 1..{self.n}")
        return float(self.values[i - 1])


def order_statistics(data) -> OrderedSample:
    data = np.asarray(data, dtype=float).ravel()
    if data.shape[0] < 2:
        raise InsufficientDataError("need at least two observations")
    if not np.all(np.isfinite(data)):
        raise DomainError("observations must be finite")
    return OrderedSample(np.sort(data, kind="stable")[::-1])


@dataclass(frozen=True)
class PointSet2D:
    """A finite planar point set with deterministic CSV serialization."""

    points: np.ndarray  # shape (m, 2)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ParameterError("points must have shape (m, 2)")
        object.__setattr__(self, "points", pts)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def restrict(self, window) -> "PointSet2D":
        return PointSet2D(self.points[window.contains(self.points)])

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("x,y\n")
            for px, py in self.points:
                fh.write(f"{px:.17g},{py:.17g}\n")

    @staticmethod
    def read_csv(path) -> "PointSet2D":
        rows = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("x,"):
                    continue
                a, b = line.split(",")
                rows.append((float(a), float(b)))
        return PointSet2D(np.asarray(rows, dtype=float).reshape(-1, 2))


def _exceed_counts(values_desc: np.ndarray, u) -> np.ndarray:
    """Number of observations strictly above each threshold in u."""
    neg = -values_desc  # ascending
    return np.searchsorted(neg, -np.atleast_1d(np.asarray(u, dtype=float)), side="left")


def empirical_me(sample: OrderedSample, u: float) -> float:
    """Empirical mean excess at u: mean of X - u over observations X > u."""
    c = int(_exceed_counts(sample.values, u)[0])
    if c == 0:
        raise EmptyExceedanceError(f"no observation exceeds u={u!r}")
    return float(np.sum(sample.values[:c]) / c - u)


def _me_at_indices(sample: OrderedSample, idx: np.ndarray):
    """Thresholds u = X_(i) and empirical mean excesses at them."""
    u = sample.values[idx - 1]
    c = _exceed_counts(sample.values, u)
    if np.any(c == 0):
        raise EmptyExceedanceError("tied maxima leave no strict exceedances")
    csum = np.cumsum(sample.values)
    me = csum[c - 1] / c - u
    return u, me


def me_plot(sample: OrderedSample, i_min: int = 2, i_max: int | None = None) -> PointSet2D:
    """Mean excess plot {(X_(i), ME(X_(i))) : i_min <= i <= i_max}.

    Thresholds are the order statistics themselves; ties produce coincident
    points rather than being collapsed.
    """
    n = sample.n
    if i_max is None:
        i_max = n
    if not 2 <= i_min <= i_max <= n:
        raise IndexRangeError(f"need 2 <= i_min <= i_max <= {n}")
    idx = np.arange(i_min, i_max + 1)
    u, me = _me_at_indices(sample, idx)
    return PointSet2D(np.column_stack([u, me]))


def tail_measure(sample: OrderedSample, k: int, x):
    """Empirical tail measure (1/k) #{i : X_i > x X_(k)} for x > 0."""
    if not 1 <= k <= sample.n:
        raise IndexRangeError(f"k={k} outside 1..{sample.n}")
    xk = sample.x(k)
    if xk <= 0:
        raise NormalizationError("X_(k) must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("x must be positive")
    counts = _exceed_counts(sample.values, x * xk)
    out = counts / k
    return out if x.ndim else float(out[0])


@dataclass(frozen=True)
class TailMeasureView:
    """The empirical tail measure of a sample at level k, as a callable."""

    sample: OrderedSample
    k: int

    def __call__(self, x):
        return tail_measure(self.sample, self.k, x)


def _top_k_me(sample: OrderedSample, k: int):
    if not 2 <= k <= sample.n:
        raise IndexRangeError(f"k={k} outside 2..{sample.n}")
    idx = np.arange(2, k + 1)
    return idx, *_me_at_indices(sample, idx)


def normalize_positive(sample: OrderedSample, k: int) -> PointSet2D:
    """Top-k mean excess plot scaled by 1/X_(k).

    For laws with extreme-value shape xi in (0, 1) the rescaled set
    converges to the ray {(t, t xi/(1-xi)) : t >= 1}.
    """
    idx, u, me = _top_k_me(sample, k)
    xk = sample.x(k)
    if xk <= 0:
        raise NormalizationError("X_(k) must be positive")
    return PointSet2D(np.column_stack([u / xk, me / xk]))


def normalize_heavy(sample: OrderedSample, k: int, b_nk: float, b_n: float) -> PointSet2D:
    """Top-k plot scaled by the theoretical quantiles b(n/k) and b(n)/k.

    For shape xi > 1 (infinite mean) the x-coordinate is divided by b(n/k)
    and the mean excess by b(n)/k; the limit is the random curve
    {(t^xi, t S_{1/xi}) : t >= 1}.
    """
    if b_nk <= 0 or b_n <= 0:
        raise NormalizationError("quantile scales must be positive")
    idx, u, me = _top_k_me(sample, k)
    return PointSet2D(np.column_stack([u / b_nk, me * k / b_n]))


def normalize_xi1(
    sample: OrderedSample, k: int, b_nk: float, b_n: float, c_nk: float
) -> PointSet2D:
    """Top-k plot for shape exactly 1, centred by the truncated-mean drift.

    Points (X_(i)/b(n/k), ME(X_(i))/b(n/k) - k C_{n,k} / (i b(n))); without
    the centering term the second coordinate drifts to infinity.
    """
    if b_nk <= 0 or b_n <= 0:
        raise NormalizationError("quantile scales must be positive")
    idx, u, me = _top_k_me(sample, k)
    centre = k * c_nk / (idx * b_n)
    return PointSet2D(np.column_stack([u / b_nk, me / b_nk - centre]))


def normalize_negative(sample: OrderedSample, k: int) -> PointSet2D:
    """Top-k plot shifted by X_(k) and scaled by X_(1) - X_(k).

    For shape xi < 0 the limit is the segment
    {(t, (t - 1) xi/(1 - xi)) : 0 <= t <= 1}.
    """
    if not 2 <= k <= sample.n:
        raise IndexRangeError(f"k={k} outside 2..{sample.n}")
    spread = sample.x(1) - sample.x(k)
    if spread <= 0:
        raise DegenerateRangeError("X_(1) and X_(k) coincide")
    idx, u, me = _top_k_me(sample, k)
    return PointSet2D(np.column_stack([(u - sample.x(k)) / spread, me / spread]))


def normalize_zero(sample: OrderedSample, k: int) -> PointSet2D:
    """Top-k plot shifted by X_(k), scaled by (X_(ceil(k/2)) - X_(k)) / log 2.

    The spacing X_(ceil(k/2)) - X_(k) estimates log(2) times the auxiliary
    scale of a shape-0 law, so dividing by spacing/log(2) sends the plot to
    the horizontal line at height 1.
    """
    if not 2 <= k <= sample.n:
        raise IndexRangeError(f"k={k} outside 2..{sample.n}")
    mid = math.ceil(k / 2)
    spread = sample.x(mid) - sample.x(k)
    if spread <= 0:
        raise DegenerateRangeError(f"X_({mid}) and X_({k}) coincide")
    idx, u, me = _top_k_me(sample, k)
    scale = spread / math.log(2.0)
    xk = sample.x(k)
    return PointSet2D(np.column_stack([(u - xk) / scale, me / scale]))


def centering_cnk(model: DistributionModel, n: int, k: int) -> float:
    """Drift constant n (E[X 1{X <= b(n)}] - E[X 1{X <= b(n/k)}])."""
    if n < 1 or not 1 <= k <= n:
        raise ParameterError("need n >= 1 and 1 <= k <= n")
    bn = quantile_b(model, float(n))
    bnk = quantile_b(model, n / k)
    return n * (truncated_mean(model, bn) - truncated_mean(model, bnk))


def default_k(n: int) -> int:
    """Default number of upper order statistics for the normalizations."""
    return int(math.floor(n**0.7))


def default_trim(n: int) -> tuple[int, int]:
    """Default plotting range: drop the top half percent, keep the rest."""
    return (max(int(math.floor(0.005 * n)), 2), n)
