"""Growth exponents of word counts, and local entropy on shrinking boxes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .coding import GrowthSeries, Member, SamplingPlan, SetFamily, count_sample
from .errors import ChartError, FitError, NonWanderingRegionError
from .glued_plane import ChartPoint, GluedSystem, LinearHyperbolic, Region

METHODS = ("regress", "ratio")


@dataclass(frozen=True)
class ExponentEstimate:
    exponent: float
    method: str
    n_min: int
    n_max: int
    residual: float

    @property
    def fit_window(self) -> tuple[int, int]:
        return (self.n_min, self.n_max)

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "method": self.method,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "residual": self.residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ExponentEstimate":
        return cls(float(data["exponent"]), data["method"], int(data["n_min"]), int(data["n_max"]), float(data["residual"]))

    @classmethod
    def from_json(cls, text: str) -> "ExponentEstimate":
        return cls.from_dict(json.loads(text))


def _rows(series, window) -> list[tuple[int, int]]:
    if isinstance(series, GrowthSeries):
        rows = [(n, c) for n, c, _ in series.rows]
    else:
        rows = [(int(n), int(c)) for n, c in series]
    if window is not None:
        lo, hi = window
        rows = [(n, c) for n, c in rows if lo <= n <= hi]
    if any(c <= 0 for _, c in rows):
        raise FitError("counts must be positive to take logarithms")
    if len(rows) < 3:
        raise FitError(f"need at least 3 rows in the fit window, got {len(rows)}")
    return rows


def _regress(ns, counts) -> tuple[float, float]:
    x = np.log(np.asarray(ns, dtype=float))
    # counts may exceed float range for int64 but not for float64 logs
    y = np.array([math.log(c) for c in counts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.sqrt(np.mean(resid**2)))


def fit_exponent(series, method: str = "regress", window: tuple[int, int] | None = None) -> ExponentEstimate:
    """Slope of log count against log n.

    ``ratio`` averages log2(c(2n) / c(n)) over the doubling pairs present; its
    residual is the spread of those ratios.
    """
    if method not in METHODS:
        raise FitError(f"method must be one of {METHODS}, got {method!r}")
    rows = _rows(series, window)
    ns = [n for n, _ in rows]
    counts = [c for _, c in rows]
    if method == "regress":
        slope, residual = _regress(ns, counts)
    else:
        lookup = dict(rows)
        ratios = [math.log2(lookup[2 * n] / lookup[n]) for n in ns if 2 * n in lookup]
        if not ratios:
            raise FitError("ratio method needs at least one doubling pair n, 2n")
        slope = float(np.mean(ratios))
        residual = float(np.std(ratios))
    return ExponentEstimate(slope, method, min(ns), max(ns), residual)


class GrowthExponentRegressor(RegressorMixin, BaseEstimator):
    """Power-law fit ``count ~ C n**beta`` with an estimator interface.

    ``fit(X, y)`` takes window lengths as a single column and positive counts.
    After fitting, ``exponent_`` holds beta and ``predict`` returns C n**beta.
    """

    def __init__(self, method: str = "regress"):
        self.method = method

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=3, y_numeric=True)
        if X.shape[1] != 1:
            raise FitError("expected a single column of window lengths")
        order = np.argsort(X[:, 0], kind="stable")
        rows = [(int(X[i, 0]), int(round(y[i]))) for i in order]
        est = fit_exponent(rows, self.method)
        self.exponent_ = est.exponent
        self.residual_ = est.residual
        logs_n = np.log(X[:, 0])
        self.log_scale_ = float(np.mean(np.log(y) - self.exponent_ * logs_n))
        self.estimate_ = est
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "exponent_")
        X = check_array(X)
        return np.exp(self.log_scale_ + self.exponent_ * np.log(X[:, 0]))


class PolynomialEntropyEstimator(BaseEstimator):
    """Counts words of a system against a family on an n grid and fits the exponent.

    ``fit(ns)`` runs ``count_sample`` for each n; ``series_`` and ``exponent_``
    are set afterwards.
    """

    def __init__(self, system=None, family=None, method: str = "regress", plan=None, seed: int = 0):
        self.system = system
        self.family = family
        self.method = method
        self.plan = plan
        self.seed = seed

    def fit(self, X, y=None):
        ns = np.asarray(X, dtype=np.int64).ravel()
        if ns.size < 3 or np.any(np.diff(ns) <= 0) or ns[0] < 1:
            raise FitError("need at least 3 strictly increasing window lengths")
        rows = tuple((int(n), count_sample(self.system, self.family, int(n), self.plan, self.seed), "sample") for n in ns)
        self.series_ = GrowthSeries(rows)
        est = fit_exponent(self.series_, self.method)
        self.estimate_ = est
        self.exponent_ = est.exponent
        return self


# ---------------------------------------------------------------------------
# local entropy


def _check_box(system, region: Region):
    if isinstance(system, LinearHyperbolic):
        if region.contains_xy(0, 0):
            raise NonWanderingRegionError(f"{region} contains the non-wandering point")
    if isinstance(system, GluedSystem) and not 1 <= region.chart <= system.charts:
        raise ChartError(f"chart {region.chart} outside [1, {system.charts}]")


def local_entropy_series(
    system,
    points: Sequence[ChartPoint],
    sizes: Sequence,
    n_grid: Sequence[int],
    method: str = "regress",
    plan: SamplingPlan | None = None,
    seed: int = 0,
) -> list[tuple[Fraction, ExponentEstimate]]:
    """Fitted exponent for the family of boxes of each half-width around ``points``."""
    sizes = [Fraction(s) if not isinstance(s, float) else Fraction(repr(s)) for s in sizes]
    if any(b >= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly decreasing")
    if any(s <= 0 for s in sizes):
        raise ValueError("sizes must be positive")
    out = []
    for h in sizes:
        members = []
        for idx, p in enumerate(points, start=1):
            region = Region.centered(p.chart, p.x, p.y, h)
            _check_box(system, region)
            members.append(Member(f"V{idx}", region))
        family = SetFamily(tuple(members))
        rows = tuple((n, count_sample(system, family, n, plan, seed), "sample") for n in n_grid)
        out.append((h, fit_exponent(GrowthSeries(rows), method)))
    return out
