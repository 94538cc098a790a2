"""Simple least-squares fits of county death rates on F65 and on median age.

Here ``slope`` and ``intercept`` are the coefficients of ``d = slope * F65 +
intercept``; they are unrelated to the Gompertz coefficients. F65 is in
percentage points (0-100) and death rates are per 1,000 per year.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import SingularFitError, ValidationError


@dataclass(frozen=True)
class CountyRecord:
    unit_id: str
    median_age: float
    f65: float
    death_rate: float

    def __post_init__(self):
        if not (0.0 <= self.f65 <= 100.0):
            raise ValidationError(f"f65 must be in percentage points 0-100, got {self.f65!r}")
        if not (math.isfinite(self.death_rate) and self.death_rate >= 0):
            raise ValidationError(f"death_rate must be nonnegative, got {self.death_rate!r}")
        if not math.isfinite(self.median_age):
            raise ValidationError(f"median_age must be finite, got {self.median_age!r}")


@dataclass(frozen=True)
class FitResult:
    """OLS line with standard errors.

    ``degenerate`` is set when the fit is not fully defined: r_squared is
    None when y has no variance, and every field is nan when x has none.
    Standard errors are nan below three points.
    """

    slope: float
    intercept: float
    slope_se: float
    intercept_se: float
    r_squared: float | None
    n: int
    degenerate: bool = False
    reason: str = ""


def ols_fit(points: Sequence[tuple[float, float]]) -> FitResult:
    n = len(points)
    if n < 2:
        raise ValidationError("need at least two points for a line")
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0 or sxx <= 1e-24 * max(1.0, mx * mx) * n:
        raise SingularFitError("all x values are equal; slope is not identified")
    slope = sxy / sxx
    intercept = my - slope * mx
    sse = math.fsum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    if n > 2:
        s2 = sse / (n - 2)
        slope_se = math.sqrt(s2 / sxx)
        intercept_se = math.sqrt(s2 * (1.0 / n + mx * mx / sxx))
    else:
        slope_se = intercept_se = math.nan
    if syy == 0:
        return FitResult(slope, intercept, slope_se, intercept_se, None, n, True, "zero variance in y")
    r2 = min(max(1.0 - sse / syy, 0.0), 1.0)
    return FitResult(slope, intercept, slope_se, intercept_se, r2, n)


def _safe_fit(points) -> FitResult:
    try:
        return ols_fit(points)
    except SingularFitError as err:
        nan = math.nan
        return FitResult(nan, nan, nan, nan, None, len(points), True, str(err))


class PredictorContrast(NamedTuple):
    f65: FitResult
    median_age: FitResult


def predictor_contrast(units: Sequence[CountyRecord]) -> PredictorContrast:
    """Fit death rate on F65 and on median age; degenerate fits are flagged, not raised."""
    if len(units) < 3:
        raise ValidationError("need at least three units to compare predictors")
    return PredictorContrast(
        _safe_fit([(u.f65, u.death_rate) for u in units]),
        _safe_fit([(u.median_age, u.death_rate) for u in units]),
    )
