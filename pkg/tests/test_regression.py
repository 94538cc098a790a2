import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohort_bias_lab import CountyRecord, SingularFitError, ValidationError, ols_fit, predictor_contrast


def georgia_like(seed, n=159):
    rng = np.random.default_rng(seed)
    x = rng.uniform(5, 25, n)
    y = 0.61 * x + 1.8 + rng.normal(0, 0.5, n)
    return list(zip(x, y))


def test_exact_line():
    fit = ols_fit([(x, 2 * x + 1) for x in range(10)])
    assert fit.slope == 2 and fit.intercept == 1
    assert fit.r_squared == 1
    assert fit.slope_se == 0 and fit.intercept_se == 0
    assert not fit.degenerate


def test_recovers_georgia_like_slope():
    fit = ols_fit(georgia_like(0))
    assert abs(fit.slope - 0.61) < 3 * fit.slope_se
    assert abs(fit.intercept - 1.8) < 3 * fit.intercept_se


def test_standard_errors_match_normal_equations():
    pts = georgia_like(1)
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    X = np.column_stack([np.ones_like(x), x])
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    cov = resid @ resid / (len(y) - 2) * np.linalg.inv(X.T @ X)
    fit = ols_fit(pts)
    assert fit.intercept == pytest.approx(beta[0], rel=1e-10)
    assert fit.slope == pytest.approx(beta[1], rel=1e-10)
    assert fit.intercept_se == pytest.approx(np.sqrt(cov[0, 0]), rel=1e-8)
    assert fit.slope_se == pytest.approx(np.sqrt(cov[1, 1]), rel=1e-8)


def test_r2_equals_squared_pearson():
    pts = georgia_like(2)
    r = np.corrcoef([p[0] for p in pts], [p[1] for p in pts])[0, 1]
    assert ols_fit(pts).r_squared == pytest.approx(r * r, rel=1e-10)


points = st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=3, max_size=40).filter(
    lambda ps: np.ptp([p[0] for p in ps]) > 1e-3)


@settings(max_examples=100)
@given(points)
def test_residuals_orthogonal(pts):
    fit = ols_fit(pts)
    res = [y - (fit.intercept + fit.slope * x) for x, y in pts]
    scale = max(1.0, max(abs(y) for _, y in pts)) * len(pts)
    xscale = scale * max(1.0, max(abs(x) for x, _ in pts))
    assert abs(sum(res)) <= 1e-9 * scale
    assert abs(sum(r * x for r, (x, _) in zip(res, pts))) <= 1e-9 * xscale


@settings(max_examples=100)
@given(points, st.floats(0.1, 10))
def test_affine_equivariance(pts, k):
    base = ols_fit(pts)
    scaled = ols_fit([(x, k * y) for x, y in pts])
    assert scaled.slope == pytest.approx(k * base.slope, rel=1e-9, abs=1e-9)
    assert scaled.intercept == pytest.approx(k * base.intercept, rel=1e-9, abs=1e-9)
    if base.r_squared is not None and scaled.r_squared is not None:
        assert scaled.r_squared == pytest.approx(base.r_squared, abs=1e-9)


def test_constant_x_is_singular():
    with pytest.raises(SingularFitError):
        ols_fit([(3, 1), (3, 2), (3, 4)])


def test_two_points_have_no_standard_errors():
    fit = ols_fit([(0, 1), (1, 3)])
    assert fit.slope == 2 and np.isnan(fit.slope_se)


def test_contrast_prefers_f65_on_f65_driven_data():
    rng = np.random.default_rng(4)
    units = []
    for i in range(120):
        f65 = rng.uniform(5, 25)
        ma = 35 + rng.normal(0, 3)  # nearly unrelated to f65
        units.append(CountyRecord(str(i), ma, f65, 0.61 * f65 + 1.8 + rng.normal(0, 0.5)))
    c = predictor_contrast(units)
    assert c.f65.r_squared > c.median_age.r_squared


def test_contrast_exact_f65_line():
    units = [CountyRecord(str(i), 30 + (i * 7) % 5, f, 0.6 * f + 2) for i, f in enumerate([5, 10, 15, 20])]
    assert predictor_contrast(units).f65.r_squared == pytest.approx(1.0)


def test_contrast_constant_death_rate_is_flagged():
    units = [CountyRecord(str(i), 30 + i, 10 + i, 9.0) for i in range(5)]
    c = predictor_contrast(units)
    assert c.f65.degenerate and c.f65.r_squared is None
    assert c.median_age.degenerate


def test_contrast_constant_median_age_is_flagged():
    units = [CountyRecord(str(i), 35, 10 + i, 8 + i) for i in range(5)]
    c = predictor_contrast(units)
    assert c.median_age.degenerate and np.isnan(c.median_age.slope)
    assert not c.f65.degenerate


def test_county_record_validation():
    with pytest.raises(ValidationError):
        CountyRecord("x", 40, 150, 8)
    with pytest.raises(ValidationError):
        CountyRecord("x", 40, 15, -1)
