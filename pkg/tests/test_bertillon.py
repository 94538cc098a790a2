import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohort_bias_lab import (
    MaritalComposition,
    MaritalStatus,
    RelativeRiskTable,
    RiskKeyError,
    ValidationError,
    composition_adjusted_rate,
    imbalance_excess_deaths,
    relative_rate,
)

LEGEND = [
    ("heart", 40, "single", 2.3), ("heart", 40, "widowed", 2.7),
    ("cancer", 40, "single", 1.8), ("cancer", 40, "widowed", 2.1),
    ("heart", 50, "single", 1.9), ("heart", 50, "widowed", 2.2),
    ("cancer", 50, "single", 1.6), ("cancer", 50, "widowed", 1.9),
]

US75 = {"married": 0.46, "widowed": 0.45, "single": 0.05, "divorced": 0.02, "partner": 0.02}


@pytest.mark.parametrize("cause, age, status, value", LEGEND)
def test_anchor_values_exact(male_table, cause, age, status, value):
    assert relative_rate(male_table, "male", cause, status, age) == value


def test_divorced_carries_lumped_ratio(male_table):
    assert relative_rate(male_table, "male", "heart", "divorced", 40) == 2.7


@pytest.mark.parametrize("age", [0, 40, 45, 50, 99.5])
def test_married_is_one(male_table, age):
    assert relative_rate(male_table, "male", "heart", "married", age) == 1.0


def test_partner_defaults_to_married(male_table):
    assert relative_rate(male_table, "male", "cancer", "partner", 45) == 1.0


def test_interpolation_midpoint(male_table):
    assert relative_rate(male_table, "male", "heart", "single", 45) == pytest.approx(2.1, abs=0.001)


def test_clamped_outside_anchors(male_table):
    assert relative_rate(male_table, "male", "heart", "single", 30) == 2.3
    assert relative_rate(male_table, "male", "heart", "widowed", 80) == 2.2


@given(st.floats(0, 120))
def test_interpolation_bounded_and_continuous(age):
    table = RelativeRiskTable({
        ("male", "heart", 40): {"single": 2.3, "widowed": 2.7, "divorced": 2.7},
        ("male", "heart", 50): {"single": 1.9, "widowed": 2.2, "divorced": 2.2},
    })
    r = relative_rate(table, "male", "heart", "single", age)
    assert 1.9 - 1e-12 <= r <= 2.3 + 1e-12
    r2 = relative_rate(table, "male", "heart", "single", age + 1e-6)
    assert abs(r2 - r) <= 0.04 * 1e-6 + 1e-12


def test_female_lookup_fails_clearly(male_table):
    with pytest.raises(RiskKeyError, match="female"):
        relative_rate(male_table, "female", "heart", "single", 45)
    with pytest.raises(RiskKeyError):
        relative_rate(male_table, "male", "suicide", "single", 45)


def test_user_supplied_female_table():
    table = RelativeRiskTable({("female", "heart", 60): {"single": 1.5, "widowed": 1.7, "divorced": 1.6}})
    assert relative_rate(table, "female", "heart", "widowed", 70) == 1.7


@pytest.mark.parametrize("row", [
    {"single": 2.0, "widowed": 2.0},
    {"single": 2.0, "widowed": 2.0, "divorced": 2.0, "married": 1.1},
    {"single": 0.0, "widowed": 2.0, "divorced": 2.0},
])
def test_table_validation(row):
    with pytest.raises(ValidationError):
        RelativeRiskTable({("male", "heart", 40): row})


def test_composition_must_sum_to_one():
    with pytest.raises(ValidationError):
        MaritalComposition({"married": 0.5, "single": 0.4})
    with pytest.raises(ValidationError):
        MaritalComposition({"married": 1.1, "single": -0.1})


def test_all_married_rate_unchanged(male_table):
    comp = MaritalComposition({"married": 1.0})
    assert composition_adjusted_rate(7.3, comp, male_table, "male", "cancer", 44) == 7.3


def test_all_single_rate(male_table):
    comp = MaritalComposition({"single": 1.0})
    assert composition_adjusted_rate(10.0, comp, male_table, "male", "heart", 40) == pytest.approx(23.0)


def test_us75_composition_weighted_sum(male_table):
    comp = MaritalComposition.normalized(US75)
    # spreadsheet sum at age 50, heart: .46*1 + .45*2.2 + .05*1.9 + .02*2.2 + .02*1
    expected = 10.0 * (0.46 + 0.99 + 0.095 + 0.044 + 0.02)
    assert composition_adjusted_rate(10.0, comp, male_table, "male", "heart", 50) == pytest.approx(expected)
    assert expected == pytest.approx(16.09)


@given(st.fixed_dictionaries({s.value: st.floats(0, 1) for s in MaritalStatus}).filter(
    lambda d: sum(d.values()) > 0.01), st.sampled_from(list(MaritalStatus)[2:] + [MaritalStatus.SINGLE]),
    st.floats(0, 1), st.floats(30, 60))
def test_moving_share_from_married_never_lowers_rate(male_table, shares, status, move, age):
    comp = MaritalComposition.normalized(shares)
    shifted = dict(comp.shares)
    moved = comp.share("married") * move
    shifted[MaritalStatus.MARRIED] = comp.share("married") - moved
    shifted[status] = comp.share(status) + moved
    after = MaritalComposition.normalized(shifted)
    before_rate = composition_adjusted_rate(1.0, comp, male_table, "male", "heart", age)
    assert composition_adjusted_rate(1.0, after, male_table, "male", "heart", age) >= before_rate - 1e-12


def test_excess_zero_for_equal_groups(male_table):
    comp = MaritalComposition.normalized(US75)
    assert imbalance_excess_deaths(500, comp, comp, male_table, "male", "heart", 50) == 0.0


def test_excess_widowhood_contrast(male_table):
    men = MaritalComposition({"widowed": 0.08, "married": 0.92})
    women = MaritalComposition({"widowed": 0.40, "married": 0.60})
    f_men = 0.92 + 0.08 * 2.2
    f_women = 0.60 + 0.40 * 2.2
    got = imbalance_excess_deaths(500, men, women, male_table, "male", "heart", 50)
    assert got == pytest.approx(500 * (f_men - f_women) / f_women)
    assert got == pytest.approx(-129.7297, abs=1e-4)
    # the group with more widowed subjects is the one with excess deaths
    reverse = imbalance_excess_deaths(500, women, men, male_table, "male", "heart", 50)
    assert reverse == pytest.approx(500 * (f_women - f_men) / f_men)
    assert reverse > 0


def test_excess_linear_in_base(male_table):
    a = MaritalComposition({"widowed": 0.08, "married": 0.92})
    b = MaritalComposition.normalized(US75)
    one = imbalance_excess_deaths(100, a, b, male_table, "male", "heart", 45)
    assert imbalance_excess_deaths(200, a, b, male_table, "male", "heart", 45) == pytest.approx(2 * one)


def test_unknown_status():
    with pytest.raises(ValidationError):
        MaritalStatus.parse("engaged")
