"""Binned study-group age structures.

A :class:`CohortSpec` is what a baseline-characteristics table reports: head
counts per age bracket. The placement of subjects inside each bracket is not
reported, so every bin carries an explicit within-bin policy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

from . import _pykernels
from .errors import DomainError, ValidationError
from .gompertz import AgeRoster, GompertzParams, project


@dataclass(frozen=True)
class Uniform:
    """Spread the bin count evenly over every integer age in the bin."""


@dataclass(frozen=True)
class PointMass:
    """Place the whole bin count at one age."""

    age: int


@dataclass(frozen=True)
class Explicit:
    """Per-age weights for ages ``lo..hi``; must sum to 1."""

    weights: tuple[float, ...]


WithinBinPolicy = Union[Uniform, PointMass, Explicit]


@dataclass(frozen=True)
class AgeBin:
    lo: int
    hi: int
    count: float

    def __post_init__(self):
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise ValidationError(f"bin endpoints must be integers, got {self.lo}-{self.hi}")
        if self.lo < 0:
            raise ValidationError(f"bin lower end must be nonnegative, got {self.lo}")
        if self.lo > self.hi:
            raise ValidationError(f"bin lower end {self.lo} exceeds upper end {self.hi}")
        if not (math.isfinite(self.count) and self.count >= 0):
            raise ValidationError(f"bin count must be nonnegative, got {self.count!r}")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    def label(self) -> str:
        return f"{self.lo}-{self.hi}"


def _check_policy(b: AgeBin, policy: WithinBinPolicy) -> None:
    if isinstance(policy, Uniform):
        return
    if isinstance(policy, PointMass):
        if not b.lo <= policy.age <= b.hi:
            raise ValidationError(f"point mass at {policy.age} lies outside bin {b.label()}")
        return
    if isinstance(policy, Explicit):
        if len(policy.weights) != b.width:
            raise ValidationError(
                f"bin {b.label()} needs {b.width} weights, got {len(policy.weights)}"
            )
        if any(not (w >= 0) for w in policy.weights):
            raise ValidationError(f"weights for bin {b.label()} must be nonnegative")
        if abs(math.fsum(policy.weights) - 1.0) > 1e-9:
            raise ValidationError(f"weights for bin {b.label()} must sum to 1")
        return
    raise ValidationError(f"unknown within-bin policy {policy!r}")


@dataclass(frozen=True)
class CohortSpec:
    """Ascending, disjoint age bins with one within-bin policy per bin."""

    bins: tuple[AgeBin, ...]
    policies: tuple[WithinBinPolicy, ...] = ()

    def __post_init__(self):
        bins = tuple(self.bins)
        object.__setattr__(self, "bins", bins)
        if not bins:
            raise ValidationError("a cohort needs at least one bin")
        policies = tuple(self.policies) or tuple(Uniform() for _ in bins)
        if len(policies) != len(bins):
            raise ValidationError("need exactly one policy per bin")
        object.__setattr__(self, "policies", policies)
        for prev, cur in zip(bins, bins[1:]):
            if cur.lo <= prev.hi:
                raise ValidationError(
                    f"bins {prev.label()} and {cur.label()} overlap or are not ascending"
                )
        for b, p in zip(bins, policies):
            _check_policy(b, p)
        if self.total <= 0:
            raise ValidationError("cohort total count must be positive")

    @property
    def total(self) -> float:
        return math.fsum(b.count for b in self.bins)

    def with_policy(self, index: int, policy: WithinBinPolicy) -> "CohortSpec":
        policies = list(self.policies)
        policies[index] = policy
        return CohortSpec(self.bins, tuple(policies))

    def only_bin(self, index: int, policy: WithinBinPolicy | None = None) -> "CohortSpec":
        b = self.bins[_bin_index(self, index)]
        return CohortSpec((b,), (policy if policy is not None else self.policies[index],))


def _bin_index(spec: CohortSpec, index) -> int:
    if isinstance(index, bool) or int(index) != index or not 0 <= index < len(spec.bins):
        raise DomainError(f"bin index {index!r} out of range 0..{len(spec.bins) - 1}")
    return int(index)


def _bin_pairs(b: AgeBin, policy: WithinBinPolicy):
    if isinstance(policy, PointMass):
        return [(policy.age, b.count)]
    if isinstance(policy, Explicit):
        return [(b.lo + k, b.count * w) for k, w in enumerate(policy.weights)]
    share = b.count / b.width
    return [(age, share) for age in range(b.lo, b.hi + 1)]


def expand(spec: CohortSpec) -> AgeRoster:
    """Turn bins into a per-age roster according to each bin's policy."""
    pairs = []
    for b, policy in zip(spec.bins, spec.policies):
        pairs.extend(_bin_pairs(b, policy))
    return AgeRoster.from_pairs(pairs)


def median_age(spec: CohortSpec) -> float:
    """Median of the expanded roster.

    Each integer age ``x`` is read as the age-year [x - 0.5, x + 0.5) and
    the cumulative count is interpolated linearly inside the age-year where
    it crosses one half. If the half-way point falls exactly between two
    occupied ages, the midpoint of the gap is returned, so point masses of
    equal size at 40 and 60 give 50.
    """
    roster = expand(spec)
    if roster.total <= 0:
        raise DomainError("median of an empty cohort is undefined")
    return _pykernels.grouped_median(roster.ages, roster.counts)


def fraction_over(spec: CohortSpec, age_threshold: int) -> float:
    """Share of the head count aged ``age_threshold`` or more."""
    roster = expand(spec)
    above = math.fsum(c for age, c in zip(roster.ages, roster.counts) if age >= age_threshold)
    return above / roster.total


class SensitivityBounds(NamedTuple):
    youngest: float
    uniform: float
    oldest: float

    @property
    def spread(self) -> float:
        return self.oldest - self.youngest


def sensitivity_bounds(
    params: GompertzParams, spec: CohortSpec, bin_index: int, years: int
) -> SensitivityBounds:
    """Deaths of one bin with everyone at its lowest age, spread evenly, or at its highest age.

    Because the hazard rises with age, any other placement of the bin's
    subjects yields a death count between the two point-mass extremes.
    """
    i = _bin_index(spec, bin_index)
    b = spec.bins[i]
    if b.count <= 0:
        return SensitivityBounds(0.0, 0.0, 0.0)

    def deaths(policy):
        return project(params, expand(spec.only_bin(i, policy)), years).grand_total

    return SensitivityBounds(deaths(PointMass(b.lo)), deaths(Uniform()), deaths(PointMass(b.hi)))


def bin_deaths(params: GompertzParams, spec: CohortSpec, bin_index: int, years: int) -> float:
    """Projected deaths of one bin under a uniform within-bin spread."""
    i = _bin_index(spec, bin_index)
    if spec.bins[i].count <= 0:
        return 0.0
    return project(params, expand(spec.only_bin(i, Uniform())), years).grand_total


def bin_count_delta_deaths(
    params: GompertzParams,
    spec_a: CohortSpec,
    spec_b: CohortSpec,
    bin_index: int,
    years: int,
) -> float:
    """Extra deaths in ``spec_a`` over ``spec_b`` that come from one bin's head count."""
    i = _bin_index(spec_a, bin_index)
    _bin_index(spec_b, bin_index)
    a, b = spec_a.bins[i], spec_b.bins[i]
    if (a.lo, a.hi) != (b.lo, b.hi):
        raise ValidationError(f"bin {i} differs: {a.label()} vs {b.label()}")
    return bin_deaths(params, spec_a, i, years) - bin_deaths(params, spec_b, i, years)


def cohort_from_rows(rows: Sequence[tuple[int, int, float]]) -> CohortSpec:
    return CohortSpec(tuple(AgeBin(lo, hi, count) for lo, hi, count in rows))
