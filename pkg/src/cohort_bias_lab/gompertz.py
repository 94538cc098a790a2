"""Gompertz hazard and annual cohort death projection.

The hazard is ``g0 * exp(a * age)`` expressed as deaths per 1,000 persons
per year. Note that ``a`` here is the exponential age slope of the hazard,
not the slope of the county regression in :mod:`cohort_bias_lab.regression`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import _backend
from .errors import DegenerateInputError, DomainError, UnsupportedError, ValidationError

#: Default hazard coefficients, fitted to all-cause adult mortality.
DEFAULT_G0 = 0.11
DEFAULT_A = 0.082


@dataclass(frozen=True)
class GompertzParams:
    """Coefficients of the Gompertz hazard.

    ``makeham`` exists only so callers that carry an age-independent term
    get an explicit refusal instead of a silently ignored value.
    """

    g0: float = DEFAULT_G0
    a: float = DEFAULT_A
    makeham: float = 0.0

    def __post_init__(self):
        if self.makeham != 0:
            raise UnsupportedError(
                "an age-independent (Makeham) hazard term is not supported; pass makeham=0"
            )
        if not (math.isfinite(self.g0) and self.g0 > 0):
            raise ValidationError(f"g0 must be a positive finite number, got {self.g0!r}")
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValidationError(f"a must be a positive finite number, got {self.a!r}")

    def scaled(self, factor: float) -> "GompertzParams":
        return GompertzParams(self.g0 * factor, self.a)


@dataclass(frozen=True)
class AgeRoster:
    """Expected head-count at each integer starting age."""

    ages: tuple[int, ...]
    counts: tuple[float, ...]

    def __post_init__(self):
        if len(self.ages) != len(self.counts):
            raise ValidationError("ages and counts must have the same length")
        if len(set(self.ages)) != len(self.ages):
            raise ValidationError("roster ages must be distinct")
        for age in self.ages:
            if int(age) != age or age < 0:
                raise ValidationError(f"roster ages must be nonnegative integers, got {age!r}")
        for count in self.counts:
            if not (math.isfinite(count) and count >= 0):
                raise ValidationError(f"roster counts must be nonnegative, got {count!r}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "AgeRoster":
        pairs = sorted((int(age), float(count)) for age, count in pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @property
    def total(self) -> float:
        return math.fsum(self.counts)

    def __len__(self):
        return len(self.ages)


@dataclass(frozen=True)
class DeathProjection:
    """Expected deaths by starting age (rows) and trial year (columns)."""

    ages: tuple[int, ...]
    per_cell: np.ndarray = field(repr=False)
    initial_total: float

    def __post_init__(self):
        self.per_cell.setflags(write=False)

    @property
    def years(self) -> int:
        return self.per_cell.shape[1]

    @property
    def per_age_totals(self) -> np.ndarray:
        return self.per_cell.sum(axis=1)

    @property
    def per_year_totals(self) -> np.ndarray:
        return self.per_cell.sum(axis=0)

    @property
    def grand_total(self) -> float:
        return math.fsum(self.per_cell.ravel().tolist())

    def deaths_between(self, lo: int, hi: int) -> float:
        """Total expected deaths among subjects whose starting age is in [lo, hi]."""
        ages = np.asarray(self.ages)
        mask = (ages >= lo) & (ages <= hi)
        return math.fsum(self.per_cell[mask].ravel().tolist())

    def rows(self):
        """Yield ``(start_age, year, deaths)`` with years numbered from 1."""
        for i, age in enumerate(self.ages):
            for t in range(self.years):
                yield age, t + 1, float(self.per_cell[i, t])


class Calibration(NamedTuple):
    params: GompertzParams
    factor: float
    projected: float
    observed: float


def hazard(params: GompertzParams, age: float) -> float:
    """Death rate per 1,000 per year at ``age``."""
    if not age >= 0:
        raise DomainError(f"age must be nonnegative, got {age!r}")
    return params.g0 * math.exp(params.a * age)


def doubling_time(params: GompertzParams) -> float:
    """Years over which the hazard doubles."""
    return math.log(2.0) / params.a


def project(params: GompertzParams, roster: AgeRoster, years: int) -> DeathProjection:
    """Project expected deaths of ``roster`` over ``years`` annual steps."""
    if int(years) != years or years < 1:
        raise DomainError(f"years must be a positive integer, got {years!r}")
    if len(roster) == 0 or roster.total <= 0:
        raise DomainError("cannot project an empty roster")
    cells = _backend.kernels.project_cells(
        np.asarray(roster.ages, dtype=np.float64),
        np.asarray(roster.counts, dtype=np.float64),
        float(params.g0),
        float(params.a),
        int(years),
    )
    return DeathProjection(tuple(roster.ages), np.asarray(cells), roster.total)


def calibrate(
    params: GompertzParams, roster: AgeRoster, years: int, observed_deaths: float
) -> Calibration:
    """Rescale ``g0`` so the projection is anchored to an observed death count.

    Only ``g0`` is rescaled, by observed/projected. Because survivors are
    depleted, re-projecting with the returned params lands close to, but
    not exactly on, ``observed_deaths``.
    """
    if not observed_deaths > 0:
        raise DomainError(f"observed deaths must be positive, got {observed_deaths!r}")
    projected = project(params, roster, years).grand_total
    if projected <= 0:
        raise DegenerateInputError("projected death count is zero; nothing to calibrate")
    factor = observed_deaths / projected
    return Calibration(params.scaled(factor), factor, projected, float(observed_deaths))
