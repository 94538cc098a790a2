"""Marital-status mortality multipliers and composition adjustments.

Multipliers are death rates relative to married persons of the same sex,
age and cause of death. Tables are keyed by ``(sex, cause, anchor_age)``;
between anchors the multiplier is interpolated linearly in age and outside
the anchor range it is held at the nearest anchor.
"""
from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .errors import RiskKeyError, ValidationError

COMPOSITION_TOLERANCE = 1e-9


class MaritalStatus(str, enum.Enum):
    SINGLE = "single"
    MARRIED = "married"
    PARTNER = "partner"
    DIVORCED = "divorced"
    WIDOWED = "widowed"

    @classmethod
    def parse(cls, value) -> "MaritalStatus":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValidationError(f"unknown marital status {value!r} (expected one of {names})")


class Sex(str, enum.Enum):
    MALE = "male"
    FEMALE = "female"

    @classmethod
    def parse(cls, value) -> "Sex":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(f"unknown sex {value!r} (expected male or female)")


#: Statuses that must be present at every anchor of a table. ``partner`` has
#: no published ratio and defaults to the married rate; ``married`` is 1.
REQUIRED_STATUSES = (MaritalStatus.SINGLE, MaritalStatus.DIVORCED, MaritalStatus.WIDOWED)
PARTNER_DEFAULT = 1.0


def _norm_label(text) -> str:
    return str(text).strip().lower()


@dataclass(frozen=True)
class RelativeRiskTable:
    """Multipliers relative to married, by (sex, cause) and anchor age."""

    entries: Mapping[tuple[Sex, str, int], Mapping[MaritalStatus, float]]
    _anchors: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        clean = {}
        for (sex, cause, age), ratios in self.entries.items():
            key = (Sex.parse(sex), _norm_label(cause), int(age))
            row = {MaritalStatus.parse(s): float(v) for s, v in ratios.items()}
            married = row.setdefault(MaritalStatus.MARRIED, 1.0)
            if married != 1.0:
                raise ValidationError(f"married multiplier must be exactly 1.0 at {key}, got {married}")
            row.setdefault(MaritalStatus.PARTNER, PARTNER_DEFAULT)
            missing = [s.value for s in REQUIRED_STATUSES if s not in row]
            if missing:
                raise ValidationError(f"missing multipliers for {', '.join(missing)} at {key}")
            for status, value in row.items():
                if not (math.isfinite(value) and value > 0):
                    raise ValidationError(f"multiplier for {status.value} at {key} must be positive")
            clean[key] = MappingProxyType(row)
        if not clean:
            raise ValidationError("relative-risk table is empty")
        object.__setattr__(self, "entries", MappingProxyType(clean))
        anchors = {}
        for sex, cause, age in clean:
            anchors.setdefault((sex, cause), []).append(age)
        object.__setattr__(self, "_anchors", {k: sorted(v) for k, v in anchors.items()})

    def keys(self):
        """The ``(sex, cause)`` pairs covered by the table."""
        return sorted(self._anchors, key=lambda k: (k[0].value, k[1]))

    def anchors(self, sex, cause) -> list[int]:
        key = (Sex.parse(sex), _norm_label(cause))
        if key not in self._anchors:
            covered = ", ".join(f"{s.value}/{c}" for s, c in self.keys())
            hint = ""
            if key[0] is Sex.FEMALE:
                hint = "; the shipped table covers males only, supply a female table"
            raise RiskKeyError(f"no multipliers for {key[0].value}/{key[1]} (table covers {covered}){hint}")
        return self._anchors[key]


def relative_rate(table: RelativeRiskTable, sex, cause, status, age: float) -> float:
    """Death-rate multiplier of ``status`` relative to married at ``age``."""
    status = MaritalStatus.parse(status)
    anchors = table.anchors(sex, cause)
    if status is MaritalStatus.MARRIED:
        return 1.0
    sex, cause = Sex.parse(sex), _norm_label(cause)

    def at(anchor):
        return table.entries[(sex, cause, anchor)][status]

    if age <= anchors[0]:
        return at(anchors[0])
    if age >= anchors[-1]:
        return at(anchors[-1])
    j = bisect.bisect_right(anchors, age)
    lo, hi = anchors[j - 1], anchors[j]
    if age == lo:
        return at(lo)
    w = (age - lo) / (hi - lo)
    return (1.0 - w) * at(lo) + w * at(hi)


@dataclass(frozen=True)
class MaritalComposition:
    """Share of each marital status in a group; shares sum to 1."""

    shares: Mapping[MaritalStatus, float]

    def __post_init__(self):
        shares = {}
        for status, value in self.shares.items():
            status = MaritalStatus.parse(status)
            value = float(value)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"share of {status.value} must be nonnegative, got {value!r}")
            shares[status] = shares.get(status, 0.0) + value
        total = math.fsum(shares.values())
        if abs(total - 1.0) > COMPOSITION_TOLERANCE:
            raise ValidationError(f"composition shares must sum to 1, got {total:.12g}")
        object.__setattr__(self, "shares", MappingProxyType(shares))

    @classmethod
    def normalized(cls, shares) -> "MaritalComposition":
        total = math.fsum(float(v) for v in shares.values())
        if not total > 0:
            raise ValidationError("composition has no positive share")
        return cls({k: float(v) / total for k, v in shares.items()})

    def share(self, status) -> float:
        return self.shares.get(MaritalStatus.parse(status), 0.0)


def composition_factor(comp: MaritalComposition, table, sex, cause, age) -> float:
    """Share-weighted mean multiplier of a composition (1 for an all-married group)."""
    return math.fsum(
        share * relative_rate(table, sex, cause, status, age)
        for status, share in comp.shares.items()
        if share > 0
    )


def composition_adjusted_rate(
    base_married_rate: float, comp: MaritalComposition, table, sex, cause, age
) -> float:
    """Group death rate implied by the married rate and the group's composition.

    Same unit as ``base_married_rate`` (per 1,000 per year in this package).
    """
    return base_married_rate * composition_factor(comp, table, sex, cause, age)


def imbalance_excess_deaths(
    base_deaths: float,
    comp_p: MaritalComposition,
    comp_d: MaritalComposition,
    table,
    sex,
    cause,
    age,
) -> float:
    """Deaths that group P gains over group D from its marital composition alone.

    ``base_deaths`` is read as the expected count for a group with D's
    composition; the result is ``base_deaths * (f_P - f_D) / f_D`` where
    ``f`` is :func:`composition_factor`. Because the baseline is D's, swapping
    the groups flips the sign but changes the magnitude by ``f_D / f_P``.
    """
    f_p = composition_factor(comp_p, table, sex, cause, age)
    f_d = composition_factor(comp_d, table, sex, cause, age)
    return base_deaths * (f_p - f_d) / f_d
