"""Monte-Carlo check of how well simple 1:1 randomization balances demographics.

Every replication draws its own generator from ``(seed, replication index)``
through :class:`numpy.random.SeedSequence`, so results do not depend on the
order in which replications are evaluated. Standard deviations use the
population convention (divide by n), so CV = sd / mean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import _backend
from .bertillon import MaritalStatus, Sex
from .errors import DomainError, ValidationError

#: Identifier of the generator used for splits; written into every report.
RNG_ALGORITHM = "numpy.PCG64/SeedSequence(seed,spawn_key=(replication,))"

F65_THRESHOLD = 65
_STATUSES = tuple(MaritalStatus)
_SEXES = tuple(Sex)
N_CELLS = len(_SEXES) * len(_STATUSES)
_BLOCK = 256


@dataclass(frozen=True)
class Subject:
    age: int
    sex: Sex
    status: MaritalStatus

    def __post_init__(self):
        if int(self.age) != self.age or self.age < 0:
            raise ValidationError(f"subject age must be a nonnegative integer, got {self.age!r}")
        object.__setattr__(self, "age", int(self.age))
        object.__setattr__(self, "sex", Sex.parse(self.sex))
        object.__setattr__(self, "status", MaritalStatus.parse(self.status))

    @property
    def cell(self) -> int:
        return cell_code(self.sex, self.status)


def cell_code(sex, status) -> int:
    """Index 0..9 of a sex x marital-status cell."""
    return _SEXES.index(Sex.parse(sex)) * len(_STATUSES) + _STATUSES.index(MaritalStatus.parse(status))


def cell_label(code: int) -> str:
    sex, status = divmod(code, len(_STATUSES))
    return f"{_SEXES[sex].value}/{_STATUSES[status].value}"


@dataclass(frozen=True)
class DispersionReport:
    metric: str
    mean: float
    sd: float
    cv: float | None
    n: int
    replications: int
    missing: int = 0
    values: tuple = field(default=(), repr=False, compare=False)

    @classmethod
    def from_values(cls, metric: str, values, replications: int | None = None) -> "DispersionReport":
        arr = np.asarray(values, dtype=np.float64)
        ok = arr[~np.isnan(arr)]
        missing = int(arr.size - ok.size)
        if ok.size == 0:
            return cls(metric, math.nan, math.nan, None, 0, arr.size if replications is None else replications,
                       missing, tuple(arr.tolist()))
        mean = float(ok.mean())
        sd = float(ok.std())
        cv = sd / abs(mean) if mean != 0 else None
        return cls(metric, mean, sd, cv, int(ok.size),
                   arr.size if replications is None else replications, missing, tuple(arr.tolist()))


def _permutation(n: int, seed: int, index: int | None) -> np.ndarray:
    spawn_key = () if index is None else (int(index),)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=spawn_key)))
    return rng.permutation(n)


def _group_size(n: int) -> int:
    return (n + 1) // 2


def split(population: Sequence[Subject], seed: int):
    """Randomly split ``population`` into groups P and D of (nearly) equal size.

    With an odd number of subjects, P gets the extra one.
    """
    n = len(population)
    if n < 2:
        raise DomainError("need at least two subjects to split")
    perm = _permutation(n, seed, None)
    n_p = _group_size(n)
    return [population[i] for i in perm[:n_p]], [population[i] for i in perm[n_p:]]


Metric = Union[str, tuple, Callable[[Sequence[Subject]], float]]


def _metric_name(metric) -> str:
    if isinstance(metric, tuple):
        return f"cell_share:{Sex.parse(metric[0]).value}/{MaritalStatus.parse(metric[1]).value}"
    if callable(metric):
        return getattr(metric, "__name__", "custom")
    return str(metric)


def _parse_metric(metric):
    if isinstance(metric, tuple):
        if len(metric) != 2:
            raise DomainError("a cell metric is a (sex, status) pair")
        return "cell", cell_code(*metric)
    if callable(metric):
        return "callable", metric
    name = str(metric).lower()
    if name in ("median_age", "ma"):
        return "median_age", None
    if name in ("f65", "fraction_over_65"):
        return "f65", None
    if name.startswith("cell_share:"):
        sex, status = name.split(":", 1)[1].split("/")
        return "cell", cell_code(sex, status)
    raise DomainError(f"unknown metric {metric!r}")


def split_metrics(population: Sequence[Subject], replications: int, seed: int):
    """Median age, F65 and the 10 cell shares of group P for every replication.

    Returns ``(medians, f65, cells)`` arrays of shape ``(R,)``, ``(R,)`` and
    ``(R, 10)``. Replication ``r`` uses the same generator that
    ``_permutation(n, seed, r)`` builds, whichever kernel runs the loop.
    """
    n = len(population)
    if n < 2:
        raise DomainError("need at least two subjects to split")
    if int(replications) != replications or replications < 1:
        raise DomainError(f"replications must be a positive integer, got {replications!r}")
    ages = np.fromiter((s.age for s in population), dtype=np.int64, count=n)
    codes = np.fromiter((s.cell for s in population), dtype=np.int64, count=n)
    age_lo = int(ages.min())
    n_ages = int(ages.max()) - age_lo + 1
    threshold_idx = min(max(F65_THRESHOLD - age_lo, 0), n_ages)
    n_p = _group_size(n)
    out_m, out_f, out_c = [], [], []
    for start in range(0, int(replications), _BLOCK):
        stop = min(start + _BLOCK, int(replications))
        perms = np.stack([_permutation(n, seed, r) for r in range(start, stop)]).astype(np.int64)
        m, f, c = _backend.kernels.group_metrics(
            perms, n_p, ages - age_lo, age_lo, n_ages, codes, N_CELLS, threshold_idx
        )
        out_m.append(np.asarray(m))
        out_f.append(np.asarray(f))
        out_c.append(np.asarray(c))
    return np.concatenate(out_m), np.concatenate(out_f), np.concatenate(out_c)


def replicate_dispersion(
    population: Sequence[Subject], metric: Metric, replications: int, seed: int
) -> DispersionReport:
    """Dispersion of ``metric`` on group P across seeded random splits.

    ``metric`` is ``"median_age"``, ``"f65"``, a ``(sex, status)`` pair for a
    cell share, or a callable on the list of P subjects. A callable that
    returns nan or raises ``ValueError`` records a missing replication.
    """
    if int(replications) != replications or replications < 2:
        raise DomainError(f"replications must be an integer >= 2, got {replications!r}")
    kind, arg = _parse_metric(metric)
    name = _metric_name(metric)
    if kind == "callable":
        n = len(population)
        if n < 2:
            raise DomainError("need at least two subjects to split")
        n_p = _group_size(n)
        values = []
        for r in range(int(replications)):
            perm = _permutation(n, seed, r)
            try:
                values.append(float(arg([population[i] for i in perm[:n_p]])))
            except ValueError:
                values.append(math.nan)
        return DispersionReport.from_values(name, values, int(replications))
    medians, f65, cells = split_metrics(population, replications, seed)
    values = {"median_age": medians, "f65": f65}.get(kind)
    if values is None:
        values = cells[:, arg]
    return DispersionReport.from_values(name, values, int(replications))


def dispersion_table(population: Sequence[Subject], replications: int, seed: int) -> list[DispersionReport]:
    """Reports for median age, F65 and all ten cells from one set of splits."""
    if int(replications) != replications or replications < 2:
        raise DomainError(f"replications must be an integer >= 2, got {replications!r}")
    medians, f65, cells = split_metrics(population, replications, seed)
    reports = [
        DispersionReport.from_values("median_age", medians),
        DispersionReport.from_values("f65", f65),
    ]
    for code in range(N_CELLS):
        reports.append(DispersionReport.from_values(f"cell_share:{cell_label(code)}", cells[:, code]))
    return reports


def cross_unit_cv(units, field_name: str) -> DispersionReport:
    """CV of ``median_age`` or ``f65`` across county-style units."""
    if field_name not in ("median_age", "f65"):
        raise DomainError(f"field must be median_age or f65, got {field_name!r}")
    if len(units) < 2:
        raise DomainError("need at least two units")
    return DispersionReport.from_values(field_name, [getattr(u, field_name) for u in units])


def synthetic_population(n: int = 2000, seed: int = 20130609) -> list[Subject]:
    """Heterogeneous trial-like population, 31 to 85, with age-dependent marital status.

    Married share falls and widowed share rises with age, and women are
    widowed more often than men.
    """
    rng = np.random.default_rng(seed)
    ages = np.clip(np.round(rng.normal(62.0, 10.0, n)), 31, 85).astype(int)
    sexes = rng.random(n) < 0.7
    out = []
    for age, is_male in zip(ages, sexes):
        old = (age - 31) / 54.0
        widowed = (0.02 + 0.3 * old**2) * (1.0 if is_male else 2.5)
        p = np.array([0.08, 0.0, 0.03, 0.07, min(widowed, 0.6)])
        p[1] = 1.0 - p.sum()
        status = _STATUSES[int(rng.choice(5, p=p))]
        out.append(Subject(int(age), Sex.MALE if is_male else Sex.FEMALE, status))
    return out
