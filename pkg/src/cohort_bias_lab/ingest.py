"""CSV loaders and writers.

All inputs are UTF-8, comma separated, with a required header row. Blank
lines and lines starting with ``#`` are skipped, but line numbers in
diagnostics always refer to physical lines of the file. Loaders return
``(value, report)``; ``value`` is None whenever ``report.fatal`` is set.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, NamedTuple

from .bertillon import MaritalComposition, MaritalStatus, RelativeRiskTable, Sex
from .cohort import AgeBin, CohortSpec
from .errors import ValidationError
from .regression import CountyRecord
from .randomization import Subject

COHORT_COLUMNS = ("bin_lo", "bin_hi", "count")
SUBJECT_COLUMNS = ("age", "sex", "marital_status")
RISK_COLUMNS = ("sex", "cause", "anchor_age", "status", "multiplier")
COMPOSITION_COLUMNS = ("status", "proportion")
COUNTY_COLUMNS = ("unit_id", "median_age", "f65", "death_rate")
PROJECTION_COLUMNS = ("start_age", "year", "deaths")
DISPERSION_COLUMNS = ("metric", "mean", "sd", "cv", "n")

#: Loaded compositions may miss 1 by this much before being renormalized.
COMPOSITION_PARSE_TOLERANCE = 1e-6


class Rejection(NamedTuple):
    line: int
    column: str
    message: str

    def __str__(self):
        col = f" [{self.column}]" if self.column else ""
        return f"line {self.line}{col}: {self.message}"


@dataclass
class ParseReport:
    source: str = "<stream>"
    accepted: int = 0
    rejections: list[Rejection] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    fatal: bool = False

    def reject(self, line: int, column: str, message: str) -> None:
        self.rejections.append(Rejection(line, column, message))

    def fail(self, line: int, column: str, message: str) -> None:
        self.reject(line, column, message)
        self.fatal = True

    def summary(self) -> str:
        lines = [f"{self.source}: {self.accepted} row(s) accepted, {len(self.rejections)} rejected"
                 + (" (fatal)" if self.fatal else "")]
        lines += [f"  error {r}" for r in self.rejections]
        lines += [f"  warning {w}" for w in self.warnings]
        return "\n".join(lines)


def data_path(name: str) -> Path:
    """Path of a fixture shipped inside the package."""
    return Path(str(resources.files("cohort_bias_lab").joinpath("data", name)))


def resolve_input(path) -> Path:
    """Use ``path`` if it exists, else a shipped fixture with the same file name."""
    p = Path(path)
    if p.exists():
        return p
    shipped = data_path(p.name)
    if shipped.exists():
        return shipped
    return p


class _Row(NamedTuple):
    line: int
    values: dict


def _read_rows(source, columns, report: ParseReport):
    """Yield data rows as dicts, recording header problems as fatal."""
    if hasattr(source, "read"):
        text = source.read()
        report.source = getattr(source, "name", "<stream>")
    else:
        report.source = str(source)
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    if text.startswith("\ufeff"):
        text = text[1:]
    header = None
    header_line = 1
    rows = []
    for lineno, raw in enumerate(io.StringIO(text, newline=None), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([raw]))]
        if header is None:
            header = [c.lower() for c in cells]
            header_line = lineno
            missing = [c for c in columns if c not in header]
            if missing:
                report.fail(lineno, ",".join(missing), f"header is missing column(s): {', '.join(missing)}")
                return []
            extra = [c for c in header if c not in columns]
            if extra:
                report.warnings.append(f"line {lineno}: ignoring extra column(s) {', '.join(extra)}")
            continue
        if len(cells) != len(header):
            rows.append(_Row(lineno, {"__error__": f"expected {len(header)} fields, found {len(cells)}"}))
            continue
        rows.append(_Row(lineno, dict(zip(header, cells))))
    if header is None or not rows:
        report.fail(header_line, "", "no data rows")
        return []
    return rows


def _number(values, column, *, integer=False, minimum=None):
    raw = values[column]
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"not a number: {raw!r}")
    if not math.isfinite(value):
        raise ValidationError(f"not a finite number: {raw!r}")
    if integer:
        if value != int(value):
            raise ValidationError(f"expected an integer, got {raw!r}")
        value = int(value)
    if minimum is not None and value < minimum:
        raise ValidationError(f"must be >= {minimum}, got {raw!r}")
    return value


def _parse_each(rows, report, parse: Callable, *, fatal: bool):
    """Apply ``parse(values) -> item`` to each row; one diagnostic per bad row."""
    out = []
    for row in rows:
        if "__error__" in row.values:
            report.reject(row.line, "", row.values["__error__"])
            continue
        try:
            out.append((row.line, parse(row.values)))
        except _ColumnError as err:
            report.reject(row.line, err.column, err.message)
    if fatal and report.rejections:
        report.fatal = True
    report.accepted = len(out)
    return out


class _ColumnError(Exception):
    def __init__(self, column, message):
        super().__init__(message)
        self.column = column
        self.message = message


def _col(values, column, convert):
    try:
        return convert(values, column)
    except ValidationError as err:
        raise _ColumnError(column, str(err))


def _finish(report, build):
    if report.fatal:
        report.accepted = 0
        return None, report
    return build(), report


# -- cohort -----------------------------------------------------------------

def load_cohort(source):
    """Load ``bin_lo,bin_hi,count`` rows into a :class:`CohortSpec` with uniform bins."""
    report = ParseReport()
    rows = _read_rows(source, COHORT_COLUMNS, report)

    def parse(v):
        lo = _col(v, "bin_lo", lambda v, c: _number(v, c, integer=True, minimum=0))
        hi = _col(v, "bin_hi", lambda v, c: _number(v, c, integer=True, minimum=0))
        count = _col(v, "count", lambda v, c: _number(v, c, minimum=0))
        if lo > hi:
            raise _ColumnError("bin_lo", f"bin_lo {lo} exceeds bin_hi {hi}")
        return AgeBin(lo, hi, count)

    parsed = _parse_each(rows, report, parse, fatal=True)
    if not report.fatal:
        for (_, prev), (line, cur) in zip(parsed, parsed[1:]):
            if cur.lo <= prev.hi:
                report.fail(line, "bin_lo", f"bin {cur.label()} overlaps or precedes bin {prev.label()}")
        if not report.fatal and math.fsum(b.count for _, b in parsed) <= 0:
            report.fail(parsed[0][0], "count", "total count must be positive")
    return _finish(report, lambda: CohortSpec(tuple(b for _, b in parsed)))


def dump_cohort(spec: CohortSpec, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(COHORT_COLUMNS)
    for b in spec.bins:
        w.writerow([b.lo, b.hi, _fmt(b.count)])


# -- subjects ---------------------------------------------------------------

def load_subjects(source):
    """Load ``age,sex,marital_status`` rows; bad rows are skipped with a diagnostic."""
    report = ParseReport()
    rows = _read_rows(source, SUBJECT_COLUMNS, report)

    def parse(v):
        age = _col(v, "age", lambda v, c: _number(v, c, integer=True, minimum=0))
        sex = _col(v, "sex", lambda v, c: Sex.parse(v[c]))
        status = _col(v, "marital_status", lambda v, c: MaritalStatus.parse(v[c]))
        return Subject(age, sex, status)

    parsed = _parse_each(rows, report, parse, fatal=False)
    if not report.fatal and len(parsed) < 2:
        report.fail(0, "", "need at least two valid subjects")
    return _finish(report, lambda: [s for _, s in parsed])


def dump_subjects(subjects: Iterable[Subject], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(SUBJECT_COLUMNS)
    for s in subjects:
        w.writerow([s.age, s.sex.value, s.status.value])


# -- relative-risk tables ---------------------------------------------------

def load_risk_table(source):
    """Load ``sex,cause,anchor_age,status,multiplier`` rows into a table."""
    report = ParseReport()
    rows = _read_rows(source, RISK_COLUMNS, report)

    def parse(v):
        sex = _col(v, "sex", lambda v, c: Sex.parse(v[c]))
        cause = v["cause"].strip().lower()
        if not cause:
            raise _ColumnError("cause", "cause label is empty")
        age = _col(v, "anchor_age", lambda v, c: _number(v, c, integer=True, minimum=0))
        status = _col(v, "status", lambda v, c: MaritalStatus.parse(v[c]))
        mult = _col(v, "multiplier", lambda v, c: _number(v, c))
        if not mult > 0:
            raise _ColumnError("multiplier", f"multiplier must be positive, got {mult}")
        if status is MaritalStatus.MARRIED and mult != 1.0:
            raise _ColumnError("multiplier", "married is the reference category and must be 1.0")
        return (sex, cause, age), status, mult

    parsed = _parse_each(rows, report, parse, fatal=True)
    entries: dict = {}
    first_line: dict = {}
    if not report.fatal:
        for line, (key, status, mult) in parsed:
            row = entries.setdefault(key, {})
            first_line.setdefault(key, line)
            if status in row:
                report.fail(line, "status", f"duplicate {status.value} entry for {key[0].value}/{key[1]}/{key[2]}")
                continue
            row[status] = mult
    if not report.fatal:
        for key, row in entries.items():
            try:
                RelativeRiskTable({key: row})
            except ValidationError as err:
                report.fail(first_line[key], "status", str(err))
    return _finish(report, lambda: RelativeRiskTable(entries))


def dump_risk_table(table: RelativeRiskTable, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(RISK_COLUMNS)
    order = {s: i for i, s in enumerate(MaritalStatus)}
    for (sex, cause, age) in sorted(table.entries, key=lambda k: (k[0].value, k[1], k[2])):
        row = table.entries[(sex, cause, age)]
        for status in sorted(row, key=order.get):
            w.writerow([sex.value, cause, age, status.value, _fmt(row[status])])


# -- compositions -----------------------------------------------------------

def load_composition(source):
    """Load ``status,proportion`` rows; proportions must sum to 1 within 1e-6."""
    report = ParseReport()
    rows = _read_rows(source, COMPOSITION_COLUMNS, report)

    def parse(v):
        status = _col(v, "status", lambda v, c: MaritalStatus.parse(v[c]))
        share = _col(v, "proportion", lambda v, c: _number(v, c, minimum=0))
        return status, share

    parsed = _parse_each(rows, report, parse, fatal=True)
    shares: dict = {}
    if not report.fatal:
        for line, (status, share) in parsed:
            if status in shares:
                report.fail(line, "status", f"duplicate status {status.value}")
            shares[status] = share
    if not report.fatal:
        total = math.fsum(shares.values())
        if abs(total - 1.0) > COMPOSITION_PARSE_TOLERANCE:
            report.fail(parsed[-1][0], "proportion", f"proportions sum to {total:.9g}, not 1")
    return _finish(report, lambda: MaritalComposition.normalized(shares))


def dump_composition(comp: MaritalComposition, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(COMPOSITION_COLUMNS)
    for status in MaritalStatus:
        if status in comp.shares:
            w.writerow([status.value, _fmt(comp.shares[status])])


# -- counties ---------------------------------------------------------------

def load_counties(source):
    """Load ``unit_id,median_age,f65,death_rate`` rows (F65 in percentage points).

    If every F65 value is below 1 the file is probably on a fraction scale;
    that produces a warning, not a conversion.
    """
    report = ParseReport()
    rows = _read_rows(source, COUNTY_COLUMNS, report)
    seen = set()

    def parse(v):
        uid = v["unit_id"]
        if not uid:
            raise _ColumnError("unit_id", "unit_id is empty")
        if uid in seen:
            raise _ColumnError("unit_id", f"duplicate unit_id {uid!r}")
        ma = _col(v, "median_age", lambda v, c: _number(v, c, minimum=0))
        f65 = _col(v, "f65", lambda v, c: _number(v, c, minimum=0))
        if f65 > 100:
            raise _ColumnError("f65", f"f65 is in percentage points and cannot exceed 100, got {f65}")
        rate = _col(v, "death_rate", lambda v, c: _number(v, c, minimum=0))
        seen.add(uid)
        return CountyRecord(uid, ma, f65, rate)

    parsed = _parse_each(rows, report, parse, fatal=False)
    if not report.fatal and not parsed:
        report.fail(0, "", "no valid county rows")
    if parsed and all(u.f65 < 1 for _, u in parsed):
        report.warnings.append(
            "suspected fraction scale: every f65 value is below 1, expected percentage points (0-100)"
        )
    return _finish(report, lambda: [u for _, u in parsed])


def dump_counties(units: Iterable[CountyRecord], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(COUNTY_COLUMNS)
    for u in units:
        w.writerow([u.unit_id, _fmt(u.median_age), _fmt(u.f65), _fmt(u.death_rate)])


# -- outputs ----------------------------------------------------------------

def dump_projection(projection, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(PROJECTION_COLUMNS)
    for age, year, deaths in projection.rows():
        w.writerow([age, year, _fmt(deaths)])


def dump_dispersion(reports, stream, header_comment: str | None = None) -> None:
    if header_comment:
        stream.write(f"# {header_comment}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(DISPERSION_COLUMNS)
    for r in reports:
        w.writerow([r.metric, _fmt(r.mean), _fmt(r.sd), "" if r.cv is None else _fmt(r.cv), r.n])


def _fmt(x) -> str:
    x = float(x)
    if math.isfinite(x) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def open_output(directory, name: str):
    os.makedirs(directory, exist_ok=True)
    return open(os.path.join(directory, name), "w", encoding="utf-8", newline="")
