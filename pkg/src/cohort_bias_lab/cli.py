"""Command-line entry point: ``cohort-bias-lab <subcommand> ...``.

Reports go to stdout as markdown. CSV outputs (projection cells, plot
series, dispersion tables) are written to ``--out`` or, failing that, to
``$COHORT_BIAS_LAB_OUT``; with neither set only stdout is produced.

Exit codes: 0 success, 1 invalid input or arguments, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import os
import sys

from . import bertillon, cohort, gompertz, ingest, randomization, regression
from .errors import CohortBiasError

OUT_ENV = "COHORT_BIAS_LAB_OUT"
EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class _Invalid(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _load(loader, path, out_err):
    resolved = ingest.resolve_input(path)
    value, report = loader(resolved)
    if report.rejections or report.warnings:
        print(report.summary(), file=out_err)
    if report.fatal:
        raise _Invalid(f"cannot use {path}")
    return value


def _params(args) -> gompertz.GompertzParams:
    return gompertz.GompertzParams(args.g0, args.a)


def _out_dir(args):
    return args.out or os.environ.get(OUT_ENV) or None


def _write(args, name, writer):
    directory = _out_dir(args)
    if directory is None:
        return None
    with ingest.open_output(directory, name) as fh:
        writer(fh)
    return os.path.join(directory, name)


def _stamp(args, lines):
    if args.stamp:
        lines.append(f"generated: {datetime.datetime.now().isoformat(timespec='seconds')}")


def _fmt(x, digits=1):
    return f"{x:.{digits}f}"


# -- project ----------------------------------------------------------------

def cmd_project(args, out, err) -> int:
    spec = _load(ingest.load_cohort, args.cohort, err)
    params = _params(args)
    projection = gompertz.project(params, cohort.expand(spec), args.years)
    lines = [
        f"# Expected deaths: {os.path.basename(args.cohort)}",
        "",
        f"hazard: g0={params.g0:g} per 1,000, a={params.a:g} per year; years={args.years}",
        "",
        "| bin | count | expected deaths |",
        "|---|---:|---:|",
    ]
    per_bin = []
    for b in spec.bins:
        d = projection.deaths_between(b.lo, b.hi)
        per_bin.append((b, d))
        lines.append(f"| {b.label()} | {ingest._fmt(b.count)} | {_fmt(d)} |")
    total = projection.grand_total
    lines.append(f"| total | {ingest._fmt(spec.total)} | {_fmt(total)} |")
    if args.observed is not None:
        cal = gompertz.calibrate(params, cohort.expand(spec), args.years, args.observed)
        lines += [
            "",
            f"observed deaths: {ingest._fmt(args.observed)}",
            f"calibration factor: {cal.factor:.4f} (observed / projected)",
            f"calibrated g0: {cal.params.g0:.6g}",
        ]
    if args.compare:
        other = _load(ingest.load_cohort, args.compare, err)
        run_params = params
        if args.observed is not None:
            run_params = cal.params
        lines += ["", f"## Bin-count differences vs {os.path.basename(args.compare)}", "",
                  "| bin | count | other count | extra deaths |", "|---|---:|---:|---:|"]
        for i, b in enumerate(spec.bins):
            delta = cohort.bin_count_delta_deaths(run_params, spec, other, i, args.years)
            lines.append(f"| {b.label()} | {ingest._fmt(b.count)} | {ingest._fmt(other.bins[i].count)} "
                         f"| {_fmt(delta)} |")
    _stamp(args, lines)
    print("\n".join(lines), file=out)

    def write_bins(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count", "deaths"])
        for b, d in per_bin:
            w.writerow([b.lo, b.hi, ingest._fmt(b.count), ingest._fmt(d)])

    _write(args, "projection.csv", lambda fh: ingest.dump_projection(projection, fh))
    _write(args, "bins.csv", write_bins)
    return EXIT_OK


# -- sensitivity ------------------------------------------------------------

def cmd_sensitivity(args, out, err) -> int:
    spec = _load(ingest.load_cohort, args.cohort, err)
    params = _params(args)
    index = len(spec.bins) - 1 if args.bin is None else args.bin
    if not 0 <= index < len(spec.bins):
        raise _Invalid(f"--bin {index} out of range 0..{len(spec.bins) - 1}")
    roster = cohort.expand(spec)
    if args.calibrate is not None:
        cal = gompertz.calibrate(params, roster, args.years, args.calibrate)
        params = cal.params
        reference, ref_label = args.calibrate, "observed deaths"
    else:
        reference = gompertz.project(params, roster, args.years).grand_total
        ref_label = "projected deaths"
    bounds = cohort.sensitivity_bounds(params, spec, index, args.years)
    b = spec.bins[index]
    lines = [
        f"# Within-bin sensitivity: bin {b.label()} ({ingest._fmt(b.count)} subjects)",
        "",
        f"hazard: g0={params.g0:.6g} per 1,000, a={params.a:g} per year; years={args.years}",
    ]
    if args.calibrate is not None:
        lines.append(f"calibration factor: {cal.factor:.4f}")
    lines += [
        "",
        "| placement | expected deaths |",
        "|---|---:|",
        f"| all at age {b.lo} | {_fmt(bounds.youngest)} |",
        f"| uniform | {_fmt(bounds.uniform)} |",
        f"| all at age {b.hi} | {_fmt(bounds.oldest)} |",
        "",
        f"spread: {_fmt(bounds.spread)} deaths = {100 * bounds.spread / reference:.1f}% "
        f"of {_fmt(reference, 0)} {ref_label}",
    ]
    _stamp(args, lines)
    print("\n".join(lines), file=out)

    def write_bounds(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["placement", "age", "deaths"])
        w.writerow(["youngest", b.lo, ingest._fmt(bounds.youngest)])
        w.writerow(["uniform", "", ingest._fmt(bounds.uniform)])
        w.writerow(["oldest", b.hi, ingest._fmt(bounds.oldest)])

    def write_curve(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["age", "rate_per_1000"])
        lo, hi = spec.bins[0].lo, spec.bins[-1].hi + args.years
        for k in range(2 * (hi - lo) + 1):
            age = lo + k / 2
            w.writerow([ingest._fmt(age), ingest._fmt(gompertz.hazard(params, age))])

    def write_histogram(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count", "count_per_year_of_age", "selected"])
        for i, bb in enumerate(spec.bins):
            w.writerow([bb.lo, bb.hi, ingest._fmt(bb.count), ingest._fmt(bb.count / bb.width),
                        int(i == index)])

    _write(args, "sensitivity.csv", write_bounds)
    _write(args, "hazard_curve.csv", write_curve)
    _write(args, "histogram.csv", write_histogram)
    return EXIT_OK


# -- adjust-marital ---------------------------------------------------------

def cmd_adjust_marital(args, out, err) -> int:
    comp = _load(ingest.load_composition, args.composition, err)
    table = _load(ingest.load_risk_table, args.risk_table, err)
    factor = bertillon.composition_factor(comp, table, args.sex, args.cause, args.age)
    rate = bertillon.composition_adjusted_rate(args.base_rate, comp, table, args.sex, args.cause, args.age)
    lines = [
        f"# Marital-composition adjustment: {os.path.basename(args.composition)}",
        "",
        f"sex={args.sex} cause={args.cause} age={args.age:g}",
        "",
        "| status | share | multiplier |",
        "|---|---:|---:|",
    ]
    rows = []
    for status in bertillon.MaritalStatus:
        if status in comp.shares:
            m = bertillon.relative_rate(table, args.sex, args.cause, status, args.age)
            rows.append((status.value, comp.shares[status], m))
            lines.append(f"| {status.value} | {comp.shares[status]:.4f} | {m:.4f} |")
    lines += [
        "",
        f"composition factor: {factor:.4f}",
        f"married rate: {args.base_rate:g} per 1,000",
        f"adjusted rate: {rate:.4f} per 1,000",
    ]
    excess = None
    if args.compare:
        other = _load(ingest.load_composition, args.compare, err)
        excess = bertillon.imbalance_excess_deaths(
            args.base_deaths, comp, other, table, args.sex, args.cause, args.age)
        lines += [
            "",
            f"comparison group: {os.path.basename(args.compare)}",
            f"extra deaths from composition: {excess:.2f} "
            f"(baseline {args.base_deaths:g} deaths at the comparison group's composition)",
        ]
    _stamp(args, lines)
    print("\n".join(lines), file=out)

    def write_adjust(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["status", "share", "multiplier"])
        for status, share, m in rows:
            w.writerow([status, ingest._fmt(share), ingest._fmt(m)])
        w.writerow(["factor", "", ingest._fmt(factor)])
        w.writerow(["adjusted_rate", "", ingest._fmt(rate)])
        if excess is not None:
            w.writerow(["excess_deaths", "", ingest._fmt(excess)])

    _write(args, "marital_adjustment.csv", write_adjust)
    return EXIT_OK


# -- dispersion -------------------------------------------------------------

def cmd_dispersion(args, out, err) -> int:
    if args.splits < 2:
        raise _Invalid("--splits must be at least 2")
    reports = []
    comment = None
    if args.subjects:
        population = _load(ingest.load_subjects, args.subjects, err)
        reports += randomization.dispersion_table(population, args.splits, args.seed)
        comment = (f"rng={randomization.RNG_ALGORITHM} seed={args.seed} splits={args.splits} "
                   f"subjects={len(population)} group=P")
    if args.counties:
        units = _load(ingest.load_counties, args.counties, err)
        for name in ("median_age", "f65"):
            r = randomization.cross_unit_cv(units, name)
            reports.append(randomization.DispersionReport(
                f"county:{name}", r.mean, r.sd, r.cv, r.n, r.replications))
    if not reports:
        raise _Invalid("give --subjects and/or --counties")
    buf = io.StringIO()
    ingest.dump_dispersion(reports, buf, comment)
    text = buf.getvalue()
    lines = ["# Dispersion report", ""]
    if comment:
        lines += [comment, ""]
    lines += ["| metric | mean | sd | cv | n |", "|---|---:|---:|---:|---:|"]
    for r in reports:
        cv = "undefined" if r.cv is None else f"{r.cv:.5f}"
        lines.append(f"| {r.metric} | {r.mean:.5f} | {r.sd:.5f} | {cv} | {r.n} |")
    by = {r.metric: r for r in reports}
    for prefix in ("", "county:"):
        ma, f65 = by.get(prefix + "median_age"), by.get(prefix + "f65")
        if ma and f65 and ma.cv and f65.cv is not None:
            scope = "across units" if prefix else "across splits"
            lines += ["", f"CV(F65) / CV(median age) {scope}: {f65.cv / ma.cv:.2f}"]
    _stamp(args, lines)
    print("\n".join(lines), file=out)
    _write(args, "dispersion.csv", lambda fh: fh.write(text))
    return EXIT_OK


# -- regress ----------------------------------------------------------------

def cmd_regress(args, out, err) -> int:
    units = _load(ingest.load_counties, args.counties, err)
    contrast = regression.predictor_contrast(units)
    lines = [
        f"# Death rate vs predictors: {os.path.basename(args.counties)} ({len(units)} units)",
        "",
        "| predictor | slope | slope se | intercept | intercept se | r2 |",
        "|---|---:|---:|---:|---:|---:|",
    ]
    for name, fit in (("f65", contrast.f65), ("median_age", contrast.median_age)):
        r2 = "undefined" if fit.r_squared is None else f"{fit.r_squared:.4f}"
        lines.append(f"| {name} | {fit.slope:.4f} | {fit.slope_se:.4f} | {fit.intercept:.4f} "
                     f"| {fit.intercept_se:.4f} | {r2} |")
        if fit.degenerate:
            lines.append(f"|  | degenerate: {fit.reason} | | | | |")
    a, b = contrast.f65.r_squared, contrast.median_age.r_squared
    if a is not None and b is not None:
        better = "f65" if a > b else "median_age"
        lines += ["", f"better predictor by r2: {better}"]
    _stamp(args, lines)
    print("\n".join(lines), file=out)

    def write_fits(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["predictor", "slope", "slope_se", "intercept", "intercept_se", "r_squared", "n",
                    "degenerate"])
        for name, fit in (("f65", contrast.f65), ("median_age", contrast.median_age)):
            w.writerow([name, ingest._fmt(fit.slope), ingest._fmt(fit.slope_se), ingest._fmt(fit.intercept),
                        ingest._fmt(fit.intercept_se),
                        "" if fit.r_squared is None else ingest._fmt(fit.r_squared), fit.n,
                        int(fit.degenerate)])

    _write(args, "regression.csv", write_fits)
    return EXIT_OK


# -- wiring -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cohort-bias-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--out", help=f"output directory for CSV files (default: ${OUT_ENV})")
    common.add_argument("--stamp", action="store_true", help="add a generation timestamp to the report")

    hazard = _Parser(add_help=False)
    hazard.add_argument("--g0", type=float, default=gompertz.DEFAULT_G0,
                        help="baseline death rate per 1,000 (default %(default)s)")
    hazard.add_argument("--a", type=float, default=gompertz.DEFAULT_A,
                        help="hazard growth rate per year of age (default %(default)s)")
    hazard.add_argument("--years", type=int, default=6, help="trial length in years (default %(default)s)")

    p = sub.add_parser("project", parents=[common, hazard], help="expected deaths of a binned cohort")
    p.add_argument("--cohort", required=True, help="CSV with bin_lo,bin_hi,count")
    p.add_argument("--observed", type=float, help="observed deaths; prints the g0 calibration factor")
    p.add_argument("--compare", help="second cohort CSV with the same bins; prints per-bin extra deaths")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("sensitivity", parents=[common, hazard],
                       help="deaths of one bin under youngest/uniform/oldest placement")
    p.add_argument("--cohort", required=True)
    p.add_argument("--bin", type=int, help="bin index, 0-based (default: oldest bin)")
    p.add_argument("--calibrate", type=float, metavar="OBSERVED",
                   help="rescale g0 so the whole cohort projects to OBSERVED deaths")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("adjust-marital", parents=[common],
                       help="death rate adjusted for marital composition")
    p.add_argument("--composition", required=True, help="CSV with status,proportion")
    p.add_argument("--risk-table", default="fig1_male_risk.csv",
                   help="CSV with sex,cause,anchor_age,status,multiplier (default: shipped male table)")
    p.add_argument("--sex", default="male")
    p.add_argument("--cause", default="heart")
    p.add_argument("--age", type=float, required=True)
    p.add_argument("--base-rate", type=float, default=1.0, help="married death rate per 1,000")
    p.add_argument("--compare", help="second composition CSV (group D)")
    p.add_argument("--base-deaths", type=float, default=100.0,
                   help="expected deaths at the comparison group's composition (default %(default)s)")
    p.set_defaults(func=cmd_adjust_marital)

    p = sub.add_parser("dispersion", parents=[common], help="CV of group statistics under randomization")
    p.add_argument("--subjects", help="CSV with age,sex,marital_status")
    p.add_argument("--counties", help="CSV with unit_id,median_age,f65,death_rate (cross-unit CV)")
    p.add_argument("--splits", type=int, default=1000, help="number of random splits (default %(default)s)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("regress", parents=[common], help="OLS of death rate on F65 and on median age")
    p.add_argument("--counties", required=True)
    p.set_defaults(func=cmd_regress)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, err)
    except (_Invalid, CohortBiasError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
