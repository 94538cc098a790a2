"""Pure-Python kernels. Reference semantics for ``_ckernels``.

Both modules expose the same three functions and must agree to the last
few ulps; ``tests/test_kernels.py`` checks this.
"""
import math

import numpy as np

NAME = "python"


def project_cells(ages, counts, g0, a, years):
    """Expected deaths per (starting age, trial year).

    Annual recursion: the hazard is taken at the age held at the start of
    each year, ``m = n * g0 * exp(a * age) / 1000`` and ``n -= m``. The
    annual death probability is capped at 1 so survivors never go negative.
    """
    ages = np.asarray(ages, dtype=np.float64)
    alive = np.array(counts, dtype=np.float64)
    cells = np.empty((ages.shape[0], int(years)), dtype=np.float64)
    for t in range(int(years)):
        q = np.minimum(g0 * np.exp(a * (ages + t)) / 1000.0, 1.0)
        dead = alive * q
        cells[:, t] = dead
        alive = alive - dead
    return cells


def grouped_median(ages, counts):
    """Median of an age histogram, each age spread uniformly over [x-0.5, x+0.5).

    When the cumulative count hits exactly one half at the end of an
    age-year, the CDF is flat until the next occupied age and the midpoint
    of that flat stretch is returned. Returns nan for an empty histogram.
    """
    total = 0.0
    for c in counts:
        if c > 0:
            total += c
    if total <= 0:
        return math.nan
    half = total / 2.0
    cum = 0.0
    n = len(counts)
    for k in range(n):
        c = counts[k]
        if c <= 0:
            continue
        after = cum + c
        if after > half:
            return (float(ages[k]) - 0.5) + (half - cum) / c
        if after == half:
            upper = float(ages[k]) + 0.5
            for j in range(k + 1, n):
                if counts[j] > 0:
                    return (upper + (float(ages[j]) - 0.5)) / 2.0
            return upper
        cum = after
    return math.nan


def group_metrics(perms, n_p, age_idx, age_lo, n_ages, cell_codes, n_cells, threshold_idx):
    """Median age, share at or above a threshold age and cell shares of group P.

    ``perms`` holds one permutation of subject indices per row; the first
    ``n_p`` entries of a row form group P. ``age_idx`` is ``age - age_lo``.
    """
    perms = np.asarray(perms)
    age_idx = np.asarray(age_idx)
    cell_codes = np.asarray(cell_codes)
    reps = perms.shape[0]
    support = [age_lo + k for k in range(n_ages)]
    medians = np.empty(reps)
    over = np.empty(reps)
    cells = np.empty((reps, n_cells))
    for r in range(reps):
        members = perms[r, :n_p]
        hist = np.bincount(age_idx[members], minlength=n_ages).astype(np.float64)
        medians[r] = grouped_median(support, hist.tolist())
        over[r] = float(hist[threshold_idx:].sum()) / n_p
        cells[r] = np.bincount(cell_codes[members], minlength=n_cells) / n_p
    return medians, over, cells
