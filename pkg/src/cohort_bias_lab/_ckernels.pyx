# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same contract as ``_pykernels``."""
import numpy as np

from libc.math cimport exp, NAN

NAME = "cython"


def project_cells(ages, counts, double g0, double a, long years):
    cdef const double[::1] ag = np.ascontiguousarray(ages, dtype=np.float64)
    cdef const double[::1] cnt = np.ascontiguousarray(counts, dtype=np.float64)
    cdef Py_ssize_t n = ag.shape[0]
    out = np.empty((n, years), dtype=np.float64)
    cdef double[:, ::1] cells = out
    cdef Py_ssize_t i, t
    cdef double alive, q, dead
    with nogil:
        for i in range(n):
            alive = cnt[i]
            for t in range(years):
                q = g0 * exp(a * (ag[i] + t)) / 1000.0
                if q > 1.0:
                    q = 1.0
                dead = alive * q
                cells[i, t] = dead
                alive = alive - dead
    return out


cdef double _hist_median(const double[::1] h, long lo) noexcept nogil:
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t k, j
    cdef double total = 0.0, half, cum = 0.0, after, c, upper
    for k in range(n):
        if h[k] > 0:
            total += h[k]
    if total <= 0:
        return NAN
    half = total / 2.0
    for k in range(n):
        c = h[k]
        if c <= 0:
            continue
        after = cum + c
        if after > half:
            return (<double>(lo + k) - 0.5) + (half - cum) / c
        if after == half:
            upper = <double>(lo + k) + 0.5
            for j in range(k + 1, n):
                if h[j] > 0:
                    return (upper + (<double>(lo + j) - 0.5)) / 2.0
            return upper
        cum = after
    return NAN


def grouped_median(ages, counts):
    """Histogram median for a contiguous integer age support."""
    ag = np.asarray(ages, dtype=np.int64)
    if ag.shape[0] == 0:
        return NAN
    if np.any(np.diff(ag) != 1):
        from . import _pykernels
        return _pykernels.grouped_median(ages, counts)
    cdef const double[::1] h = np.ascontiguousarray(counts, dtype=np.float64)
    return _hist_median(h, <long>ag[0])


def group_metrics(perms, long n_p, age_idx, long age_lo, long n_ages,
                  cell_codes, long n_cells, long threshold_idx):
    cdef const long long[:, ::1] pm = np.ascontiguousarray(perms, dtype=np.int64)
    cdef const long long[::1] ai = np.ascontiguousarray(age_idx, dtype=np.int64)
    cdef const long long[::1] cc = np.ascontiguousarray(cell_codes, dtype=np.int64)
    cdef Py_ssize_t reps = pm.shape[0]
    medians_a = np.empty(reps, dtype=np.float64)
    over_a = np.empty(reps, dtype=np.float64)
    cells_a = np.zeros((reps, n_cells), dtype=np.float64)
    hist_a = np.zeros(n_ages, dtype=np.float64)
    cdef double[::1] medians = medians_a
    cdef double[::1] over = over_a
    cdef double[:, ::1] cells = cells_a
    cdef double[::1] hist = hist_a
    cdef Py_ssize_t r, i, k
    cdef long long s
    cdef double above
    with nogil:
        for r in range(reps):
            for k in range(n_ages):
                hist[k] = 0.0
            for i in range(n_p):
                s = pm[r, i]
                hist[ai[s]] += 1.0
                cells[r, cc[s]] += 1.0
            medians[r] = _hist_median(hist, age_lo)
            above = 0.0
            for k in range(threshold_idx, n_ages):
                above += hist[k]
            over[r] = above / n_p
            for k in range(n_cells):
                cells[r, k] = cells[r, k] / n_p
    return medians_a, over_a, cells_a
