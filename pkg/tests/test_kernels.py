"""The compiled and pure-Python kernels must agree."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohort_bias_lab import _backend, _pykernels

try:
    from cohort_bias_lab import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_backend_name_is_known():
    assert _backend.BACKEND in ("python", "cython")


@needs_ext
def test_extension_selected_by_default():
    assert _backend.BACKEND == "cython"


@needs_ext
@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 110), st.floats(0, 1e4)), min_size=1, max_size=30),
       st.integers(1, 30))
def test_project_cells_agree(rows, years):
    ages = np.array([r[0] for r in rows], dtype=float)
    counts = np.array([r[1] for r in rows])
    a = _pykernels.project_cells(ages, counts, 0.11, 0.082, years)
    b = _ckernels.project_cells(ages, counts, 0.11, 0.082, years)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-300)


@needs_ext
@given(st.integers(0, 90), st.lists(st.integers(0, 20), min_size=1, max_size=40))
def test_grouped_median_agree(lo, counts):
    ages = list(range(lo, lo + len(counts)))
    a = _pykernels.grouped_median(ages, [float(c) for c in counts])
    b = _ckernels.grouped_median(ages, counts)
    if np.isnan(a):
        assert np.isnan(b)
    else:
        assert a == b


def test_grouped_median_empty():
    assert np.isnan(_pykernels.grouped_median([40, 41], [0.0, 0.0]))


def test_falls_back_when_extension_missing():
    import subprocess
    import sys
    code = ("import sys; sys.modules['cohort_bias_lab._ckernels'] = None\n"
            "import cohort_bias_lab; print(cohort_bias_lab.BACKEND)")
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == "python"
