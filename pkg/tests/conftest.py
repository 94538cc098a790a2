import pytest

from cohort_bias_lab import _backend, _pykernels, ingest

try:
    from cohort_bias_lab import _ckernels
except ImportError:
    _ckernels = None

KERNELS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])

# Filled by test_acceptance; printed once at the end of the run.
ACCEPTANCE_LINES = []


@pytest.fixture(params=KERNELS, ids=lambda k: k.NAME)
def backend(request, monkeypatch):
    """Run the test once per available kernel implementation."""
    monkeypatch.setattr(_backend, "kernels", request.param)
    return request.param


@pytest.fixture(scope="session")
def placebo():
    spec, report = ingest.load_cohort(ingest.data_path("lipid_placebo.csv"))
    assert not report.fatal
    return spec


@pytest.fixture(scope="session")
def drug():
    spec, report = ingest.load_cohort(ingest.data_path("lipid_drug.csv"))
    assert not report.fatal
    return spec


@pytest.fixture(scope="session")
def male_table():
    table, report = ingest.load_risk_table(ingest.data_path("fig1_male_risk.csv"))
    assert not report.fatal
    return table


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
