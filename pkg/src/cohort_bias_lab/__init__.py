"""Expected-death projections for clinical-trial study groups.

Two demographic factors that trial reports rarely document move all-cause
death counts: the marital composition of each group and the age spread of
its oldest members. This package projects expected deaths under a Gompertz
hazard, measures how much the unreported within-bracket age placement can
change them, adjusts rates for marital composition, and checks how well
simple randomization balances these factors.
"""
from ._backend import BACKEND
from .bertillon import (
    MaritalComposition,
    MaritalStatus,
    RelativeRiskTable,
    Sex,
    composition_adjusted_rate,
    composition_factor,
    imbalance_excess_deaths,
    relative_rate,
)
from .cohort import (
    AgeBin,
    CohortSpec,
    Explicit,
    PointMass,
    SensitivityBounds,
    Uniform,
    bin_count_delta_deaths,
    bin_deaths,
    expand,
    fraction_over,
    median_age,
    sensitivity_bounds,
)
from .errors import (
    CohortBiasError,
    DegenerateInputError,
    DomainError,
    RiskKeyError,
    SingularFitError,
    UnsupportedError,
    ValidationError,
)
from .gompertz import (
    AgeRoster,
    Calibration,
    DeathProjection,
    GompertzParams,
    calibrate,
    doubling_time,
    hazard,
    project,
)
from .randomization import (
    DispersionReport,
    Subject,
    cross_unit_cv,
    replicate_dispersion,
    split,
)
from .regression import CountyRecord, FitResult, ols_fit, predictor_contrast

__version__ = "0.1.0"
