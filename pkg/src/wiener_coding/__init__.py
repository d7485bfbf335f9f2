"""Event-driven sampling and source coding of a Wiener process.

A sampler watches the process and transmits one of four codewords when the
increment since the last sample crosses a constant band threshold or one of
two linearly growing catch-up thresholds.  The package provides the
closed-form event statistics, hitting-time analytics, exact and large-slope
MSE/sampling-rate models, an optimal code-length/threshold optimizer, and a
discrete-time simulator that validates the analytics.
"""

from .code_optimizer import (
    LENGTH_CAP,
    DinkelbachResult,
    KtildeReport,
    OptimizationResult,
    QpInstance,
    QpSolution,
    RateConstraint,
    build_qp,
    dinkelbach_solve,
    integer_oracle,
    optimize_threshold,
    solve_qp,
    verify_ktilde_negative,
)
from .errors import (
    HorizonError,
    InfeasibleError,
    ModelError,
    ParameterError,
    SearchError,
    UnsupportedConfigurationError,
    WienerCodingError,
)
from .gauss_stats import (
    EventProbabilities,
    PartialMoments,
    SchemeConstants,
    ThresholdConfig,
    event_probabilities,
    gauss_pdf,
    gauss_tail,
    partial_moments,
    scheme_constants,
)
from .hitting_times import (
    DriftHitSpec,
    band_exit_lower_prob,
    band_exit_upper_prob,
    hit_moments,
    laplace_transform,
    sample_hit_time,
    sample_hit_times,
)
from .mse_model import (
    BandStop,
    Codebook,
    DeterministicStop,
    IntegralCheck,
    MseBreakdown,
    SlopedStop,
    ideal_benchmark_mse,
    mse_exact,
    mse_integral_oracle,
    mse_large_mu,
    sampling_rate,
    scale_to_sigma,
)
from .simulator import (
    CycleLog,
    CycleRecord,
    IndependenceResult,
    SimConfig,
    SimulationReport,
    length_independence_test,
    run,
    run_benchmark,
)

__version__ = "0.1.0"
