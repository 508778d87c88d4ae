"""Ergodic sums of irrational circle rotations.

Library + CLI for computing orbit sums of the rotation x -> {x + alpha},
their continued-fraction arithmetic, the distributional-limit experiments
(annealed Cauchy laws, temporal CLT, Beck scaling, fixed-time densities,
non-convergence probes, the Tirnakli-Tsallis protocol), and an independent
computation of Kesten's constant rho = 4 pi.
"""

__version__ = "0.1.0"

from .arithmetic import (
    BUILTIN_POINTS,
    CFExpansion,
    E_MINUS_2,
    GOLDEN_MEAN,
    LevyEstimate,
    PI_MINUS_3,
    PrecisionExhausted,
    SQRT2_MINUS_1,
    UnitPoint,
    continued_fraction,
    estimate_levy_constant,
    is_badly_approximable,
    levy_ratio,
    parse_unit_point,
)
from .distributions import (
    CauchyFit,
    DegenerateSample,
    EmpiricalDist,
    FitDiverged,
    GaussianFit,
    Histogram,
    MomentSummary,
    QGaussianFit,
    cauchy_cdf,
    cauchy_quantile,
    density_at_zero,
    fit_cauchy,
    fit_gaussian,
    fit_q_gaussian,
    ks_distance,
    ks_distance_two_sample,
    make_histogram,
    moment_summary,
    q_gaussian_pdf,
    q_normalization,
)
from .dynamics import (
    Observable,
    OrbitSpec,
    SumSeries,
    ergodic_sum_final,
    ergodic_sum_series,
    evaluate,
    rotate,
)
from .experiments import (
    BeckScalingReport,
    DegenerateNormalization,
    DensityEstimate,
    ExperimentConfig,
    ProbeReport,
    RHO_SPATIAL,
    RHO_TEMPORAL,
    TTProtocolReport,
    TemporalNormalization,
    run_annealed_spatial,
    run_annealed_temporal,
    run_beck_scaling,
    run_experiment,
    run_nonconvergence_probe,
    run_spatial_density,
    run_temporal,
    run_tt_protocol,
)
from .kesten_constant import (
    IntegralResult,
    KestenComputation,
    TAU_ANALYTIC,
    closed_form_on_triangle,
    compute_I,
    compute_rho,
    integrand_series,
    kesten_report,
)
