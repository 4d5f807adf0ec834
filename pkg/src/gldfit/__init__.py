"""Generalized lambda distribution fitting via probability density quantiles.

The estimator works in two steps: the shape parameters minimize the squared
distance between the empirical probability density quantile and the model's
on a probability grid, then location and inverse scale follow in closed form
from the sample quartiles.  Fits are fast enough that bootstrap interval
estimation and Monte-Carlo benchmarking are practical, and both ship here.

Quick start::

    import numpy as np
    from gldfit import GldParams, SortedSample, fit, sample

    data = sample(GldParams(0.0, 1.0, 1.5, 1.5), n=1000, seed=7)
    result = fit(SortedSample.from_data(data))
    print(result.params)
"""

from ._version import __version__
from .bootstrap import (
    DEFAULT_B_BCA,
    DEFAULT_B_PERCENTILE,
    BootstrapInterval,
    Functional,
    bca_interval,
    percentile_interval,
    resample_estimates,
    two_sample_location_diff,
)
from .errors import DataError, DegenerateSampleError, EstimationError, NumericError
from .fitting import (
    FitResult,
    QuartileSet,
    ShapeFit,
    fit,
    fit_shape,
    match_location_scale,
    objective,
    sample_quantile,
    standard_quantile,
)
from .gld import (
    GldParams,
    Support,
    cdf,
    density_quantile,
    kappa,
    pdq,
    quantile,
    quantile_density,
    sample,
    support,
)
from .gof import KsResult, ks_pvalue, ks_statistic, ks_test, qq_data
from .harness import (
    BENCHMARK_SETTINGS,
    EstimatorHandle,
    ExperimentConfig,
    MetricRow,
    pdq_estimator,
    run_coverage_experiment,
    run_error_experiment,
    run_timing,
)
from .qdensity import (
    BandwidthSpec,
    EmpiricalPdq,
    ProbabilityGrid,
    SortedSample,
    bandwidth,
    empirical_pdq,
    make_grid,
    qhat,
)

__all__ = [
    "__version__",
    "GldParams",
    "Support",
    "quantile",
    "quantile_density",
    "density_quantile",
    "kappa",
    "pdq",
    "sample",
    "cdf",
    "support",
    "SortedSample",
    "ProbabilityGrid",
    "BandwidthSpec",
    "EmpiricalPdq",
    "qhat",
    "bandwidth",
    "empirical_pdq",
    "make_grid",
    "FitResult",
    "ShapeFit",
    "QuartileSet",
    "objective",
    "sample_quantile",
    "standard_quantile",
    "match_location_scale",
    "fit_shape",
    "fit",
    "Functional",
    "BootstrapInterval",
    "DEFAULT_B_PERCENTILE",
    "DEFAULT_B_BCA",
    "resample_estimates",
    "percentile_interval",
    "bca_interval",
    "two_sample_location_diff",
    "KsResult",
    "ks_statistic",
    "ks_pvalue",
    "ks_test",
    "qq_data",
    "BENCHMARK_SETTINGS",
    "ExperimentConfig",
    "EstimatorHandle",
    "MetricRow",
    "pdq_estimator",
    "run_error_experiment",
    "run_coverage_experiment",
    "run_timing",
    "DataError",
    "DegenerateSampleError",
    "EstimationError",
    "NumericError",
]
