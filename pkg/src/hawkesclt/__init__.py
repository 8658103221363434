"""Simulation and deterministic numerics for critical marked Hawkes processes."""

__version__ = "0.1.0"

from .kernels import MittagLeffler, ParetoTail, StableDensity, make_kernel  # noqa: E402
from .marks import DiracOne, ExponentialMean1, GammaMean1, ParetoMean1, make_marks  # noqa: E402
from .mittag_leffler import mittag_leffler  # noqa: E402
from .renewal import (  # noqa: E402
    Grid,
    ResolventTable,
    SolverState,
    StepFunction,
    build_resolvent,
    check_tightness,
    exact_mean_N,
    g_alpha,
    scaled_w_integral,
    solve_g,
)
from .simulator import (  # noqa: E402
    BetaSibuya,
    PoissonOfMark,
    simulate_cluster,
    simulate_counts,
    simulate_hawkes,
    simulate_thinning,
)
from .stable import (  # noqa: E402
    LimitModel,
    StableParams,
    sample_positive_stable,
    sample_skewed_stable,
    simulate_gaussian_limit,
    simulate_limit_process,
)

__all__ = [
    "MittagLeffler",
    "ParetoTail",
    "StableDensity",
    "make_kernel",
    "DiracOne",
    "ExponentialMean1",
    "GammaMean1",
    "ParetoMean1",
    "make_marks",
    "mittag_leffler",
    "Grid",
    "ResolventTable",
    "SolverState",
    "StepFunction",
    "build_resolvent",
    "check_tightness",
    "exact_mean_N",
    "g_alpha",
    "scaled_w_integral",
    "solve_g",
    "BetaSibuya",
    "PoissonOfMark",
    "simulate_cluster",
    "simulate_counts",
    "simulate_hawkes",
    "simulate_thinning",
    "LimitModel",
    "StableParams",
    "sample_positive_stable",
    "sample_skewed_stable",
    "simulate_gaussian_limit",
    "simulate_limit_process",
]
