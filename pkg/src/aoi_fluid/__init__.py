"""Age-of-Information metrics for an energy-harvesting transmitter modeled as
a fluid-reservoir-regulated FCFS queue."""

from .analytic import (
    AoiMetrics,
    aoi_metrics_infinite,
    find_optimal_lambda,
    mean_aoi_inf_inf,
    mean_peak_aoi_inf,
    mean_service_inf,
    mean_sojourn_inf,
    mean_waiting_inf,
    sojourn_ccdf,
    waiting_ccdf,
)
from .errors import (
    EmptyFeasibleRegion,
    InsufficientData,
    InvalidConfig,
    RootNotFound,
    SingularSystem,
    StabilityViolation,
)
from .finite_buffer import (
    StationaryDistribution,
    find_xi0,
    mean_peak_aoi_finite,
    mean_peak_aoi_mm11,
    poly_p,
    solve_stationary_finite,
)
from .model import (
    DerivedConstants,
    ModelParams,
    derived_constants,
    eta,
    sigma,
    stability_finite_buffer,
    stability_infinite,
    zeta,
)
from .sim import (
    Estimate,
    ReplicationTrace,
    SimConfig,
    SimEstimate,
    SimState,
    advance_reservoir,
    interdeparture_crosscheck,
    run_replication,
    simulate,
)

__all__ = [
    "AoiMetrics",
    "DerivedConstants",
    "EmptyFeasibleRegion",
    "Estimate",
    "InsufficientData",
    "InvalidConfig",
    "ModelParams",
    "ReplicationTrace",
    "RootNotFound",
    "SimConfig",
    "SimEstimate",
    "SimState",
    "SingularSystem",
    "StabilityViolation",
    "StationaryDistribution",
    "advance_reservoir",
    "aoi_metrics_infinite",
    "derived_constants",
    "eta",
    "find_optimal_lambda",
    "find_xi0",
    "interdeparture_crosscheck",
    "mean_aoi_inf_inf",
    "mean_peak_aoi_finite",
    "mean_peak_aoi_inf",
    "mean_peak_aoi_mm11",
    "mean_service_inf",
    "mean_sojourn_inf",
    "mean_waiting_inf",
    "poly_p",
    "run_replication",
    "sigma",
    "simulate",
    "sojourn_ccdf",
    "solve_stationary_finite",
    "stability_finite_buffer",
    "stability_infinite",
    "waiting_ccdf",
    "zeta",
]
