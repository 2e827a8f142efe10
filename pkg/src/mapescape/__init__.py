"""Escape times between competing attractors of a weakly nonlinear noisy map.

The package simulates a two-component cubic map with additive Gaussian
noise, reduces the escape problem to a one-dimensional valley path between
a stable fixed point and an adjacent saddle, and checks the measured mean
log escape time against the closed-form law
T = (C/tau) * exp((2 tau / eps) * delta_U).
"""

__version__ = "0.1.0"

from .model import (
    RAW,
    RESCALED,
    SADDLE,
    STABLE_FP,
    UNSTABLE_ORIGIN,
    CriticalPoint,
    MapParams,
    NoiseStream,
    State2D,
    coexistence_window,
    escape_anchors,
    fixed_points,
    iterate_raw,
    iterate_transformed,
    jacobian_transformed,
    noise_sample,
    potential,
    potential_grad,
    potential_grad_xy,
    potential_xy,
    rescale,
    step_raw,
    step_transformed,
    unrescale,
)
from .reduction import (
    ReducedSystem,
    ValleyPath,
    WrongBranchError,
    build_reduced_system,
    export_path_csv,
    reduced_step,
    reduced_system_for,
    trace_valley_path,
)
from .mfpt import (
    AbsorbingBoundary,
    FptSample,
    MfptEstimate,
    build_boundary,
    empirical_density_1d,
    estimate_mfpt,
    oracle_mfpt_1d,
    run_trial,
)
from .theory import (
    CriticalPotentials,
    TheoryPrediction,
    barrier,
    critical_potentials,
    make_prediction,
    predicted_mfpt,
    prefactor,
    scaling_slope,
    wkb_density,
    wkb_residual,
)
from .experiment import (
    RegressionResult,
    RunRecord,
    SweepSpec,
    Table1Report,
    Table1Row,
    fit_scaling,
    load_records,
    persist_records,
    point_seed,
    reproduce_table1,
    run_sweep,
)

__all__ = [
    "__version__",
    "RAW",
    "RESCALED",
    "SADDLE",
    "STABLE_FP",
    "UNSTABLE_ORIGIN",
    "AbsorbingBoundary",
    "CriticalPoint",
    "CriticalPotentials",
    "FptSample",
    "MapParams",
    "MfptEstimate",
    "NoiseStream",
    "ReducedSystem",
    "RegressionResult",
    "RunRecord",
    "State2D",
    "SweepSpec",
    "Table1Report",
    "Table1Row",
    "TheoryPrediction",
    "ValleyPath",
    "WrongBranchError",
    "barrier",
    "build_boundary",
    "build_reduced_system",
    "coexistence_window",
    "critical_potentials",
    "empirical_density_1d",
    "escape_anchors",
    "estimate_mfpt",
    "export_path_csv",
    "fit_scaling",
    "fixed_points",
    "iterate_raw",
    "iterate_transformed",
    "jacobian_transformed",
    "load_records",
    "make_prediction",
    "noise_sample",
    "oracle_mfpt_1d",
    "persist_records",
    "point_seed",
    "potential",
    "potential_grad",
    "potential_grad_xy",
    "potential_xy",
    "predicted_mfpt",
    "prefactor",
    "reduced_step",
    "reduced_system_for",
    "reproduce_table1",
    "rescale",
    "run_sweep",
    "run_trial",
    "scaling_slope",
    "step_raw",
    "step_transformed",
    "trace_valley_path",
    "unrescale",
    "wkb_density",
    "wkb_residual",
]
