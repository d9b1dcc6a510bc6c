"""Quasi-Hermitian oscillator-bath model and its family of Hermitian counterparts."""

from .model import (
    InvalidRegime,
    Metric2,
    ModelParams,
    Unitary2,
    bi_system,
    build_h1,
    dyson_S,
    hermitian_counterpart,
    metric,
    propagator,
    quasi_hermiticity_residual,
    random_unitary2,
    spectrum,
)
from .dynamics import (
    StateH1,
    Trajectory,
    evolve_amplitudes,
    hermitian_state,
    mean_p,
    mean_q,
    population_p,
    population_q,
    reduced_rho_H,
    rho_hW,
)
from .analytics import (
    Side,
    averaged_state,
    classify_W,
    concurrence,
    disentanglement_times,
    entropy,
    entropy_curve,
    eigenvalue_splitting,
    estimate_period,
    factor_metric,
    wootters_concurrence,
)
from .config import ConfigError, ScenarioConfig
from .dyson import MetricFlow, UnitaryPath, dyson_demo, solve_w_ode

__version__ = "0.1.0"
