"""Two-environment Gaussian multiple-access channel toolkit.

Construct optimal/worst-case/interpolated codebooks, simulate transmissions
over a two-environment Gaussian channel, recover the active support with
distance-, least-squares- and invariance-based estimators, evaluate
closed-form error-probability bounds, and reproduce the standard figure
suite via seeded Monte Carlo.
"""

from .bounds import (
    BoundQuery,
    BoundValue,
    error_exponent,
    fano1_bound,
    fano2_bound,
    prop1_bound,
    shannon_bound,
)
from .channel import ChannelConfig, ReceivedSignal, draw_support, transmit
from .codebook import (
    Codebook,
    EnvironmentSplit,
    load_csv,
    make_inter,
    make_simplex,
    make_uniform,
    sample_random_uniform_env,
    save_csv,
)
from .decoders import DecodeOutcome, mdd, ols_mdd, variance_match_decode
from .errors import BoundDomainError, IcpmacError, ParameterError
from .experiments import (
    ExperimentSpec,
    GridPoint,
    PointResult,
    figure_preset,
    results_csv,
    run_experiment,
    run_point,
    wilson_interval,
)
from .icp_baselines import IcpTestConfig, icp_coefficient_test, icp_residual_test

__version__ = "0.1.0"

__all__ = [
    "BoundDomainError",
    "BoundQuery",
    "BoundValue",
    "ChannelConfig",
    "Codebook",
    "DecodeOutcome",
    "EnvironmentSplit",
    "ExperimentSpec",
    "GridPoint",
    "IcpTestConfig",
    "IcpmacError",
    "ParameterError",
    "PointResult",
    "ReceivedSignal",
    "draw_support",
    "error_exponent",
    "fano1_bound",
    "fano2_bound",
    "figure_preset",
    "icp_coefficient_test",
    "icp_residual_test",
    "load_csv",
    "make_inter",
    "make_simplex",
    "make_uniform",
    "mdd",
    "ols_mdd",
    "prop1_bound",
    "results_csv",
    "run_experiment",
    "run_point",
    "sample_random_uniform_env",
    "save_csv",
    "shannon_bound",
    "transmit",
    "variance_match_decode",
    "wilson_interval",
    "__version__",
]
