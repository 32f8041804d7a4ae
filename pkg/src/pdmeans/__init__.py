"""pdmeans: means of positive definite matrices and mechanical verification
of the operator inequalities relating them."""

from .config import DEFAULT_TOL, ToleranceConfig
from .matfun import (
    NormKind,
    SpdMatrix,
    SymMatrix,
    eigh,
    loewner_leq,
    matrix_exp,
    matrix_log,
    matrix_power,
    norm,
    thompson_distance,
    validate_spd,
    validate_sym,
)
from .means2 import (
    ScalarBounds,
    furuta_bound,
    gen_kantorovich,
    geo_mean2,
    kantorovich,
    specht,
    spectral_bounds,
)
from .meansn import (
    IterationTrace,
    MeanProblem,
    WeightVector,
    chaotic_geometric_mean,
    karcher_mean,
    karcher_residual,
    lawson_lim_geometric,
    lawson_lim_weights,
    power_mean,
    weighted_arithmetic,
    weighted_harmonic,
)
from .maps import PositiveUnitalMap, apply_map, build_map
from .verify import (
    CheckResult,
    InstanceSpec,
    SuiteConfig,
    SuiteReport,
    make_instance,
    random_spd,
    registered_checks,
    run_check,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "ToleranceConfig",
    "NormKind",
    "SpdMatrix",
    "SymMatrix",
    "eigh",
    "loewner_leq",
    "matrix_exp",
    "matrix_log",
    "matrix_power",
    "norm",
    "thompson_distance",
    "validate_spd",
    "validate_sym",
    "ScalarBounds",
    "furuta_bound",
    "gen_kantorovich",
    "geo_mean2",
    "kantorovich",
    "specht",
    "spectral_bounds",
    "IterationTrace",
    "MeanProblem",
    "WeightVector",
    "chaotic_geometric_mean",
    "karcher_mean",
    "karcher_residual",
    "lawson_lim_geometric",
    "lawson_lim_weights",
    "power_mean",
    "weighted_arithmetic",
    "weighted_harmonic",
    "PositiveUnitalMap",
    "apply_map",
    "build_map",
    "CheckResult",
    "InstanceSpec",
    "SuiteConfig",
    "SuiteReport",
    "make_instance",
    "random_spd",
    "registered_checks",
    "run_check",
    "run_suite",
]
