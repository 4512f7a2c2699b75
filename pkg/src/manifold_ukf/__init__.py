"""Unscented Kalman filtering on Lie groups and other retractable state spaces."""

from . import cli, errors, lie_groups, models, montecarlo, retraction, sigma_core
from .errors import (
    CholeskyFailure,
    DimensionMismatch,
    FilterStepError,
    InvalidAlpha,
    MalformedEmbedding,
    ManifoldUkfError,
    NearPiRotation,
    NonPSDCovariance,
    NonPSDState,
    NonSkewInput,
    NotARotation,
    SingularCovariance,
    SingularInnovationCovariance,
    UnknownLandmarkId,
)
from .models import LandmarkSet, ModelSpec, augment_landmark, example_names, make
from .montecarlo import (
    BenchmarkReport,
    FilterReport,
    RunRecord,
    benchmark,
    nees,
    nees_band,
    run_record,
    simulate,
)
from .retraction import (
    MixedState,
    Retraction,
    RetractionCheck,
    SphereLiftedState,
    additive_retraction,
    check_retraction,
    componentwise_so3_r6,
    covariance_retrieval,
    group_retraction,
    left_retraction,
    lift_sphere_dynamics,
    mixed_retraction,
    right_retraction,
)
from .sigma_core import (
    Belief,
    SigmaWeights,
    filter_run,
    propagate,
    set_weights,
    sigma_points,
    update,
)

__version__ = "0.1.0"

__all__ = [
    "Belief",
    "BenchmarkReport",
    "CholeskyFailure",
    "DimensionMismatch",
    "FilterReport",
    "FilterStepError",
    "InvalidAlpha",
    "LandmarkSet",
    "MalformedEmbedding",
    "ManifoldUkfError",
    "MixedState",
    "ModelSpec",
    "NearPiRotation",
    "NonPSDCovariance",
    "NonPSDState",
    "NonSkewInput",
    "NotARotation",
    "Retraction",
    "RetractionCheck",
    "RunRecord",
    "SigmaWeights",
    "SingularCovariance",
    "SingularInnovationCovariance",
    "SphereLiftedState",
    "UnknownLandmarkId",
    "additive_retraction",
    "augment_landmark",
    "benchmark",
    "check_retraction",
    "cli",
    "componentwise_so3_r6",
    "covariance_retrieval",
    "errors",
    "example_names",
    "filter_run",
    "group_retraction",
    "left_retraction",
    "lie_groups",
    "lift_sphere_dynamics",
    "make",
    "mixed_retraction",
    "models",
    "montecarlo",
    "nees",
    "nees_band",
    "propagate",
    "retraction",
    "right_retraction",
    "run_record",
    "set_weights",
    "sigma_core",
    "sigma_points",
    "simulate",
    "update",
]
