"""Gaussian-moment simulation of Stokes fields entangled through a collective atomic spin wave."""

from .criteria import (
    CriteriaReport,
    GainSet,
    classify,
    duan_V,
    evaluate,
    pairwise_duan,
    vlf_correlations,
    vlf_gains,
)
from .errors import (
    ConfigurationError,
    DegenerateStateError,
    DomainError,
    EntanglerError,
    NumericalError,
    TruncationError,
)
from .model import ModelConfig, PhysicalCoupling, build_config, coupling_from_physical, load_config
from .moments import (
    MomentMatrix,
    QuadratureCovariance,
    initial_moments,
    initial_moments_mp,
    propagate,
    to_quadratures,
    transform_mp,
)
from .propagator import BogoliubovTransform, analytic_transform, numeric_transform

__version__ = "0.1.0"
