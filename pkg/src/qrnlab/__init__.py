"""
qrnlab: a desk-scale laboratory for quantum real numbers

Observables are evaluated on finite, seeded samples of open regions of
density-matrix space. The package checks the collimation, frequency,
measurement and dynamics bounds that let such values behave like classical
reals, and runs them as reproducible experiments.

Main Components:
    HermitianOperator, DensityMatrix, Projector: immutable dense operators
    StateRegion, evaluate_qrn, is_eps_sharp: quantum real numbers over regions
    ExperimentConfig, run, emit: seeded experiments and their reports
    logger: Configured logger instance for the package
    set_logger_level: Function to adjust logging levels dynamically

Example:
    >>> from qrnlab import GridConfig, SlitSpec, grid_operators, sharp_region, check_theorem1
    >>>
    >>> grid = GridConfig(256, 10.0)
    >>> region = sharp_region(SlitSpec(-1.0, 1.0), 0.04, grid, n_samples=8, seed=0)
    >>> z, _ = grid_operators(grid)
    >>> check_theorem1(z, region, SlitSpec(-1.0, 1.0), 0.04).passed
    True
"""

from ._version import __version__
from .collimation import (
    TheoremReport,
    check_basic_postulate1,
    check_corollary1,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_theorem4,
    sharp_region,
)
from .config import DEFAULT_TOLERANCE, GridConfig, ToleranceConfig
from .exceptions import (
    ConfigError,
    DimensionBlowUpError,
    DimensionMismatchError,
    EmptyIntersectionError,
    GridTooCoarseError,
    HypothesisNotMetError,
    InvariantViolationError,
    ModulusSearchFailedError,
    NonCommutingError,
    NullRestrictionError,
    PreparationFailedError,
    QRNError,
    RegionSamplingError,
    UnboundedSlitPreconditionError,
    ZeroBranchError,
)
from .logger_config import logger, set_logger_level
from .operators import (
    DensityMatrix,
    HermitianOperator,
    Projector,
    gaussian_packet,
    grid_operators,
    partial_trace,
    spectral_projector,
    tensor,
    trace_inner,
    trace_norm,
)
from .qrn import QuantumRealNumber, SlitSpec, StateRegion, evaluate_qrn, is_eps_sharp, sample_region, spread
from .runner import ExperimentConfig, ExperimentReport, emit, load_report, run

__all__ = [
    # Version
    "__version__",
    # Operators
    "HermitianOperator",
    "DensityMatrix",
    "Projector",
    "trace_inner",
    "trace_norm",
    "spectral_projector",
    "tensor",
    "partial_trace",
    "grid_operators",
    "gaussian_packet",
    # Quantum real numbers
    "StateRegion",
    "QuantumRealNumber",
    "SlitSpec",
    "sample_region",
    "evaluate_qrn",
    "spread",
    "is_eps_sharp",
    # Collimation checks
    "TheoremReport",
    "sharp_region",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "check_theorem4",
    "check_corollary1",
    "check_basic_postulate1",
    # Experiments
    "ExperimentConfig",
    "ExperimentReport",
    "run",
    "emit",
    "load_report",
    # Configuration
    "GridConfig",
    "ToleranceConfig",
    "DEFAULT_TOLERANCE",
    # Logging
    "logger",
    "set_logger_level",
    # Exceptions
    "QRNError",
    "DimensionMismatchError",
    "InvariantViolationError",
    "NullRestrictionError",
    "ZeroBranchError",
    "HypothesisNotMetError",
    "UnboundedSlitPreconditionError",
    "PreparationFailedError",
    "GridTooCoarseError",
    "ModulusSearchFailedError",
    "EmptyIntersectionError",
    "NonCommutingError",
    "DimensionBlowUpError",
    "RegionSamplingError",
    "ConfigError",
]
