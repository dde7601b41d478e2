"""K on adjoint orbits of trace-free complex matrices: evaluation,
seven-case classification of the infimum and numerical minimization."""

__version__ = "0.1.0"

from .classify import (
    CriticalSet,
    OrbitClassification,
    classify_orbit,
    infimum_candidates,
    infinity_liminf,
    z_liminf,
)
from .errors import (
    AmbiguousClusteringError,
    DimensionError,
    InZError,
    NonFiniteError,
    OrbitError,
    PartitionError,
    ScalarMatrixError,
    TraceFreeError,
)
from .kfun import (
    KReport,
    NessReport,
    critical_residual,
    curvature,
    k_functional,
    k_gradient_direction,
    k_value,
    ness_residual,
    variation_matrix,
    wedge_defect,
)
from .linalg import adjoint_star, as_matrix, commutator, eigenvalues, inner, matrix_exp, norm, numerical_rank
from .optimize import MinimizationReport, OptimizerConfig, minimize_over_orbit
from .partitions import (
    Dominance,
    Partition,
    c_constant,
    dominance_compare,
    lambda_sequence,
    match_lambda_forms,
    partitions,
)
from .sl2 import StandardTriple, build_standard_triple, e_n, x_n
from .spectral import SpectralProfile, degeneration_witness, spectral_profile

__all__ = [name for name in dir() if not name.startswith("_")]
