"""Orbit pseudo-metrics and measure distances for topological dynamical systems."""

from .errors import (
    DecompositionFailureError,
    InsufficientTailError,
    NotBistochasticError,
    SamplingError,
    SizeLimitError,
)
from .systems import (
    BinaryShift,
    CircleRotation,
    CostMatrix,
    DoublingMap,
    LogisticMap,
    OrbitSegment,
    ProductSystem,
    ShiftPoint,
    TentMap,
    build_example31_point,
    cost_matrix,
    dist,
    orbit_segment,
    product_system,
    system_from_dict,
    system_from_json,
)
from .matching import (
    ConvexDecomposition,
    Permutation,
    birkhoff_decompose,
    brute_force_assignment,
    max_matching_under_threshold,
    min_cost_assignment,
)
from .measures import (
    DiscreteMeasure,
    MeasureSet,
    Schedule,
    empirical_measure,
    hausdorff_measures,
    omega_hat_estimate,
    prokhorov,
    prokhorov_oracle,
    wasserstein1,
    wasserstein1_fast_1d,
)
from .pseudometrics import (
    EtildeEstimate,
    SandwichReport,
    TailEstimate,
    WeylProfile,
    besicovitch_estimate,
    besicovitch_n,
    delta_n,
    ebar_estimate,
    ebar_n,
    etilde_estimate,
    sandwich_check,
    weyl_profile,
)
from .analysis import (
    DiagnosticReport,
    Example31Config,
    birkhoff_profile,
    continuity_modulus,
    empirical_equicontinuity,
    en_equicontinuity_diagnostic,
    example31_report,
    mean_equicontinuity_diagnostic,
    observable_values,
    omega_distance,
    sample_close_pair,
    sample_point,
    unique_ergodicity_diagnostic,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryShift",
    "CircleRotation",
    "ConvexDecomposition",
    "CostMatrix",
    "DecompositionFailureError",
    "DiagnosticReport",
    "DiscreteMeasure",
    "DoublingMap",
    "EtildeEstimate",
    "Example31Config",
    "InsufficientTailError",
    "LogisticMap",
    "MeasureSet",
    "NotBistochasticError",
    "OrbitSegment",
    "Permutation",
    "ProductSystem",
    "SamplingError",
    "SandwichReport",
    "Schedule",
    "ShiftPoint",
    "SizeLimitError",
    "TailEstimate",
    "TentMap",
    "WeylProfile",
    "besicovitch_estimate",
    "besicovitch_n",
    "birkhoff_decompose",
    "birkhoff_profile",
    "brute_force_assignment",
    "build_example31_point",
    "continuity_modulus",
    "cost_matrix",
    "delta_n",
    "dist",
    "ebar_estimate",
    "ebar_n",
    "empirical_equicontinuity",
    "empirical_measure",
    "en_equicontinuity_diagnostic",
    "etilde_estimate",
    "example31_report",
    "hausdorff_measures",
    "max_matching_under_threshold",
    "mean_equicontinuity_diagnostic",
    "min_cost_assignment",
    "observable_values",
    "omega_distance",
    "omega_hat_estimate",
    "orbit_segment",
    "prokhorov",
    "prokhorov_oracle",
    "sample_close_pair",
    "sample_point",
    "sandwich_check",
    "system_from_dict",
    "system_from_json",
    "unique_ergodicity_diagnostic",
    "wasserstein1",
    "wasserstein1_fast_1d",
    "weyl_profile",
    "__version__",
]
