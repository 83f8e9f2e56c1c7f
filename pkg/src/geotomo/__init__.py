"""Reconstruction of convex bodies and directional measures from noisy data.

Support-function and brightness-function measurements are fitted by
constrained least squares (consistency cone, or nonnegative generator
lengths on node directions); roses of intersections are inverted to
directional measures through the same zonotope fit.  Includes certified
set metrics, Minkowski reconstruction from surface area measures, and a
Monte Carlo harness for convergence-rate experiments.
"""

from .algorithms import (
    BrightnessFit,
    MeasurementSet,
    ReconstructionReport,
    load_measurements,
    noisy_bright_lsq,
    noisy_rose_lsq,
    noisy_support_lsq,
    save_measurements,
    simulate_measurements,
)
from .bodies import (
    AtomicMeasure,
    HPolytope,
    VPolytope,
    Zonotope,
    body_from_payload,
    body_payload,
    brightness,
    brightness_values,
    load_body,
    measure_from_zonotope,
    minkowski_reconstruct,
    minkowski_reconstruct_2d,
    minkowski_reconstruct_3d,
    polytope_from_supports,
    projection_body,
    save_body,
    support_function,
    support_values,
    surface_area_measure,
    zonotope_surface_measure,
)
from .directions import (
    DirectionSequence,
    SpreadStats,
    as_direction_sequence,
    epsilon_net,
    equally_spaced_2d,
    half_circle_2d,
    is_symmetric,
    load_directions,
    node_representatives,
    nodes,
    save_directions,
    spread,
    spread_stats,
    stacked_net_sequence,
    symmetrize,
    symmetrized_spread,
    voronoi_cell_measures,
    voronoi_max_measure,
)
from .errors import (
    ClosureError,
    ConvergenceError,
    DegenerateMeasureError,
    DuplicateDirectionError,
    EvennessError,
    GeotomoError,
    InvalidBodyError,
    InvalidInputError,
    PositiveHullError,
    SpanError,
    UnboundedPolytopeError,
    UnsupportedDimensionError,
)
from .harness import (
    ErrorTable,
    ExperimentConfig,
    RateFit,
    emit_csv,
    emit_svg,
    fit_rate,
    load_table,
    reference_bodies,
    run_experiment,
)
from .metrics import (
    Certified,
    dudley_distance,
    hausdorff_distance,
    l2_distance,
    prohorov_upper_bound,
    pseudonorm,
)
from .solvers import (
    QPSolution,
    consistency_cone_2d,
    consistency_constrained_lsq_2d,
    consistency_constrained_lsq_3d,
    nnls,
    zonotope_lsq,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "BrightnessFit",
    "Certified",
    "ClosureError",
    "ConvergenceError",
    "DegenerateMeasureError",
    "DirectionSequence",
    "DuplicateDirectionError",
    "ErrorTable",
    "EvennessError",
    "ExperimentConfig",
    "GeotomoError",
    "HPolytope",
    "InvalidBodyError",
    "InvalidInputError",
    "MeasurementSet",
    "PositiveHullError",
    "QPSolution",
    "RateFit",
    "ReconstructionReport",
    "SpanError",
    "SpreadStats",
    "UnboundedPolytopeError",
    "UnsupportedDimensionError",
    "VPolytope",
    "Zonotope",
    "body_from_payload",
    "body_payload",
    "brightness",
    "brightness_values",
    "consistency_cone_2d",
    "consistency_constrained_lsq_2d",
    "consistency_constrained_lsq_3d",
    "dudley_distance",
    "emit_csv",
    "emit_svg",
    "as_direction_sequence",
    "epsilon_net",
    "equally_spaced_2d",
    "fit_rate",
    "half_circle_2d",
    "is_symmetric",
    "hausdorff_distance",
    "l2_distance",
    "load_body",
    "load_directions",
    "load_measurements",
    "load_table",
    "measure_from_zonotope",
    "minkowski_reconstruct",
    "minkowski_reconstruct_2d",
    "minkowski_reconstruct_3d",
    "nnls",
    "node_representatives",
    "nodes",
    "noisy_bright_lsq",
    "noisy_rose_lsq",
    "noisy_support_lsq",
    "polytope_from_supports",
    "projection_body",
    "prohorov_upper_bound",
    "pseudonorm",
    "reference_bodies",
    "run_experiment",
    "save_body",
    "save_directions",
    "save_measurements",
    "simulate_measurements",
    "spread",
    "spread_stats",
    "stacked_net_sequence",
    "support_function",
    "support_values",
    "surface_area_measure",
    "symmetrize",
    "symmetrized_spread",
    "voronoi_cell_measures",
    "voronoi_max_measure",
    "zonotope_lsq",
    "zonotope_surface_measure",
]
