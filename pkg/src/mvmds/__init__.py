"""Manifold-valued multidimensional scaling via semi-relaxed transport.

Embeds finite metric spaces into circles, spheres, or Euclidean space by
solving a semi-relaxed Gromov-Wasserstein problem onto a grid, rounding
the coupling to a map, and refining with Riemannian Adam on the stress
functional.  Includes brute-force Gromov-Hausdorff checks on small
spaces and an analysis pipeline for ensembles of two-district plans.
"""

from .datasets import (
    GeoPoint,
    anchor_pattern,
    geodesic_distance_matrix,
    pattern_distance,
    rotate_pattern,
    rotated_pattern,
    sample_manifold,
    wgs84_geodesic,
)
from .embed import (
    EmbeddingProblem,
    EmbeddingResult,
    OptimizerConfig,
    circular_coordinate,
    optimize,
    random_init_gd,
    srgw_gd,
    stress,
    stress_gradient,
)
from .errors import CapacityError, DivergenceError, ParseError
from .gromov import (
    asymmetric_hausdorff,
    function_distortion,
    glued_metric,
    mgh,
    relation_distortion,
    srgh,
    srgh_relation_oracle,
    srgw_inf_bruteforce,
)
from .manifolds import (
    Circle,
    Euclidean,
    Manifold,
    Sphere,
    distance_gradient,
    geodesic_distance,
    grid,
    manifold_spec,
    pairwise_distances,
    parse_manifold,
    random_points,
    retract,
)
from .mmspace import MetricMeasureSpace, ValidationReport, p_diameter, validate_metric
from .redistrict import (
    ArcSummary,
    Ensemble,
    align,
    arc_summaries,
    ensemble_distances,
    hamming,
)
from .srgw import (
    SemiCoupling,
    SolverConfig,
    SolverResult,
    coupling_from_map,
    distortion_inf,
    distortion_p,
    exact_line_search,
    is_monge,
    lmo,
    monge_round,
    objective_and_gradient,
    product_coupling,
    random_coupling,
    solve_srgw2,
)

__version__ = "0.1.0"
