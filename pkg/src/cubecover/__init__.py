"""Quantization and weak covering of the cube [-1, 1]^d by structured designs."""

from .coverage import (
    ApproxMoments,
    BallCubeFraction,
    CoverageMethod,
    CoverageResult,
    FractionMethod,
    RadiusSolution,
    Regime,
    SolverWarning,
    approx_ball_cube_fraction,
    ball_cube_moments,
    coverage_bounds,
    coverage_dn_delta,
    distance_cdf_curve,
    exact_special_fraction,
    full_cover_radius,
    mc_ball_cube_fraction,
    mc_coverage,
    mc_coverage_curve,
    normalized_radius,
    radius_for_coverage,
    radius_for_design,
    thickness,
)
from .designs import (
    CapacityError,
    Design,
    DesignKind,
    Region,
    VoronoiMembership,
    build_dn0,
    build_dn_delta,
    custom_design,
    nearest_sq_distance,
    nearest_sq_distances,
    read_design_csv,
    voronoi_membership,
    write_design_csv,
)
from .quantization import (
    QuantizationReport,
    QuantMethod,
    mc_quantization,
    optimal_delta,
    qd_dn0,
    qd_dn_delta,
    qd_normalize,
    qd_optimal,
    theta_dn0,
    theta_dn_delta,
)
from .sobol import DirectionNumberError, DirectionTable, load_direction_numbers, sobol_design, sobol_points

__version__ = "0.1.0"
