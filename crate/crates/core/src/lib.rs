//! Illumination-based detection and localization of eigenvectors and fixed
//! points for nonexpansive maps.
//!
//! The cone side works with order-preserving homogeneous maps on the open
//! positive cone under Hilbert's projective metric; the normed side works
//! with nonexpansive maps on `R^n` under the sup, `l1`, Euclidean and
//! variation norms.

pub mod conemaps;
pub mod detector;
pub mod error;
pub mod illumination;
pub mod localize;
pub mod lp;
pub mod spaces;

pub use conemaps::{
    conjugate_map, is_order_preserving_homogeneous_probe, linear_oracle, normalized_map, power_iteration, presets,
    EigenResult, LinearOracle, MapSpec, MeanTerm,
};
pub use detector::{
    build_adversarial_euclid, detect_eigenvector, detect_fixed_point_smooth, detect_fixed_point_sup, ratio_subsets,
    AdversarialMap, DetectionConfig, DetectionKind, DetectionReport, DetectionStatus, SubsetMask, Witness,
};
pub use error::{Error, Result};
pub use illumination::{
    ball_cover_criterion, extreme_illumination, illuminates_point, interior_hull_certificate, sup_criterion,
    HullCertificate, IlluminationVerdict,
};
pub use localize::{
    circumcenter, halfspace_polytope, localize_eigenvectors, localize_fixed_points, norm_constants, BallMetric,
    BoundingBall, HalfspacePolytope, NormConstants,
};
pub use lp::{solve_lp, LinearProgram, LpOutcome, VarBound};
pub use spaces::{exp_coords, extreme_points, hilbert_metric, log_coords, norm, ConePoint, NormId, RealVector};
