//! Random polytopes in smooth convex bodies.
//!
//! The crate builds convex hulls of uniform samples from balls and
//! ellipsoids, evaluates their intrinsic volumes (exactly where a formula is
//! available, otherwise by averaging projection volumes over Haar-random
//! subspaces), and provides the floating-body geometry, difference-operator
//! diagnostics and statistics needed to study the fluctuations of those
//! volumes as the number of points grows.

pub mod error;
pub mod experiment;
pub mod floating;
pub mod geometry;
pub mod hull;
pub mod intrinsic;
mod quadrature;
pub mod report;
pub mod rng;
pub mod stats;
pub mod stein;

pub use error::{Error, Result};
pub use geometry::{
    angle_to_subspace, haar_subspace, kappa, subspace_angle_measure, BodyKind, ConvexBody,
    PointCloud, ProbabilityEstimate, Subspace,
};
pub use floating::{
    cap_volume, containment_margin, contains_floating_body, floating_body, visible_region_contains,
    visible_region_diameter, wet_part_volume, FloatingBall,
};
pub use hull::{convex_hull, Polytope};
pub use rng::{RandomSource, SeedTree};
pub use stats::{empirical_moments, fit_power_law, wasserstein1_to_std_normal, PowerLawFit};
pub use stein::{
    estimate_gammas, first_difference, functional_f, normal_approximation_bound, recombine,
    second_difference, GammaEstimates, PointConfiguration, RecombinationTriple,
};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport};
pub use report::{emit_csv, emit_svg_plot, RunRecord};
