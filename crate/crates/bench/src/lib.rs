//! Shared fixtures for the criterion benches.

use polylab::{ConvexBody, PointCloud, SeedTree};

/// `count` uniform points in the unit ball of `R^dim`, reproducible per `(dim, count)`.
pub fn ball_cloud(dim: usize, count: usize) -> PointCloud {
    let mut rng = SeedTree::new(0x5eed).stream("bench", dim as u64, count as u64);
    ConvexBody::unit_ball(dim).sample_cloud(&mut rng, count)
}
