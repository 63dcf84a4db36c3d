//! Ambient geometry: point storage, convex bodies and their uniform samplers,
//! Haar-random linear subspaces, and the unit-ball volume constants.

mod body;
mod points;
mod subspace;

pub use body::{BodyKind, ConvexBody};
pub use points::PointCloud;
pub use subspace::{
    angle_to_subspace, haar_subspace, subspace_angle_measure, subspace_angle_measure_curve,
    ProbabilityEstimate, Subspace,
};

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

/// Volume of the `l`-dimensional Euclidean unit ball, `π^{l/2} / Γ(1 + l/2)`.
pub fn kappa(l: usize) -> f64 {
    // The two-step recurrence κ_l = (2π / l) κ_{l-2} is exact up to rounding
    // and avoids the exp/ln round trip for the dimensions we care about.
    if l <= 64 {
        let mut k = if l % 2 == 0 { 1.0 } else { 2.0 };
        let mut m = if l % 2 == 0 { 2 } else { 3 };
        while m <= l {
            k *= 2.0 * PI / m as f64;
            m += 2;
        }
        k
    } else {
        let half = l as f64 / 2.0;
        (half * PI.ln() - ln_gamma(1.0 + half)).exp()
    }
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kappa_small_dimensions() {
        assert_eq!(kappa(0), 1.0);
        assert_eq!(kappa(1), 2.0);
        assert_relative_eq!(kappa(2), PI, max_relative = 1e-15);
        assert_relative_eq!(kappa(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(kappa(4), PI * PI / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn kappa_recurrence_matches_log_gamma() {
        for l in 0..=64usize {
            let half = l as f64 / 2.0;
            let via_gamma = (half * PI.ln() - ln_gamma(1.0 + half)).exp();
            assert_relative_eq!(kappa(l), via_gamma, max_relative = 1e-12);
        }
        // branch switch is continuous
        let r = kappa(66) / kappa(64);
        assert_relative_eq!(r, 2.0 * PI / 66.0, max_relative = 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 0), 1.0);
        assert_eq!(binomial(3, 2), 3.0);
        assert_eq!(binomial(10, 5), 252.0);
        assert_eq!(binomial(2, 3), 0.0);
    }
}
