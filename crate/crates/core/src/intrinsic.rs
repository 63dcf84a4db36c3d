//! Intrinsic volumes of polytopes.
//!
//! `V_n` and `V_{n-1}` come straight from the hull (volume and half the
//! surface area). Every other index goes through Kubota's formula
//!
//! ```text
//! V_j(K) = C(n,j) κ_n / (κ_j κ_{n-j}) ∫_{G(n,j)} vol_j(K|L) ν_j(dL)
//! ```
//!
//! with the integral replaced by an average over Haar-random subspaces.
//! Callers comparing nearby polytopes should draw the subspaces once and
//! pass them to [`kubota_with_subspaces`] so the comparison is not swamped by
//! independent Monte Carlo noise.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{binomial, haar_subspace, kappa, Subspace};
use crate::hull::Polytope;

/// Monte Carlo estimate of one intrinsic volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KubotaEstimate {
    pub j: usize,
    pub mean: f64,
    pub std_error: f64,
    pub num_subspaces: usize,
}

/// `C(n,j) κ_n / (κ_j κ_{n-j})`.
pub fn kubota_prefactor(n: usize, j: usize) -> f64 {
    binomial(n, j) * kappa(n) / (kappa(j) * kappa(n - j))
}

/// `V_j(P)` for `j ∈ {0, n-1, n}`.
pub fn intrinsic_volume_exact(p: &Polytope, j: usize) -> Result<f64> {
    let n = p.dim();
    match j {
        0 => Ok(1.0),
        j if j == n => Ok(p.volume()),
        j if j + 1 == n => Ok(0.5 * p.surface_area()),
        _ => Err(Error::UnsupportedIndex { j, n }),
    }
}

/// Closed form `V_j(rB^n) = C(n,j) κ_n / κ_{n-j} · r^j`.
pub fn intrinsic_volume_ball_exact(n: usize, j: usize, radius: f64) -> Result<f64> {
    if j > n {
        return Err(Error::out_of_range("j", format!("need 0 ≤ j ≤ {n}, got {j}")));
    }
    if !(radius > 0.0) {
        return Err(Error::out_of_range("radius", format!("{radius} is not positive")));
    }
    Ok(binomial(n, j) * kappa(n) / kappa(n - j) * radius.powi(j as i32))
}

/// `m` independent Haar subspaces of `G(n, j)`.
pub fn draw_subspaces<R: Rng + ?Sized>(n: usize, j: usize, m: usize, rng: &mut R) -> Result<Vec<Subspace>> {
    (0..m).map(|_| haar_subspace(n, j, rng)).collect()
}

/// Kubota estimate of `V_j(P)` from `m` fresh subspaces.
pub fn intrinsic_volume_kubota<R: Rng + ?Sized>(
    p: &Polytope,
    j: usize,
    m: usize,
    rng: &mut R,
) -> Result<KubotaEstimate> {
    check_index(p.dim(), j)?;
    if m < 2 {
        return Err(Error::out_of_range("num_subspaces", format!("need m ≥ 2, got {m}")));
    }
    if j == p.dim() {
        return Ok(exact_top(p, m));
    }
    let mut acc = Moments::default();
    let c = kubota_prefactor(p.dim(), j);
    for _ in 0..m {
        let l = haar_subspace(p.dim(), j, rng)?;
        acc.push(c * p.projected_volume(&l)?);
    }
    Ok(acc.estimate(j))
}

/// Kubota estimate of `V_j(P)` over a caller-supplied list of subspaces.
pub fn kubota_with_subspaces(p: &Polytope, j: usize, subspaces: &[Subspace]) -> Result<KubotaEstimate> {
    check_index(p.dim(), j)?;
    if subspaces.is_empty() {
        return Err(Error::out_of_range("subspaces", "empty list"));
    }
    if let Some(l) = subspaces.iter().find(|l| l.dim() != j || l.ambient_dim() != p.dim()) {
        return Err(Error::DimensionMismatch {
            expected: j,
            got: l.dim(),
        });
    }
    if j == p.dim() {
        return Ok(exact_top(p, subspaces.len()));
    }
    let c = kubota_prefactor(p.dim(), j);
    let mut acc = Moments::default();
    for l in subspaces {
        acc.push(c * p.projected_volume(l)?);
    }
    Ok(acc.estimate(j))
}

fn check_index(n: usize, j: usize) -> Result<()> {
    if j == 0 || j > n {
        return Err(Error::out_of_range("j", format!("Kubota needs 1 ≤ j ≤ {n}, got {j}")));
    }
    Ok(())
}

/// `G(n, n)` is a single point, so the average is the volume itself.
fn exact_top(p: &Polytope, m: usize) -> KubotaEstimate {
    KubotaEstimate {
        j: p.dim(),
        mean: p.volume(),
        std_error: 0.0,
        num_subspaces: m,
    }
}

/// Welford accumulator.
#[derive(Default)]
struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn estimate(&self, j: usize) -> KubotaEstimate {
        let var = if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        };
        KubotaEstimate {
            j,
            mean: self.mean.max(0.0),
            std_error: (var / self.count as f64).sqrt(),
            num_subspaces: self.count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexBody, PointCloud};
    use crate::hull::convex_hull;
    use crate::rng::SeedTree;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cube() -> Polytope {
        let mut c = PointCloud::new(3);
        for i in 0..8 {
            c.push(&[(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        convex_hull(&c).unwrap()
    }

    fn square() -> Polytope {
        convex_hull(&PointCloud::from_rows(2, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()).unwrap()
    }

    fn random_polytope(n: usize, count: usize, seed: u64) -> Polytope {
        let mut rng = SeedTree::new(seed).stream("iv", n as u64, count as u64);
        convex_hull(&ConvexBody::unit_ball(n).sample_cloud(&mut rng, count)).unwrap()
    }

    #[test]
    fn exact_indices() {
        assert_relative_eq!(intrinsic_volume_exact(&square(), 2).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(intrinsic_volume_exact(&square(), 1).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(intrinsic_volume_exact(&cube(), 2).unwrap(), 3.0, epsilon = 1e-12);
        assert_eq!(intrinsic_volume_exact(&cube(), 0).unwrap(), 1.0);
        assert!(matches!(
            intrinsic_volume_exact(&cube(), 1),
            Err(Error::UnsupportedIndex { j: 1, n: 3 })
        ));
    }

    #[test]
    fn ball_closed_form() {
        assert_relative_eq!(intrinsic_volume_ball_exact(3, 3, 1.0).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(intrinsic_volume_ball_exact(3, 2, 1.0).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(intrinsic_volume_ball_exact(3, 1, 1.0).unwrap(), 4.0, max_relative = 1e-15);
        // half the surface area n κ_n r^{n-1} / 2, for any n
        for n in 2..8 {
            let half_area = n as f64 * kappa(n) / 2.0 * 1.5f64.powi(n as i32 - 1);
            assert_relative_eq!(intrinsic_volume_ball_exact(n, n - 1, 1.5).unwrap(), half_area, max_relative = 1e-13);
        }
        assert!(intrinsic_volume_ball_exact(3, 4, 1.0).is_err());
        assert!(intrinsic_volume_ball_exact(3, 1, 0.0).is_err());
    }

    #[test]
    fn top_index_is_exact() {
        let p = random_polytope(3, 40, 1);
        let mut rng = SeedTree::new(1).stream("kubota", 0, 0);
        let est = intrinsic_volume_kubota(&p, 3, 10, &mut rng).unwrap();
        assert_eq!(est.mean, p.volume());
        assert_eq!(est.std_error, 0.0);
        assert_relative_eq!(kubota_prefactor(3, 3), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn cube_mean_surface_by_kubota() {
        let mut rng = SeedTree::new(2).stream("kubota", 1, 0);
        let est = intrinsic_volume_kubota(&cube(), 2, 100_000, &mut rng).unwrap();
        assert!((est.mean - 3.0).abs() < 4.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn dense_ball_polytope_mean_width() {
        let p = random_polytope(3, 100_000, 3);
        let mut rng = SeedTree::new(3).stream("kubota", 2, 0);
        let est = intrinsic_volume_kubota(&p, 1, 100_000, &mut rng).unwrap();
        assert!((est.mean / 4.0 - 1.0).abs() < 0.02, "{est:?}");
    }

    #[test]
    fn facet_index_agrees_with_half_surface() {
        let mut rng = SeedTree::new(4).stream("kubota", 3, 0);
        for (n, m) in [(2usize, 4000usize), (3, 4000), (4, 1500)] {
            for seed in 0..3 {
                let p = random_polytope(n, 30, 10 + seed);
                let est = intrinsic_volume_kubota(&p, n - 1, m, &mut rng).unwrap();
                let exact = 0.5 * p.surface_area();
                assert!((est.mean - exact).abs() < 4.0 * est.std_error, "n={n}: {est:?} vs {exact}");
            }
        }
    }

    #[test]
    fn homogeneity_and_monotonicity_with_common_subspaces() {
        let mut rng = SeedTree::new(5).stream("kubota", 4, 0);
        let cloud = ConvexBody::unit_ball(3).sample_cloud(&mut rng, 40);
        let p = convex_hull(&cloud).unwrap();
        let subs = draw_subspaces(3, 1, 500, &mut rng).unwrap();
        let base = kubota_with_subspaces(&p, 1, &subs).unwrap();
        for lambda in [0.5, 2.0] {
            let q = p.scaled(lambda);
            let est = kubota_with_subspaces(&q, 1, &subs).unwrap();
            assert_relative_eq!(est.mean, lambda * base.mean, max_relative = 1e-12);
            for j in [2, 3] {
                let exact = intrinsic_volume_exact(&q, j).unwrap();
                let reference = lambda.powi(j as i32) * intrinsic_volume_exact(&p, j).unwrap();
                assert_relative_eq!(exact, reference, max_relative = 1e-12);
            }
            // independent subspaces: within four joint standard errors
            let fresh = intrinsic_volume_kubota(&q, 1, 500, &mut rng).unwrap();
            let joint = (fresh.std_error.powi(2) + (lambda * base.std_error).powi(2)).sqrt();
            assert!((fresh.mean - lambda * base.mean).abs() < 4.0 * joint);
        }

        let mut bigger = cloud.clone();
        for _ in 0..40 {
            bigger.push(&ConvexBody::unit_ball(3).sample(&mut rng));
        }
        let q = convex_hull(&bigger).unwrap();
        let outer = kubota_with_subspaces(&q, 1, &subs).unwrap();
        assert!(outer.mean >= base.mean);
        let subs2 = draw_subspaces(3, 2, 300, &mut rng).unwrap();
        assert!(kubota_with_subspaces(&q, 2, &subs2).unwrap().mean >= kubota_with_subspaces(&p, 2, &subs2).unwrap().mean);
        assert!(q.volume() >= p.volume());
        assert!(q.surface_area() >= p.surface_area());
    }

    #[test]
    fn estimates_ignore_vertex_order() {
        let mut rng = SeedTree::new(6).stream("kubota", 5, 0);
        let cloud = ConvexBody::unit_ball(3).sample_cloud(&mut rng, 30);
        let rev: Vec<usize> = (0..30).rev().collect();
        let a = convex_hull(&cloud).unwrap();
        let b = convex_hull(&cloud.select(&rev)).unwrap();
        let subs = draw_subspaces(3, 1, 200, &mut rng).unwrap();
        assert_relative_eq!(
            kubota_with_subspaces(&a, 1, &subs).unwrap().mean,
            kubota_with_subspaces(&b, 1, &subs).unwrap().mean,
            max_relative = 1e-12
        );
    }

    #[test]
    fn argument_checks() {
        let p = square();
        let mut rng = SeedTree::new(7).stream("kubota", 6, 0);
        assert!(intrinsic_volume_kubota(&p, 0, 10, &mut rng).is_err());
        assert!(intrinsic_volume_kubota(&p, 1, 1, &mut rng).is_err());
        assert!(intrinsic_volume_kubota(&p, 3, 10, &mut rng).is_err());
        let wrong = draw_subspaces(3, 1, 2, &mut rng).unwrap();
        assert!(kubota_with_subspaces(&p, 1, &wrong).is_err());
    }
}
