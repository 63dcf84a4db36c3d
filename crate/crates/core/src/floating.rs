//! Caps, floating bodies, wet parts and visible regions of the ball.
//!
//! Everything is computed for `B^n` (or a centred ball of radius `r`).
//! Ellipsoids reduce to the ball: a volume-preserving linear map sends caps
//! to caps, so the `t`-floating body of any centred ellipsoid `K` is `ρK`
//! with `ρ` taken from the ball at the matching volume fraction.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{dot, kappa, norm, ConvexBody, PointCloud};
use crate::hull::{convex_hull, Polytope};
use crate::quadrature::integrate;

const BISECTION_LIMIT: usize = 200;
const BOUNDARY_TOL: f64 = 1e-12;

/// Volume of the cap `{x ∈ rB^n : x₁ ≥ r − h}`.
pub fn cap_volume(n: usize, r: f64, h: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::out_of_range("n", "dimension must be positive"));
    }
    if !(r > 0.0) {
        return Err(Error::out_of_range("r", format!("{r} is not positive")));
    }
    if !(0.0..=2.0 * r).contains(&h) {
        return Err(Error::out_of_range("h", format!("{h} not in [0, {}]", 2.0 * r)));
    }
    Ok(r.powi(n as i32) * unit_cap_volume(n, h / r)?)
}

fn unit_cap_volume(n: usize, h: f64) -> Result<f64> {
    if h > 1.0 {
        return Ok(kappa(n) - unit_cap_volume(n, 2.0 - h)?);
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    // κ_{n-1} ∫_{1-h}^1 (1 - s²)^{(n-1)/2} ds with s = 1 - w², which removes
    // the square-root endpoint behaviour: integrand 2 w^n (2 - w²)^{(n-1)/2}.
    let half = (n as f64 - 1.0) / 2.0;
    let integrand = |w: f64| 2.0 * w.powi(n as i32) * (2.0 - w * w).powf(half);
    Ok(kappa(n - 1) * integrate(integrand, 0.0, h.sqrt(), 1e-13)?)
}

/// The `t`-floating body of `B^n`, which is the centred ball `ρB^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatingBall {
    pub n: usize,
    /// Cap volume parameter.
    pub t: f64,
    /// Inner radius.
    pub rho: f64,
    /// Cap height `1 − ρ`, kept separately to avoid cancellation near the boundary.
    pub height: f64,
}

/// Solve `cap_volume(n, 1, 1 − ρ) = t` for `ρ` by bisection on the cap height.
pub fn floating_body(n: usize, t: f64) -> Result<FloatingBall> {
    let half = kappa(n) / 2.0;
    if !(t > 0.0 && t < half) {
        return Err(Error::out_of_range("t", format!("{t} not in (0, κ_n/2 = {half})")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_LIMIT {
        let mid = 0.5 * (lo + hi);
        if unit_cap_volume(n, mid)? < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi || hi - lo <= f64::MIN_POSITIVE {
            let height = 0.5 * (lo + hi);
            return Ok(FloatingBall {
                n,
                t,
                rho: 1.0 - height,
                height,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: BISECTION_LIMIT,
    })
}

/// Exact wet-part volume `κ_n (1 − ρ(t)^n)` of the unit ball.
pub fn wet_part_volume(n: usize, t: f64) -> Result<f64> {
    let fb = floating_body(n, t)?;
    Ok(fb.wet_volume())
}

impl FloatingBall {
    pub fn wet_volume(&self) -> f64 {
        // 1 − (1 − h)^n without cancellation
        -kappa(self.n) * (self.n as f64 * (-self.height).ln_1p()).exp_m1()
    }

    /// Is `x` in the wet part (on or outside the floating body)?
    pub fn in_wet_part(&self, x: &[f64]) -> bool {
        norm(x) >= self.rho - BOUNDARY_TOL
    }
}

/// Floating body of a centred ball or ellipsoid, as the factor `ρ` with `K_(t) = ρK`.
pub fn floating_body_in(body: &ConvexBody, t: f64) -> Result<FloatingBall> {
    let n = body.dim();
    let unit = floating_body(n, t * kappa(n) / body.volume())?;
    Ok(FloatingBall { t, ..unit })
}

/// Does `p` contain the floating body `ρB^n`? Compares each facet's distance from the origin.
pub fn contains_floating_body(p: &Polytope, fb: &FloatingBall) -> Result<bool> {
    if p.dim() != fb.n {
        return Err(Error::DimensionMismatch {
            expected: fb.n,
            got: p.dim(),
        });
    }
    Ok(p.min_facet_offset() >= fb.rho - BOUNDARY_TOL)
}

/// Does `p` contain `ρK` for the body `K` it was sampled from?
pub fn contains_floating_body_in(p: &Polytope, body: &ConvexBody, fb: &FloatingBall) -> Result<bool> {
    if p.dim() != body.dim() || fb.n != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: p.dim(),
        });
    }
    Ok((0..p.num_facets()).all(|f| {
        fb.rho * body.support_unchecked(p.facet_normal(f)) <= p.facet_offset(f) + BOUNDARY_TOL
    }))
}

/// Largest `ρ` with `ρK ⊆ p`: the minimum over facets of `offset / h_K(normal)`.
pub fn containment_margin(p: &Polytope, body: &ConvexBody) -> f64 {
    (0..p.num_facets())
        .map(|f| p.facet_offset(f) / body.support_unchecked(p.facet_normal(f)))
        .fold(f64::INFINITY, f64::min)
}

/// Smallest `|(1−s)x + sz|` over `s ∈ [0, 1]`.
fn segment_distance_to_origin(x: &[f64], z: &[f64]) -> f64 {
    let dir: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
    let len2 = dot(&dir, &dir);
    let s = if len2 > 0.0 {
        (-dot(x, &dir) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    x.iter()
        .zip(&dir)
        .map(|(xi, di)| (xi + s * di).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Is the segment `[x, z]` clear of the floating body?
pub fn visible_region_contains(z: &[f64], x: &[f64], fb: &FloatingBall) -> bool {
    debug_assert_eq!(z.len(), x.len());
    segment_distance_to_origin(x, z) > fb.rho - BOUNDARY_TOL
}

/// Sampled diameter of a visible region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiameterEstimate {
    /// Largest distance between two visible samples; a lower bound for the true diameter.
    pub diameter: f64,
    pub visible: usize,
    pub samples: usize,
    /// Set when fewer than two samples were visible (diameter reported as 0).
    pub insufficient: bool,
}

/// Largest polar angle, seen from the centre, of any point visible from a
/// boundary point: the tangent cone to `ρB` meets the sphere at `2 arccos ρ`.
fn visible_angle_bound(rho: f64) -> f64 {
    (2.0 * rho.clamp(-1.0, 1.0).acos()).min(PI)
}

/// Uniform point of the shell `ρ ≤ |x| ≤ 1` whose direction is within `theta_max` of `z`.
fn sample_shell_sector<R: Rng + ?Sized>(z: &[f64], rho: f64, theta_max: f64, rng: &mut R, out: &mut [f64]) {
    let n = z.len();
    let theta = if n == 2 {
        theta_max * (2.0 * rng.random::<f64>() - 1.0)
    } else {
        // density ∝ sin^{n-2} θ, by rejection from θ^{n-2}
        loop {
            let th = theta_max * rng.random::<f64>().powf(1.0 / (n as f64 - 1.0));
            let accept = if th > 0.0 { (th.sin() / th).powi(n as i32 - 2) } else { 1.0 };
            if rng.random::<f64>() < accept {
                break th;
            }
        }
    };
    // unit direction orthogonal to z
    let w: Vec<f64> = loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let c = dot(&g, z);
        let perp: Vec<f64> = g.iter().zip(z).map(|(gi, zi)| gi - c * zi).collect();
        let l = norm(&perp);
        if l > 1e-12 {
            break perp.into_iter().map(|p| p / l).collect();
        }
    };
    let rn = rho.max(0.0).powi(n as i32);
    let r = (rn + rng.random::<f64>() * (1.0 - rn)).powf(1.0 / n as f64);
    let (c, s) = (theta.cos(), theta.sin());
    for k in 0..n {
        out[k] = r * (c * z[k] + s * w[k]);
    }
}

fn check_boundary_point(z: &[f64], fb: &FloatingBall) -> Result<()> {
    if z.len() != fb.n {
        return Err(Error::DimensionMismatch {
            expected: fb.n,
            got: z.len(),
        });
    }
    let nz = norm(z);
    if (nz - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitVector { norm: nz });
    }
    Ok(())
}

fn max_pairwise_distance(pts: &PointCloud) -> f64 {
    // the diameter is attained at hull vertices
    let reduced = match convex_hull(pts) {
        Ok(p) => p.vertices().clone(),
        Err(_) => pts.clone(),
    };
    let mut best = 0.0f64;
    for a in 0..reduced.len() {
        for b in a + 1..reduced.len() {
            let d2: f64 = reduced
                .point(a)
                .iter()
                .zip(reduced.point(b))
                .map(|(x, y)| (x - y).powi(2))
                .sum();
            best = best.max(d2);
        }
    }
    best.sqrt()
}

/// Monte Carlo diameter of `Vis_z` for a boundary point `z`.
///
/// Samples are drawn uniformly from the part of the wet shell within polar
/// angle `2 arccos ρ` of `z`, which contains the whole visible region, and
/// filtered by [`visible_region_contains`].
pub fn visible_region_diameter<R: Rng + ?Sized>(
    z: &[f64],
    fb: &FloatingBall,
    num_samples: usize,
    rng: &mut R,
) -> Result<DiameterEstimate> {
    let visible = visible_samples(z, fb, num_samples, rng)?;
    let count = visible.len();
    if count < 2 {
        return Ok(DiameterEstimate {
            diameter: 0.0,
            visible: count,
            samples: num_samples,
            insufficient: true,
        });
    }
    Ok(DiameterEstimate {
        diameter: max_pairwise_distance(&visible),
        visible: count,
        samples: num_samples,
        insufficient: false,
    })
}

fn visible_samples<R: Rng + ?Sized>(z: &[f64], fb: &FloatingBall, num_samples: usize, rng: &mut R) -> Result<PointCloud> {
    check_boundary_point(z, fb)?;
    let n = fb.n;
    let theta_max = visible_angle_bound(fb.rho);
    let mut visible = PointCloud::new(n);
    let mut x = vec![0.0; n];
    for _ in 0..num_samples {
        sample_shell_sector(z, fb.rho, theta_max, rng, &mut x);
        if visible_region_contains(z, &x, fb) {
            visible.push(&x);
        }
    }
    Ok(visible)
}

/// Fraction of the unit sphere within polar angle `theta` of a fixed pole.
fn sphere_cap_fraction(n: usize, theta: f64) -> f64 {
    if n == 2 {
        return theta / PI;
    }
    let a = (n as f64 - 1.0) / 2.0;
    let s2 = theta.sin().powi(2);
    let half = 0.5 * statrs::function::beta::beta_reg(a, 0.5, s2);
    if theta <= PI / 2.0 {
        half
    } else {
        1.0 - half
    }
}

/// Sampled lower estimate of `V_n(⋃_{x ∈ Vis_z} Vis_x)`.
///
/// `y` is in the union exactly when `Vis_y` meets `Vis_z`; the meeting is
/// tested against `num_witnesses` sampled points of `Vis_z`.
pub fn visible_union_volume<R: Rng + ?Sized>(
    z: &[f64],
    fb: &FloatingBall,
    num_witnesses: usize,
    num_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let witnesses = visible_samples(z, fb, num_witnesses, rng)?;
    if witnesses.is_empty() {
        return Ok(0.0);
    }
    let n = fb.n;
    let theta_max = (2.0 * visible_angle_bound(fb.rho)).min(PI);
    let mut y = vec![0.0; n];
    let mut hits = 0usize;
    for _ in 0..num_samples {
        sample_shell_sector(z, fb.rho, theta_max, rng, &mut y);
        if witnesses.iter().any(|x| visible_region_contains(&y, x, fb)) {
            hits += 1;
        }
    }
    let sector = fb.wet_volume() * sphere_cap_fraction(n, theta_max);
    Ok(sector * hits as f64 / num_samples as f64)
}
