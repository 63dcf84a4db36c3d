use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{dot, kappa, norm, PointCloud};
use crate::error::{Error, Result};

const EIGEN_FLOOR: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-10;

/// Shape of an ambient body.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    UnitBall,
    ScaledBall(f64),
    /// `{x : xᵀ A⁻¹ x ≤ 1}` for a symmetric positive definite shape matrix `A`
    /// (row-major, `n × n`); semi-axes are the square roots of its eigenvalues.
    Ellipsoid(Vec<f64>),
}

/// A centred ball or ellipsoid with a uniform sampler.
///
/// With volume normalization the body is rescaled isotropically so that its
/// volume is one; `kind` keeps the shape as given and `scale` records the factor.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
    normalize_volume: bool,
    scale: f64,
    /// Effective radius for balls (after scaling).
    radius: f64,
    /// `s·A^{1/2}` and `(s²A)^{-1}`, row-major, for ellipsoids.
    sqrt_shape: Option<Vec<f64>>,
    inv_shape: Option<Vec<f64>>,
    shape: Option<Vec<f64>>,
    volume: f64,
}

impl ConvexBody {
    pub fn unit_ball(dim: usize) -> Self {
        Self::new(dim, BodyKind::UnitBall, false).expect("unit ball is valid")
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(dim, BodyKind::ScaledBall(radius), false)
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn axis_ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        let n = semi_axes.len();
        let mut a = vec![0.0; n * n];
        for (i, s) in semi_axes.iter().enumerate() {
            a[i * n + i] = s * s;
        }
        Self::new(n, BodyKind::Ellipsoid(a), false)
    }

    pub fn new(dim: usize, kind: BodyKind, normalize_volume: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        let mut body = match &kind {
            BodyKind::UnitBall => Self::ball_parts(dim, 1.0),
            BodyKind::ScaledBall(r) => {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(Error::InvalidBody(format!("radius {r} must be positive")));
                }
                Self::ball_parts(dim, *r)
            }
            BodyKind::Ellipsoid(a) => Self::ellipsoid_parts(dim, a)?,
        };
        body.kind = kind;
        if normalize_volume {
            let s = body.volume.powf(-1.0 / dim as f64);
            body = body.rescaled(s);
            body.normalize_volume = true;
        }
        Ok(body)
    }

    fn ball_parts(dim: usize, radius: f64) -> Self {
        Self {
            dim,
            kind: BodyKind::UnitBall,
            normalize_volume: false,
            scale: 1.0,
            radius,
            sqrt_shape: None,
            inv_shape: None,
            shape: None,
            volume: kappa(dim) * radius.powi(dim as i32),
        }
    }

    fn ellipsoid_parts(dim: usize, a: &[f64]) -> Result<Self> {
        if a.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: a.len(),
            });
        }
        let m = DMatrix::from_row_slice(dim, dim, a);
        let asym = (&m - m.transpose()).abs().max();
        if asym > 1e-12 * m.abs().max().max(1.0) {
            return Err(Error::InvalidBody("shape matrix is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(m.clone());
        if let Some(low) = eig.eigenvalues.iter().copied().find(|&l| l <= EIGEN_FLOOR) {
            return Err(Error::InvalidBody(format!(
                "shape matrix is not positive definite (eigenvalue {low:e})"
            )));
        }
        let q = &eig.eigenvectors;
        let root = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l));
        let sqrt_shape = q * root * q.transpose();
        let inv_shape = q * inv * q.transpose();
        let det: f64 = eig.eigenvalues.iter().product();
        Ok(Self {
            dim,
            kind: BodyKind::UnitBall,
            normalize_volume: false,
            scale: 1.0,
            radius: 1.0,
            sqrt_shape: Some(row_major(&sqrt_shape)),
            inv_shape: Some(row_major(&inv_shape)),
            shape: Some(a.to_vec()),
            volume: kappa(dim) * det.sqrt(),
        })
    }

    fn rescaled(mut self, s: f64) -> Self {
        self.scale *= s;
        self.radius *= s;
        if let Some(m) = self.sqrt_shape.as_mut() {
            m.iter_mut().for_each(|x| *x *= s);
        }
        if let Some(m) = self.inv_shape.as_mut() {
            m.iter_mut().for_each(|x| *x /= s * s);
        }
        if let Some(m) = self.shape.as_mut() {
            m.iter_mut().for_each(|x| *x *= s * s);
        }
        self.volume *= s.powi(self.dim as i32);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize_volume
    }

    /// Isotropic factor applied by volume normalization (1 otherwise).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_ball(&self) -> bool {
        self.sqrt_shape.is_none()
    }

    /// Radius of the (scaled) ball; `None` for ellipsoids.
    pub fn radius(&self) -> Option<f64> {
        self.is_ball().then_some(self.radius)
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Membership test with relative slack `1e-12`.
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        match &self.inv_shape {
            None => dot(x, x) <= self.radius * self.radius * (1.0 + 1e-12),
            Some(inv) => quad_form(inv, x) <= 1.0 + 1e-12,
        }
    }

    /// Support function `h_K(u) = max_{x∈K} ⟨x, u⟩` for a unit vector `u`.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        let nu = norm(u);
        if (nu - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitVector { norm: nu });
        }
        Ok(self.support_unchecked(u))
    }

    /// Support function without the unit-length check; homogeneous of degree one in `u`.
    pub(crate) fn support_unchecked(&self, u: &[f64]) -> f64 {
        match &self.shape {
            None => self.radius * norm(u),
            Some(a) => quad_form(a, u).sqrt(),
        }
    }

    /// Write one uniform sample into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let n = self.dim;
        let mut buf = [0.0f64; 16];
        let mut heap;
        let dir: &mut [f64] = if n <= 16 {
            &mut buf[..n]
        } else {
            heap = vec![0.0; n];
            &mut heap[..]
        };
        let mut r2;
        loop {
            r2 = 0.0;
            for d in dir.iter_mut() {
                *d = rng.sample(StandardNormal);
                r2 += *d * *d;
            }
            if r2 > 1e-300 {
                break;
            }
        }
        // radial inversion: P(|x| ≤ r) = r^n on the unit ball
        let u: f64 = rng.random();
        let radius = u.powf(1.0 / n as f64) / r2.sqrt();
        match &self.sqrt_shape {
            None => {
                for (o, d) in out.iter_mut().zip(dir.iter()) {
                    *o = self.radius * radius * d;
                }
            }
            Some(m) => {
                for (row, o) in out.iter_mut().enumerate() {
                    *o = radius * dot(&m[row * n..(row + 1) * n], dir);
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(rng, &mut out);
        out
    }

    /// `count` independent uniform points.
    pub fn sample_cloud<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> PointCloud {
        let mut cloud = PointCloud::with_capacity(self.dim, count);
        for _ in 0..count {
            let slot = cloud.push_zeroed();
            self.sample_into(rng, slot);
        }
        cloud
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    (0..r)
        .flat_map(|i| (0..c).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)])
        .collect()
}

fn quad_form(m: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    (0..n).map(|i| x[i] * dot(&m[i * n..(i + 1) * n], x)).sum()
}
