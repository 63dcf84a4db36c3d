use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{dot, norm};
use crate::error::{Error, Result};

/// Orthonormality tolerance for subspace bases.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// A `j`-dimensional linear subspace of `R^n`, held as an orthonormal basis.
///
/// Basis vectors are stored as contiguous columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    dim: usize,
    basis: Vec<f64>,
}

impl Subspace {
    /// Orthonormalize the given spanning vectors (one per slice).
    ///
    /// Fails with `DegenerateInput` when they are numerically dependent.
    pub fn from_vectors<V: AsRef<[f64]>>(ambient: usize, vectors: &[V]) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 || dim > ambient {
            return Err(Error::out_of_range(
                "j",
                format!("need 1 ≤ j ≤ {ambient}, got {dim}"),
            ));
        }
        let mut basis = Vec::with_capacity(ambient * dim);
        for v in vectors {
            let v = v.as_ref();
            if v.len() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    got: v.len(),
                });
            }
            basis.extend_from_slice(v);
        }
        let rank = gram_schmidt(ambient, dim, &mut basis);
        if rank < dim {
            return Err(Error::DegenerateInput { rank, dim });
        }
        Ok(Self {
            ambient,
            dim,
            basis,
        })
    }

    /// The span of the first `j` coordinate axes.
    pub fn coordinate(ambient: usize, dim: usize) -> Result<Self> {
        let axes: Vec<Vec<f64>> = (0..dim)
            .map(|k| {
                let mut e = vec![0.0; ambient];
                e[k] = 1.0;
                e
            })
            .collect();
        Self::from_vectors(ambient, &axes)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `k`-th basis vector.
    pub fn basis_vector(&self, k: usize) -> &[f64] {
        &self.basis[k * self.ambient..(k + 1) * self.ambient]
    }

    /// Coordinates of the orthogonal projection of `x` in this basis (`Bᵀx`).
    #[inline]
    pub fn coordinates_into(&self, x: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = dot(self.basis_vector(k), x);
        }
    }

    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.coordinates_into(x, &mut out);
        out
    }

    /// Projection `BBᵀx` back in ambient coordinates.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let c = self.coordinates(x);
        let mut out = vec![0.0; self.ambient];
        for (k, ck) in c.iter().enumerate() {
            for (o, b) in out.iter_mut().zip(self.basis_vector(k)) {
                *o += ck * b;
            }
        }
        out
    }

    /// Largest entry of `|BᵀB − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let g = dot(self.basis_vector(a), self.basis_vector(b));
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Same span, basis rotated by the orthogonal `j × j` matrix `q` (row-major).
    pub fn rebased(&self, q: &[f64]) -> Result<Self> {
        let j = self.dim;
        let vectors: Vec<Vec<f64>> = (0..j)
            .map(|col| {
                let mut v = vec![0.0; self.ambient];
                for k in 0..j {
                    let w = q[k * j + col];
                    for (o, b) in v.iter_mut().zip(self.basis_vector(k)) {
                        *o += w * b;
                    }
                }
                v
            })
            .collect();
        Self::from_vectors(self.ambient, &vectors)
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass; returns the rank found.
fn gram_schmidt(ambient: usize, count: usize, basis: &mut [f64]) -> usize {
    for k in 0..count {
        let scale = norm(&basis[k * ambient..(k + 1) * ambient]);
        if scale == 0.0 {
            return k;
        }
        for _pass in 0..2 {
            for prev in 0..k {
                let (head, tail) = basis.split_at_mut(k * ambient);
                let q = &head[prev * ambient..(prev + 1) * ambient];
                let v = &mut tail[..ambient];
                let c = dot(q, v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let v = &mut basis[k * ambient..(k + 1) * ambient];
        let l = norm(v);
        if l <= ORTHONORMAL_TOL * scale {
            return k;
        }
        v.iter_mut().for_each(|x| *x /= l);
    }
    count
}

/// Haar-distributed random element of the Grassmannian `G(n, j)`.
///
/// The span of `j` independent standard Gaussian vectors is rotation
/// invariant; a numerically dependent draw is simply redrawn.
pub fn haar_subspace<R: Rng + ?Sized>(n: usize, j: usize, rng: &mut R) -> Result<Subspace> {
    if j == 0 || j > n {
        return Err(Error::out_of_range("j", format!("need 1 ≤ j ≤ {n}, got {j}")));
    }
    let mut basis = vec![0.0; n * j];
    loop {
        basis
            .iter_mut()
            .for_each(|x| *x = rng.sample(StandardNormal));
        if gram_schmidt(n, j, &mut basis) == j {
            let sub = Subspace {
                ambient: n,
                dim: j,
                basis,
            };
            debug_assert!(sub.orthonormality_defect() <= ORTHONORMAL_TOL);
            return Ok(sub);
        }
    }
}

/// Angle `arccos |P_L z|` between a unit vector and a subspace.
pub fn angle_to_subspace(z: &[f64], l: &Subspace) -> Result<f64> {
    if z.len() != l.ambient {
        return Err(Error::DimensionMismatch {
            expected: l.ambient,
            got: z.len(),
        });
    }
    let nz = norm(z);
    if (nz - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitVector { norm: nz });
    }
    // atan2 of the residual against the projection keeps small angles accurate
    let p = l.project(z);
    let along = norm(&p);
    let across: f64 = z
        .iter()
        .zip(&p)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(across.atan2(along))
}

/// Monte Carlo probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub hits: usize,
    pub trials: usize,
}

impl ProbabilityEstimate {
    pub fn from_counts(hits: usize, trials: usize) -> Self {
        let p = hits as f64 / trials as f64;
        Self {
            probability: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            hits,
            trials,
        }
    }
}

/// `ν_j({L : ∠(e₁, L) ≤ a})` estimated from `num_mc` Haar draws.
pub fn subspace_angle_measure<R: Rng + ?Sized>(
    n: usize,
    j: usize,
    a: f64,
    num_mc: usize,
    rng: &mut R,
) -> Result<ProbabilityEstimate> {
    Ok(subspace_angle_measure_curve(n, j, &[a], num_mc, rng)?[0])
}

/// The same estimate for several thresholds from one set of draws, so the
/// curve is exactly monotone in `a`.
pub fn subspace_angle_measure_curve<R: Rng + ?Sized>(
    n: usize,
    j: usize,
    thresholds: &[f64],
    num_mc: usize,
    rng: &mut R,
) -> Result<Vec<ProbabilityEstimate>> {
    if j == 0 || j >= n {
        return Err(Error::out_of_range(
            "j",
            format!("angle measure needs 1 ≤ j ≤ n-1 = {}, got {j}", n.saturating_sub(1)),
        ));
    }
    if let Some(&a) = thresholds.iter().find(|&&a| !(a > 0.0 && a <= FRAC_PI_2)) {
        return Err(Error::out_of_range("a", format!("{a} not in (0, π/2]")));
    }
    if num_mc == 0 {
        return Err(Error::out_of_range("num_mc", "need at least one draw"));
    }
    let mut hits = vec![0usize; thresholds.len()];
    // ∠ ≤ a ⇔ |P_L e₁|² ≥ cos² a; P_L e₁ has squared norm Σ_k (b_k)₁²
    let cos2: Vec<f64> = thresholds.iter().map(|a| a.cos().powi(2)).collect();
    for _ in 0..num_mc {
        let l = haar_subspace(n, j, rng)?;
        let proj2: f64 = (0..j).map(|k| l.basis_vector(k)[0].powi(2)).sum();
        for (h, &c2) in hits.iter_mut().zip(&cos2) {
            if proj2 >= c2 - 1e-15 {
                *h += 1;
            }
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| ProbabilityEstimate::from_counts(h, num_mc))
        .collect())
}
