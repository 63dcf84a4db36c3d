//! Sample statistics: distance to the standard normal, moments, power-law fits.

use statrs::function::erf::{erf_inv, erfc};

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal quantile, polished with two Newton steps.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = SQRT_2 * erf_inv(2.0 * p - 1.0);
    for _ in 0..2 {
        let d = normal_pdf(x);
        if d > 0.0 {
            x -= (normal_cdf(x) - p) / d;
        }
    }
    x
}

/// `∫_{-∞}^x Φ`.
fn phi_integral(x: f64) -> f64 {
    x * normal_cdf(x) + normal_pdf(x)
}

/// `∫_a^b (Φ − c)`, evaluated on whichever side of zero keeps `∫Φ` small.
fn signed_area(a: f64, b: f64, c: f64) -> f64 {
    if a + b <= 0.0 {
        phi_integral(b) - phi_integral(a) - c * (b - a)
    } else {
        // Φ(x) = 1 − Φ(−x)
        (1.0 - c) * (b - a) - (phi_integral(-a) - phi_integral(-b))
    }
}

/// `∫_a^b |Φ − c|` for finite `a < b`.
fn abs_area(a: f64, b: f64, c: f64) -> f64 {
    let x = normal_quantile(c);
    if x > a && x < b {
        signed_area(a, x, c).abs() + signed_area(x, b, c).abs()
    } else {
        signed_area(a, b, c).abs()
    }
}

/// Wasserstein-1 distance between the empirical law of `sample` and `N(0, 1)`.
///
/// Computed exactly as `∫ |F_M − Φ|`, piece by piece between order statistics.
pub fn wasserstein1_to_std_normal(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::SampleTooSmall { need: 1, got: 0 });
    }
    if let Some(bad) = sample.iter().find(|v| !v.is_finite()) {
        return Err(Error::out_of_range("sample", format!("non-finite value {bad}")));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let mut total = phi_integral(xs[0]) + phi_integral(-xs[xs.len() - 1]);
    for (k, w) in xs.windows(2).enumerate() {
        if w[1] > w[0] {
            total += abs_area(w[0], w[1], (k + 1) as f64 / m);
        }
    }
    Ok(total)
}

/// Mean, unbiased variance and standardized third moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// `m₃ / m₂^{3/2}` from central moments; `None` below three values or with zero spread.
    pub skewness: Option<f64>,
}

impl SampleMoments {
    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

pub fn empirical_moments(sample: &[f64]) -> Result<SampleMoments> {
    let count = sample.len();
    if count < 2 {
        return Err(Error::SampleTooSmall { need: 2, got: count });
    }
    let m = count as f64;
    let mean = sample.iter().sum::<f64>() / m;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    let variance = m2 / (m - 1.0);
    let skewness = (count >= 3 && m2 > 0.0).then(|| (m3 / m) / (m2 / m).powf(1.5));
    Ok(SampleMoments {
        count,
        mean,
        variance,
        skewness,
    })
}

/// Least-squares fit of `log y = log_intercept + exponent · log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
}

impl PowerLawFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.log_intercept + self.exponent * x.ln()).exp()
    }
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::SampleTooSmall {
            need: 3,
            got: points.len(),
        });
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::out_of_range("points", format!("({x}, {y}) is not in the positive quadrant")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::out_of_range("points", "all abscissae coincide"));
    }
    let exponent = sxy / sxx;
    let log_intercept = my - exponent * mx;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - log_intercept - exponent * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(PowerLawFit {
        exponent,
        log_intercept,
        r_squared,
    })
}

/// Number of adjacent pairs in which the sequence fails to decrease.
pub fn increases(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] >= w[0]).count()
}
