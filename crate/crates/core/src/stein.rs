//! Difference operators of the intrinsic-volume functional and the moment
//! quantities `γ₁..γ₄` entering the second-order normal approximation bound.
//!
//! For a configuration `x` of `N` points, `f(x) = V_j(conv x)` and
//!
//! ```text
//! D_i f(x)       = f(x) − f(x^i)
//! D_{i₁,i₂} f(x) = f(x) − f(x^{i₁}) − f(x^{i₂}) + f(x^{i₁ i₂})
//! ```
//!
//! where `x^i` drops point `i`. The centering constant `E V_j` is left out
//! since it cancels in every difference.
//!
//! Evaluating all differences of a large configuration is made cheap by convex
//! layers: with `V₁, V₂, V₃` the vertex sets of the first three peeled hulls,
//! every closed halfspace meeting a point that is not in `S = V₁ ∪ V₂ ∪ V₃`
//! contains a point of each layer, so removing any two points leaves that
//! point inside `conv(S \ R)`. Hence `conv(x \ R) = conv(S \ R)` when
//! `|R| ≤ 2`, and `V₁ ∪ V₂` suffices for single removals.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, PointCloud, Subspace};
use crate::hull::{convex_hull, Polytope};
use crate::intrinsic::{draw_subspaces, intrinsic_volume_exact, kubota_with_subspaces};
use crate::rng::SeedTree;

/// Second differences at or below this magnitude count as zero.
pub const INTERACTION_TOL: f64 = 1e-12;

const RESAMPLE_LIMIT: usize = 8;

/// `N` points sampled from (and contained in) a body.
#[derive(Debug, Clone)]
pub struct PointConfiguration<'a> {
    points: PointCloud,
    body: &'a ConvexBody,
}

impl<'a> PointConfiguration<'a> {
    pub fn new(points: PointCloud, body: &'a ConvexBody) -> Result<Self> {
        let n = body.dim();
        if points.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: points.dim(),
            });
        }
        if points.len() < n + 1 {
            return Err(Error::TooFewPoints {
                need: n + 1,
                got: points.len(),
            });
        }
        if let Some(i) = points.iter().position(|p| !body.contains(p)) {
            return Err(Error::out_of_range("points", format!("point {i} lies outside the body")));
        }
        Ok(Self { points, body })
    }

    /// `count` i.i.d. uniform points of `body`.
    pub fn sample<R: Rng + ?Sized>(body: &'a ConvexBody, count: usize, rng: &mut R) -> Result<Self> {
        Self::new(body.sample_cloud(rng, count), body)
    }

    pub fn points(&self) -> &PointCloud {
        &self.points
    }

    pub fn body(&self) -> &'a ConvexBody {
        self.body
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Three independent configurations of equal length over a common body.
#[derive(Debug, Clone)]
pub struct RecombinationTriple<'a> {
    pub x: PointConfiguration<'a>,
    pub x_prime: PointConfiguration<'a>,
    pub x_tilde: PointConfiguration<'a>,
}

impl<'a> RecombinationTriple<'a> {
    pub fn new(
        x: PointConfiguration<'a>,
        x_prime: PointConfiguration<'a>,
        x_tilde: PointConfiguration<'a>,
    ) -> Result<Self> {
        for other in [&x_prime, &x_tilde] {
            if other.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: x.len(),
                    got: other.len(),
                });
            }
            if !std::ptr::eq(other.body, x.body) {
                return Err(Error::InvalidBody("recombination sources use different bodies".into()));
            }
        }
        Ok(Self { x, x_prime, x_tilde })
    }

    pub fn sample<R: Rng + ?Sized>(body: &'a ConvexBody, count: usize, rng: &mut R) -> Result<Self> {
        let x = PointConfiguration::sample(body, count, rng)?;
        let x_prime = PointConfiguration::sample(body, count, rng)?;
        let x_tilde = PointConfiguration::sample(body, count, rng)?;
        Self::new(x, x_prime, x_tilde)
    }

    fn source(&self, s: u8) -> &PointConfiguration<'a> {
        match s {
            0 => &self.x,
            1 => &self.x_prime,
            _ => &self.x_tilde,
        }
    }
}

/// The configuration `Z` with `Z_i` taken from `X`, `X'` or `X̃` as `selector[i]` is 0, 1 or 2.
pub fn recombine<'a>(triple: &RecombinationTriple<'a>, selector: &[u8]) -> Result<PointConfiguration<'a>> {
    let len = triple.x.len();
    if selector.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: selector.len(),
        });
    }
    if let Some(&s) = selector.iter().find(|&&s| s > 2) {
        return Err(Error::out_of_range("selector", format!("entry {s} is not 0, 1 or 2")));
    }
    let mut points = PointCloud::with_capacity(triple.x.points.dim(), len);
    for (i, &s) in selector.iter().enumerate() {
        points.push(triple.source(s).points.point(i));
    }
    Ok(PointConfiguration {
        points,
        body: triple.x.body,
    })
}

/// `V_j` of a hull: exact for `j ∈ {0, n−1, n}`, otherwise Kubota over a fixed subspace list.
#[derive(Debug, Clone)]
pub struct Functional {
    n: usize,
    j: usize,
    subspaces: Vec<Subspace>,
}

impl Functional {
    pub fn new(n: usize, j: usize, subspaces: Vec<Subspace>) -> Result<Self> {
        if j > n || n == 0 {
            return Err(Error::UnsupportedIndex { j, n });
        }
        let exact = j == 0 || j + 1 >= n;
        if !exact && subspaces.is_empty() {
            return Err(Error::out_of_range("subspaces", format!("V_{j} in dimension {n} needs Kubota subspaces")));
        }
        Ok(Self { n, j, subspaces })
    }

    /// Functional with `m` subspaces drawn from `rng` when the index needs them.
    pub fn with_random_subspaces<R: Rng + ?Sized>(n: usize, j: usize, m: usize, rng: &mut R) -> Result<Self> {
        let subspaces = if j == 0 || j + 1 >= n || j > n {
            Vec::new()
        } else {
            draw_subspaces(n, j, m, rng)?
        };
        Self::new(n, j, subspaces)
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_exact(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn of_polytope(&self, p: &Polytope) -> Result<f64> {
        if self.is_exact() {
            intrinsic_volume_exact(p, self.j)
        } else {
            Ok(kubota_with_subspaces(p, self.j, &self.subspaces)?.mean)
        }
    }

    pub fn of_points(&self, points: &PointCloud) -> Result<f64> {
        if points.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: points.dim(),
            });
        }
        self.of_polytope(&convex_hull(points)?)
    }
}

/// `f(cfg) = V_j(conv cfg)` with the given shared subspaces.
pub fn functional_f(cfg: &PointConfiguration<'_>, j: usize, subspaces: &[Subspace]) -> Result<f64> {
    Functional::new(cfg.points.dim(), j, subspaces.to_vec())?.of_points(&cfg.points)
}

fn check_index(cfg: &PointConfiguration<'_>, i: usize) -> Result<()> {
    if i >= cfg.len() {
        return Err(Error::out_of_range("i", format!("index {i} with N = {}", cfg.len())));
    }
    Ok(())
}

/// `D_i f(cfg)`, evaluating both hulls with the same subspaces.
pub fn first_difference(cfg: &PointConfiguration<'_>, i: usize, j: usize, subspaces: &[Subspace]) -> Result<f64> {
    let n = cfg.points.dim();
    if cfg.len() < n + 2 {
        return Err(Error::TooFewPoints {
            need: n + 2,
            got: cfg.len(),
        });
    }
    check_index(cfg, i)?;
    let f = Functional::new(n, j, subspaces.to_vec())?;
    Ok(f.of_points(&cfg.points)? - f.of_points(&cfg.points.without(&[i]))?)
}

/// `D_{i₁,i₂} f(cfg)` for distinct indices.
pub fn second_difference(
    cfg: &PointConfiguration<'_>,
    i1: usize,
    i2: usize,
    j: usize,
    subspaces: &[Subspace],
) -> Result<f64> {
    let n = cfg.points.dim();
    if cfg.len() < n + 3 {
        return Err(Error::TooFewPoints {
            need: n + 3,
            got: cfg.len(),
        });
    }
    check_index(cfg, i1)?;
    check_index(cfg, i2)?;
    if i1 == i2 {
        return Err(Error::out_of_range("i2", "second difference needs distinct indices"));
    }
    let f = Functional::new(n, j, subspaces.to_vec())?;
    let p = &cfg.points;
    Ok(f.of_points(p)? - f.of_points(&p.without(&[i1]))? - f.of_points(&p.without(&[i2]))?
        + f.of_points(&p.without(&[i1, i2]))?)
}

/// Every nonzero first and second difference of one configuration.
#[derive(Debug, Clone)]
pub struct DifferenceProfile {
    pub num_points: usize,
    pub value: f64,
    /// `(i, D_i f)` for every hull vertex `i`; all other first differences vanish.
    pub first: Vec<(usize, f64)>,
    /// `(i₁, i₂, D_{i₁,i₂} f)` with `i₁ < i₂` and `|D| > INTERACTION_TOL`.
    pub second: Vec<(usize, usize, f64)>,
}

/// Ids of the first `depth` convex layers, plus the outer hull itself.
fn peel(points: &PointCloud, depth: usize) -> Result<(Polytope, Vec<Vec<usize>>)> {
    let hull = convex_hull(points)?;
    let d = points.dim();
    let mut layers = vec![hull.source_ids().to_vec()];
    let mut taken: HashSet<usize> = layers[0].iter().copied().collect();
    while layers.len() < depth {
        let rest: Vec<usize> = (0..points.len()).filter(|i| !taken.contains(i)).collect();
        if rest.is_empty() {
            break;
        }
        let layer = if rest.len() < d + 1 {
            rest
        } else {
            match convex_hull(&points.select(&rest)) {
                Ok(h) => h.source_ids().iter().map(|&k| rest[k]).collect(),
                // a flat remainder: keep all of it, which is always safe
                Err(e) if e.is_numerical() => rest,
                Err(e) => return Err(e),
            }
        };
        taken.extend(layer.iter().copied());
        layers.push(layer);
    }
    Ok((hull, layers))
}

/// Facets as sorted point ids; `ids` maps the hull's input positions to global ids.
fn facet_keys(p: &Polytope, ids: Option<&[usize]>) -> Vec<Vec<usize>> {
    let src = p.source_ids();
    (0..p.num_facets())
        .map(|f| {
            let mut key: Vec<usize> = p
                .facet_vertices(f)
                .iter()
                .map(|&v| ids.map_or(src[v], |m| m[src[v]]))
                .collect();
            key.sort_unstable();
            key
        })
        .collect()
}

impl DifferenceProfile {
    /// All first and second differences, using convex layers and, for exact
    /// indices, the fact that `D_{a,b}` can only be nonzero when `b` is a vertex of
    /// a facet created by removing `a` (or vice versa).
    pub fn compute(points: &PointCloud, f: &Functional) -> Result<Self> {
        Self::build(points, f, true)
    }

    /// First differences only; `second` is left empty.
    pub fn first_only(points: &PointCloud, f: &Functional) -> Result<Self> {
        Self::build(points, f, false)
    }

    fn build(points: &PointCloud, f: &Functional, with_second: bool) -> Result<Self> {
        let n = points.dim();
        if points.len() < n + 3 {
            return Err(Error::TooFewPoints {
                need: n + 3,
                got: points.len(),
            });
        }
        let (hull, layers) = peel(points, if with_second { 3 } else { 2 })?;
        let value = f.of_polytope(&hull)?;
        let v1 = &layers[0];
        let s2: Vec<usize> = layers.iter().take(2).flatten().copied().collect();
        let old_facets: HashSet<Vec<usize>> = facet_keys(&hull, None).into_iter().collect();

        let mut first = Vec::with_capacity(v1.len());
        let mut reduced_value = vec![value; points.len()];
        let mut candidates: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &a in v1 {
            let keep: Vec<usize> = s2.iter().copied().filter(|&k| k != a).collect();
            let h = convex_hull(&points.select(&keep))?;
            let fa = f.of_polytope(&h)?;
            reduced_value[a] = fa;
            first.push((a, value - fa));
            if !with_second {
                continue;
            }
            if f.is_exact() {
                for key in facet_keys(&h, Some(&keep)) {
                    if !old_facets.contains(&key) {
                        for b in key {
                            candidates.insert((a.min(b), a.max(b)));
                        }
                    }
                }
            } else {
                for &b in &s2 {
                    if b != a {
                        candidates.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }

        let mut second = Vec::new();
        if with_second {
            let s3: Vec<usize> = layers.iter().flatten().copied().collect();
            for (a, b) in candidates {
                let keep: Vec<usize> = s3.iter().copied().filter(|&k| k != a && k != b).collect();
                let fab = f.of_points(&points.select(&keep))?;
                let d = value - reduced_value[a] - reduced_value[b] + fab;
                if d.abs() > INTERACTION_TOL {
                    second.push((a, b, d));
                }
            }
        }
        Ok(Self {
            num_points: points.len(),
            value,
            first,
            second,
        })
    }

    /// First differences as a dense vector over all point indices.
    pub fn dense_first(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_points];
        for &(i, d) in &self.first {
            out[i] = d;
        }
        out
    }

    /// Index average `N⁻¹ Σ_i (D_i f)^p`.
    pub fn mean_power(&self, p: i32) -> f64 {
        self.first.iter().map(|&(_, d)| d.abs().powi(p)).sum::<f64>() / self.num_points as f64
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_points];
        for &(a, b, _) in &self.second {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// `(N(N−1))⁻¹ Σ_{a≠b} 1{D_{a,b} f(Y) ≠ 0} (D_a f(Z))² (D_b f(Z'))²`.
fn gamma2_term(y: &DifferenceProfile, dz: &[f64], dz2: &[f64]) -> f64 {
    let n = y.num_points as f64;
    let sum: f64 = y
        .second
        .iter()
        .map(|&(a, b, _)| (dz[a] * dz2[b]).powi(2) + (dz[b] * dz2[a]).powi(2))
        .sum();
    sum / (n * (n - 1.0))
}

/// `(N(N−1)(N−2))⁻¹ Σ 1{D_{a,b} f(Y) ≠ 0} 1{D_{a,c} f(Y') ≠ 0} (D_b f(Z))² (D_c f(Z'))²` over distinct `a, b, c`.
fn gamma1_term(adj_y: &[Vec<usize>], adj_y2: &[Vec<usize>], dz: &[f64], dz2: &[f64]) -> f64 {
    let n = adj_y.len() as f64;
    let mut sum = 0.0;
    for (ny, ny2) in adj_y.iter().zip(adj_y2) {
        if ny.is_empty() || ny2.is_empty() {
            continue;
        }
        let sb: f64 = ny.iter().map(|&b| dz[b] * dz[b]).sum();
        let sc: f64 = ny2.iter().map(|&c| dz2[c] * dz2[c]).sum();
        let diag: f64 = ny.iter().filter(|b| ny2.contains(b)).map(|&b| (dz[b] * dz2[b]).powi(2)).sum();
        sum += sb * sc - diag;
    }
    sum / (n * (n - 1.0) * (n - 2.0))
}

/// Role assignments of a recombination pattern: which of the sampled
/// configurations plays `Y`, `Y'`, `Z`, `Z'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub label: String,
    pub roles: Vec<usize>,
}

/// Set partitions of `k` roles into at most three blocks, as restricted growth strings.
fn pure_patterns(k: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(pos: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Pattern>) {
        if pos == cur.len() {
            let label: String = cur.iter().map(|&r| ['X', 'P', 'T'][r]).collect();
            out.push(Pattern { label, roles: cur.clone() });
            return;
        }
        for v in 0..=(max + 1).min(2) {
            cur[pos] = v;
            rec(pos + 1, max.max(v), cur, out);
        }
    }
    rec(1, 0, &mut cur, &mut out);
    out
}

/// Tuning for [`estimate_gammas_with`].
#[derive(Debug, Clone)]
pub struct GammaOptions {
    /// Random mixed recombinations per replicate, in addition to the pure ones.
    pub mixed_patterns: usize,
    /// Kubota subspaces when the index is not exact.
    pub kubota_subspaces: usize,
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self {
            mixed_patterns: 1,
            kubota_subspaces: 64,
        }
    }
}

/// Monte Carlo estimates of `γ₁..γ₄`.
///
/// `γ₁` and `γ₂` are suprema over recombinations in the definition; here they
/// are the largest estimate over the sampled patterns and therefore lower
/// bounds ("sampled-sup").
#[derive(Debug, Clone, PartialEq)]
pub struct GammaEstimates {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub std_errors: [f64; 4],
    pub num_mc: usize,
    /// Pattern attaining the sampled supremum for `γ₁` and `γ₂`.
    pub sup_patterns: [String; 2],
}

/// Everything a γ run produces, including the functional values of the base configurations.
#[derive(Debug, Clone)]
pub struct GammaSample {
    pub gammas: GammaEstimates,
    /// `f(X)` for each replicate's three independent base configurations.
    pub values: Vec<f64>,
    /// Index-averaged `E (D₁f)^p` for `p = 1..4`.
    pub d1_moments: [f64; 4],
}

struct Replicate {
    g1: Vec<f64>,
    g2: Vec<f64>,
    powers: [f64; 4],
    values: [f64; 3],
}

fn mean_and_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let m = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / m;
    if m < 2.0 {
        return (mean, f64::NAN);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn run_replicate<R: Rng + ?Sized>(
    body: &ConvexBody,
    f: &Functional,
    count: usize,
    opts: &GammaOptions,
    p1: &[Pattern],
    p2: &[Pattern],
    rng: &mut R,
) -> Result<Replicate> {
    let triple = RecombinationTriple::sample(body, count, rng)?;
    let mut configs = vec![triple.x.points.clone(), triple.x_prime.points.clone(), triple.x_tilde.points.clone()];
    for _ in 0..opts.mixed_patterns {
        for _ in 0..4 {
            let sel: Vec<u8> = (0..count).map(|_| rng.random_range(0..3u8)).collect();
            configs.push(recombine(&triple, &sel)?.points);
        }
    }
    let profiles: Vec<DifferenceProfile> =
        configs.iter().map(|c| DifferenceProfile::compute(c, f)).collect::<Result<_>>()?;
    let dense: Vec<Vec<f64>> = profiles.iter().map(DifferenceProfile::dense_first).collect();
    let adj: Vec<Vec<Vec<usize>>> = profiles.iter().map(DifferenceProfile::adjacency).collect();

    let mut g2: Vec<f64> = p2
        .iter()
        .map(|p| gamma2_term(&profiles[p.roles[0]], &dense[p.roles[1]], &dense[p.roles[2]]))
        .collect();
    let mut g1: Vec<f64> = p1
        .iter()
        .map(|p| gamma1_term(&adj[p.roles[0]], &adj[p.roles[1]], &dense[p.roles[2]], &dense[p.roles[3]]))
        .collect();
    for k in 0..opts.mixed_patterns {
        let base = 3 + 4 * k;
        g2.push(gamma2_term(&profiles[base], &dense[base + 2], &dense[base + 3]));
        g1.push(gamma1_term(&adj[base], &adj[base + 1], &dense[base + 2], &dense[base + 3]));
    }
    let mut powers = [0.0; 4];
    for (k, slot) in powers.iter_mut().enumerate() {
        *slot = profiles[..3].iter().map(|p| p.mean_power(k as i32 + 1)).sum::<f64>() / 3.0;
    }
    Ok(Replicate {
        g1,
        g2,
        powers,
        values: [profiles[0].value, profiles[1].value, profiles[2].value],
    })
}

/// [`estimate_gammas_with`] with default options.
pub fn estimate_gammas<R: Rng + ?Sized>(
    body: &ConvexBody,
    j: usize,
    count: usize,
    num_mc: usize,
    rng: &mut R,
) -> Result<GammaEstimates> {
    Ok(estimate_gammas_with(body, j, count, num_mc, &GammaOptions::default(), rng)?.gammas)
}

/// Monte Carlo `γ₁..γ₄` for `N = count` uniform points in `body`.
///
/// Replicates run on the current rayon pool. Each replicate draws from its own
/// stream split off a seed taken from `rng`, so results do not depend on the
/// number of workers. Index averaging over all `(i₁, i₂, i₃)` is used in place
/// of the fixed indices `1, 2, 3`, which is unbiased by exchangeability.
pub fn estimate_gammas_with<R: Rng + ?Sized>(
    body: &ConvexBody,
    j: usize,
    count: usize,
    num_mc: usize,
    opts: &GammaOptions,
    rng: &mut R,
) -> Result<GammaSample> {
    let n = body.dim();
    if count < n + 3 {
        return Err(Error::TooFewPoints { need: n + 3, got: count });
    }
    if num_mc < 2 {
        return Err(Error::SampleTooSmall { need: 2, got: num_mc });
    }
    let f = Functional::with_random_subspaces(n, j, opts.kubota_subspaces, rng)?;
    let tree = SeedTree::new(rng.random());
    let p1 = pure_patterns(4);
    let p2 = pure_patterns(3);

    let reps: Vec<Replicate> = (0..num_mc)
        .into_par_iter()
        .map(|r| {
            let mut rng = tree.stream("gamma", count as u64, r as u64);
            let mut last = None;
            for _ in 0..RESAMPLE_LIMIT {
                match run_replicate(body, &f, count, opts, &p1, &p2, &mut rng) {
                    Ok(rep) => return Ok(rep),
                    Err(e) if e.is_numerical() => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.expect("at least one attempt"))
        })
        .collect::<Result<_>>()?;

    let labels = |pure: &[Pattern]| -> Vec<String> {
        pure.iter()
            .map(|p| p.label.clone())
            .chain((0..opts.mixed_patterns).map(|k| format!("mixed{k}")))
            .collect()
    };
    let sup = |pick: &dyn Fn(&Replicate) -> &Vec<f64>, names: Vec<String>| -> (f64, f64, String) {
        let mut best = (f64::NEG_INFINITY, f64::NAN, String::new());
        for (k, name) in names.into_iter().enumerate() {
            let (m, se) = mean_and_se(reps.iter().map(|r| pick(r)[k]));
            if m > best.0 {
                best = (m, se, name);
            }
        }
        best
    };
    let (g1, se1, pat1) = sup(&|r| &r.g1, labels(&p1));
    let (g2, se2, pat2) = sup(&|r| &r.g2, labels(&p2));
    let (g3, se3) = mean_and_se(reps.iter().map(|r| r.powers[3]));
    let (g4, se4) = mean_and_se(reps.iter().map(|r| r.powers[2]));
    let mut d1_moments = [0.0; 4];
    for (k, slot) in d1_moments.iter_mut().enumerate() {
        *slot = mean_and_se(reps.iter().map(|r| r.powers[k])).0;
    }
    Ok(GammaSample {
        gammas: GammaEstimates {
            gamma1: g1,
            gamma2: g2,
            gamma3: g3,
            gamma4: g4,
            std_errors: [se1, se2, se3, se4],
            num_mc,
            sup_patterns: [pat1, pat2],
        },
        values: reps.iter().flat_map(|r| r.values).collect(),
        d1_moments,
    })
}

/// The normal-approximation bound with implicit constant 1, addend by addend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinBound {
    /// `√N/Var · √(N²γ₁)`, `√N/Var · √(Nγ₂)`, `√N/Var · √γ₃`, `N/Var^{3/2} · γ₄`.
    pub terms: [f64; 4],
    pub total: f64,
}

pub fn normal_approximation_bound(g: &GammaEstimates, var_w: f64, count: usize) -> Result<SteinBound> {
    if !(var_w > 0.0) {
        return Err(Error::out_of_range("var_w", format!("variance {var_w} is not positive")));
    }
    let n = count as f64;
    let lead = n.sqrt() / var_w;
    let terms = [
        lead * (n * n * g.gamma1).sqrt(),
        lead * (n * g.gamma2).sqrt(),
        lead * g.gamma3.sqrt(),
        n / var_w.powf(1.5) * g.gamma4,
    ];
    Ok(SteinBound {
        terms,
        total: terms.iter().sum(),
    })
}

#[cfg(test)]
mod tests;
