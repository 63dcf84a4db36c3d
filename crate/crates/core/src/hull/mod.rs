//! Convex hulls of finite point sets and the polytope type built from them.
//!
//! Facets are stored triangulated: a geometric facet with more than `d`
//! vertices appears as several simplices sharing one normal. Planar input
//! goes through a monotone chain, higher dimensions through quickhull.

mod linalg;
mod planar;
mod quickhull;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{dot, PointCloud, Subspace};
use linalg::{factorial, simplex_normal};

/// Slack used by membership tests.
pub const CONTAINS_TOL: f64 = 1e-9;

/// A full-dimensional convex polytope with simplicial facets.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: PointCloud,
    source_ids: Vec<usize>,
    normals: Vec<f64>,
    offsets: Vec<f64>,
    /// `num_facets × dim` indices into `vertices`.
    facet_vertices: Vec<usize>,
    facet_areas: Vec<f64>,
    interior: Vec<f64>,
}

/// Convex hull of `points` in their own dimension.
pub fn convex_hull(points: &PointCloud) -> Result<Polytope> {
    let d = points.dim();
    if points.len() < d + 1 {
        return Err(Error::TooFewPoints {
            need: d + 1,
            got: points.len(),
        });
    }
    match d {
        1 => interval_hull(points),
        2 => planar_hull(points),
        _ => {
            let facets = quickhull::quickhull(points)?;
            Polytope::assemble(points, &facets)
        }
    }
}

/// Quickhull in any dimension, including the plane (used to cross-check the monotone chain).
pub fn convex_hull_quickhull(points: &PointCloud) -> Result<Polytope> {
    if points.dim() == 1 {
        return interval_hull(points);
    }
    let facets = quickhull::quickhull(points)?;
    Polytope::assemble(points, &facets)
}

fn interval_hull(points: &PointCloud) -> Result<Polytope> {
    let (mut lo, mut hi) = (0usize, 0usize);
    for i in 1..points.len() {
        let x = points.point(i)[0];
        if x < points.point(lo)[0] {
            lo = i;
        }
        if x > points.point(hi)[0] {
            hi = i;
        }
    }
    let (a, b) = (points.point(lo)[0], points.point(hi)[0]);
    if !(b > a) {
        return Err(Error::DegenerateInput { rank: 0, dim: 1 });
    }
    Ok(Polytope {
        dim: 1,
        vertices: PointCloud::from_flat(1, vec![a, b])?,
        source_ids: vec![lo, hi],
        normals: vec![-1.0, 1.0],
        offsets: vec![-a, b],
        facet_vertices: vec![0, 1],
        facet_areas: vec![1.0, 1.0],
        interior: vec![0.5 * (a + b)],
    })
}

fn planar_hull(points: &PointCloud) -> Result<Polytope> {
    let mut pts: Vec<(f64, f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p[0], p[1], i))
        .collect();
    let tol = planar::collinear_tol(&pts);
    let ring = planar::monotone_chain(&mut pts, tol);
    if ring.len() < 3 {
        let distinct = ring.len() == 2 && (pts[ring[0]].0, pts[ring[0]].1) != (pts[ring[1]].0, pts[ring[1]].1);
        return Err(Error::DegenerateInput {
            rank: usize::from(distinct),
            dim: 2,
        });
    }
    let ids: Vec<usize> = ring.iter().map(|&r| pts[r].2).collect();
    let facets: Vec<usize> = (0..ids.len())
        .flat_map(|k| [ids[k], ids[(k + 1) % ids.len()]])
        .collect();
    Polytope::assemble(points, &facets)
}

impl Polytope {
    /// Build from simplicial facets given as `F × d` input indices; planes are
    /// oriented away from the vertex centroid.
    fn assemble(points: &PointCloud, facet_ids: &[usize]) -> Result<Self> {
        let d = points.dim();
        let mut source_ids: Vec<usize> = facet_ids.to_vec();
        source_ids.sort_unstable();
        source_ids.dedup();
        let mut local = std::collections::HashMap::with_capacity(source_ids.len());
        for (k, &s) in source_ids.iter().enumerate() {
            local.insert(s, k);
        }
        let vertices = points.select(&source_ids);
        let interior = vertices.centroid();
        let nf = facet_ids.len() / d;
        let mut normals = vec![0.0; nf * d];
        let mut offsets = vec![0.0; nf];
        let mut areas = vec![0.0; nf];
        let facet_vertices: Vec<usize> = facet_ids.iter().map(|s| local[s]).collect();
        let mut corners = vec![0.0; d * d];
        let scale = quickhull::extent(&vertices);
        let area_norm = factorial(d - 1);
        for f in 0..nf {
            for k in 0..d {
                corners[k * d..(k + 1) * d].copy_from_slice(vertices.point(facet_vertices[f * d + k]));
            }
            let n = &mut normals[f * d..(f + 1) * d];
            simplex_normal(&corners, d, n);
            let len = dot(n, n).sqrt();
            if !(len > 0.0) {
                return Err(Error::DegenerateInput { rank: d - 1, dim: d });
            }
            n.iter_mut().for_each(|x| *x /= len);
            let mut b = dot(n, &corners[..d]);
            if dot(n, &interior) > b {
                n.iter_mut().for_each(|x| *x = -*x);
                b = -b;
            }
            if b - dot(n, &interior) <= 1e-14 * scale {
                return Err(Error::DegenerateInput { rank: d - 1, dim: d });
            }
            offsets[f] = b;
            areas[f] = len / area_norm;
        }
        Ok(Self {
            dim: d,
            vertices,
            source_ids,
            normals,
            offsets,
            facet_vertices,
            facet_areas: areas,
            interior,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points of the input.
    pub fn vertices(&self) -> &PointCloud {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Index of each vertex in the point list the hull was built from.
    pub fn source_ids(&self) -> &[usize] {
        &self.source_ids
    }

    pub fn num_facets(&self) -> usize {
        self.offsets.len()
    }

    pub fn facet_normal(&self, f: usize) -> &[f64] {
        &self.normals[f * self.dim..(f + 1) * self.dim]
    }

    pub fn facet_offset(&self, f: usize) -> f64 {
        self.offsets[f]
    }

    /// Vertex indices (into [`Polytope::vertices`]) of a simplicial facet.
    pub fn facet_vertices(&self, f: usize) -> &[usize] {
        &self.facet_vertices[f * self.dim..(f + 1) * self.dim]
    }

    /// `(d-1)`-volume of a facet simplex.
    pub fn facet_area(&self, f: usize) -> f64 {
        self.facet_areas[f]
    }

    /// Vertex centroid; strictly inside every facet.
    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    /// Lebesgue measure, as a sum of cones from the interior point over facets.
    pub fn volume(&self) -> f64 {
        let d = self.dim as f64;
        (0..self.num_facets())
            .map(|f| {
                let h = self.offsets[f] - dot(self.facet_normal(f), &self.interior);
                self.facet_areas[f] * h / d
            })
            .sum()
    }

    /// Sum of facet `(d-1)`-volumes; for `d = 1` this counts the two endpoints.
    pub fn surface_area(&self) -> f64 {
        self.facet_areas.iter().sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        (0..self.num_facets()).all(|f| dot(self.facet_normal(f), x) <= self.offsets[f] + CONTAINS_TOL)
    }

    pub fn contains_checked(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.contains(x))
    }

    /// Smallest facet offset; for polytopes around the origin this is the
    /// radius of the largest centred ball inside.
    pub fn min_facet_offset(&self) -> f64 {
        self.offsets.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_v ⟨v, u⟩` over the vertices.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Orthogonal projection onto `l`, as a polytope in `l`'s coordinates.
    pub fn project_to_subspace(&self, l: &Subspace) -> Result<Polytope> {
        if l.ambient_dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: l.ambient_dim(),
            });
        }
        let projected = self.vertices.map(l.dim(), |v, out| l.coordinates_into(v, out));
        convex_hull(&projected)
    }

    /// `vol_j(P | L)` without assembling the projected polytope when `j ≤ 2`.
    pub fn projected_volume(&self, l: &Subspace) -> Result<f64> {
        if l.ambient_dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: l.ambient_dim(),
            });
        }
        match l.dim() {
            1 => {
                let u = l.basis_vector(0);
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for v in self.vertices.iter() {
                    let t = dot(v, u);
                    lo = lo.min(t);
                    hi = hi.max(t);
                }
                Ok(hi - lo)
            }
            2 => {
                let (u, w) = (l.basis_vector(0), l.basis_vector(1));
                let mut pts: Vec<(f64, f64, usize)> = self
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (dot(v, u), dot(v, w), i))
                    .collect();
                Ok(planar::hull_area(&mut pts))
            }
            j if j == self.dim => Ok(self.volume()),
            _ => Ok(self.project_to_subspace(l)?.volume()),
        }
    }

    /// Image under `x ↦ λx`.
    pub fn scaled(&self, lambda: f64) -> Polytope {
        assert!(lambda > 0.0, "scale factor must be positive");
        let d = self.dim as i32;
        Polytope {
            dim: self.dim,
            vertices: self.vertices.scaled(lambda),
            source_ids: self.source_ids.clone(),
            normals: self.normals.clone(),
            offsets: self.offsets.iter().map(|b| b * lambda).collect(),
            facet_vertices: self.facet_vertices.clone(),
            facet_areas: self.facet_areas.iter().map(|a| a * lambda.powi(d - 1)).collect(),
            interior: self.interior.iter().map(|x| x * lambda).collect(),
        }
    }

    /// Check the structural invariants; returns a description of the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for f in 0..self.num_facets() {
            let n = self.facet_normal(f);
            let len = dot(n, n).sqrt();
            if (len - 1.0).abs() > 1e-9 {
                return Err(format!("facet {f} normal has length {len}"));
            }
            for (k, v) in self.vertices.iter().enumerate() {
                if dot(n, v) > self.offsets[f] + CONTAINS_TOL {
                    return Err(format!("vertex {k} lies outside facet {f}"));
                }
            }
            for &k in self.facet_vertices(f) {
                let gap = (dot(n, self.vertices.point(k)) - self.offsets[f]).abs();
                if gap > CONTAINS_TOL {
                    return Err(format!("facet {f} vertex {k} is {gap:e} off its plane"));
                }
            }
            if dot(n, &self.interior) >= self.offsets[f] {
                return Err(format!("interior point not strictly inside facet {f}"));
            }
        }
        Ok(())
    }

    /// Debug dump in OFF format (`nOFF` with a dimension line unless `d = 3`).
    pub fn to_off(&self) -> String {
        let mut s = String::new();
        if self.dim == 3 {
            s.push_str("OFF\n");
        } else {
            let _ = writeln!(s, "nOFF\n{}", self.dim);
        }
        let _ = writeln!(s, "{} {} 0", self.num_vertices(), self.num_facets());
        for v in self.vertices.iter() {
            let row: Vec<String> = v.iter().map(|x| format!("{x:.17e}")).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        for f in 0..self.num_facets() {
            let ids: Vec<String> = self.facet_vertices(f).iter().map(|i| i.to_string()).collect();
            let _ = writeln!(s, "{} {}", self.dim, ids.join(" "));
        }
        s
    }
}
