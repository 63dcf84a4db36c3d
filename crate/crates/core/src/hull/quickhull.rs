//! Dimension-generic quickhull producing simplicial facets.

use std::collections::HashMap;

use super::linalg::simplex_normal;
use crate::error::{Error, Result};
use crate::geometry::{dot, PointCloud};

/// Relative distance tolerances tried in turn when a build loses consistency.
const EPS_LADDER: [f64; 3] = [1e-12, 1e-10, 1e-9];

struct Facet {
    verts: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    /// `neighbors[k]` shares the ridge opposite `verts[k]`.
    neighbors: Vec<usize>,
    outside: Vec<usize>,
    furthest: usize,
    furthest_dist: f64,
    alive: bool,
    stamp: u32,
}

struct Builder<'a> {
    pts: &'a PointCloud,
    d: usize,
    eps: f64,
    center: Vec<f64>,
    facets: Vec<Facet>,
    scratch: Vec<f64>,
}

/// Facets of the hull as flat `F × d` lists of input indices.
pub(crate) fn quickhull(pts: &PointCloud) -> Result<Vec<usize>> {
    let d = pts.dim();
    if pts.len() < d + 1 {
        return Err(Error::TooFewPoints {
            need: d + 1,
            got: pts.len(),
        });
    }
    let extent = extent(pts);
    if extent == 0.0 {
        return Err(Error::DegenerateInput { rank: 0, dim: d });
    }
    let mut last = None;
    for rel in EPS_LADDER {
        match Builder::run(pts, rel * extent) {
            Ok(f) => return Ok(f),
            Err(e @ Error::DegenerateInput { .. }) => return Err(e),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("ladder is non-empty"))
}

pub(crate) fn extent(pts: &PointCloud) -> f64 {
    let d = pts.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in pts.iter() {
        for c in 0..d {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    (0..d).map(|c| hi[c] - lo[c]).fold(0.0, f64::max)
}

impl<'a> Builder<'a> {
    fn run(pts: &'a PointCloud, eps: f64) -> Result<Vec<usize>> {
        let d = pts.dim();
        let simplex = initial_simplex(pts, eps)?;
        let mut center = vec![0.0; d];
        for &i in &simplex {
            for (c, x) in center.iter_mut().zip(pts.point(i)) {
                *c += x / (d + 1) as f64;
            }
        }
        let mut b = Builder {
            pts,
            d,
            eps,
            center,
            facets: Vec::new(),
            scratch: vec![0.0; d * d],
        };
        for m in 0..=d {
            let verts: Vec<usize> = simplex
                .iter()
                .enumerate()
                .filter(|&(w, _)| w != m)
                .map(|(_, &s)| s)
                .collect();
            let neighbors: Vec<usize> = (0..=d).filter(|&w| w != m).collect();
            b.push_facet(verts, neighbors)?;
        }

        let mut in_simplex = vec![false; pts.len()];
        for &s in &simplex {
            in_simplex[s] = true;
        }
        let all: Vec<usize> = (0..pts.len()).filter(|&i| !in_simplex[i]).collect();
        let initial: Vec<usize> = (0..=d).collect();
        b.assign(&all, &initial, usize::MAX);

        let mut queue: Vec<usize> = (0..=d).filter(|&f| !b.facets[f].outside.is_empty()).collect();
        let mut stamp = 0u32;
        let mut ridges: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        while let Some(start) = queue.pop() {
            if !b.facets[start].alive || b.facets[start].outside.is_empty() {
                continue;
            }
            stamp += 1;
            let apex = b.facets[start].furthest;
            let apex_pt = pts.point(apex);

            // flood the visible region
            let mut visible = vec![start];
            b.facets[start].stamp = stamp;
            let mut cursor = 0;
            while cursor < visible.len() {
                let f = visible[cursor];
                cursor += 1;
                for k in 0..d {
                    let g = b.facets[f].neighbors[k];
                    if b.facets[g].stamp == stamp {
                        continue;
                    }
                    if b.distance(g, apex_pt) > eps {
                        b.facets[g].stamp = stamp;
                        visible.push(g);
                    }
                }
            }

            // cone over the horizon
            ridges.clear();
            let mut created = Vec::new();
            for &f in &visible {
                for k in 0..d {
                    let g = b.facets[f].neighbors[k];
                    if b.facets[g].stamp == stamp {
                        continue;
                    }
                    let mut verts = b.facets[f].verts.clone();
                    verts[k] = apex;
                    let mut neighbors = vec![usize::MAX; d];
                    neighbors[k] = g;
                    let id = b.push_facet(verts, neighbors)?;
                    let slot = b.facets[g]
                        .neighbors
                        .iter()
                        .position(|&h| h == f)
                        .ok_or_else(|| Error::HullConstruction("asymmetric adjacency".into()))?;
                    b.facets[g].neighbors[slot] = id;
                    for m in (0..d).filter(|&m| m != k) {
                        let mut key: Vec<usize> = b.facets[id]
                            .verts
                            .iter()
                            .enumerate()
                            .filter(|&(s, _)| s != m)
                            .map(|(_, &v)| v)
                            .collect();
                        key.sort_unstable();
                        match ridges.remove(&key) {
                            Some((other, oslot)) => {
                                b.facets[id].neighbors[m] = other;
                                b.facets[other].neighbors[oslot] = id;
                            }
                            None => {
                                ridges.insert(key, (id, m));
                            }
                        }
                    }
                    created.push(id);
                }
            }
            if !ridges.is_empty() {
                return Err(Error::HullConstruction("horizon is not a closed ridge cycle".into()));
            }

            let mut orphans = Vec::new();
            for &f in &visible {
                b.facets[f].alive = false;
                orphans.append(&mut b.facets[f].outside);
            }
            b.assign(&orphans, &created, apex);
            queue.extend(created.iter().copied().filter(|&f| !b.facets[f].outside.is_empty()));
        }

        let mut out = Vec::new();
        for f in b.facets.iter().filter(|f| f.alive) {
            out.extend_from_slice(&f.verts);
        }
        Ok(out)
    }

    #[inline]
    fn distance(&self, f: usize, p: &[f64]) -> f64 {
        dot(&self.facets[f].normal, p) - self.facets[f].offset
    }

    fn push_facet(&mut self, verts: Vec<usize>, neighbors: Vec<usize>) -> Result<usize> {
        let d = self.d;
        for (k, &v) in verts.iter().enumerate() {
            self.scratch[k * d..(k + 1) * d].copy_from_slice(self.pts.point(v));
        }
        let mut normal = vec![0.0; d];
        simplex_normal(&self.scratch, d, &mut normal);
        let len = dot(&normal, &normal).sqrt();
        if !(len > 0.0) {
            return Err(Error::HullConstruction("zero-area facet".into()));
        }
        normal.iter_mut().for_each(|x| *x /= len);
        let mut offset = dot(&normal, self.pts.point(verts[0]));
        if dot(&normal, &self.center) > offset {
            normal.iter_mut().for_each(|x| *x = -*x);
            offset = -offset;
        }
        self.facets.push(Facet {
            verts,
            normal,
            offset,
            neighbors,
            outside: Vec::new(),
            furthest: usize::MAX,
            furthest_dist: 0.0,
            alive: true,
            stamp: 0,
        });
        Ok(self.facets.len() - 1)
    }

    /// Give each point to the first candidate facet it lies strictly above.
    fn assign(&mut self, points: &[usize], candidates: &[usize], skip: usize) {
        for &p in points {
            if p == skip {
                continue;
            }
            let x = self.pts.point(p);
            for &f in candidates {
                let dist = self.distance(f, x);
                if dist > self.eps {
                    let facet = &mut self.facets[f];
                    facet.outside.push(p);
                    if dist > facet.furthest_dist {
                        facet.furthest_dist = dist;
                        facet.furthest = p;
                    }
                    break;
                }
            }
        }
    }
}

/// `d + 1` affinely independent input indices chosen greedily for spread.
fn initial_simplex(pts: &PointCloud, eps: f64) -> Result<Vec<usize>> {
    let d = pts.dim();
    let n = pts.len();
    let first = (0..n)
        .min_by(|&a, &b| pts.point(a)[0].total_cmp(&pts.point(b)[0]))
        .expect("non-empty");
    let origin = pts.point(first).to_vec();
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut v = vec![0.0; d];
    for rank in 0..d {
        let mut best = (usize::MAX, -1.0f64);
        for i in 0..n {
            let p = pts.point(i);
            for c in 0..d {
                v[c] = p[c] - origin[c];
            }
            for q in &basis {
                let c = dot(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
            let r2 = dot(&v, &v);
            if r2 > best.1 {
                best = (i, r2);
            }
        }
        if best.1.max(0.0).sqrt() <= eps {
            return Err(Error::DegenerateInput { rank, dim: d });
        }
        let p = pts.point(best.0);
        let mut dir: Vec<f64> = (0..d).map(|c| p[c] - origin[c]).collect();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &dir);
                for (x, y) in dir.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let l = dot(&dir, &dir).sqrt();
        dir.iter_mut().for_each(|x| *x /= l);
        basis.push(dir);
        chosen.push(best.0);
    }
    Ok(chosen)
}
