//! Andrew's monotone chain for planar hulls.

#[inline]
fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Indices of the hull vertices in counter-clockwise order, collinear points dropped.
///
/// `pts` is reordered in place (sorted lexicographically); returned indices
/// refer to the sorted order, with the original index carried in `.2`.
pub(crate) fn monotone_chain(pts: &mut [(f64, f64, usize)], tol: f64) -> Vec<usize> {
    pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let n = pts.len();
    if n < 3 {
        return (0..n).collect();
    }
    let at = |i: usize| (pts[i].0, pts[i].1);
    let mut hull: Vec<usize> = Vec::with_capacity(n + 1);
    for i in 0..n {
        while hull.len() >= 2 && cross(at(hull[hull.len() - 2]), at(hull[hull.len() - 1]), at(i)) <= tol {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for i in (0..n - 1).rev() {
        while hull.len() >= lower
            && cross(at(hull[hull.len() - 2]), at(hull[hull.len() - 1]), at(i)) <= tol
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

/// Area of the convex hull of planar points (shoelace over the chain).
pub(crate) fn hull_area(pts: &mut [(f64, f64, usize)]) -> f64 {
    let tol = collinear_tol(pts);
    let ring = monotone_chain(pts, tol);
    if ring.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for k in 0..ring.len() {
        let a = pts[ring[k]];
        let b = pts[ring[(k + 1) % ring.len()]];
        twice += a.0 * b.1 - a.1 * b.0;
    }
    0.5 * twice
}

/// Orientation tolerance scaled to the squared extent of the input.
pub(crate) fn collinear_tol(pts: &[(f64, f64, usize)]) -> f64 {
    let mut ext = 0.0f64;
    for p in pts {
        ext = ext.max(p.0.abs()).max(p.1.abs());
    }
    1e-14 * ext * ext
}
