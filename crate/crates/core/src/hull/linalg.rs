//! Small dense helpers for facet planes.

/// Determinant of a square row-major matrix by partial-pivot elimination (destroys `m`).
pub(crate) fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let mut piv = c;
        for r in c + 1..n {
            if m[r * n + c].abs() > m[piv * n + c].abs() {
                piv = r;
            }
        }
        let p = m[piv * n + c];
        if p == 0.0 {
            return 0.0;
        }
        if piv != c {
            for k in 0..n {
                m.swap(c * n + k, piv * n + k);
            }
            det = -det;
        }
        det *= p;
        for r in c + 1..n {
            let f = m[r * n + c] / p;
            if f != 0.0 {
                for k in c..n {
                    m[r * n + k] -= f * m[c * n + k];
                }
            }
        }
    }
    det
}

/// Generalized cross product of the `d-1` edge vectors `p_k - p_0`.
///
/// `corners` holds `d` points of dimension `d`, row-major. The result is
/// orthogonal to every edge and its length is `(d-1)!` times the
/// `(d-1)`-volume of the simplex spanned by the corners.
pub(crate) fn simplex_normal(corners: &[f64], d: usize, out: &mut [f64]) {
    debug_assert_eq!(corners.len(), d * d);
    match d {
        1 => out[0] = 1.0,
        2 => {
            let ex = corners[2] - corners[0];
            let ey = corners[3] - corners[1];
            out[0] = ey;
            out[1] = -ex;
        }
        3 => {
            let a = [
                corners[3] - corners[0],
                corners[4] - corners[1],
                corners[5] - corners[2],
            ];
            let b = [
                corners[6] - corners[0],
                corners[7] - corners[1],
                corners[8] - corners[2],
            ];
            out[0] = a[1] * b[2] - a[2] * b[1];
            out[1] = a[2] * b[0] - a[0] * b[2];
            out[2] = a[0] * b[1] - a[1] * b[0];
        }
        _ => {
            let m = d - 1;
            let mut edges = vec![0.0; m * d];
            for k in 0..m {
                for c in 0..d {
                    edges[k * d + c] = corners[(k + 1) * d + c] - corners[c];
                }
            }
            let mut minor = vec![0.0; m * m];
            for (i, o) in out.iter_mut().enumerate().take(d) {
                for k in 0..m {
                    let mut col = 0;
                    for c in 0..d {
                        if c != i {
                            minor[k * m + col] = edges[k * d + c];
                            col += 1;
                        }
                    }
                }
                let sign = if (i + m) % 2 == 0 { 1.0 } else { -1.0 };
                *o = sign * det_in_place(&mut minor, m);
            }
        }
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
