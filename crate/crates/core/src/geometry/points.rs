use crate::error::{Error, Result};

/// A list of points in `R^dim`, stored row-major in one buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "points need at least one coordinate");
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, count: usize) -> Self {
        let mut cloud = Self::new(dim);
        cloud.coords.reserve(dim * count);
        cloud
    }

    /// Build from a flat row-major buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::out_of_range("coords", "non-finite coordinate"));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        let mut cloud = Self::with_capacity(dim, rows.len());
        for row in rows {
            cloud.try_push(row.as_ref())?;
        }
        Ok(cloud)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    #[allow(dead_code)]
    pub(crate) fn point_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension");
        self.coords.extend_from_slice(p);
    }

    pub fn try_push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::out_of_range("point", "non-finite coordinate"));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    /// Append a zeroed point and return it for in-place filling.
    pub(crate) fn push_zeroed(&mut self) -> &mut [f64] {
        let start = self.coords.len();
        self.coords.resize(start + self.dim, 0.0);
        &mut self.coords[start..]
    }

    /// The points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let mut out = Self::with_capacity(self.dim, indices.len());
        for &i in indices {
            out.push(self.point(i));
        }
        out
    }

    /// All points except those at `removed`.
    pub fn without(&self, removed: &[usize]) -> PointCloud {
        let keep: Vec<usize> = (0..self.len()).filter(|i| !removed.contains(i)).collect();
        self.select(&keep)
    }

    /// Apply `f` to each point, producing a cloud of dimension `out_dim`.
    pub fn map<F>(&self, out_dim: usize, mut f: F) -> PointCloud
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut out = Self::with_capacity(out_dim, self.len());
        for p in self.iter() {
            let slot = out.push_zeroed();
            f(p, slot);
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> PointCloud {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.iter() {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        let n = self.len().max(1) as f64;
        c.iter_mut().for_each(|ci| *ci /= n);
        c
    }
}
