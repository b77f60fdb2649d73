use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite point set in R^n stored row-major. Point `i` occupies
/// `coords[i * dim..(i + 1) * dim]`; indices are dense and never reordered.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if coords.is_empty() {
            return Err(Error::Empty("point cloud"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("point cloud"))?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; a cloud holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    /// New cloud made of the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::invalid(format!("point index {i} out of range")));
            }
            coords.extend_from_slice(self.point(i));
        }
        Self::new(self.dim, coords)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.iter() {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        let n = self.len() as f64;
        c.iter_mut().for_each(|ci| *ci /= n);
        c
    }

    /// Radius of the smallest centroid-centred ball holding every point.
    pub fn radius(&self) -> f64 {
        let c = self.centroid();
        self.iter().map(|p| distance(p, &c)).fold(0.0, f64::max)
    }

    /// Coordinates stored column-major: `columns[k][i]` is coordinate k of point i.
    pub(crate) fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|k| self.iter().map(|p| p[k]).collect())
            .collect()
    }
}

/// Supporting halfspace `normal · x <= offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub support_index: Option<usize>,
}

impl Halfspace {
    pub const NORM_TOL: f64 = 1e-9;

    pub fn new(normal: Vec<f64>, offset: f64, support_index: Option<usize>) -> Result<Self> {
        if normal.iter().any(|c| !c.is_finite()) || !offset.is_finite() {
            return Err(Error::NonFinite("halfspace"));
        }
        if (norm(&normal) - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::invalid("halfspace normal must have unit length"));
        }
        Ok(Self {
            normal,
            offset,
            support_index,
        })
    }

    /// Rescales an arbitrary nonzero normal (and its offset) to unit length.
    pub fn normalized(normal: &[f64], offset: f64) -> Result<Self> {
        let len = norm(normal);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::invalid("halfspace normal must be nonzero"));
        }
        Self::new(normal.iter().map(|c| c / len).collect(), offset / len, None)
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Signed violation `normal · x - offset`; positive means outside.
    pub fn violation(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

/// The convex hull of a finite list of claimed vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexPolytope {
    vertices: PointCloud,
}

impl VertexPolytope {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        PointCloud::new(dim, coords).map(Self::from)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        PointCloud::from_rows(rows).map(Self::from)
    }

    /// Hull of the listed cloud points.
    pub fn from_indices(cloud: &PointCloud, indices: &[usize]) -> Result<Self> {
        cloud.select(indices).map(Self::from)
    }

    pub fn dim(&self) -> usize {
        self.vertices.dim()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        self.vertices.point(i)
    }

    pub fn vertices(&self) -> &PointCloud {
        &self.vertices
    }
}

impl From<PointCloud> for VertexPolytope {
    fn from(vertices: PointCloud) -> Self {
        Self { vertices }
    }
}

/// Dot product accumulated left to right from zero. The sketch kernel
/// reproduces this exact operation order, so results agree bit for bit.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
