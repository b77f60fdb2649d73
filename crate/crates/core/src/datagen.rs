//! Seeded synthetic point clouds.

use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::directions::open_unit;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Distance from the centre of the unit hemisphere to the cone apex.
pub const CONE_APEX_DISTANCE: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    /// Uniform in the simplex spanned by the origin and the unit vectors.
    Simplex,
    /// Uniform in [0, 1]^n.
    Cube,
    /// Uniform in the unit ball.
    Ball,
    /// Uniform on the unit sphere surface.
    Sphere,
    /// Uniform in the hull of the upper unit half-ball and the apex
    /// `(0, ..., 0, -2)`. The apex itself is point 0.
    ConeCap,
}

impl std::str::FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" => Ok(Self::Simplex),
            "cube" => Ok(Self::Cube),
            "ball" => Ok(Self::Ball),
            "sphere" => Ok(Self::Sphere),
            "cone-cap" => Ok(Self::ConeCap),
            other => Err(Error::invalid(format!("unknown shape {other:?}"))),
        }
    }
}

/// `x -> matrix * x + shift`, matrix row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub matrix: Vec<f64>,
    pub shift: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub dim: usize,
    pub count: usize,
    pub transform: Option<AffineMap>,
    pub seed: u64,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind, dim: usize, count: usize, seed: u64) -> Self {
        Self {
            kind,
            dim,
            count,
            transform: None,
            seed,
        }
    }

    pub fn with_transform(mut self, transform: AffineMap) -> Self {
        self.transform = Some(transform);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::invalid("point count must be at least 1"));
        }
        let min_dim = match self.kind {
            ShapeKind::Sphere | ShapeKind::ConeCap => 2,
            _ => 1,
        };
        if self.dim < min_dim {
            return Err(Error::invalid(format!(
                "{:?} needs dimension at least {min_dim}",
                self.kind
            )));
        }
        if let Some(t) = &self.transform {
            let n = self.dim;
            if t.matrix.len() != n * n || t.shift.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.shift.len(),
                });
            }
            let det = DMatrix::from_row_slice(n, n, &t.matrix).determinant();
            if !(det.abs() > 1e-12) {
                return Err(Error::invalid("transform matrix is singular"));
            }
        }
        Ok(())
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Sampler {
    fn uniform(&mut self) -> f64 {
        open_unit(self.rng.next_u64())
    }

    fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * self.uniform()).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    fn on_sphere(&mut self, out: &mut [f64]) {
        loop {
            out.iter_mut().for_each(|c| *c = self.gaussian());
            let len = out.iter().map(|c| c * c).sum::<f64>().sqrt();
            if len > 0.0 {
                out.iter_mut().for_each(|c| *c /= len);
                return;
            }
        }
    }
}

pub fn generate(spec: &ShapeSpec) -> Result<PointCloud> {
    spec.validate()?;
    let n = spec.dim;
    let mut s = Sampler {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        spare: None,
    };
    let mut coords = vec![0.0; spec.count * n];
    let mut rows = coords.chunks_exact_mut(n);
    if spec.kind == ShapeKind::ConeCap {
        let apex = rows.next().unwrap();
        apex[n - 1] = -CONE_APEX_DISTANCE;
    }
    for p in rows {
        match spec.kind {
            ShapeKind::Cube => p.iter_mut().for_each(|c| *c = s.uniform()),
            ShapeKind::Simplex => {
                // Dirichlet(1, ..., 1) in n + 1 coordinates, dropping the last.
                let mut total = 0.0;
                for c in p.iter_mut() {
                    *c = -s.uniform().ln();
                    total += *c;
                }
                total += -s.uniform().ln();
                p.iter_mut().for_each(|c| *c /= total);
            }
            ShapeKind::Sphere => s.on_sphere(p),
            ShapeKind::Ball => {
                s.on_sphere(p);
                let r = s.uniform().powf(1.0 / n as f64);
                p.iter_mut().for_each(|c| *c *= r);
            }
            ShapeKind::ConeCap => loop {
                for c in p[..n - 1].iter_mut() {
                    *c = 2.0 * s.uniform() - 1.0;
                }
                p[n - 1] = (1.0 + CONE_APEX_DISTANCE) * s.uniform() - CONE_APEX_DISTANCE;
                if in_cone_cap(p) {
                    break;
                }
            },
        }
    }
    if let Some(t) = &spec.transform {
        let mut tmp = vec![0.0; n];
        for p in coords.chunks_exact_mut(n) {
            for (r, out) in tmp.iter_mut().enumerate() {
                *out = t.shift[r]
                    + t.matrix[r * n..(r + 1) * n]
                        .iter()
                        .zip(p.iter())
                        .map(|(a, x)| a * x)
                        .sum::<f64>();
            }
            p.copy_from_slice(&tmp);
        }
    }
    PointCloud::new(n, coords)
}

fn in_cone_cap(p: &[f64]) -> bool {
    let n = p.len();
    let h = p[n - 1];
    let lateral_sq: f64 = p[..n - 1].iter().map(|c| c * c).sum();
    if h >= 0.0 {
        lateral_sq + h * h <= 1.0
    } else {
        let r = (h + CONE_APEX_DISTANCE) / CONE_APEX_DISTANCE;
        lateral_sq <= r * r
    }
}
