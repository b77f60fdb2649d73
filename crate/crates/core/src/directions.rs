//! Finite direction sets on the unit sphere with reproducible seeding.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::norm;

/// Allowed deviation of a stored direction from unit length.
pub const UNIT_TOL: f64 = 1e-12;

/// How a direction set was produced.
///
/// Only Gaussian normalization is provided. Skewer-style or pyramid-based
/// generators would slot in here as further variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMethod {
    GaussianUniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    dim: usize,
    coords: Vec<f64>,
    seed: u64,
    method: SamplingMethod,
}

impl DirectionSet {
    /// `m` directions drawn uniformly from the sphere in R^n by normalizing
    /// standard Gaussian vectors. Every direction consumes the same number of
    /// generator outputs, so a longer draw with the same seed extends a
    /// shorter one.
    pub fn sample_uniform(m: usize, n: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("direction count must be at least 1"));
        }
        let mut stream = DirectionStream::new(n, seed)?;
        let mut coords = Vec::with_capacity(m * n);
        for _ in 0..m {
            stream.fill_next(&mut coords);
        }
        Ok(Self {
            dim: n,
            coords,
            seed,
            method: SamplingMethod::GaussianUniform,
        })
    }

    /// Wraps externally supplied directions, which must already be unit length.
    pub fn from_unit_vectors(dim: usize, coords: Vec<f64>, seed: u64) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(Error::Empty("direction set"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        for (j, d) in coords.chunks_exact(dim).enumerate() {
            if d.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("direction"));
            }
            if (norm(d) - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid(format!("direction {j} is not unit length")));
            }
        }
        Ok(Self {
            dim,
            coords,
            seed,
            method: SamplingMethod::GaussianUniform,
        })
    }

    /// Ordered concatenation; the result keeps `self` as its prefix and
    /// `self`'s seed.
    pub fn concat(&self, other: &DirectionSet) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(Self {
            coords,
            ..self.clone()
        })
    }

    /// The first `m` directions.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.len() {
            return Err(Error::invalid(format!(
                "prefix length {m} outside 1..={}",
                self.len()
            )));
        }
        Ok(Self {
            coords: self.coords[..m * self.dim].to_vec(),
            ..self.clone()
        })
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

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn method(&self) -> SamplingMethod {
        self.method
    }

    #[inline]
    pub fn direction(&self, j: usize) -> &[f64] {
        &self.coords[j * self.dim..(j + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }
}

/// Unbounded stream of uniform unit directions; `sample_uniform` is a
/// finite prefix of it.
pub struct DirectionStream {
    rng: ChaCha8Rng,
    dim: usize,
}

impl DirectionStream {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid("directions need dimension at least 2"));
        }
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
        })
    }

    fn fill_next(&mut self, out: &mut Vec<f64>) {
        let start = out.len();
        loop {
            out.truncate(start);
            // Box-Muller: each pair of coordinates takes exactly two draws.
            while out.len() - start < self.dim {
                let u1 = open_unit(self.rng.next_u64());
                let u2 = open_unit(self.rng.next_u64());
                let r = (-2.0 * u1.ln()).sqrt();
                let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
                out.push(r * c);
                if out.len() - start < self.dim {
                    out.push(r * s);
                }
            }
            let len = norm(&out[start..]);
            if len > 0.0 && len.is_finite() {
                out[start..].iter_mut().for_each(|c| *c /= len);
                return;
            }
        }
    }
}

impl Iterator for DirectionStream {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let mut v = Vec::with_capacity(self.dim);
        self.fill_next(&mut v);
        Some(v)
    }
}

/// Maps 53 random bits to the open interval (0, 1).
#[inline]
pub(crate) fn open_unit(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit_and_deterministic() {
        let a = DirectionSet::sample_uniform(1000, 3, 7).unwrap();
        assert!(a.iter().all(|d| (norm(d) - 1.0).abs() <= UNIT_TOL));
        let b = DirectionSet::sample_uniform(1000, 3, 7).unwrap();
        assert_eq!(a.coords(), b.coords());
        let c = DirectionSet::sample_uniform(1000, 3, 8).unwrap();
        assert_ne!(a.coords(), c.coords());
    }

    #[test]
    fn longer_draw_extends_shorter_one() {
        for n in [2, 3, 5] {
            let short = DirectionSet::sample_uniform(40, n, 11).unwrap();
            let long = DirectionSet::sample_uniform(100, n, 11).unwrap();
            assert_eq!(long.prefix(40).unwrap(), short);
            let streamed: Vec<f64> = DirectionStream::new(n, 11)
                .unwrap()
                .take(100)
                .flatten()
                .collect();
            assert_eq!(streamed, long.coords());
        }
    }

    #[test]
    fn quarter_circle_fraction_is_a_quarter() {
        let d = DirectionSet::sample_uniform(100_000, 2, 1).unwrap();
        let arcs = [0.0, 1.0, 2.5, -2.0];
        for start in arcs {
            let end = start + std::f64::consts::FRAC_PI_2;
            let hits = d
                .iter()
                .filter(|v| {
                    let mut a = v[1].atan2(v[0]);
                    while a < start {
                        a += std::f64::consts::TAU;
                    }
                    a < end
                })
                .count();
            let frac = hits as f64 / d.len() as f64;
            assert!((frac - 0.25).abs() <= 0.01, "arc at {start}: {frac}");
        }
    }

    #[test]
    fn mean_direction_is_near_zero() {
        for n in [2, 3, 6] {
            let d = DirectionSet::sample_uniform(100_000, n, 3).unwrap();
            let mut mean = vec![0.0; n];
            for v in d.iter() {
                mean.iter_mut().zip(v).for_each(|(m, x)| *m += x);
            }
            mean.iter_mut().for_each(|m| *m /= d.len() as f64);
            assert!(norm(&mean) <= 0.02);
        }
    }

    #[test]
    fn concat_keeps_prefix() {
        let a = DirectionSet::sample_uniform(10, 3, 1).unwrap();
        let b = DirectionSet::sample_uniform(5, 3, 2).unwrap();
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.len(), 15);
        assert_eq!(&ab.coords()[..30], a.coords());
        let one = a.prefix(1).unwrap().concat(&b.prefix(1).unwrap()).unwrap();
        assert_eq!(one.len(), 2);
        let c = DirectionSet::sample_uniform(5, 2, 2).unwrap();
        assert!(a.concat(&c).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DirectionSet::sample_uniform(10, 1, 0).is_err());
        assert!(DirectionSet::sample_uniform(0, 3, 0).is_err());
        assert!(DirectionSet::from_unit_vectors(2, vec![1.0, 1.0], 0).is_err());
    }
}
