//! The basic sketching pass: for every sampled direction find the point of
//! the cloud maximizing the dot product, count how often each point wins,
//! then keep the high-curvature winners (inner hull) and record one
//! supporting halfspace per direction (outer hull).

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directions::{open_unit, DirectionSet};
use crate::error::{Error, Result};
use crate::geometry::{Halfspace, PointCloud, VertexPolytope};

const DIR_CHUNK: usize = 128;
const POINT_BLOCK: usize = 512;

/// Per-direction winners and per-point win counts for one (cloud, directions) pair.
///
/// `counts[v]` is `|D_v|`, the number of directions for which point `v`
/// attains the maximum; the relative D-curvature is `counts[v] / |D|`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSketch {
    dim: usize,
    n_points: usize,
    assignment: Vec<usize>,
    values: Vec<f64>,
    counts: Vec<u64>,
}

/// JSON shape of an exported sketch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchExport {
    pub dim: usize,
    pub n_points: usize,
    pub n_dirs: usize,
    pub counts: Vec<u64>,
    pub assignment: Vec<usize>,
}

pub fn build_sketch(cloud: &PointCloud, dirs: &DirectionSet) -> Result<CurvatureSketch> {
    if cloud.dim() != dirs.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            found: dirs.dim(),
        });
    }
    let n = cloud.len();
    let m = dirs.len();
    let columns = cloud.columns();
    let mut assignment = vec![0usize; m];
    let mut values = vec![f64::NEG_INFINITY; m];

    // Each worker owns a chunk of directions and sweeps the whole cloud in
    // cache-sized point blocks; blocks are visited in index order and only a
    // strictly larger value replaces the incumbent, so ties resolve to the
    // smallest index no matter how the chunks are scheduled.
    assignment
        .par_chunks_mut(DIR_CHUNK)
        .zip(values.par_chunks_mut(DIR_CHUNK))
        .enumerate()
        .for_each(|(chunk, (winners, best))| {
            let first = chunk * DIR_CHUNK;
            let mut buf = vec![0.0; POINT_BLOCK];
            for start in (0..n).step_by(POINT_BLOCK) {
                let end = (start + POINT_BLOCK).min(n);
                let buf = &mut buf[..end - start];
                for (local, (w, b)) in winners.iter_mut().zip(best.iter_mut()).enumerate() {
                    let d = dirs.direction(first + local);
                    buf.fill(0.0);
                    for (col, &dk) in columns.iter().zip(d) {
                        for (acc, x) in buf.iter_mut().zip(&col[start..end]) {
                            *acc += x * dk;
                        }
                    }
                    let mut arg = 0;
                    let mut top = f64::NEG_INFINITY;
                    for (i, &v) in buf.iter().enumerate() {
                        if v > top {
                            top = v;
                            arg = i;
                        }
                    }
                    if top > *b {
                        *b = top;
                        *w = start + arg;
                    }
                }
            }
        });

    let mut counts = vec![0u64; n];
    for &w in &assignment {
        counts[w] += 1;
    }
    Ok(CurvatureSketch {
        dim: cloud.dim(),
        n_points: n,
        assignment,
        values,
        counts,
    })
}

impl CurvatureSketch {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_dirs(&self) -> usize {
        self.assignment.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Winning point index for each direction.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// `max_v v · d_j` for each direction.
    pub fn support_values(&self) -> &[f64] {
        &self.values
    }

    /// `K_D(v) = |D_v| / |D|`.
    pub fn relative_curvature(&self, v: usize) -> f64 {
        self.counts[v] as f64 / self.n_dirs() as f64
    }

    /// Points that won at least one direction (the D-convex hull), in index order.
    pub fn found(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c > 0).then_some(i))
            .collect()
    }

    /// Direction indices won by each point; empty for points that never win.
    pub fn extremal_directions(&self) -> Vec<Vec<usize>> {
        let mut won = vec![Vec::new(); self.n_points];
        for (j, &w) in self.assignment.iter().enumerate() {
            won[w].push(j);
        }
        won
    }

    /// Sketch of the concatenated direction list `D1 ++ D2` from the sketches
    /// of `D1` and `D2` over the same cloud.
    pub fn merge(&self, later: &CurvatureSketch) -> Result<Self> {
        if self.dim != later.dim || self.n_points != later.n_points {
            return Err(Error::invalid("sketches were built over different clouds"));
        }
        let mut merged = self.clone();
        merged.assignment.extend_from_slice(&later.assignment);
        merged.values.extend_from_slice(&later.values);
        for (c, l) in merged.counts.iter_mut().zip(&later.counts) {
            *c += l;
        }
        Ok(merged)
    }

    pub fn export(&self) -> SketchExport {
        SketchExport {
            dim: self.dim,
            n_points: self.n_points,
            n_dirs: self.n_dirs(),
            counts: self.counts.clone(),
            assignment: self.assignment.clone(),
        }
    }

    fn check_matches(&self, cloud: &PointCloud, dirs: &DirectionSet) -> Result<()> {
        if cloud.len() != self.n_points || dirs.len() != self.n_dirs() {
            return Err(Error::invalid(
                "sketch was not built from this cloud and direction set",
            ));
        }
        if cloud.dim() != self.dim || dirs.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: cloud.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Delete every point with `K_D(v) <= alpha`.
    Hard,
    /// Keep a below-threshold point with probability `K_D(v) / alpha`.
    Proportional,
}

/// Kept points of the sketch, in index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerHull {
    pub kept: Vec<usize>,
    pub curvatures: Vec<f64>,
    pub alpha: f64,
    pub mode: ThresholdMode,
}

impl InnerHull {
    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn polytope(&self, cloud: &PointCloud) -> Result<VertexPolytope> {
        if self.kept.is_empty() {
            return Err(Error::Empty("inner hull"));
        }
        VertexPolytope::from_indices(cloud, &self.kept)
    }
}

/// Deletes points with `K_D(v) <= alpha`. In proportional mode a deleted
/// candidate with nonzero curvature survives with probability
/// `K_D(v) / alpha`, one seeded draw per candidate in index order.
pub fn threshold_filter(
    sketch: &CurvatureSketch,
    alpha: f64,
    mode: ThresholdMode,
    seed: u64,
) -> Result<InnerHull> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha {alpha} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = Vec::new();
    let mut curvatures = Vec::new();
    for v in 0..sketch.n_points() {
        if sketch.counts[v] == 0 {
            continue;
        }
        let k = sketch.relative_curvature(v);
        let keep = if k > alpha {
            true
        } else {
            match mode {
                ThresholdMode::Hard => false,
                ThresholdMode::Proportional => open_unit(rng.next_u64()) < k / alpha,
            }
        };
        if keep {
            kept.push(v);
            curvatures.push(k);
        }
    }
    Ok(InnerHull {
        kept,
        curvatures,
        alpha,
        mode,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HullSource {
    RawSketch,
    Compressed,
}

/// Intersection of halfspaces `d · x <= b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterHull {
    pub halfspaces: Vec<Halfspace>,
    pub source: HullSource,
}

impl OuterHull {
    pub fn dim(&self) -> usize {
        self.halfspaces.first().map_or(0, Halfspace::dim)
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    /// Largest constraint violation over the cloud (nonpositive when feasible).
    pub fn max_violation(&self, cloud: &PointCloud) -> f64 {
        self.halfspaces
            .par_iter()
            .map(|h| {
                cloud
                    .iter()
                    .map(|p| h.violation(p))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .reduce(|| f64::NEG_INFINITY, f64::max)
    }

    /// Drops halfspaces whose normal and offset exactly repeat an earlier one.
    pub fn dedup(&mut self) {
        let mut seen: Vec<(Vec<u64>, u64)> = Vec::new();
        self.halfspaces.retain(|h| {
            let key = (
                h.normal.iter().map(|c| c.to_bits()).collect::<Vec<_>>(),
                h.offset.to_bits(),
            );
            if seen.contains(&key) {
                false
            } else {
                seen.push(key);
                true
            }
        });
    }
}

/// One supporting halfspace per direction, `d_j · x <= max_v d_j · v`.
pub fn outer_hull(
    sketch: &CurvatureSketch,
    cloud: &PointCloud,
    dirs: &DirectionSet,
) -> Result<OuterHull> {
    sketch.check_matches(cloud, dirs)?;
    let halfspaces = dirs
        .iter()
        .zip(sketch.assignment.iter().zip(&sketch.values))
        .map(|(d, (&w, &b))| Halfspace::new(d.to_vec(), b, Some(w)))
        .collect::<Result<_>>()?;
    Ok(OuterHull {
        halfspaces,
        source: HullSource::RawSketch,
    })
}
