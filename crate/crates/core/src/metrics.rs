//! Inner and outer error of a sketch against the true hull.
//!
//! Inner error is `sup_{x in true} d(x, inner)`, outer error is
//! `sup_{x in outer} d(x, true)`. Both suprema are attained at vertices, so
//! the inner error only needs the true extreme points. The outer body is
//! given by halfspaces; in the plane its vertices are cheap to enumerate, in
//! higher dimension we report the largest support-function gap over a set of
//! probe directions instead, which is the Hausdorff distance of the nested
//! bodies once the probes are dense.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::geometry::{
    directed_hausdorff, dot, min_norm_point, support_value, Halfspace, VertexPolytope,
};
use crate::sketch::OuterHull;

/// Bounding-box half-width, in units of the data radius, beyond which an
/// outer hull counts as unbounded.
pub const UNBOUNDED_RADIUS: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMethod {
    Exact2d,
    SupportGapEstimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterError {
    pub value: f64,
    pub method: ErrorMethod,
    /// Probe directions used; zero for the exact method.
    pub probes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub inner_error: f64,
    pub outer_error: f64,
    pub outer_method: ErrorMethod,
    pub n_probes: usize,
    pub n_dirs_used: usize,
    pub n_found: usize,
    pub n_kept: usize,
}

/// `max_{v in true vertices} d(v, CH(inner))`.
pub fn inner_error(
    true_extremes: &VertexPolytope,
    inner: &VertexPolytope,
    tol: f64,
) -> Result<f64> {
    if true_extremes.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: true_extremes.dim(),
            found: inner.dim(),
        });
    }
    directed_hausdorff(true_extremes, inner, tol)
}

/// Exact in the plane, support-gap estimate over `probes` otherwise.
pub fn outer_error(
    outer: &OuterHull,
    true_extremes: &VertexPolytope,
    probes: &DirectionSet,
    tol: f64,
) -> Result<OuterError> {
    if true_extremes.dim() == 2 {
        outer_error_exact_2d(outer, true_extremes, tol)
    } else {
        outer_error_support_gap(outer, true_extremes, probes)
    }
}

pub fn outer_error_exact_2d(
    outer: &OuterHull,
    true_extremes: &VertexPolytope,
    tol: f64,
) -> Result<OuterError> {
    check_dims(outer, true_extremes)?;
    if true_extremes.dim() != 2 {
        return Err(Error::invalid("exact outer error needs dimension 2"));
    }
    let polygon = polygon_2d(outer, true_extremes)?;
    let value = polygon
        .iter()
        .map(|v| min_norm_point(v, true_extremes, tol).map(|r| r.distance))
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))?;
    Ok(OuterError {
        value,
        method: ErrorMethod::Exact2d,
        probes: 0,
    })
}

/// `max_u (h_outer(u) - h_true(u))` over the probe directions, clamped at zero.
pub fn outer_error_support_gap(
    outer: &OuterHull,
    true_extremes: &VertexPolytope,
    probes: &DirectionSet,
) -> Result<OuterError> {
    check_dims(outer, true_extremes)?;
    if probes.dim() != true_extremes.dim() {
        return Err(Error::DimensionMismatch {
            expected: true_extremes.dim(),
            found: probes.dim(),
        });
    }
    let region = BoundingBox::around(true_extremes);
    let magnitude = true_extremes
        .vertices()
        .iter()
        .map(|p| dot(p, p).sqrt())
        .fold(0.0, f64::max);
    let value = (0..probes.len())
        .into_par_iter()
        .map(|j| {
            let u = probes.direction(j);
            let h_outer = max_linear(&outer.halfspaces, u, &region)?;
            let h_true = support_value(true_extremes, u)?;
            let gap = h_outer - h_true;
            // Gaps at the rounding level of the coordinates count as zero.
            let floor = 64.0 * f64::EPSILON * (h_outer.abs() + magnitude);
            Ok::<_, Error>(if gap <= floor { 0.0 } else { gap })
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    Ok(OuterError {
        value,
        method: ErrorMethod::SupportGapEstimate,
        probes: probes.len(),
    })
}

fn check_dims(outer: &OuterHull, true_extremes: &VertexPolytope) -> Result<()> {
    if outer.is_empty() {
        return Err(Error::NoConstraints);
    }
    if outer.dim() != true_extremes.dim() {
        return Err(Error::DimensionMismatch {
            expected: true_extremes.dim(),
            found: outer.dim(),
        });
    }
    Ok(())
}

/// Axis-aligned box `|x_k - center_k| <= half_width` standing in for infinity.
#[derive(Clone, Debug)]
pub(crate) struct BoundingBox {
    center: Vec<f64>,
    half_width: f64,
}

impl BoundingBox {
    pub(crate) fn around(hull: &VertexPolytope) -> Self {
        let cloud = hull.vertices();
        Self {
            center: cloud.centroid(),
            half_width: UNBOUNDED_RADIUS * cloud.radius().max(1.0),
        }
    }

    fn escapes(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.center)
            .any(|(a, c)| (a - c).abs() >= 0.5 * self.half_width)
    }
}

/// Vertices of the polygon cut out by the halfspaces, by clipping the
/// bounding box against each one in turn. Each vertex is then recomputed from
/// the two lines meeting there, so it does not depend on the clipping order.
pub(crate) fn polygon_2d(outer: &OuterHull, hull: &VertexPolytope) -> Result<Vec<[f64; 2]>> {
    let region = BoundingBox::around(hull);
    let (cx, cy, w) = (region.center[0], region.center[1], region.half_width);
    let mut lines: Vec<([f64; 2], f64)> = vec![
        ([0.0, -1.0], w - cy),
        ([1.0, 0.0], cx + w),
        ([0.0, 1.0], cy + w),
        ([-1.0, 0.0], w - cx),
    ];
    lines.extend(
        outer
            .halfspaces
            .iter()
            .map(|h| ([h.normal[0], h.normal[1]], h.offset)),
    );
    // Vertex i carries the line of the edge leaving it.
    let mut poly = vec![
        ([cx - w, cy - w], 0),
        ([cx + w, cy - w], 1),
        ([cx + w, cy + w], 2),
        ([cx - w, cy + w], 3),
    ];
    for id in 4..lines.len() {
        poly = clip(&poly, &lines, id);
        if poly.is_empty() {
            return Err(Error::invalid("outer hull is empty"));
        }
    }
    let k = poly.len();
    let vertices: Vec<[f64; 2]> = (0..k)
        .map(|i| {
            let (clipped, leaving) = poly[i];
            let entering = poly[(i + k - 1) % k].1;
            meet(&lines[entering], &lines[leaving]).unwrap_or(clipped)
        })
        .collect();
    if vertices.iter().any(|v| region.escapes(v)) {
        return Err(Error::Unbounded);
    }
    Ok(vertices)
}

/// Intersection of two lines `n · x = b`; symmetric in its arguments.
fn meet(a: &([f64; 2], f64), c: &([f64; 2], f64)) -> Option<[f64; 2]> {
    let ([a0, a1], b) = *a;
    let ([c0, c1], d) = *c;
    let det = a0 * c1 - a1 * c0;
    if det.abs() <= 1e-14 {
        return None;
    }
    Some([(b * c1 - a1 * d) / det, (a0 * d - b * c0) / det])
}

fn clip(
    poly: &[([f64; 2], usize)],
    lines: &[([f64; 2], f64)],
    id: usize,
) -> Vec<([f64; 2], usize)> {
    let (n, offset) = &lines[id];
    // Values within rounding of the line count as on it, so degenerate
    // (zero-area) regions survive clipping.
    let side = |p: &[f64; 2]| {
        let v = n[0] * p[0] + n[1] * p[1] - offset;
        let scale = (n[0] * p[0]).abs() + (n[1] * p[1]).abs() + offset.abs();
        if v.abs() <= 1e-12 * scale {
            0.0
        } else {
            v
        }
    };
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, &(a, edge)) in poly.iter().enumerate() {
        let b = poly[(i + 1) % poly.len()].0;
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push((a, if sa == 0.0 && sb > 0.0 { id } else { edge }));
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let x = meet(&lines[edge], &lines[id]).unwrap_or_else(|| {
                let t = sa / (sa - sb);
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            });
            out.push((x, if sa < 0.0 { id } else { edge }));
        }
    }
    out
}

/// `max u · x` subject to the halfspaces, via the revised simplex method on
/// the dual `min b · l` s.t. `sum l_j a_j = u`, `l >= 0`. The bounding box
/// rows give an immediate feasible basis; an optimum pushed out to the box
/// means the halfspaces do not bound the body in direction `u`.
pub(crate) fn max_linear(halfspaces: &[Halfspace], u: &[f64], region: &BoundingBox) -> Result<f64> {
    let n = u.len();
    let m = halfspaces.len();
    // Rows 0..m are the halfspaces, then +e_k and -e_k box rows.
    let normal = |j: usize, k: usize| -> f64 {
        if j < m {
            halfspaces[j].normal[k]
        } else {
            let b = j - m;
            let axis = b % n;
            let sign = if b < n { 1.0 } else { -1.0 };
            if axis == k {
                sign
            } else {
                0.0
            }
        }
    };
    let offset = |j: usize| -> f64 {
        if j < m {
            halfspaces[j].offset
        } else {
            let b = j - m;
            let axis = b % n;
            if b < n {
                region.center[axis] + region.half_width
            } else {
                region.half_width - region.center[axis]
            }
        }
    };
    let scale = region.half_width.max(1.0);
    let feas_tol = 1e-12 * scale;

    let mut basis: Vec<usize> = (0..n)
        .map(|k| if u[k] >= 0.0 { m + k } else { m + n + k })
        .collect();
    let cap = 50 * (m + 2 * n) + 1000;
    let u_vec = DVector::from_column_slice(u);
    let mut x = vec![0.0; n];
    for _ in 0..cap {
        let b_mat = DMatrix::from_fn(n, n, |r, c| normal(basis[c], r));
        let lu = b_mat.clone().lu();
        let lambda = lu
            .solve(&u_vec)
            .ok_or_else(|| Error::LinearProgram("singular basis".into()))?;
        let rhs = DVector::from_iterator(n, basis.iter().map(|&j| offset(j)));
        let xt = b_mat
            .transpose()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::LinearProgram("singular basis".into()))?;
        x.copy_from_slice(xt.as_slice());

        let mut enter = None;
        let mut worst = feas_tol;
        for (j, h) in halfspaces.iter().enumerate() {
            let v = dot(&h.normal, &x) - h.offset;
            if v > worst {
                worst = v;
                enter = Some(j);
            }
        }
        let Some(enter) = enter else {
            if region.escapes(&x) {
                return Err(Error::Unbounded);
            }
            // Re-solve with the basis in a fixed order so the optimum depends
            // only on which constraints are tight.
            let key = |j: usize| {
                (0..n)
                    .map(|k| normal(j, k))
                    .chain([offset(j)])
                    .collect::<Vec<_>>()
            };
            basis.sort_by(|&a, &b| {
                key(a)
                    .iter()
                    .zip(key(b).iter())
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let b_mat = DMatrix::from_fn(n, n, |r, c| normal(basis[c], r));
            let rhs = DVector::from_iterator(n, basis.iter().map(|&j| offset(j)));
            if let Some(xt) = b_mat.transpose().lu().solve(&rhs) {
                x.copy_from_slice(xt.as_slice());
            }
            return Ok(dot(u, &x));
        };

        let a = DVector::from_iterator(n, (0..n).map(|k| normal(enter, k)));
        let w = lu
            .solve(&a)
            .ok_or_else(|| Error::LinearProgram("singular basis".into()))?;
        let mut leave = None;
        let mut ratio = f64::INFINITY;
        for i in 0..n {
            if w[i] > 1e-12 {
                let r = lambda[i].max(0.0) / w[i];
                if r < ratio || (r == ratio && leave.is_some_and(|l: usize| basis[i] < basis[l])) {
                    ratio = r;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::LinearProgram("halfspaces are infeasible".into()));
        };
        basis[leave] = enter;
    }
    Err(Error::LinearProgram("iteration cap reached".into()))
}
