//! Exact geometric primitives: support queries, point-to-hull distances,
//! Hausdorff distance between vertex polytopes and a brute-force
//! extreme-point oracle.
//!
//! Clouds that are affinely degenerate are accepted everywhere; only the
//! curvature interpretation downstream assumes a full-dimensional hull.

mod cloud;
mod nearest;

use std::collections::BTreeSet;

use rayon::prelude::*;

pub use cloud::{distance, dot, norm, Halfspace, PointCloud, VertexPolytope};
pub use nearest::{min_norm_point, NearestPoint, DEFAULT_TOL};

use crate::error::{Error, Result};

pub(crate) fn check_direction(dim: usize, d: &[f64]) -> Result<()> {
    if d.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: d.len(),
        });
    }
    if d.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("direction"));
    }
    Ok(())
}

/// Index and value of `max_i x_i · d`. Ties go to the smallest index.
pub fn support(cloud: &PointCloud, d: &[f64]) -> Result<(usize, f64)> {
    check_direction(cloud.dim(), d)?;
    Ok(argmax_dot(cloud, d))
}

pub(crate) fn argmax_dot(cloud: &PointCloud, d: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in cloud.iter().enumerate() {
        let v = dot(p, d);
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Support function `h(d) = max_v v · d` of a vertex polytope.
pub fn support_value(hull: &VertexPolytope, d: &[f64]) -> Result<f64> {
    support(hull.vertices(), d).map(|(_, v)| v)
}

/// Hausdorff distance between two vertex polytopes. Only vertices need to
/// be checked: the farthest point of a polytope from a convex set is always
/// one of its vertices.
pub fn hausdorff(p: &VertexPolytope, q: &VertexPolytope, tol: f64) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(directed_hausdorff(p, q, tol)?.max(directed_hausdorff(q, p, tol)?))
}

/// `max_{v in vertices(from)} d(v, CH(to))`.
pub fn directed_hausdorff(from: &VertexPolytope, to: &VertexPolytope, tol: f64) -> Result<f64> {
    (0..from.len())
        .into_par_iter()
        .map(|i| min_norm_point(from.vertex(i), to, tol).map(|r| r.distance))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Indices `i` with `d(x_i, CH(all other points)) > tol`.
///
/// Quadratic in the number of points; meant as a ground-truth oracle for
/// clouds of up to about 10^4 points. A point duplicated in the cloud is
/// never reported, since each copy lies in the hull of the others.
pub fn exact_extreme_points(cloud: &PointCloud, tol: f64) -> Result<BTreeSet<usize>> {
    if cloud.len() == 1 {
        return Ok(BTreeSet::from([0]));
    }
    let flags: Vec<bool> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            nearest::project(cloud.point(i), cloud.coords(), cloud.dim(), Some(i), tol)
                .map(|r| r.distance > tol)
        })
        .collect::<Result<_>>()?;
    Ok(flags
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| f.then_some(i))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PointCloud {
        PointCloud::from_rows(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn support_on_small_clouds() {
        let c = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(support(&c, &[1.0, 0.0]).unwrap(), (1, 1.0));
        let c = PointCloud::from_rows(&[[-1.0, -1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(support(&c, &[1.0, 1.0]).unwrap(), (1, 2.0));
    }

    #[test]
    fn support_ties_pick_smallest_index() {
        let c = PointCloud::from_rows(&[[0.0, 1.0], [1.0, 1.0], [0.5, 1.0]]).unwrap();
        assert_eq!(support(&c, &[0.0, 1.0]).unwrap().0, 0);
    }

    #[test]
    fn support_rejects_bad_direction() {
        let c = square();
        assert!(matches!(
            support(&c, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            support(&c, &[f64::INFINITY, 0.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn support_value_of_square() {
        let sq = VertexPolytope::from(square());
        assert_eq!(support_value(&sq, &[1.0, 0.0]).unwrap(), 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((support_value(&sq, &[s, s]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_square_vs_triangle() {
        let sq =
            VertexPolytope::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let tri = VertexPolytope::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(hausdorff(&sq, &sq, DEFAULT_TOL).unwrap() <= DEFAULT_TOL);
        let h = hausdorff(&sq, &tri, DEFAULT_TOL).unwrap();
        assert!((h - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        // Triangle inside the square: only the square side contributes.
        assert!(directed_hausdorff(&tri, &sq, DEFAULT_TOL).unwrap() <= DEFAULT_TOL);
    }

    #[test]
    fn extreme_points_of_small_sets() {
        let c = PointCloud::from_rows(&[
            [-1.0, -1.0],
            [1.0, -1.0],
            [0.0, 0.0],
            [1.0, 1.0],
            [-1.0, 1.0],
        ])
        .unwrap();
        assert_eq!(
            exact_extreme_points(&c, DEFAULT_TOL).unwrap(),
            BTreeSet::from([0, 1, 3, 4])
        );
        let line = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(
            exact_extreme_points(&line, DEFAULT_TOL).unwrap(),
            BTreeSet::from([0, 2])
        );
        let single = PointCloud::from_rows(&[[3.0, 4.0]]).unwrap();
        assert_eq!(
            exact_extreme_points(&single, DEFAULT_TOL).unwrap(),
            BTreeSet::from([0])
        );
    }
}
