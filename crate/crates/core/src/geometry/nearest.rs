//! Euclidean projection onto the convex hull of a finite vertex list.
//!
//! Wolfe's minimum-norm-point method, run on the shifted vertices
//! `p_i = v_i - x`. The iterate is always a convex combination held in a
//! small "corral" of affinely independent vertices; each major cycle adds the
//! vertex minimizing `p_i · y`, and minor cycles move to the affine minimizer
//! of the corral, dropping vertices whose weight would go negative. The norm of
//! the iterate never increases.
//!
//! The Frank-Wolfe gap `g = |y|^2 - min_i p_i · y` bounds the suboptimality:
//! `|y| - dist <= 2 g / |y|`. We stop once that bound is below `tol`, once
//! `|y| <= tol`, or once `g` sits at the rounding floor of the data.

use nalgebra::{DMatrix, DVector};

use super::cloud::{dot, VertexPolytope};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Closest point of a hull to a query point.
#[derive(Clone, Debug)]
pub struct NearestPoint {
    pub point: Vec<f64>,
    pub distance: f64,
    /// Convex weights, one per hull vertex.
    pub weights: Vec<f64>,
    /// Frank-Wolfe gap at termination.
    pub gap: f64,
    pub iterations: usize,
}

pub fn min_norm_point(x: &[f64], hull: &VertexPolytope, tol: f64) -> Result<NearestPoint> {
    if x.len() != hull.dim() {
        return Err(Error::DimensionMismatch {
            expected: hull.dim(),
            found: x.len(),
        });
    }
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("query point"));
    }
    project(x, hull.vertices().coords(), hull.dim(), None, tol)
}

/// Projection onto the hull of all rows of `verts` except row `skip`.
pub(crate) fn project(
    x: &[f64],
    verts: &[f64],
    dim: usize,
    skip: Option<usize>,
    tol: f64,
) -> Result<NearestPoint> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let m = verts.len() / dim;
    let row = |i: usize| &verts[i * dim..(i + 1) * dim];
    let shifted = |i: usize| -> Vec<f64> { row(i).iter().zip(x).map(|(v, c)| v - c).collect() };

    let mut j0 = None;
    let mut best_sq = f64::INFINITY;
    let mut radius_sq: f64 = 0.0;
    for i in (0..m).filter(|&i| Some(i) != skip) {
        let sq: f64 = row(i).iter().zip(x).map(|(v, c)| (v - c) * (v - c)).sum();
        radius_sq = radius_sq.max(sq);
        if sq < best_sq {
            best_sq = sq;
            j0 = Some(i);
        }
    }
    let j0 = j0.ok_or(Error::Empty("hull vertices"))?;
    let active = m - usize::from(skip.is_some_and(|s| s < m));
    let cap = (10 * active * dim).max(100);
    // Below this the gap is indistinguishable from rounding noise.
    let floor = 64.0 * f64::EPSILON * radius_sq.max(f64::MIN_POSITIVE);

    let mut corral = vec![j0];
    let mut lambda = vec![1.0];
    let mut y = shifted(j0);
    let mut iterations = 0;

    let finish = |corral: &[usize], lambda: &[f64], y: &[f64], gap: f64, iterations: usize| {
        let (pairs, y) = canonical_face(corral, lambda, y, &row, &shifted);
        let mut weights = vec![0.0; m];
        for (i, l) in pairs {
            weights[i] = l;
        }
        NearestPoint {
            point: y.iter().zip(x).map(|(a, b)| a + b).collect(),
            distance: dot(&y, &y).sqrt(),
            weights,
            gap,
            iterations,
        }
    };

    loop {
        iterations += 1;
        let yy = dot(&y, &y);
        let ynorm = yy.sqrt();

        let xy = dot(x, &y);
        let mut j = j0;
        let mut vmin = f64::INFINITY;
        for i in (0..m).filter(|&i| Some(i) != skip) {
            let v = dot(row(i), &y);
            if v < vmin {
                vmin = v;
                j = i;
            }
        }
        let gap = (yy - (vmin - xy)).max(0.0);

        if ynorm <= tol || 2.0 * gap <= tol * ynorm || gap <= floor {
            return Ok(finish(&corral, &lambda, &y, gap, iterations));
        }
        if corral.contains(&j) {
            // The corral minimizer is already optimal up to rounding.
            if gap <= 1e-10 * radius_sq {
                return Ok(finish(&corral, &lambda, &y, gap, iterations));
            }
            return Err(not_converged(iterations, gap, &y, x));
        }
        if iterations > cap {
            return Err(not_converged(iterations, gap, &y, x));
        }

        corral.push(j);
        lambda.push(0.0);
        loop {
            iterations += 1;
            let alpha = affine_minimizer(&corral, &shifted);
            if alpha.iter().all(|&a| a > 0.0) {
                lambda = alpha;
                break;
            }
            // Step toward alpha until the first weight hits zero.
            let (leave, theta) = alpha
                .iter()
                .zip(&lambda)
                .enumerate()
                .filter(|(_, (&a, _))| a <= 0.0)
                .map(|(i, (&a, &l))| {
                    (
                        i,
                        if l - a > 0.0 {
                            (l / (l - a)).min(1.0)
                        } else {
                            0.0
                        },
                    )
                })
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("some affine weight is not positive");
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            lambda[leave] = 0.0;
            let mut k = 0;
            while k < corral.len() {
                if lambda[k] <= 0.0 && corral.len() > 1 {
                    corral.swap_remove(k);
                    lambda.swap_remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            if iterations > cap {
                break;
            }
        }

        y.iter_mut().for_each(|c| *c = 0.0);
        for (&i, &l) in corral.iter().zip(&lambda) {
            for (yc, pc) in y.iter_mut().zip(shifted(i)) {
                *yc += l * pc;
            }
        }
    }
}

/// Re-solves the final corral with its vertices sorted by coordinates, so the
/// result depends only on the face geometry and not on vertex numbering or the
/// path the iteration took. Keeps the iterate if the re-solve is not convex.
fn canonical_face<'a>(
    corral: &[usize],
    lambda: &[f64],
    y: &[f64],
    row: &impl Fn(usize) -> &'a [f64],
    shifted: &impl Fn(usize) -> Vec<f64>,
) -> (Vec<(usize, f64)>, Vec<f64>) {
    let fallback = || {
        (
            corral.iter().copied().zip(lambda.iter().copied()).collect(),
            y.to_vec(),
        )
    };
    if corral.len() < 2 {
        return fallback();
    }
    let mut sorted = corral.to_vec();
    sorted.sort_by(|&a, &b| {
        row(a)
            .iter()
            .zip(row(b))
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let alpha = affine_minimizer(&sorted, shifted);
    if !alpha.iter().all(|&a| a > 0.0) {
        return fallback();
    }
    let mut canon = vec![0.0; y.len()];
    for (&i, &a) in sorted.iter().zip(&alpha) {
        for (c, p) in canon.iter_mut().zip(shifted(i)) {
            *c += a * p;
        }
    }
    (sorted.into_iter().zip(alpha).collect(), canon)
}

/// Weights of the point of least norm in the affine hull of the corral.
fn affine_minimizer(corral: &[usize], shifted: &impl Fn(usize) -> Vec<f64>) -> Vec<f64> {
    let k = corral.len();
    if k == 1 {
        return vec![1.0];
    }
    let base = shifted(corral[0]);
    let dim = base.len();
    let cols: Vec<Vec<f64>> = corral[1..]
        .iter()
        .map(|&i| shifted(i).iter().zip(&base).map(|(p, b)| p - b).collect())
        .collect();
    let a = DMatrix::from_fn(dim, k - 1, |r, c| cols[c][r]);
    let rhs = DVector::from_iterator(dim, base.iter().map(|b| -b));
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    let eps = 1e-13 * scale;
    let svd = a.clone().svd(true, true);
    let mut beta = svd
        .solve(&rhs, eps)
        .unwrap_or_else(|_| DVector::zeros(k - 1));
    // The iterative SVD can leave residuals far above rounding level when
    // singular values nearly coincide; refinement recovers them.
    for _ in 0..2 {
        let residual = &rhs - &a * &beta;
        match svd.solve(&residual, eps) {
            Ok(step) => beta += step,
            Err(_) => break,
        }
    }
    let mut alpha = Vec::with_capacity(k);
    alpha.push(1.0 - beta.iter().sum::<f64>());
    alpha.extend(beta.iter());
    alpha
}

fn not_converged(iterations: usize, gap: f64, y: &[f64], x: &[f64]) -> Error {
    Error::NotConverged {
        iterations,
        gap,
        distance: dot(y, y).sqrt(),
        best: y.iter().zip(x).map(|(a, b)| a + b).collect(),
    }
}
