//! Reducing the sketch output: greedy radius clustering of kept vertices,
//! and reduction of the halfspace list by clustering extremal directions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::geometry::{distance, dot, min_norm_point, norm, PointCloud, VertexPolytope};
use crate::sketch::{
    build_sketch, outer_hull, threshold_filter, CurvatureSketch, HullSource, InnerHull, OuterHull,
    ThresholdMode,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterOrder {
    /// Highest curvature first; each representative is the sharpest member of its cluster.
    #[default]
    Decreasing,
    /// Lowest curvature first.
    Increasing,
}

/// Representatives kept by vertex compression and the points each absorbed.
/// `members[k]` starts with `representatives[k]` itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterMap {
    pub representatives: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

/// Greedy radius clustering of the inner hull.
///
/// Points are visited in curvature order; an unvisited point becomes a
/// representative and absorbs every remaining point closer than `beta`.
/// `beta = 0` returns the input unchanged.
pub fn vertex_compress(
    inner: &InnerHull,
    cloud: &PointCloud,
    sketch: &CurvatureSketch,
    beta: f64,
    order: ClusterOrder,
) -> Result<(InnerHull, ClusterMap)> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::invalid(format!(
            "beta {beta} must be a finite value >= 0"
        )));
    }
    if inner.kept.iter().any(|&v| v >= cloud.len()) || sketch.n_points() != cloud.len() {
        return Err(Error::invalid("inner hull does not belong to this cloud"));
    }
    let mut visit: Vec<usize> = (0..inner.kept.len()).collect();
    let count = |pos: usize| sketch.counts()[inner.kept[pos]];
    match order {
        ClusterOrder::Decreasing => visit.sort_by_key(|&a| std::cmp::Reverse(count(a))),
        ClusterOrder::Increasing => visit.sort_by_key(|&a| count(a)),
    }

    let mut taken = vec![false; inner.kept.len()];
    let mut reps = Vec::new();
    let mut members = Vec::new();
    for (step, &pos) in visit.iter().enumerate() {
        if taken[pos] {
            continue;
        }
        taken[pos] = true;
        let v = inner.kept[pos];
        let mut cluster = vec![v];
        for &other in &visit[step + 1..] {
            if !taken[other] && distance(cloud.point(v), cloud.point(inner.kept[other])) < beta {
                taken[other] = true;
                cluster.push(inner.kept[other]);
            }
        }
        reps.push(pos);
        members.push(cluster);
    }

    // Output keeps index order, like the threshold filter.
    let mut order_idx: Vec<usize> = (0..reps.len()).collect();
    order_idx.sort_by_key(|&k| inner.kept[reps[k]]);
    let compressed = InnerHull {
        kept: order_idx.iter().map(|&k| inner.kept[reps[k]]).collect(),
        curvatures: order_idx
            .iter()
            .map(|&k| inner.curvatures[reps[k]])
            .collect(),
        alpha: inner.alpha,
        mode: inner.mode,
    };
    let map = ClusterMap {
        representatives: order_idx.iter().map(|&k| inner.kept[reps[k]]).collect(),
        members: order_idx.iter().map(|&k| members[k].clone()).collect(),
    };
    Ok((compressed, map))
}

/// For each representative, the directions won by any member of its cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionBundle {
    pub bundles: Vec<Vec<usize>>,
}

impl DirectionBundle {
    pub fn new(map: &ClusterMap, sketch: &CurvatureSketch) -> Self {
        let won = sketch.extremal_directions();
        let bundles = map
            .members
            .iter()
            .map(|m| {
                let mut f: Vec<usize> = m.iter().flat_map(|&w| won[w].iter().copied()).collect();
                f.sort_unstable();
                f
            })
            .collect();
        Self { bundles }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HyperplaneVariant {
    /// Sketch each representative's direction bundle as a point cloud on the
    /// sphere and keep its high-curvature, radius-clustered directions.
    Recursive,
    /// Keep a direction when the three largest representative values along
    /// it are within `gamma` of each other.
    GammaThreshold { gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneParams {
    pub inner_alpha: f64,
    pub inner_beta: f64,
    /// Directions used to sketch each bundle.
    pub inner_dirs: usize,
    /// Angular radius (radians) of a direction cluster.
    pub merge_angle: f64,
    pub variant: HyperplaneVariant,
    pub seed: u64,
}

impl Default for HyperplaneParams {
    fn default() -> Self {
        Self {
            inner_alpha: 0.05,
            inner_beta: 0.0,
            inner_dirs: 1000,
            merge_angle: std::f64::consts::PI / 36.0,
            variant: HyperplaneVariant::Recursive,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressedHull {
    pub outer: OuterHull,
    /// Size of the direction cluster behind each output halfspace.
    pub cluster_sizes: Vec<usize>,
    /// Directions that survived the per-bundle reduction.
    pub candidates: usize,
    /// Whether the halfspaces cut out a bounded body.
    pub bounded: bool,
}

pub fn hyperplane_compress(
    cloud: &PointCloud,
    sketch: &CurvatureSketch,
    dirs: &DirectionSet,
    map: &ClusterMap,
    bundle: &DirectionBundle,
    params: &HyperplaneParams,
) -> Result<CompressedHull> {
    if !(params.merge_angle > 0.0 && params.merge_angle < std::f64::consts::PI) {
        return Err(Error::invalid("merge angle must lie in (0, pi)"));
    }
    if bundle.bundles.len() != map.representatives.len() {
        return Err(Error::invalid(
            "direction bundle does not match cluster map",
        ));
    }
    if sketch.n_dirs() != dirs.len() || sketch.n_points() != cloud.len() {
        return Err(Error::invalid("sketch does not match cloud and directions"));
    }
    let n = dirs.dim();

    // Candidate directions paired with the bundle size they came from.
    let mut candidates: Vec<(usize, usize)> = match params.variant {
        HyperplaneVariant::Recursive => {
            let reduced = bundle
                .bundles
                .par_iter()
                .enumerate()
                .map(|(k, f)| reduce_bundle(f, dirs, params, k).map(|r| (f.len(), r)))
                .collect::<Result<Vec<_>>>()?;
            reduced
                .into_iter()
                .flat_map(|(size, r)| r.into_iter().map(move |j| (j, size)))
                .collect()
        }
        HyperplaneVariant::GammaThreshold { gamma } => {
            if !(gamma > 0.0) {
                return Err(Error::invalid("gamma must be positive"));
            }
            let reps = cloud.select(&map.representatives)?;
            (0..dirs.len())
                .filter(|&j| top_three_within(&reps, dirs.direction(j), gamma))
                .map(|j| (j, 1))
                .collect()
        }
    };
    // Largest bundles first; ties by direction index.
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    if candidates.is_empty() {
        return Err(Error::NoConstraints);
    }

    let unit: Vec<&[f64]> = candidates.iter().map(|&(j, _)| dirs.direction(j)).collect();
    let clusters = complete_linkage(&unit, params.merge_angle);

    let mut coords = Vec::with_capacity(clusters.len() * n);
    let mut sizes = Vec::with_capacity(clusters.len());
    for members in &clusters {
        if let [only] = members.as_slice() {
            coords.extend_from_slice(unit[*only]);
            sizes.push(1);
            continue;
        }
        let mut mean = vec![0.0; n];
        for &i in members {
            mean.iter_mut().zip(unit[i]).for_each(|(m, d)| *m += d);
        }
        let len = norm(&mean);
        if len > 1e-12 {
            coords.extend(mean.iter().map(|m| m / len));
        } else {
            coords.extend_from_slice(unit[members[0]]);
        }
        sizes.push(members.len());
    }
    let merged = DirectionSet::from_unit_vectors(n, coords, params.seed)?;
    let final_sketch = build_sketch(cloud, &merged)?;
    let mut outer = outer_hull(&final_sketch, cloud, &merged)?;
    outer.source = HullSource::Compressed;

    let mut kept_sizes = Vec::new();
    let mut seen: Vec<(Vec<u64>, u64)> = Vec::new();
    let mut halfspaces = Vec::new();
    for (h, size) in outer.halfspaces.into_iter().zip(sizes) {
        let key = (
            h.normal.iter().map(|c| c.to_bits()).collect(),
            h.offset.to_bits(),
        );
        if !seen.contains(&key) {
            seen.push(key);
            halfspaces.push(h);
            kept_sizes.push(size);
        }
    }
    outer.halfspaces = halfspaces;
    let bounded = normals_positively_span(&outer)?;
    Ok(CompressedHull {
        outer,
        cluster_sizes: kept_sizes,
        candidates: candidates.len(),
        bounded,
    })
}

/// Directions of one bundle that survive sketching the bundle as a point
/// cloud on the sphere.
fn reduce_bundle(
    bundle: &[usize],
    dirs: &DirectionSet,
    params: &HyperplaneParams,
    k: usize,
) -> Result<Vec<usize>> {
    // Distinct points of a sphere are all vertices of their hull, so with no
    // threshold and no clustering the exact hull keeps the whole bundle.
    if bundle.len() <= 1 || (params.inner_alpha == 0.0 && params.inner_beta == 0.0) {
        return Ok(bundle.to_vec());
    }
    let n = dirs.dim();
    let pts: Vec<f64> = bundle
        .iter()
        .flat_map(|&j| dirs.direction(j).iter().copied())
        .collect();
    let sub = PointCloud::new(n, pts)?;
    let probe_seed = params.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let probes = DirectionSet::sample_uniform(params.inner_dirs.max(1), n, probe_seed)?;
    let sub_sketch = build_sketch(&sub, &probes)?;
    let inner = threshold_filter(
        &sub_sketch,
        params.inner_alpha,
        ThresholdMode::Hard,
        probe_seed,
    )?;
    let (kept, _) = vertex_compress(
        &inner,
        &sub,
        &sub_sketch,
        params.inner_beta,
        ClusterOrder::Decreasing,
    )?;
    Ok(kept.kept.iter().map(|&i| bundle[i]).collect())
}

fn top_three_within(reps: &PointCloud, d: &[f64], gamma: f64) -> bool {
    if reps.len() < 3 {
        return false;
    }
    let mut top = [f64::NEG_INFINITY; 3];
    for p in reps.iter() {
        let v = dot(p, d);
        if v > top[0] {
            top = [v, top[0], top[1]];
        } else if v > top[1] {
            top = [top[0], v, top[1]];
        } else if v > top[2] {
            top[2] = v;
        }
    }
    top[0] - top[2] < gamma
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

/// Complete-linkage agglomerative clustering of unit vectors cut at angle
/// `threshold`: every cluster has angular diameter below the threshold, and
/// raising the threshold can only merge clusters. Uses the nearest-neighbour
/// chain so the dendrogram is independent of visiting order; ties resolve
/// to the smallest index. Clusters are returned in order of their first
/// member.
pub(crate) fn complete_linkage(units: &[&[f64]], threshold: f64) -> Vec<Vec<usize>> {
    let k = units.len();
    let mut dist = vec![0.0; k * k];
    for i in 0..k {
        for j in i + 1..k {
            let a = angle(units[i], units[j]);
            dist[i * k + j] = a;
            dist[j * k + i] = a;
        }
    }
    let mut members: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    // Clusters still allowed to merge.
    let mut open = vec![true; k];
    let mut chain: Vec<usize> = Vec::new();
    loop {
        if chain.is_empty() {
            match open.iter().position(|&o| o) {
                Some(i) => chain.push(i),
                None => break,
            }
        }
        let a = *chain.last().unwrap();
        let prev = chain.len().checked_sub(2).map(|i| chain[i]);
        let mut best: Option<(usize, f64)> = None;
        for b in (0..k).filter(|&b| b != a && open[b]) {
            let d = dist[a * k + b];
            let better = match best {
                None => true,
                Some((bb, bd)) => d < bd || (d == bd && Some(b) == prev && Some(bb) != prev),
            };
            if better {
                best = Some((b, d));
            }
        }
        match best {
            Some((b, d)) if d < threshold => {
                if Some(b) == prev {
                    chain.pop();
                    chain.pop();
                    let (keep, gone) = (a.min(b), a.max(b));
                    for c in 0..k {
                        let m = dist[keep * k + c].max(dist[gone * k + c]);
                        dist[keep * k + c] = m;
                        dist[c * k + keep] = m;
                    }
                    open[gone] = false;
                    let moved = std::mem::take(&mut members[gone]);
                    members[keep].extend(moved);
                } else {
                    chain.push(b);
                }
            }
            _ => {
                // Nothing within reach now, and complete-linkage distances never shrink.
                open[a] = false;
                chain.pop();
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = members.into_iter().filter(|m| !m.is_empty()).collect();
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort_by_key(|c| c[0]);
    clusters
}

/// Whether the halfspace normals positively span R^n, i.e. the outer hull is
/// bounded. Checks that a small cross-polytope around the origin lies in the
/// hull of the normals.
fn normals_positively_span(outer: &OuterHull) -> Result<bool> {
    let n = outer.dim();
    let coords: Vec<f64> = outer
        .halfspaces
        .iter()
        .flat_map(|h| h.normal.iter().copied())
        .collect();
    let normals = VertexPolytope::new(n, coords)?;
    let delta = 1e-6;
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut x = vec![0.0; n];
            x[k] = sign * delta;
            if min_norm_point(&x, &normals, 1e-12)?.distance > 1e-10 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Found-over-true ratios for vertices and, when both counts are known, hyperplanes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionRatios {
    pub vertex: f64,
    pub hyperplane: Option<f64>,
}

pub fn compression_ratios(
    found_vertices: usize,
    true_vertices: usize,
    planes: Option<(usize, usize)>,
) -> Result<CompressionRatios> {
    if true_vertices == 0 {
        return Err(Error::invalid("true vertex count must be positive"));
    }
    let hyperplane = match planes {
        Some((_, 0)) => return Err(Error::invalid("true hyperplane count must be positive")),
        Some((found, truth)) => Some(found as f64 / truth as f64),
        None => None,
    };
    Ok(CompressionRatios {
        vertex: found_vertices as f64 / true_vertices as f64,
        hyperplane,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{hausdorff, DEFAULT_TOL};

    fn run(
        rows: &[[f64; 2]],
        dirs: usize,
    ) -> (PointCloud, CurvatureSketch, DirectionSet, InnerHull) {
        let cloud = PointCloud::from_rows(rows).unwrap();
        let d = DirectionSet::sample_uniform(dirs, 2, 3).unwrap();
        let s = build_sketch(&cloud, &d).unwrap();
        let inner = threshold_filter(&s, 0.0, ThresholdMode::Hard, 0).unwrap();
        (cloud, s, d, inner)
    }

    #[test]
    fn one_obvious_cluster() {
        let (cloud, s, _, inner) = run(&[[0.0, 0.0], [0.01, 0.0], [1.0, 1.0]], 5000);
        assert_eq!(inner.len(), 3);
        let (out, map) =
            vertex_compress(&inner, &cloud, &s, 0.1, ClusterOrder::Decreasing).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.kept.contains(&2));
        let pair = map.members.iter().find(|m| m.len() == 2).unwrap();
        assert!(distance(cloud.point(pair[0]), cloud.point(pair[1])) <= 0.01 + 1e-15);
        // The sharper of the two close points represents the cluster.
        let rep = pair[0];
        assert!(s.counts()[rep] >= s.counts()[pair[1]]);
    }

    #[test]
    fn zero_beta_is_identity() {
        let (cloud, s, _, inner) = run(&[[0.0, 0.0], [0.01, 0.0], [1.0, 1.0], [1.0, 0.0]], 2000);
        for order in [ClusterOrder::Decreasing, ClusterOrder::Increasing] {
            let (out, map) = vertex_compress(&inner, &cloud, &s, 0.0, order).unwrap();
            assert_eq!(out, inner);
            assert!(map.members.iter().all(|m| m.len() == 1));
        }
        assert!(vertex_compress(&inner, &cloud, &s, -1.0, ClusterOrder::Decreasing).is_err());
    }

    #[test]
    fn clusters_partition_and_stay_close() {
        let pts = DirectionSet::sample_uniform(400, 2, 9).unwrap();
        let cloud = PointCloud::new(2, pts.coords().to_vec()).unwrap();
        let d = DirectionSet::sample_uniform(3000, 2, 4).unwrap();
        let s = build_sketch(&cloud, &d).unwrap();
        let inner = threshold_filter(&s, 0.0, ThresholdMode::Hard, 0).unwrap();
        for beta in [0.05, 0.2, 0.7] {
            let (out, map) =
                vertex_compress(&inner, &cloud, &s, beta, ClusterOrder::Increasing).unwrap();
            let mut all: Vec<usize> = map.members.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, inner.kept);
            for (rep, m) in map.representatives.iter().zip(&map.members) {
                assert_eq!(m[0], *rep);
                assert!(m
                    .iter()
                    .all(|&w| distance(cloud.point(*rep), cloud.point(w)) < beta));
            }
            let a = inner.polytope(&cloud).unwrap();
            let b = out.polytope(&cloud).unwrap();
            assert!(hausdorff(&a, &b, DEFAULT_TOL).unwrap() < beta);
        }
    }

    #[test]
    fn complete_linkage_respects_diameter() {
        let d = DirectionSet::sample_uniform(300, 3, 1).unwrap();
        let units: Vec<&[f64]> = d.iter().collect();
        let mut last = usize::MAX;
        for t in [0.05, 0.2, 0.5, 1.0, 2.0] {
            let clusters = complete_linkage(&units, t);
            assert!(clusters.len() <= last);
            last = clusters.len();
            let mut seen: Vec<usize> = clusters.iter().flatten().copied().collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..300).collect::<Vec<_>>());
            for c in &clusters {
                for &a in c {
                    for &b in c {
                        assert!(angle(units[a], units[b]) < t);
                    }
                }
            }
        }
    }

    #[test]
    fn ratios() {
        let r = compression_ratios(34, 300, None).unwrap();
        assert!((r.vertex - 0.11333).abs() < 1e-4);
        let r = compression_ratios(29, 2495, Some((4, 4))).unwrap();
        assert!((r.vertex - 0.0116).abs() < 1e-4);
        assert_eq!(r.hyperplane, Some(1.0));
        assert!(compression_ratios(1, 0, None).is_err());
        assert!(compression_ratios(1, 1, Some((1, 0))).is_err());
    }
}
