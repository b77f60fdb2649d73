//! Library results checked against independent brute-force or closed-form
//! computations.

mod common;

use achull::datagen::{generate, ShapeKind, ShapeSpec};
use achull::geometry::{exact_extreme_points, min_norm_point, support, DEFAULT_TOL};
use achull::{build_sketch, DirectionSet, PointCloud, VertexPolytope};
use common::{monotone_chain, naive_counts, polygon_distance, Splitmix};

fn random_cloud(rng: &mut Splitmix, n: usize, count: usize) -> PointCloud {
    let coords = (0..n * count).map(|_| rng.range(-2.0, 2.0)).collect();
    PointCloud::new(n, coords).unwrap()
}

#[test]
fn projection_matches_polygon_distance() {
    let mut rng = Splitmix(1);
    for trial in 0..200 {
        let cloud = random_cloud(&mut rng, 2, 3 + trial % 30);
        let ccw = monotone_chain(&cloud);
        let poly: Vec<Vec<f64>> = ccw.iter().map(|&i| cloud.point(i).to_vec()).collect();
        let hull = VertexPolytope::from(cloud.clone());
        for _ in 0..10 {
            let x = [rng.range(-4.0, 4.0), rng.range(-4.0, 4.0)];
            let got = min_norm_point(&x, &hull, DEFAULT_TOL).unwrap();
            let want = polygon_distance(&x, &poly);
            assert!(
                (got.distance - want).abs() <= 1e-8,
                "{trial}: {} vs {want}",
                got.distance
            );
            let total: f64 = got.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(got.weights.iter().all(|&w| w >= 0.0));
        }
    }
}

#[test]
fn projection_matches_dense_segment_sampling_in_3d() {
    // For a tetrahedron, the nearest point of the hull from a far point lies on
    // the boundary, which a fine barycentric grid of each face approximates.
    let mut rng = Splitmix(2);
    for _ in 0..20 {
        let cloud = random_cloud(&mut rng, 3, 4);
        let hull = VertexPolytope::from(cloud.clone());
        let x = [rng.range(-6.0, 6.0), rng.range(-6.0, 6.0), 6.0];
        let got = min_norm_point(&x, &hull, DEFAULT_TOL).unwrap().distance;
        let steps = 200;
        let mut best = f64::INFINITY;
        for (a, b, c) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
            for i in 0..=steps {
                for j in 0..=steps - i {
                    let (s, t) = (i as f64 / steps as f64, j as f64 / steps as f64);
                    let r = 1.0 - s - t;
                    let d: f64 = (0..3)
                        .map(|k| {
                            let p = s * cloud.point(a)[k]
                                + t * cloud.point(b)[k]
                                + r * cloud.point(c)[k];
                            (p - x[k]).powi(2)
                        })
                        .sum::<f64>()
                        .sqrt();
                    best = best.min(d);
                }
            }
        }
        // The grid can only overestimate, by at most the grid spacing.
        assert!(got <= best + 1e-9);
        assert!(best - got < 0.05, "{got} vs grid {best}");
    }
}

#[test]
fn extreme_points_match_monotone_chain() {
    let mut rng = Splitmix(3);
    for trial in 0..100 {
        let cloud = random_cloud(&mut rng, 2, 5 + trial * 3);
        let mut chain = monotone_chain(&cloud);
        chain.sort_unstable();
        let exact: Vec<usize> = exact_extreme_points(&cloud, DEFAULT_TOL)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(exact, chain, "trial {trial}");
    }
}

#[test]
fn extreme_points_skip_collinear_grid_points() {
    // A 5x5 integer grid: only the four corners are extreme.
    let rows: Vec<[f64; 2]> = (0..25).map(|i| [(i % 5) as f64, (i / 5) as f64]).collect();
    let cloud = PointCloud::from_rows(&rows).unwrap();
    let exact: Vec<usize> = exact_extreme_points(&cloud, DEFAULT_TOL)
        .unwrap()
        .into_iter()
        .collect();
    let mut chain = monotone_chain(&cloud);
    chain.sort_unstable();
    assert_eq!(exact, vec![0, 4, 20, 24]);
    assert_eq!(chain, exact);
}

#[test]
fn cube_corners_are_the_only_extremes() {
    let mut rows: Vec<Vec<f64>> = (0..8)
        .map(|c| (0..3).map(|k| ((c >> k) & 1) as f64).collect())
        .collect();
    let inside = generate(&ShapeSpec::new(ShapeKind::Cube, 3, 300, 4)).unwrap();
    rows.extend(
        inside
            .iter()
            .map(|p| p.iter().map(|c| 0.01 + 0.98 * c).collect::<Vec<_>>()),
    );
    let cloud = PointCloud::from_rows(&rows).unwrap();
    let exact: Vec<usize> = exact_extreme_points(&cloud, DEFAULT_TOL)
        .unwrap()
        .into_iter()
        .collect();
    assert_eq!(exact, (0..8).collect::<Vec<_>>());
    let found = build_sketch(&cloud, &DirectionSet::sample_uniform(5000, 3, 5).unwrap())
        .unwrap()
        .found();
    assert_eq!(found, exact);
}

#[test]
fn sketch_counts_match_brute_force() {
    let mut rng = Splitmix(6);
    for (n, count, m) in [(2, 50, 300), (3, 700, 450), (5, 1100, 260), (7, 40, 1000)] {
        let cloud = random_cloud(&mut rng, n, count);
        let dirs = DirectionSet::sample_uniform(m, n, rng.next_u64()).unwrap();
        let sketch = build_sketch(&cloud, &dirs).unwrap();
        let list: Vec<&[f64]> = dirs.iter().collect();
        assert_eq!(sketch.counts(), naive_counts(&cloud, &list).as_slice());
        for (j, d) in dirs.iter().enumerate() {
            let (idx, value) = support(&cloud, d).unwrap();
            assert_eq!(sketch.assignment()[j], idx);
            assert_eq!(sketch.support_values()[j], value);
        }
        assert_eq!(sketch.counts().iter().sum::<u64>(), m as u64);
    }
}

#[test]
fn ties_go_to_the_lowest_index() {
    let cloud = PointCloud::from_rows(&[[0.0, 1.0], [1.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
    let dirs = DirectionSet::from_unit_vectors(2, vec![0.0, 1.0, 1.0, 0.0], 0).unwrap();
    let sketch = build_sketch(&cloud, &dirs).unwrap();
    assert_eq!(sketch.assignment(), &[0, 1]);
}

#[test]
fn merged_sketch_equals_sketch_of_concatenation() {
    let mut rng = Splitmix(7);
    let cloud = random_cloud(&mut rng, 4, 900);
    let a = DirectionSet::sample_uniform(333, 4, 1).unwrap();
    let b = DirectionSet::sample_uniform(517, 4, 2).unwrap();
    let whole = build_sketch(&cloud, &a.concat(&b).unwrap()).unwrap();
    let merged = build_sketch(&cloud, &a)
        .unwrap()
        .merge(&build_sketch(&cloud, &b).unwrap())
        .unwrap();
    assert_eq!(merged, whole);
}

#[test]
fn cone_apex_curvature_matches_its_normal_cone() {
    // The lateral surface meets the base rim, so the cone half-angle at the
    // apex is atan(1/2) and its normal cone is a cap of angular radius
    // pi/2 - atan(1/2) around the downward axis.
    let rho = std::f64::consts::FRAC_PI_2 - 0.5f64.atan();
    let analytic = [
        (2, rho / std::f64::consts::PI),
        (3, (1.0 - rho.cos()) / 2.0),
    ];
    for (n, want) in analytic {
        let cloud = generate(&ShapeSpec::new(ShapeKind::ConeCap, n, 5000, 8)).unwrap();
        assert_eq!(cloud.point(0)[n - 1], -2.0);
        let sketch =
            build_sketch(&cloud, &DirectionSet::sample_uniform(20_000, n, 9).unwrap()).unwrap();
        let apex = sketch.relative_curvature(0);
        assert!((apex - want).abs() < 0.015, "n={n}: apex {apex} vs {want}");
        let others = (1..cloud.len())
            .map(|v| sketch.relative_curvature(v))
            .fold(0.0, f64::max);
        assert!(apex > 2.0 * others, "n={n}: apex {apex}, next {others}");
    }
}
