#![allow(dead_code)]

use achull::PointCloud;

/// The square with corners (±1, ±1), listed counter-clockwise.
pub fn square() -> PointCloud {
    PointCloud::from_rows(&[
        vec![1.0, 1.0],
        vec![-1.0, 1.0],
        vec![-1.0, -1.0],
        vec![1.0, -1.0],
    ])
    .unwrap()
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Returns hull vertex indices in counter-clockwise
/// order, dropping collinear points. Duplicate points keep the lowest index.
pub fn monotone_chain(cloud: &PointCloud) -> Vec<usize> {
    assert_eq!(cloud.dim(), 2);
    let mut idx: Vec<usize> = (0..cloud.len()).collect();
    idx.sort_by(|&a, &b| {
        let (p, q) = (cloud.point(a), cloud.point(b));
        p[0].total_cmp(&q[0])
            .then(p[1].total_cmp(&q[1]))
            .then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| cloud.point(*a) == cloud.point(*b));
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in seq {
            while hull.len() >= start + 2
                && cross(
                    cloud.point(hull[hull.len() - 2]),
                    cloud.point(hull[hull.len() - 1]),
                    cloud.point(i),
                ) <= 0.0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Relative exterior angle of each vertex of a convex polygon given in
/// counter-clockwise order. These are the exact curvatures and sum to one.
pub fn exterior_angles(cloud: &PointCloud, ccw: &[usize]) -> Vec<f64> {
    let k = ccw.len();
    (0..k)
        .map(|i| {
            let prev = cloud.point(ccw[(i + k - 1) % k]);
            let cur = cloud.point(ccw[i]);
            let next = cloud.point(ccw[(i + 1) % k]);
            let a = (cur[1] - prev[1]).atan2(cur[0] - prev[0]);
            let b = (next[1] - cur[1]).atan2(next[0] - cur[0]);
            let mut turn = b - a;
            while turn < 0.0 {
                turn += std::f64::consts::TAU;
            }
            while turn >= std::f64::consts::TAU {
                turn -= std::f64::consts::TAU;
            }
            turn / std::f64::consts::TAU
        })
        .collect()
}

/// Distance from `x` to the segment `[a, b]`.
pub fn segment_distance(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
    let ax: Vec<f64> = a.iter().zip(x).map(|(p, q)| q - p).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (ab.iter().zip(&ax).map(|(u, v)| u * v).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    ax.iter()
        .zip(&ab)
        .map(|(v, u)| (v - t * u).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Distance from `x` to a convex polygon given as counter-clockwise vertices.
pub fn polygon_distance(x: &[f64], poly: &[Vec<f64>]) -> f64 {
    let k = poly.len();
    if k == 1 {
        return segment_distance(x, &poly[0], &poly[0]);
    }
    let inside = k >= 3
        && (0..k).all(|i| {
            let (a, b) = (&poly[i], &poly[(i + 1) % k]);
            (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0
        });
    if inside {
        return 0.0;
    }
    (0..k)
        .map(|i| segment_distance(x, &poly[i], &poly[(i + 1) % k]))
        .fold(f64::INFINITY, f64::min)
}

/// Counts of directions won by each point, by brute force over every pair.
pub fn naive_counts(cloud: &PointCloud, dirs: &[&[f64]]) -> Vec<u64> {
    let mut counts = vec![0u64; cloud.len()];
    for d in dirs {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..cloud.len() {
            let v: f64 = cloud
                .point(i)
                .iter()
                .zip(d.iter())
                .map(|(a, b)| a * b)
                .sum();
            if v > best_v {
                best_v = v;
                best = i;
            }
        }
        counts[best] += 1;
    }
    counts
}

/// Deterministic uniform point in a box, via a splitmix64 stream.
pub struct Splitmix(pub u64);

impl Splitmix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}
