//! End-to-end runs behind the command-line subcommands. Each function does
//! the work, writes its files when given an output directory, and returns
//! what it wrote so callers and tests can inspect it.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundQuery, InnerErrorVariant};
use crate::compression::{
    compression_ratios, hyperplane_compress, vertex_compress, ClusterMap, ClusterOrder,
    CompressedHull, CompressionRatios, DirectionBundle, HyperplaneParams,
};
use crate::datagen::{generate, ShapeSpec};
use crate::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::geometry::{exact_extreme_points, PointCloud, VertexPolytope, DEFAULT_TOL};
use crate::io;
use crate::metrics::{inner_error, outer_error, ErrorMethod, ErrorReport};
use crate::sketch::{
    build_sketch, outer_hull, threshold_filter, CurvatureSketch, InnerHull, OuterHull,
    ThresholdMode,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest cloud for which the exact extreme-point oracle is run.
pub const ORACLE_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointSource {
    File(PathBuf),
    Generate(ShapeSpec),
}

impl PointSource {
    pub fn load(&self) -> Result<PointCloud> {
        match self {
            PointSource::File(p) => io::read_points(p),
            PointSource::Generate(spec) => generate(spec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchConfig {
    pub n_dirs: usize,
    pub alpha: f64,
    pub mode: ThresholdMode,
    pub seed: u64,
}

impl SketchConfig {
    fn validate(&self) -> Result<()> {
        if self.n_dirs == 0 {
            return Err(Error::invalid("need at least one direction"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchSummary {
    pub n_points: usize,
    pub n_found: usize,
    pub n_kept: usize,
    pub n_dirs: usize,
    pub alpha: f64,
    pub mode: ThresholdMode,
    pub seed: u64,
    pub runtime_ms: f64,
    pub version: String,
    pub warning: Option<String>,
}

pub struct SketchRun {
    pub dirs: DirectionSet,
    pub sketch: CurvatureSketch,
    pub inner: InnerHull,
    pub outer: OuterHull,
    pub summary: SketchSummary,
}

/// Sketch, threshold and outer hull. Writes `inner.csv` (kept points plus a
/// curvature column), `halfspaces.csv` and `summary.json`.
pub fn cmd_sketch(cloud: &PointCloud, cfg: &SketchConfig, out: Option<&Path>) -> Result<SketchRun> {
    cfg.validate()?;
    let start = Instant::now();
    let dirs = DirectionSet::sample_uniform(cfg.n_dirs, cloud.dim(), cfg.seed)?;
    let sketch = build_sketch(cloud, &dirs)?;
    let inner = threshold_filter(&sketch, cfg.alpha, cfg.mode, cfg.seed)?;
    let outer = outer_hull(&sketch, cloud, &dirs)?;
    let warning = inner.is_empty().then(|| {
        format!(
            "no point has relative curvature above alpha = {}; inner hull is empty",
            cfg.alpha
        )
    });
    let summary = SketchSummary {
        n_points: cloud.len(),
        n_found: sketch.found().len(),
        n_kept: inner.len(),
        n_dirs: cfg.n_dirs,
        alpha: cfg.alpha,
        mode: cfg.mode,
        seed: cfg.seed,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        version: VERSION.to_string(),
        warning,
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_kept(&dir.join("inner.csv"), cloud, &inner)?;
        io::write_halfspaces(&dir.join("halfspaces.csv"), &outer.halfspaces)?;
        write_json(&dir.join("summary.json"), &summary)?;
        write_json(&dir.join("sketch.json"), &sketch.export())?;
    }
    Ok(SketchRun {
        dirs,
        sketch,
        inner,
        outer,
        summary,
    })
}

fn write_kept(path: &Path, cloud: &PointCloud, inner: &InnerHull) -> Result<()> {
    let header = format!("{} coordinates, relative curvature", cloud.dim());
    io::write_points_with_column(path, cloud, &inner.kept, &inner.curvatures, &header)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressConfig {
    pub sketch: SketchConfig,
    pub beta: f64,
    pub order: ClusterOrder,
    pub hyperplane: Option<HyperplaneParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressReport {
    pub n_found: usize,
    pub n_kept: usize,
    pub n_compressed: usize,
    pub n_halfspaces: Option<usize>,
    pub bounded: Option<bool>,
    pub true_vertices: Option<usize>,
    pub ratios: Option<CompressionRatios>,
    pub seed: u64,
    pub version: String,
}

pub struct CompressRun {
    pub sketch: SketchRun,
    pub compressed: InnerHull,
    pub clusters: ClusterMap,
    pub hull: Option<CompressedHull>,
    pub report: CompressReport,
}

/// Vertex compression and, when configured, hyperplane compression. Writes
/// `vertices.csv`, `clusters.json`, `ratios.json` and, with hyperplane
/// compression, `halfspaces.csv`.
pub fn cmd_compress(
    cloud: &PointCloud,
    cfg: &CompressConfig,
    out: Option<&Path>,
) -> Result<CompressRun> {
    let run = cmd_sketch(cloud, &cfg.sketch, None)?;
    let (compressed, clusters) =
        vertex_compress(&run.inner, cloud, &run.sketch, cfg.beta, cfg.order)?;
    let hull = match &cfg.hyperplane {
        Some(params) => {
            let bundle = DirectionBundle::new(&clusters, &run.sketch);
            Some(hyperplane_compress(
                cloud,
                &run.sketch,
                &run.dirs,
                &clusters,
                &bundle,
                params,
            )?)
        }
        None => None,
    };
    let true_vertices = if cloud.len() <= ORACLE_LIMIT {
        Some(exact_extreme_points(cloud, DEFAULT_TOL)?.len())
    } else {
        None
    };
    let ratios = match true_vertices {
        Some(t) if t > 0 => {
            // In the plane the true hull has as many edges as vertices.
            let planes = match (&hull, cloud.dim()) {
                (Some(h), 2) => Some((h.outer.len(), t)),
                _ => None,
            };
            Some(compression_ratios(compressed.len(), t, planes)?)
        }
        _ => None,
    };
    let report = CompressReport {
        n_found: run.summary.n_found,
        n_kept: run.inner.len(),
        n_compressed: compressed.len(),
        n_halfspaces: hull.as_ref().map(|h| h.outer.len()),
        bounded: hull.as_ref().map(|h| h.bounded),
        true_vertices,
        ratios,
        seed: cfg.sketch.seed,
        version: VERSION.to_string(),
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_kept(&dir.join("vertices.csv"), cloud, &compressed)?;
        write_json(&dir.join("clusters.json"), &clusters)?;
        write_json(&dir.join("ratios.json"), &report)?;
        if let Some(h) = &hull {
            io::write_halfspaces(&dir.join("halfspaces.csv"), &h.outer.halfspaces)?;
        }
    }
    Ok(CompressRun {
        sketch: run,
        compressed,
        clusters,
        hull,
        report,
    })
}

/// True extreme points: the exact oracle at desk scale, otherwise the
/// points found by a reference sketch with `reference_dirs` directions.
pub fn reference_hull(
    cloud: &PointCloud,
    reference_dirs: usize,
    seed: u64,
) -> Result<VertexPolytope> {
    let idx: Vec<usize> = if cloud.len() <= ORACLE_LIMIT {
        exact_extreme_points(cloud, DEFAULT_TOL)?
            .into_iter()
            .collect()
    } else {
        let dirs = DirectionSet::sample_uniform(reference_dirs, cloud.dim(), seed)?;
        build_sketch(cloud, &dirs)?.found()
    };
    VertexPolytope::from_indices(cloud, &idx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorConfig {
    pub sketch: SketchConfig,
    pub probes: usize,
    pub probe_seed: u64,
    pub reference_dirs: usize,
}

/// Inner and outer error of one sketch run against the reference hull.
pub fn cmd_error(cloud: &PointCloud, cfg: &ErrorConfig, out: Option<&Path>) -> Result<ErrorReport> {
    let run = cmd_sketch(cloud, &cfg.sketch, None)?;
    let truth = reference_hull(cloud, cfg.reference_dirs, cfg.probe_seed ^ 0x5eed)?;
    let probes = DirectionSet::sample_uniform(cfg.probes.max(1), cloud.dim(), cfg.probe_seed)?;
    let report = error_report(cloud, &run.sketch, &run.inner, &run.outer, &truth, &probes)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_json(&dir.join("errors.json"), &report)?;
    }
    Ok(report)
}

fn error_report(
    cloud: &PointCloud,
    sketch: &CurvatureSketch,
    inner: &InnerHull,
    outer: &OuterHull,
    truth: &VertexPolytope,
    probes: &DirectionSet,
) -> Result<ErrorReport> {
    let inner_err = inner_error(truth, &inner.polytope(cloud)?, DEFAULT_TOL)?;
    let (outer_err, method, n_probes) = match outer_error(outer, truth, probes, DEFAULT_TOL) {
        Ok(e) => (e.value, e.method, e.probes),
        Err(Error::Unbounded) => {
            let method = if cloud.dim() == 2 {
                ErrorMethod::Exact2d
            } else {
                ErrorMethod::SupportGapEstimate
            };
            (f64::INFINITY, method, probes.len())
        }
        Err(e) => return Err(e),
    };
    Ok(ErrorReport {
        inner_error: inner_err,
        outer_error: outer_err,
        outer_method: method,
        n_probes,
        n_dirs_used: sketch.n_dirs(),
        n_found: sketch.found().len(),
        n_kept: inner.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Increasing direction counts; each run uses a prefix of one direction list.
    pub schedule: Vec<usize>,
    pub alpha: f64,
    pub seed: u64,
    pub probes: usize,
    pub probe_seed: u64,
    pub reference_dirs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n_dirs: usize,
    pub n_found: usize,
    pub n_kept: usize,
    pub inner_error: f64,
    pub outer_error: f64,
    pub method: ErrorMethod,
}

impl BenchRow {
    pub const HEADER: &'static str = "n_dirs,n_found,n_kept,inner_error,outer_error,method";

    pub fn csv(&self) -> String {
        let method = match self.method {
            ErrorMethod::Exact2d => "exact-2d",
            ErrorMethod::SupportGapEstimate => "support-gap-estimate",
        };
        format!(
            "{},{},{},{:.16e},{:.16e},{}",
            self.n_dirs, self.n_found, self.n_kept, self.inner_error, self.outer_error, method
        )
    }
}

/// One row per schedule entry, all sharing a common direction prefix so
/// later rows only ever add directions.
pub fn cmd_bench(
    cloud: &PointCloud,
    cfg: &BenchConfig,
    out: Option<&Path>,
) -> Result<Vec<BenchRow>> {
    if cfg.schedule.is_empty() || cfg.schedule[0] == 0 {
        return Err(Error::invalid("schedule must be nonempty and positive"));
    }
    if cfg.schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("schedule must be strictly increasing"));
    }
    let max = *cfg.schedule.last().unwrap();
    let all = DirectionSet::sample_uniform(max, cloud.dim(), cfg.seed)?;
    let truth = reference_hull(cloud, cfg.reference_dirs, cfg.probe_seed ^ 0x5eed)?;
    let probes = DirectionSet::sample_uniform(cfg.probes.max(1), cloud.dim(), cfg.probe_seed)?;

    let mut rows = Vec::with_capacity(cfg.schedule.len());
    let mut sketch: Option<CurvatureSketch> = None;
    let mut done = 0;
    for &m in &cfg.schedule {
        let segment = DirectionSet::from_unit_vectors(
            cloud.dim(),
            all.coords()[done * cloud.dim()..m * cloud.dim()].to_vec(),
            cfg.seed,
        )?;
        let part = build_sketch(cloud, &segment)?;
        sketch = Some(match sketch {
            Some(s) => s.merge(&part)?,
            None => part,
        });
        done = m;
        let s = sketch.as_ref().unwrap();
        let dirs = all.prefix(m)?;
        let inner = threshold_filter(s, cfg.alpha, ThresholdMode::Hard, cfg.seed)?;
        let outer = outer_hull(s, cloud, &dirs)?;
        let rep = error_report(cloud, s, &inner, &outer, &truth, &probes)?;
        rows.push(BenchRow {
            n_dirs: m,
            n_found: rep.n_found,
            n_kept: rep.n_kept,
            inner_error: rep.inner_error,
            outer_error: rep.outer_error,
            method: rep.outer_method,
        });
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("bench.csv"), bench_csv(&rows))?;
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(BenchRow::HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsParams {
    pub n: u32,
    pub r: f64,
    pub omega: f64,
    pub p: f64,
    pub eps: f64,
    pub x_count: u64,
    pub n_dirs: u64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub params: BoundsParams,
    /// Chebyshev bound with `K = omega`.
    pub chebyshev: f64,
    pub direction_count: u64,
    pub cap_lower_bound: f64,
    pub aleksandrov: f64,
    pub directions_for_inner_error_worst_case: u64,
    pub directions_for_inner_error_single_point: u64,
}

pub fn cmd_bounds(p: &BoundsParams) -> Result<BoundsReport> {
    let q = BoundQuery {
        n: p.n,
        r: p.r,
        p: p.p,
        eps: p.eps,
        x_count: p.x_count,
    };
    Ok(BoundsReport {
        params: p.clone(),
        chebyshev: bounds::chebyshev_bound(p.omega, p.n_dirs, p.eps)?,
        direction_count: bounds::direction_count_bound(p.omega, p.p)?,
        cap_lower_bound: bounds::cap_lower_bound(p.theta, p.n)?,
        aleksandrov: bounds::aleksandrov_bound(p.r, p.n, p.omega)?,
        directions_for_inner_error_worst_case: bounds::directions_for_inner_error(
            &q,
            InnerErrorVariant::WorstCase,
        )?,
        directions_for_inner_error_single_point: bounds::directions_for_inner_error(
            &q,
            InnerErrorVariant::SinglePoint,
        )?,
    })
}

/// Curves over `omega`: the Aleksandrov distance bound for n = 2..=5 and
/// the raw direction count `log(p omega) / log(1 - omega)`.
pub fn bounds_sweep_csv(r: f64, p: f64, steps: usize) -> Result<String> {
    let mut s = String::from(
        "omega,aleksandrov_n2,aleksandrov_n3,aleksandrov_n4,aleksandrov_n5,direction_count_raw\n",
    );
    for i in 1..=steps {
        let omega = i as f64 / (steps + 1) as f64;
        s.push_str(&format!("{omega:.6}"));
        for n in 2..=5 {
            s.push_str(&format!(
                ",{:.10e}",
                bounds::aleksandrov_bound(r, n, omega)?
            ));
        }
        let raw = (p * omega).ln() / (-omega).ln_1p();
        s.push_str(&format!(",{raw:.10e}\n"));
    }
    Ok(s)
}
