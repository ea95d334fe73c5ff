//! Synthetic graphs and the scalability harness: time the walk+train
//! pipeline across graph sizes and emit log-log plot data.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;

use crate::embed::{train, TrainConfig};
use crate::error::{Error, Result};
use crate::graph::{build_snapshots, TemporalEdge, TemporalGraph};
use crate::rng::stream_rng;
use crate::walk::{generate_walks, WalkConfig};

/// G(n, M): exactly `round(n * avg_degree / 2)` distinct undirected pairs,
/// sampled uniformly without replacement. No self-loops.
pub fn erdos_renyi(num_nodes: usize, avg_degree: f64, seed: u64) -> Result<Vec<(u32, u32)>> {
    if num_nodes < 2 {
        return Err(Error::Invalid("need at least 2 nodes".into()));
    }
    if !(avg_degree > 0.0) || avg_degree >= num_nodes as f64 {
        return Err(Error::Invalid(format!(
            "avg_degree must be in (0, {num_nodes}), got {avg_degree}"
        )));
    }
    let m = (num_nodes as f64 * avg_degree / 2.0).round() as u64;
    let max_pairs = num_nodes as u64 * (num_nodes as u64 - 1) / 2;
    if m > max_pairs {
        return Err(Error::Invalid(format!("{m} edges exceed the {max_pairs} possible pairs")));
    }
    let mut rng = stream_rng(seed, 0x6572, num_nodes as u64, 0);
    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(m as usize * 2);
    let mut edges = Vec::with_capacity(m as usize);
    while (edges.len() as u64) < m {
        let a = rng.random_range(0..num_nodes as u32);
        let b = rng.random_range(0..num_nodes as u32);
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if seen.insert(pair) {
            edges.push(pair);
        }
    }
    Ok(edges)
}

#[derive(Debug, Clone, Copy)]
pub struct SplitMetadata {
    /// Whole-assignment redraws needed before every snapshot was nonempty.
    pub redraws: usize,
}

/// Assign each edge an independent uniform snapshot index. If any snapshot
/// ends up empty the whole assignment is redrawn, which keeps the law
/// uniform conditioned on nonemptiness; the redraw count is reported.
pub fn split_snapshots_uniform(
    num_vertices: usize,
    edges: &[(u32, u32)],
    num_snapshots: usize,
    seed: u64,
) -> Result<(TemporalGraph, SplitMetadata)> {
    if num_snapshots == 0 {
        return Err(Error::Invalid("need at least one snapshot".into()));
    }
    if edges.len() < num_snapshots {
        return Err(Error::Invalid(format!(
            "cannot fill {num_snapshots} snapshots with {} edges",
            edges.len()
        )));
    }
    let mut rng = stream_rng(seed, 0x73706c69, num_snapshots as u64, 0);
    let mut assignment = vec![0u32; edges.len()];
    let mut redraws = 0usize;
    loop {
        let mut counts = vec![0usize; num_snapshots];
        for slot in assignment.iter_mut() {
            let t = rng.random_range(0..num_snapshots as u32);
            *slot = t;
            counts[t as usize] += 1;
        }
        if counts.iter().all(|&c| c > 0) {
            break;
        }
        redraws += 1;
    }
    let graph = TemporalGraph {
        num_vertices,
        num_snapshots,
        edges: edges
            .iter()
            .zip(&assignment)
            .map(|(&(src, dst), &t)| TemporalEdge { src, dst, t, weight: 1.0 })
            .collect(),
        vertex_labels: None,
    };
    Ok((graph, SplitMetadata { redraws }))
}

/// One measured pipeline size.
#[derive(Debug, Clone)]
pub struct ScalingPoint {
    pub num_nodes: usize,
    pub num_edges: usize,
    /// Median wall time across runs.
    pub wall_time_seconds: f64,
    pub walk_seconds: f64,
    pub train_seconds: f64,
    pub io_seconds: f64,
    pub workers: usize,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub avg_degree: f64,
    pub num_snapshots: usize,
    /// Runs per size; the median damp scheduler noise.
    pub runs: usize,
    pub seed: u64,
    pub walk: WalkConfig,
    pub train: TrainConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            avg_degree: 10.0,
            num_snapshots: 10,
            runs: 3,
            seed: 1,
            walk: WalkConfig::default(),
            // One pass is enough to time the pipeline shape.
            train: TrainConfig { epochs: 1, workers: 0, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of log10(seconds) vs log10(nodes); `None` with
    /// fewer than two points.
    pub slope: Option<f64>,
    /// Sizes that failed, with their errors; points hold the successes.
    pub failures: Vec<String>,
}

/// Sweep edge-count sizes through generate -> split -> walk -> train and
/// time each phase. Sizes must be ascending.
pub fn run_scaling(sizes: &[u64], cfg: &BenchConfig) -> Result<ScalingReport> {
    if sizes.is_empty() {
        return Err(Error::Invalid("no sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("sizes must be strictly ascending".into()));
    }
    if cfg.runs == 0 {
        return Err(Error::Invalid("runs must be >= 1".into()));
    }
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for &edges_target in sizes {
        let num_nodes = ((2.0 * edges_target as f64 / cfg.avg_degree).round() as usize).max(2);
        match run_size(num_nodes, edges_target, cfg) {
            Ok(p) => points.push(p),
            Err(e) => failures.push(format!("{edges_target} edges: {e}")),
        }
    }
    let slope = fit_slope(&points);
    Ok(ScalingReport { points, slope, failures })
}

fn run_size(num_nodes: usize, edges_target: u64, cfg: &BenchConfig) -> Result<ScalingPoint> {
    let mut runs: Vec<(f64, f64, f64)> = Vec::with_capacity(cfg.runs);
    let mut num_edges = 0usize;
    for run in 0..cfg.runs {
        let run_seed = crate::rng::derive_seed(cfg.seed, edges_target, run as u64, 0);
        let edges = erdos_renyi(num_nodes, cfg.avg_degree, run_seed)?;
        num_edges = edges.len();
        let (graph, _) = split_snapshots_uniform(num_nodes, &edges, cfg.num_snapshots, run_seed)?;

        let walk_cfg = WalkConfig { seed: run_seed, ..cfg.walk.clone() };
        let train_cfg = TrainConfig { seed: run_seed, ..cfg.train.clone() };

        let t0 = Instant::now();
        let snapshots = build_snapshots(&graph, walk_cfg.directed);
        let (corpus, _) = generate_walks(&snapshots, &walk_cfg)?;
        let walk_s = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let model = train::<f32>(&corpus, &train_cfg)?;
        let train_s = t1.elapsed().as_secs_f64();
        std::hint::black_box(model.snapshot_embedding(0)?);

        runs.push((walk_s + train_s, walk_s, train_s));
    }
    runs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let median = runs[runs.len() / 2];
    Ok(ScalingPoint {
        num_nodes,
        num_edges,
        wall_time_seconds: median.0,
        walk_seconds: median.1,
        train_seconds: median.2,
        io_seconds: 0.0,
        workers: if cfg.train.workers == 0 {
            rayon::current_num_threads()
        } else {
            cfg.train.workers
        },
    })
}

fn fit_slope(points: &[ScalingPoint]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.num_nodes as f64).log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.wall_time_seconds.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

impl ScalingReport {
    /// Plot data: config header, `log10_nodes<TAB>log10_seconds` rows, then
    /// the fitted slope as a trailing comment.
    pub fn plot_data(&self, cfg: &BenchConfig) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# scaling sweep: running time vs number of nodes");
        let _ = writeln!(
            out,
            "# avg_degree = {} num_snapshots = {} runs = {} walks = {} walk_length = {} dim = {} epochs = {}",
            cfg.avg_degree,
            cfg.num_snapshots,
            cfg.runs,
            cfg.walk.walks_per_node,
            cfg.walk.walk_length,
            cfg.train.dim,
            cfg.train.epochs,
        );
        let _ = writeln!(out, "# columns: log10_nodes\tlog10_seconds");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:.6}\t{:.6}",
                (p.num_nodes as f64).log10(),
                p.wall_time_seconds.log10()
            );
        }
        for f in &self.failures {
            let _ = writeln!(out, "# failed: {f}");
        }
        match self.slope {
            Some(s) => {
                let _ = writeln!(out, "# slope = {s:.4}");
            }
            None => {
                let _ = writeln!(out, "# slope = undefined (fewer than two points)");
            }
        }
        out
    }
}
