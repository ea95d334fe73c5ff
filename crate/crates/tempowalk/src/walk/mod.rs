//! Layer-descending second-order random walks over the snapshot stack.
//!
//! The snapshots of a temporal graph are treated as layers of one multilayer
//! graph: layer t holds snapshot t's edges over the full vertex set, and every
//! vertex is linked to its own copy one layer down. A walk step either stays
//! in its layer, moving to a neighbor with node2vec-style (p, q) biasing, or
//! descends to the previous layer with probability `1 - alpha`. Descent edges
//! only point downwards, so a walk started at snapshot t mixes structure from
//! t with progressively older history.

mod generate;
mod sampler;

pub use generate::{generate_walks, Walk, WalkSummary};
pub use sampler::{StepOutcome, TransitionTables, WalkSampler};

use crate::error::{Error, Result};
use crate::graph::Snapshot;

/// Default byte budget for precomputed transition tables; `TableMode::Auto`
/// falls back to on-the-fly sampling above it.
pub const DEFAULT_TABLE_BUDGET_BYTES: usize = 256 * 1024 * 1024;

/// Where per-state alias tables come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    /// Build every (prev, cur) table up front; O(Σ deg²) memory.
    Precompute,
    /// Compute step weights as needed; O(max deg) scratch.
    OnTheFly,
    /// Precompute when the estimate fits the budget, otherwise on-the-fly.
    Auto,
}

impl std::str::FromStr for TableMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "precompute" => Ok(Self::Precompute),
            "on-the-fly" => Ok(Self::OnTheFly),
            "auto" => Ok(Self::Auto),
            other => Err(Error::Invalid(format!(
                "unknown table mode {other:?} (expected precompute|on-the-fly|auto)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Return parameter: weight 1/p for stepping straight back.
    pub p: f64,
    /// In-out parameter: weight 1/q for leaving the previous neighborhood.
    pub q: f64,
    /// Stay constant: probability of remaining in the current layer.
    pub alpha: f64,
    pub seed: u64,
    pub directed: bool,
    /// Walks shorter than this are dropped from the corpus.
    pub min_walk_length: usize,
    pub tables: TableMode,
    pub table_budget_bytes: usize,
    /// Worker threads for walk generation; 0 uses the global pool.
    pub workers: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            walks_per_node: 40,
            walk_length: 32,
            p: 1.0,
            q: 0.5,
            alpha: 0.8,
            seed: 1,
            directed: false,
            min_walk_length: 2,
            tables: TableMode::Auto,
            table_budget_bytes: DEFAULT_TABLE_BUDGET_BYTES,
            workers: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Invalid(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        if !(self.p > 0.0) || !(self.q > 0.0) {
            return Err(Error::Invalid(format!("p and q must be > 0, got p={} q={}", self.p, self.q)));
        }
        if self.walk_length < 1 {
            return Err(Error::Invalid("walk_length must be >= 1".into()));
        }
        if self.walks_per_node < 1 {
            return Err(Error::Invalid("walks_per_node must be >= 1".into()));
        }
        Ok(())
    }
}

/// A walk position: vertex copy at one layer of the multilayer graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayeredPosition {
    pub vertex: u32,
    pub layer: u32,
}

/// Exact next-step distribution from one walk state.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    /// `(candidate, probability)` over in-layer moves, in neighbor order.
    pub in_layer: Vec<(u32, f64)>,
    /// Probability of descending to `(vertex, layer - 1)`.
    pub descend: f64,
}

impl StepDistribution {
    /// No move available: the walk terminates.
    pub fn is_terminal(&self) -> bool {
        self.in_layer.is_empty() && self.descend == 0.0
    }
}

/// Unnormalized in-layer candidate weights for one state. `prev` is the
/// vertex of the preceding in-layer step; `None` makes the step first-order
/// (walk start, or the step right after a descent).
pub(crate) fn in_layer_weights(
    prev: Option<u32>,
    cur: u32,
    snap: &Snapshot,
    p: f64,
    q: f64,
    out: &mut Vec<(u32, f64)>,
) {
    out.clear();
    match prev {
        None => {
            out.extend(snap.neighbors(cur).iter().copied());
        }
        Some(prev) => {
            for &(c, w) in snap.neighbors(cur) {
                let bias = if c == prev {
                    1.0 / p
                } else if snap.has_edge(prev, c) {
                    1.0
                } else {
                    1.0 / q
                };
                out.push((c, w * bias));
            }
        }
    }
}

/// Exact transition distribution at `cur` given the biasing state `prev`.
///
/// With neighbors present, in-layer mass is `alpha * w / Z` and descent mass
/// `1 - alpha`; at the bottom layer the descent mass is renormalized back
/// onto the in-layer candidates. A dead end forces a descent, or terminates
/// the walk when already at the bottom.
pub fn step_distribution(
    prev: Option<u32>,
    cur: LayeredPosition,
    snapshots: &[Snapshot],
    cfg: &WalkConfig,
) -> StepDistribution {
    let snap = &snapshots[cur.layer as usize];
    let mut weights = Vec::new();
    in_layer_weights(prev, cur.vertex, snap, cfg.p, cfg.q, &mut weights);

    if weights.is_empty() {
        return if cur.layer > 0 {
            StepDistribution { in_layer: Vec::new(), descend: 1.0 }
        } else {
            StepDistribution { in_layer: Vec::new(), descend: 0.0 }
        };
    }

    let z: f64 = weights.iter().map(|(_, w)| w).sum();
    let stay = if cur.layer > 0 { cfg.alpha } else { 1.0 };
    let in_layer = weights.into_iter().map(|(c, w)| (c, stay * w / z)).collect();
    let descend = if cur.layer > 0 { 1.0 - cfg.alpha } else { 0.0 };
    StepDistribution { in_layer, descend }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_snapshots, TemporalEdge, TemporalGraph};

    fn graph(edges: &[(u32, u32, u32)], num_vertices: usize, num_snapshots: usize) -> Vec<Snapshot> {
        let g = TemporalGraph {
            num_vertices,
            num_snapshots,
            edges: edges
                .iter()
                .map(|&(src, dst, t)| TemporalEdge { src, dst, t, weight: 1.0 })
                .collect(),
            vertex_labels: None,
        };
        build_snapshots(&g, false)
    }

    fn prob_of(dist: &StepDistribution, c: u32) -> f64 {
        dist.in_layer.iter().find(|(v, _)| *v == c).map(|(_, p)| *p).unwrap()
    }

    #[test]
    fn second_order_weight_cases() {
        // Layer 1: cur=1 with neighbors {0 (prev), 2, 3}; 2 adjacent to prev,
        // 3 not. Layer 0 exists so descent is possible.
        let snaps = graph(&[(1, 0, 1), (1, 2, 1), (1, 3, 1), (0, 2, 1), (0, 1, 0)], 4, 2);
        let cfg = WalkConfig { alpha: 0.8, p: 1.0, q: 0.5, ..Default::default() };
        let dist = step_distribution(Some(0), LayeredPosition { vertex: 1, layer: 1 }, &snaps, &cfg);
        // Weights (1, 1, 2), Z = 4.
        assert!((prob_of(&dist, 0) - 0.2).abs() < 1e-15);
        assert!((prob_of(&dist, 2) - 0.2).abs() < 1e-15);
        assert!((prob_of(&dist, 3) - 0.4).abs() < 1e-15);
        assert!((dist.descend - 0.2).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_disables_descent() {
        let snaps = graph(&[(1, 0, 1), (1, 2, 1), (0, 1, 0)], 3, 2);
        let cfg = WalkConfig { alpha: 1.0, p: 2.0, q: 0.5, ..Default::default() };
        let dist = step_distribution(Some(0), LayeredPosition { vertex: 1, layer: 1 }, &snaps, &cfg);
        assert_eq!(dist.descend, 0.0);
        let total: f64 = dist.in_layer.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-15);
        // Pure node2vec kernel: w(0) = 1/p = 0.5, w(2) = 1/q = 2, Z = 2.5.
        assert!((prob_of(&dist, 0) - 0.2).abs() < 1e-15);
        assert!((prob_of(&dist, 2) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn bottom_layer_renormalizes_descent_mass() {
        let snaps = graph(&[(0, 1, 0)], 2, 1);
        let cfg = WalkConfig { alpha: 0.8, ..Default::default() };
        let dist = step_distribution(None, LayeredPosition { vertex: 0, layer: 0 }, &snaps, &cfg);
        assert_eq!(dist.descend, 0.0);
        assert!((prob_of(&dist, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dead_end_descends_or_terminates() {
        // Vertex 2 only active in layer 1.
        let snaps = graph(&[(2, 3, 1), (0, 1, 0)], 4, 2);
        let cfg = WalkConfig::default();
        let up = step_distribution(None, LayeredPosition { vertex: 0, layer: 1 }, &snaps, &cfg);
        assert_eq!(up.descend, 1.0);
        assert!(up.in_layer.is_empty());
        let bottom = step_distribution(None, LayeredPosition { vertex: 3, layer: 0 }, &snaps, &cfg);
        assert!(bottom.is_terminal());
    }

    #[test]
    fn first_order_step_ignores_p_q() {
        let snaps = graph(&[(0, 1, 0), (0, 2, 0), (1, 2, 0)], 3, 1);
        let biased = WalkConfig { p: 10.0, q: 0.01, ..Default::default() };
        let dist = step_distribution(None, LayeredPosition { vertex: 0, layer: 0 }, &snaps, &biased);
        assert!((prob_of(&dist, 1) - 0.5).abs() < 1e-15);
        assert!((prob_of(&dist, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(WalkConfig { alpha: 0.0, ..Default::default() }.validate().is_err());
        assert!(WalkConfig { alpha: 1.1, ..Default::default() }.validate().is_err());
        assert!(WalkConfig { p: 0.0, ..Default::default() }.validate().is_err());
        assert!(WalkConfig { walk_length: 0, ..Default::default() }.validate().is_err());
        assert!(WalkConfig::default().validate().is_ok());
    }
}
