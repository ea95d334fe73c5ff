//! Per-step sampling: precomputed alias tables or on-the-fly weights.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::alias::AliasTable;
use crate::error::Result;
use crate::graph::Snapshot;
use crate::walk::{in_layer_weights, LayeredPosition, TableMode, WalkConfig};

/// Result of sampling one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// Move to this neighbor within the current layer.
    InLayer(u32),
    /// Move to the same vertex one layer down.
    Descend,
    /// Dead end at the bottom layer.
    Terminate,
}

/// Alias tables for every reachable walk state, one map per layer.
///
/// `first_order` covers walk starts and post-descent steps (no biasing
/// vertex); `second_order` covers `(prev, cur)` pairs along layer edges.
pub struct TransitionTables {
    first_order: Vec<HashMap<u32, AliasTable>>,
    second_order: Vec<HashMap<(u32, u32), AliasTable>>,
}

impl TransitionTables {
    pub fn build(snapshots: &[Snapshot], cfg: &WalkConfig) -> Result<Self> {
        let per_layer: Vec<(HashMap<u32, AliasTable>, HashMap<(u32, u32), AliasTable>)> = snapshots
            .par_iter()
            .map(|snap| {
                let mut first = HashMap::new();
                let mut second = HashMap::new();
                let mut buf: Vec<(u32, f64)> = Vec::new();
                let mut weights: Vec<f64> = Vec::new();
                let mut support: Vec<u32> = Vec::new();
                for v in snap.active_vertices() {
                    in_layer_weights(None, v, snap, cfg.p, cfg.q, &mut buf);
                    split(&buf, &mut support, &mut weights);
                    first.insert(v, AliasTable::new(&weights, &support)?);
                }
                // A walk can occupy (prev=u, cur=v) exactly when the layer
                // has the edge u -> v and v is not a dead end.
                for u in snap.active_vertices() {
                    for &(v, _) in snap.neighbors(u) {
                        if !snap.is_active(v) || second.contains_key(&(u, v)) {
                            continue;
                        }
                        in_layer_weights(Some(u), v, snap, cfg.p, cfg.q, &mut buf);
                        split(&buf, &mut support, &mut weights);
                        second.insert((u, v), AliasTable::new(&weights, &support)?);
                    }
                }
                Ok((first, second))
            })
            .collect::<Result<_>>()?;
        let (first_order, second_order) = per_layer.into_iter().unzip();
        Ok(Self { first_order, second_order })
    }

    /// Total table entries if precomputed: Σ over layers of Σ_v deg_in(v)·deg_out(v)
    /// plus the first-order Σ_v deg_out(v).
    pub fn estimate_entries(snapshots: &[Snapshot]) -> usize {
        let mut total = 0usize;
        for snap in snapshots {
            let n = snap.num_vertices();
            let mut in_deg = vec![0usize; n];
            for u in snap.active_vertices() {
                for &(v, _) in snap.neighbors(u) {
                    in_deg[v as usize] += 1;
                }
            }
            for v in 0..n as u32 {
                let out = snap.neighbors(v).len();
                total += out; // first-order table
                total += in_deg[v as usize] * out;
            }
        }
        total
    }

    fn table(&self, prev: Option<u32>, cur: LayeredPosition) -> Option<&AliasTable> {
        let layer = cur.layer as usize;
        match prev {
            None => self.first_order[layer].get(&cur.vertex),
            Some(p) => self.second_order[layer].get(&(p, cur.vertex)),
        }
    }

    pub fn num_tables(&self) -> usize {
        self.first_order.iter().map(HashMap::len).sum::<usize>()
            + self.second_order.iter().map(HashMap::len).sum::<usize>()
    }
}

fn split(buf: &[(u32, f64)], support: &mut Vec<u32>, weights: &mut Vec<f64>) {
    support.clear();
    weights.clear();
    for &(c, w) in buf {
        support.push(c);
        weights.push(w);
    }
}

enum Backend {
    Precomputed(TransitionTables),
    OnTheFly,
}

/// Step sampler over a snapshot stack; shared read-only across workers.
pub struct WalkSampler<'a> {
    snapshots: &'a [Snapshot],
    cfg: &'a WalkConfig,
    backend: Backend,
}

impl<'a> WalkSampler<'a> {
    /// Resolve the configured table mode; `Auto` precomputes only when the
    /// size estimate fits `cfg.table_budget_bytes`.
    pub fn new(snapshots: &'a [Snapshot], cfg: &'a WalkConfig) -> Result<Self> {
        const BYTES_PER_ENTRY: usize = 24;
        const BYTES_PER_TABLE: usize = 96;
        let backend = match cfg.tables {
            TableMode::OnTheFly => Backend::OnTheFly,
            TableMode::Precompute => Backend::Precomputed(TransitionTables::build(snapshots, cfg)?),
            TableMode::Auto => {
                let entries = TransitionTables::estimate_entries(snapshots);
                let tables: usize = snapshots
                    .iter()
                    .map(|s| s.active_vertices().count() + s.num_entries())
                    .sum();
                let bytes = entries * BYTES_PER_ENTRY + tables * BYTES_PER_TABLE;
                if bytes <= cfg.table_budget_bytes {
                    Backend::Precomputed(TransitionTables::build(snapshots, cfg)?)
                } else {
                    Backend::OnTheFly
                }
            }
        };
        Ok(Self { snapshots, cfg, backend })
    }

    /// Mode actually in use after `Auto` resolution.
    pub fn mode_used(&self) -> TableMode {
        match self.backend {
            Backend::Precomputed(_) => TableMode::Precompute,
            Backend::OnTheFly => TableMode::OnTheFly,
        }
    }

    /// Sample the next move. `prev` must be `None` when the walk just
    /// started or just descended; `scratch` is caller-owned reusable space.
    #[inline]
    pub fn step<R: Rng + ?Sized>(
        &self,
        prev: Option<u32>,
        cur: LayeredPosition,
        rng: &mut R,
        scratch: &mut Vec<(u32, f64)>,
    ) -> StepOutcome {
        let snap = &self.snapshots[cur.layer as usize];
        if !snap.is_active(cur.vertex) {
            return if cur.layer > 0 { StepOutcome::Descend } else { StepOutcome::Terminate };
        }
        if cur.layer > 0 {
            let u: f64 = rng.random();
            if u < 1.0 - self.cfg.alpha {
                return StepOutcome::Descend;
            }
        }
        match &self.backend {
            Backend::Precomputed(tables) => {
                let table = tables
                    .table(prev, cur)
                    .expect("active state must have a precomputed table");
                StepOutcome::InLayer(table.sample(rng))
            }
            Backend::OnTheFly => {
                in_layer_weights(prev, cur.vertex, snap, self.cfg.p, self.cfg.q, scratch);
                let total: f64 = scratch.iter().map(|(_, w)| w).sum();
                let mut target: f64 = rng.random::<f64>() * total;
                for &(c, w) in scratch.iter() {
                    target -= w;
                    if target < 0.0 {
                        return StepOutcome::InLayer(c);
                    }
                }
                StepOutcome::InLayer(scratch.last().expect("nonempty weights").0)
            }
        }
    }
}
