//! Parallel walk generation with canonical output order.

use rayon::prelude::*;

use crate::corpus::WalkCorpus;
use crate::error::Result;
use crate::graph::Snapshot;
use crate::rng::stream_rng;
use crate::walk::{LayeredPosition, StepOutcome, TableMode, WalkConfig, WalkSampler};

/// One walk: vertex token sequence tagged with its starting snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub start_layer: u32,
    pub tokens: Vec<u32>,
}

/// Generation statistics reported alongside the corpus.
#[derive(Debug, Clone)]
pub struct WalkSummary {
    pub sentences: usize,
    pub tokens: usize,
    /// Walks shorter than `min_walk_length`, dropped.
    pub dropped_short: usize,
    /// (snapshot, vertex) pairs with no neighbors, never started.
    pub skipped_inactive: usize,
    pub mode_used: TableMode,
}

/// Run `walks_per_node` walks from every active vertex of every snapshot.
///
/// Work is parallel over (snapshot, start vertex) pairs; each walk draws from
/// its own RNG stream keyed by `(seed, snapshot, vertex, walk index)`, so the
/// corpus is identical for any worker count and is emitted in canonical
/// (snapshot, vertex, walk index) order.
pub fn generate_walks(snapshots: &[Snapshot], cfg: &WalkConfig) -> Result<(WalkCorpus, WalkSummary)> {
    cfg.validate()?;
    let sampler = WalkSampler::new(snapshots, cfg)?;
    let num_vertices = snapshots.first().map_or(0, Snapshot::num_vertices);

    let mut starts: Vec<(u32, u32)> = Vec::new();
    let mut skipped_inactive = 0usize;
    for snap in snapshots {
        let mut active = 0usize;
        for v in snap.active_vertices() {
            starts.push((snap.t, v));
            active += 1;
        }
        skipped_inactive += num_vertices - active;
    }

    let run = || -> Vec<Vec<Walk>> {
        starts
            .par_iter()
            .map(|&(t, v)| {
                let mut scratch: Vec<(u32, f64)> = Vec::new();
                (0..cfg.walks_per_node)
                    .map(|w| {
                        let mut rng = stream_rng(cfg.seed, t as u64, v as u64, w as u64);
                        let tokens = one_walk(&sampler, v, t, cfg.walk_length, &mut rng, &mut scratch);
                        Walk { start_layer: t, tokens }
                    })
                    .collect()
            })
            .collect()
    };
    let per_start = if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| crate::error::Error::Invalid(format!("worker pool: {e}")))?
            .install(run)
    } else {
        run()
    };

    let mut dropped_short = 0usize;
    let kept = per_start.into_iter().flatten().filter(|w| {
        if w.tokens.len() < cfg.min_walk_length {
            dropped_short += 1;
            false
        } else {
            true
        }
    });
    let corpus = WalkCorpus::from_walks(kept, snapshots.len(), num_vertices)?;
    let summary = WalkSummary {
        sentences: corpus.num_sentences(),
        tokens: corpus.num_tokens(),
        dropped_short,
        skipped_inactive,
        mode_used: sampler.mode_used(),
    };
    Ok((corpus, summary))
}

fn one_walk<R: rand::Rng>(
    sampler: &WalkSampler<'_>,
    start: u32,
    layer: u32,
    max_len: usize,
    rng: &mut R,
    scratch: &mut Vec<(u32, f64)>,
) -> Vec<u32> {
    let mut tokens = Vec::with_capacity(max_len);
    tokens.push(start);
    let mut pos = LayeredPosition { vertex: start, layer };
    // The first step and every post-descent step are first-order.
    let mut prev: Option<u32> = None;
    while tokens.len() < max_len {
        match sampler.step(prev, pos, rng, scratch) {
            StepOutcome::InLayer(v) => {
                tokens.push(v);
                prev = Some(pos.vertex);
                pos.vertex = v;
            }
            StepOutcome::Descend => {
                pos.layer -= 1;
                // The vertex persists across the layer boundary; emit it
                // again so the step still occupies one walk position.
                tokens.push(pos.vertex);
                prev = None;
            }
            StepOutcome::Terminate => break,
        }
    }
    tokens
}
