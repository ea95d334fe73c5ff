use std::time::Instant;
use rand::Rng;
use tempowalk::embed::{train, TrainConfig};
use tempowalk::graph::{build_snapshots, TemporalEdge, TemporalGraph};
use tempowalk::rng::stream_rng;
use tempowalk::walk::{generate_walks, WalkConfig};

fn main() {
    // Same shape as the c7 fixture, seed 0, block 32 complete.
    let mut edges = Vec::new();
    for t in 0..12u32 {
        let mut rng = stream_rng(0, 0xf17, t as u64, 0);
        let mut seen = std::collections::HashSet::new();
        let (lo, m): (Vec<u32>, usize) = if t % 2 == 0 {
            ((0..200).collect(), 992)
        } else {
            ((0..32).chain(100..132).collect(), 0)
        };
        if t % 2 == 0 {
            while seen.len() < m {
                let a = lo[rng.random_range(0..lo.len())];
                let b = lo[rng.random_range(0..lo.len())];
                if a != b { seen.insert((a.min(b), a.max(b))); }
            }
            for (a, b) in seen { edges.push(TemporalEdge { src: a, dst: b, t, weight: 1.0 }); }
        } else {
            for blk in [0u32, 100] {
                for i in 0..32u32 { for j in (i+1)..32 {
                    edges.push(TemporalEdge { src: blk+i, dst: blk+j, t, weight: 1.0 });
                }}
            }
        }
    }
    let graph = TemporalGraph { num_vertices: 200, num_snapshots: 12, edges, vertex_labels: None };
    let snaps = build_snapshots(&graph, false);
    let t0 = Instant::now();
    let (corpus, s) = generate_walks(&snaps, &WalkConfig { seed: 0, ..Default::default() }).unwrap();
    println!("walks {:.2}s tokens={}", t0.elapsed().as_secs_f64(), s.tokens);
    for workers in [1usize, 2] {
        let cfg = TrainConfig { epochs: 1, negatives: 2, workers, seed: 0, ..Default::default() };
        let t = Instant::now();
        let _ = train::<f32>(&corpus, &cfg).unwrap();
        let el = t.elapsed().as_secs_f64();
        let samples = s.tokens as f64 * 5.3 * 3.0;
        println!("workers={workers}: {:.2}s (~{:.0} ns/sample)", el, el / samples * 1e9);
    }
}
