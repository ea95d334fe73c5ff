use std::time::Instant;
use rand::Rng;
use tempowalk::embed::{cosine, train, TrainConfig};
use tempowalk::eval::{evaluate, Embeddings, GroundTruth};
use tempowalk::graph::{build_snapshots, TemporalEdge, TemporalGraph};
use tempowalk::rng::stream_rng;
use tempowalk::walk::{generate_walks, WalkConfig};

const NUM_SNAPSHOTS: usize = 12;
const NUM_VERTICES: usize = 200;

fn sample_pairs<R: Rng>(vertices: &[u32], m: usize, rng: &mut R) -> Vec<(u32, u32)> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let a = vertices[rng.random_range(0..vertices.len())];
        let b = vertices[rng.random_range(0..vertices.len())];
        if a == b { continue; }
        let pair = (a.min(b), a.max(b));
        if seen.insert(pair) { out.push(pair); }
    }
    out
}

fn fixture(seed: u64, block: usize, density: f64) -> TemporalGraph {
    let per_block = (density * (block * (block - 1) / 2) as f64).round() as usize;
    let edges_per_snap = 2 * per_block;
    let all: Vec<u32> = (0..NUM_VERTICES as u32).collect();
    let block1: Vec<u32> = (0..block as u32).collect();
    let block2: Vec<u32> = (100..(100 + block) as u32).collect();
    let mut edges = Vec::new();
    for t in 0..NUM_SNAPSHOTS as u32 {
        let mut rng = stream_rng(seed, 0xf17, t as u64, 0);
        if t % 2 == 0 {
            for (a, b) in sample_pairs(&all, edges_per_snap, &mut rng) {
                edges.push(TemporalEdge { src: a, dst: b, t, weight: 1.0 });
            }
        } else {
            for (a, b) in sample_pairs(&block1, per_block, &mut rng) {
                edges.push(TemporalEdge { src: a, dst: b, t, weight: 1.0 });
            }
            for (a, b) in sample_pairs(&block2, per_block, &mut rng) {
                edges.push(TemporalEdge { src: a, dst: b, t, weight: 1.0 });
            }
        }
    }
    TemporalGraph { num_vertices: NUM_VERTICES, num_snapshots: NUM_SNAPSHOTS, edges, vertex_labels: None }
}

fn regime_truth() -> GroundTruth {
    let rankings = (0..NUM_SNAPSHOTS)
        .map(|t| {
            let same: Vec<usize> = (0..NUM_SNAPSHOTS).filter(|&i| i != t && i % 2 == t % 2).collect();
            let cross: Vec<usize> = (0..NUM_SNAPSHOTS).filter(|&i| i != t && i % 2 != t % 2).collect();
            same.into_iter().chain(cross).collect()
        })
        .collect();
    GroundTruth { rankings }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let epochs: usize = args[1].parse().unwrap();
    let negatives: usize = args[2].parse().unwrap();
    let block: usize = args[3].parse().unwrap();
    let density: f64 = args[4].parse().unwrap();
    let seeds: u64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(10);
    let lr_min: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(1e-4);
    let t0 = Instant::now();
    let truth = regime_truth();
    let mut pass = 0;
    for seed in 0..seeds {
        let graph = fixture(seed, block, density);
        let snaps = build_snapshots(&graph, false);
        let wcfg = WalkConfig { seed, ..Default::default() };
        let (corpus, _) = generate_walks(&snaps, &wcfg).unwrap();
        let tcfg = TrainConfig { epochs, negatives, seed, workers: 1, lr_min, ..Default::default() };
        let model = train::<f32>(&corpus, &tcfg).unwrap();

        let mut within = Vec::new();
        let mut cross = Vec::new();
        for i in 0..NUM_SNAPSHOTS {
            for j in (i + 1)..NUM_SNAPSHOTS {
                let c = cosine(model.snapshot_embedding(i).unwrap(), model.snapshot_embedding(j).unwrap()).unwrap();
                if i % 2 == j % 2 { within.push(c) } else { cross.push(c) }
            }
        }
        let mw: f64 = within.iter().sum::<f64>() / within.len() as f64;
        let mc: f64 = cross.iter().sum::<f64>() / cross.len() as f64;
        let emb = Embeddings::from_parts(NUM_SNAPSHOTS, tcfg.dim, model.embedding_matrix());
        let report = evaluate(&emb, &truth, &[5]).unwrap();
        let ok = (mw - mc >= 0.10) && (report.avg_p_at[0] >= 0.8);
        if ok { pass += 1; }
        println!("seed={seed} margin={:.3} p@5={:.3} {}", mw - mc, report.avg_p_at[0], if ok {"OK"} else {"FAIL"});
    }
    println!("epochs={epochs} neg={negatives} block={block} density={density}: {pass}/{seeds}, {:.1}s", t0.elapsed().as_secs_f64());
}
