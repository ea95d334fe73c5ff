// Poor-man's profiler: time the trainer's inner pieces in production-like
// conditions (random context rows over a 200x128 matrix).
use std::time::Instant;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempowalk::embed::Real;

fn main() {
    let dim = 128usize;
    let rows = 200usize;
    let mut contexts = vec![0.01f32; rows * dim];
    let mut neu1e = vec![0.0f32; dim];
    let input = vec![0.02f32; dim];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 30_000_000u64;

    // (1) full sample-like step on random rows incl. sigmoid+loss math
    let t = Instant::now();
    let mut acc = 0.0f64;
    for k in 0..n {
        let r = rng.random_range(0..rows);
        let out = &mut contexts[r * dim..(r + 1) * dim];
        let f = f32::dot(&input, out).as_f64();
        let e = (-f.abs()).exp();
        let base = (1.0 + e).ln();
        let sig = if f >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
        let g = (1.0 - sig) as f32 * 1e-9;
        f32::fused_step(out, &mut neu1e, &input, g, k % 3 == 0);
        acc += base;
    }
    println!("full sample on random rows: {:.1} ns ({acc:.1})", t.elapsed().as_secs_f64() / n as f64 * 1e9);

    // (2) same but fixed row (cache-hot)
    let t = Instant::now();
    let mut acc2 = 0.0f64;
    for k in 0..n {
        let out = &mut contexts[0..dim];
        let f = f32::dot(&input, out).as_f64();
        let e = (-f.abs()).exp();
        let base = (1.0 + e).ln();
        let sig = if f >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
        let g = (1.0 - sig) as f32 * 1e-9;
        f32::fused_step(out, &mut neu1e, &input, g, k % 3 == 0);
        acc2 += base;
    }
    println!("full sample on fixed row:   {:.1} ns ({acc2:.1})", t.elapsed().as_secs_f64() / n as f64 * 1e9);

    // (3) dot+fused only, random rows
    let t = Instant::now();
    let mut acc3 = 0.0f32;
    for k in 0..n {
        let r = rng.random_range(0..rows);
        let out = &mut contexts[r * dim..(r + 1) * dim];
        let f = f32::dot(&input, out);
        f32::fused_step(out, &mut neu1e, &input, f * 1e-12, k % 3 == 0);
        acc3 += f;
    }
    println!("dot+fused random rows:      {:.1} ns ({acc3:.1})", t.elapsed().as_secs_f64() / n as f64 * 1e9);
}
