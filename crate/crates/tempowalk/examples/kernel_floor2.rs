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
    let n = 50_000_000u64;

    let t = Instant::now();
    let mut acc = 0.0f32;
    for _ in 0..n {
        let r = rng.random_range(0..rows);
        let out = &contexts[r * dim..(r + 1) * dim];
        acc += f32::dot(&input, out);
    }
    println!("dot only:   {:.1} ns ({acc})", t.elapsed().as_secs_f64() / n as f64 * 1e9);

    let t = Instant::now();
    for k in 0..n {
        let r = rng.random_range(0..rows);
        let out = &mut contexts[r * dim..(r + 1) * dim];
        f32::fused_step(out, &mut neu1e, &input, 1e-15, k % 3 == 0);
    }
    println!("fused only: {:.1} ns ({})", t.elapsed().as_secs_f64() / n as f64 * 1e9, contexts[0]);

    let t = Instant::now();
    let mut acc3 = 0u64;
    for _ in 0..n {
        acc3 += rng.random_range(0..rows) as u64;
    }
    println!("rng only:   {:.1} ns ({acc3})", t.elapsed().as_secs_f64() / n as f64 * 1e9);
}
