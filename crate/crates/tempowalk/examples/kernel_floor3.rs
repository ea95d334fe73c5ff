use std::time::Instant;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempowalk::embed::Real;

fn bench(label: &str, contexts: &mut [f32], dim: usize, rows: usize) {
    let mut neu1e = vec![0.0f32; dim];
    let input = vec![0.02f32; dim];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 50_000_000u64;
    let t = Instant::now();
    for k in 0..n {
        let r = rng.random_range(0..rows);
        let out = &mut contexts[r * dim..(r + 1) * dim];
        f32::fused_step(out, &mut neu1e, &input, 1e-15, k % 3 == 0);
    }
    println!("{label}: {:.1} ns ({})", t.elapsed().as_secs_f64() / n as f64 * 1e9, contexts[0]);
}

fn main() {
    let dim = 128usize;
    let rows = 200usize;
    let mut raw = vec![0.01f32; rows * dim + 16];
    let misaligned = (raw.as_ptr() as usize % 32) / 4;
    let off_aligned = (32 - (raw.as_ptr() as usize % 32)) % 32 / 4;
    // aligned view
    {
        let v = &mut raw[off_aligned..off_aligned + rows * dim];
        assert_eq!(v.as_ptr() as usize % 32, 0);
        bench("aligned  ", v, dim, rows);
    }
    // deliberately 4-byte-offset view
    {
        let start = off_aligned + 1;
        let v = &mut raw[start..start + rows * dim];
        assert_ne!(v.as_ptr() as usize % 32, 0);
        bench("unaligned", v, dim, rows);
        let _ = misaligned;
    }
}
