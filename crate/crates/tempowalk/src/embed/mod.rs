//! Paragraph-vector training over walk corpora.
//!
//! Each snapshot is one document: every sentence carries the snapshot index
//! as its paragraph tag, and the trained paragraph vector is the snapshot's
//! embedding. Training is from-scratch SGD with negative sampling, in either
//! paragraph-predicts-context (PV-DBOW, default) or
//! paragraph-plus-context-predicts-word (PV-DM) form.

mod io;
mod train;
mod vocab;

pub use io::{load_checkpoint, read_embeddings_text, save_checkpoint, write_embeddings_text, write_word_vectors_text};
pub use train::{negative_sampling_update, pv_dm_update, train};
pub use vocab::{build_vocab, Vocabulary};

use std::ops::{AddAssign, SubAssign};

use crate::error::{Error, Result};

/// Float type trained and serialized by the embedder. `f32` is the working
/// precision; `f64` backs the verification mode.
pub trait Real:
    num_traits::Float + AddAssign + SubAssign + std::iter::Sum + Send + Sync + std::fmt::Debug + std::fmt::LowerExp + 'static
{
    const BYTES: usize;
    fn from_f64(x: f64) -> Self;
    fn as_f64(self) -> f64;
    fn write_le(self, out: &mut Vec<u8>);
    fn from_le(bytes: &[u8]) -> Self;

    /// Dot product; the f32 override uses AVX2+FMA when compiled in.
    #[inline]
    fn dot(a: &[Self], b: &[Self]) -> Self {
        dot_generic(a, b)
    }

    /// Fused gradient step: `neu1e (+)= g * out; out += g * input`, with
    /// `first` overwriting `neu1e` instead of accumulating.
    #[inline]
    fn fused_step(out: &mut [Self], neu1e: &mut [Self], input: &[Self], g: Self, first: bool) {
        fused_step_generic(out, neu1e, input, g, first);
    }
}

#[inline]
fn dot_generic<F: Real>(a: &[F], b: &[F]) -> F {
    let mut acc = [F::zero(); 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (xa, xb) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] = acc[k] + xa[k] * xb[k];
        }
    }
    let mut s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    for (x, y) in ra.iter().zip(rb) {
        s = s + *x * *y;
    }
    s
}

#[inline]
fn fused_step_generic<F: Real>(out: &mut [F], neu1e: &mut [F], input: &[F], g: F, first: bool) {
    if first {
        for ((o, ne), x) in out.iter_mut().zip(neu1e.iter_mut()).zip(input) {
            let ov = *o;
            *ne = g * ov;
            *o = ov + g * *x;
        }
    } else {
        for ((o, ne), x) in out.iter_mut().zip(neu1e.iter_mut()).zip(input) {
            let ov = *o;
            *ne += g * ov;
            *o = ov + g * *x;
        }
    }
}

#[cfg(all(target_arch = "x86_64", target_feature = "avx2", target_feature = "fma"))]
mod simd {
    use std::arch::x86_64::*;

    #[inline]
    pub fn dot_f32(a: &[f32], b: &[f32]) -> f32 {
        debug_assert_eq!(a.len(), b.len());
        unsafe {
            let mut acc0 = _mm256_setzero_ps();
            let mut acc1 = _mm256_setzero_ps();
            let chunks = a.len() / 16;
            for c in 0..chunks {
                let i = c * 16;
                acc0 = _mm256_fmadd_ps(
                    _mm256_loadu_ps(a.as_ptr().add(i)),
                    _mm256_loadu_ps(b.as_ptr().add(i)),
                    acc0,
                );
                acc1 = _mm256_fmadd_ps(
                    _mm256_loadu_ps(a.as_ptr().add(i + 8)),
                    _mm256_loadu_ps(b.as_ptr().add(i + 8)),
                    acc1,
                );
            }
            let acc = _mm256_add_ps(acc0, acc1);
            let quad = _mm_add_ps(_mm256_castps256_ps128(acc), _mm256_extractf128_ps(acc, 1));
            let pair = _mm_hadd_ps(quad, quad);
            let one = _mm_hadd_ps(pair, pair);
            let mut total = _mm_cvtss_f32(one);
            for i in chunks * 16..a.len() {
                total += a[i] * b[i];
            }
            total
        }
    }

    #[inline]
    pub fn fused_step_f32(out: &mut [f32], neu1e: &mut [f32], input: &[f32], g: f32, first: bool) {
        debug_assert!(out.len() == neu1e.len() && out.len() == input.len());
        unsafe {
            let gv = _mm256_set1_ps(g);
            let n = out.len();
            let chunks = n / 8;
            for c in 0..chunks {
                let i = c * 8;
                let ov = _mm256_loadu_ps(out.as_ptr().add(i));
                let nv = if first {
                    _mm256_mul_ps(gv, ov)
                } else {
                    _mm256_fmadd_ps(gv, ov, _mm256_loadu_ps(neu1e.as_ptr().add(i)))
                };
                _mm256_storeu_ps(neu1e.as_mut_ptr().add(i), nv);
                let upd = _mm256_fmadd_ps(gv, _mm256_loadu_ps(input.as_ptr().add(i)), ov);
                _mm256_storeu_ps(out.as_mut_ptr().add(i), upd);
            }
            for i in chunks * 8..n {
                let ov = out[i];
                if first {
                    neu1e[i] = g * ov;
                } else {
                    neu1e[i] += g * ov;
                }
                out[i] = ov + g * input[i];
            }
        }
    }
}

impl Real for f32 {
    const BYTES: usize = 4;
    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn from_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("4 bytes"))
    }

    #[cfg(all(target_arch = "x86_64", target_feature = "avx2", target_feature = "fma"))]
    #[inline]
    fn dot(a: &[Self], b: &[Self]) -> Self {
        simd::dot_f32(a, b)
    }

    #[cfg(all(target_arch = "x86_64", target_feature = "avx2", target_feature = "fma"))]
    #[inline]
    fn fused_step(out: &mut [Self], neu1e: &mut [Self], input: &[Self], g: Self, first: bool) {
        simd::fused_step_f32(out, neu1e, input, g, first);
    }
}

impl Real for f64 {
    const BYTES: usize = 8;
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn from_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    dim: usize,
    data: Vec<F>,
}

impl<F: Real> Matrix<F> {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self { rows, dim, data: vec![F::zero(); rows * dim] }
    }

    pub fn from_vec(rows: usize, dim: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * dim);
        Self { rows, dim, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [F] {
        &mut self.data
    }
}

/// Paragraph-vector training mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    /// The paragraph vector predicts each context token (default).
    PvDbow,
    /// Paragraph and context word vectors average to predict the center.
    PvDm,
}

impl std::str::FromStr for TrainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pv-dbow" => Ok(Self::PvDbow),
            "pv-dm" => Ok(Self::PvDm),
            other => Err(Error::Invalid(format!("unknown mode {other:?} (expected pv-dbow|pv-dm)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dim: usize,
    /// Maximum distance between the current and predicted token.
    pub window: usize,
    pub lr0: f64,
    pub lr_min: f64,
    pub epochs: usize,
    pub negatives: usize,
    pub mode: TrainMode,
    pub unigram_power: f64,
    pub seed: u64,
    /// Training threads; 1 is bit-reproducible, more use lock-free shared
    /// updates. 0 uses the global pool size.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 128,
            window: 5,
            lr0: 0.025,
            lr_min: 1e-4,
            epochs: 20,
            negatives: 5,
            mode: TrainMode::PvDbow,
            unigram_power: 0.75,
            seed: 1,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::Invalid("dim must be >= 1".into()));
        }
        if self.window < 1 {
            return Err(Error::Invalid("window must be >= 1".into()));
        }
        if !(self.lr_min > 0.0 && self.lr_min <= self.lr0) {
            return Err(Error::Invalid(format!(
                "need 0 < lr_min <= lr0, got lr_min={} lr0={}",
                self.lr_min, self.lr0
            )));
        }
        Ok(())
    }
}

/// Trained model: paragraph vectors are the snapshot embeddings.
#[derive(Debug, Clone)]
pub struct EmbeddingModel<F: Real> {
    pub paragraphs: Matrix<F>,
    pub words: Matrix<F>,
    pub contexts: Matrix<F>,
    /// Cumulative unigram^power mass per vertex, kept from the vocabulary
    /// the model was trained with (not serialized in checkpoints).
    pub noise_cumulative: Vec<f64>,
    /// Mean loss per update, one entry per epoch.
    pub epoch_losses: Vec<f64>,
}

impl<F: Real> EmbeddingModel<F> {
    pub fn dim(&self) -> usize {
        self.paragraphs.dim()
    }

    pub fn num_paragraph_tags(&self) -> usize {
        self.paragraphs.rows()
    }

    pub fn num_vertices(&self) -> usize {
        self.words.rows()
    }

    /// Row `t` of the paragraph matrix: the embedding of snapshot `t`.
    pub fn snapshot_embedding(&self, t: usize) -> Result<&[F]> {
        if t >= self.num_paragraph_tags() {
            return Err(Error::OutOfRange(format!(
                "snapshot {t} (have {} paragraph tags)",
                self.num_paragraph_tags()
            )));
        }
        Ok(self.paragraphs.row(t))
    }

    /// All snapshot embeddings as one f64 row-major matrix.
    pub fn embedding_matrix(&self) -> Vec<f64> {
        self.paragraphs.data().iter().map(|x| x.as_f64()).collect()
    }
}

/// Cosine similarity, computed in f64. Zero-norm input has no defined
/// similarity and is reported as an error.
pub fn cosine<F: Real>(a: &[F], b: &[F]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Invalid(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x.as_f64(), y.as_f64());
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Undefined("cosine of a zero vector".into()));
    }
    Ok(dot / (na.sqrt() * nb.sqrt()))
}
