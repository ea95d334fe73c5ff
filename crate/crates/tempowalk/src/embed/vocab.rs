//! Corpus vocabulary and the noise distribution for negative sampling.

use rand::Rng;

use crate::corpus::WalkCorpus;
use crate::error::{Error, Result};

/// Token statistics plus the cumulative unigram^power table that negative
/// samples are drawn from.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub counts: Vec<u64>,
    pub total_tokens: u64,
    /// cumulative[v] = Σ_{u <= v} counts[u]^power
    cumulative: Vec<f64>,
    total_weight: f64,
}

/// Every vertex occurring in the corpus is kept (min-count 1).
pub fn build_vocab(corpus: &WalkCorpus, unigram_power: f64) -> Result<Vocabulary> {
    if corpus.is_empty() || corpus.num_tokens() == 0 {
        return Err(Error::Invalid("cannot build a vocabulary from an empty corpus".into()));
    }
    let counts = corpus.token_counts();
    let total_tokens: u64 = counts.iter().sum();
    let mut cumulative = Vec::with_capacity(counts.len());
    let mut acc = 0.0f64;
    for &c in &counts {
        if c > 0 {
            acc += (c as f64).powf(unigram_power);
        }
        cumulative.push(acc);
    }
    Ok(Vocabulary { counts, total_tokens, cumulative, total_weight: acc })
}

impl Vocabulary {
    pub fn num_vertices(&self) -> usize {
        self.counts.len()
    }

    /// Noise probability of vertex `v`.
    pub fn noise_probability(&self, v: u32) -> f64 {
        let lo = if v == 0 { 0.0 } else { self.cumulative[v as usize - 1] };
        (self.cumulative[v as usize] - lo) / self.total_weight
    }

    /// Draw one noise vertex by binary search over the cumulative table.
    #[inline]
    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let r: f64 = rng.random::<f64>() * self.total_weight;
        self.cumulative.partition_point(|&c| c <= r).min(self.cumulative.len() - 1) as u32
    }

    pub(crate) fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}
