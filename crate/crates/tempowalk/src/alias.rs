//! Alias tables for O(1) sampling from fixed categorical distributions.

use rand::Rng;

use crate::error::{Error, Result};

/// Preprocessed categorical distribution over a candidate set (Vose
/// construction). Sampling costs one uniform draw pair regardless of size.
#[derive(Debug, Clone)]
pub struct AliasTable {
    /// Acceptance threshold per slot, in [0, 1].
    prob: Vec<f64>,
    /// Fallback slot index when the coin rejects.
    alias: Vec<u32>,
    /// Candidate id carried by each slot.
    support: Vec<u32>,
    total_weight: f64,
}

impl AliasTable {
    /// Build a table from positive weights over `support` candidates.
    pub fn new(weights: &[f64], support: &[u32]) -> Result<Self> {
        if weights.is_empty() || weights.len() != support.len() {
            return Err(Error::Invalid(format!(
                "alias table needs matching nonempty weights/support, got {}/{}",
                weights.len(),
                support.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Invalid(format!("alias weight must be positive and finite, got {w}")));
        }
        let n = weights.len();
        let total_weight: f64 = weights.iter().sum();

        // Vose: scale each probability by n, pair deficient slots with
        // surplus ones until every slot holds exactly unit mass.
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total_weight).collect();
        let mut prob = vec![0.0; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();

        let mut small: Vec<u32> = Vec::with_capacity(n);
        let mut large: Vec<u32> = Vec::with_capacity(n);
        for (i, s) in scaled.iter().enumerate() {
            if *s < 1.0 {
                small.push(i as u32);
            } else {
                large.push(i as u32);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s as usize] = scaled[s as usize];
            alias[s as usize] = l;
            scaled[l as usize] -= 1.0 - scaled[s as usize];
            if scaled[l as usize] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers hold unit mass up to rounding.
        for &i in small.iter().chain(large.iter()) {
            prob[i as usize] = 1.0;
        }

        Ok(Self { prob, alias, support: support.to_vec(), total_weight })
    }

    /// Table over `0..weights.len()` candidates.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let support: Vec<u32> = (0..weights.len() as u32).collect();
        Self::new(weights, &support)
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    /// Draw a candidate id; one slot draw plus one coin.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let n = self.prob.len();
        let slot = rng.random_range(0..n);
        let coin: f64 = rng.random();
        if coin < self.prob[slot] {
            self.support[slot]
        } else {
            self.support[self.alias[slot] as usize]
        }
    }

    /// Probability of each slot's candidate as encoded by the table.
    ///
    /// Used by tests to confirm the construction preserves the normalized
    /// input weights; returns pairs aligned with `support`.
    pub fn reconstructed(&self) -> Vec<f64> {
        let n = self.prob.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] += self.prob[i] / n as f64;
            out[self.alias[i] as usize] += (1.0 - self.prob[i]) / n as f64;
        }
        out
    }
}
