//! Negative-sampling SGD over walk sentences.
//!
//! Single-worker runs are bit-reproducible: every sentence draws from an RNG
//! keyed by `(seed, epoch, sentence index)` and parameters are touched in
//! corpus order. Multi-worker runs update the shared matrices lock-free in
//! hogwild fashion; the races are tolerated for this model class.

use std::marker::PhantomData;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{Sentence, WalkCorpus};
use crate::embed::{build_vocab, EmbeddingModel, Matrix, Real, TrainConfig, TrainMode, Vocabulary};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

const SALT_INIT: u64 = 0x696e_6974;
const SALT_SENTENCE: u64 = 0x7365_6e74;

/// Mutable matrix view shareable across workers. Rows of distinct matrices
/// never alias; concurrent writes to one row are benign data races by the
/// hogwild contract, so plain loads and stores are used.
struct SharedMatrix<'a, F> {
    ptr: *mut F,
    rows: usize,
    dim: usize,
    _life: PhantomData<&'a mut [F]>,
}

unsafe impl<F: Send> Send for SharedMatrix<'_, F> {}
unsafe impl<F: Send> Sync for SharedMatrix<'_, F> {}

impl<'a, F: Real> SharedMatrix<'a, F> {
    fn new(m: &'a mut Matrix<F>) -> Self {
        let rows = m.rows();
        let dim = m.dim();
        Self { ptr: m.data_mut().as_mut_ptr(), rows, dim, _life: PhantomData }
    }

    #[allow(clippy::mut_from_ref)]
    #[inline]
    unsafe fn row_mut(&self, r: usize) -> &mut [F] {
        debug_assert!(r < self.rows);
        std::slice::from_raw_parts_mut(self.ptr.add(r * self.dim), self.dim)
    }
}

/// One (input, output) sample of the negative-sampling objective.
///
/// Accumulates the input gradient step into `neu1e` (overwriting it when
/// `first` is set, which spares the caller a clear), applies the output
/// gradient step in place, and returns the sample loss measured before the
/// update. `input` must stay fixed while a group of samples shares it; the
/// caller applies `neu1e` afterwards.
#[inline]
fn sample_step<F: Real>(
    input: &[F],
    neu1e: &mut [F],
    out: &mut [F],
    positive: bool,
    first: bool,
    lr: F,
) -> f64 {
    let f = F::dot(input, out).as_f64();
    // One exp and one ln yield both the sigmoid and the (stable) loss:
    // with e = exp(-|f|), sigma(f) is 1/(1+e) or e/(1+e), and
    // log(1 + e^{±f}) = max(±f, 0) + log(1 + e).
    let e = (-f.abs()).exp();
    let base = (1.0 + e).ln();
    let (sig, loss) = if f >= 0.0 {
        (1.0 / (1.0 + e), if positive { base } else { f + base })
    } else {
        (e / (1.0 + e), if positive { base - f } else { base })
    };
    let label = if positive { 1.0 } else { 0.0 };
    let g = F::from_f64(label - sig) * lr;
    F::fused_step(out, neu1e, input, g, first);
    loss
}

/// One full negative-sampling update on explicit vectors: `input` predicts
/// `positive` against the given noise rows. Returns the loss at the
/// pre-update parameters. This is the exact update the trainer applies per
/// (input, context) pair, exposed for gradient verification.
pub fn negative_sampling_update<F: Real>(
    input: &mut [F],
    positive: &mut [F],
    negatives: &mut [Vec<F>],
    lr: F,
) -> f64 {
    let mut neu1e = vec![F::zero(); input.len()];
    let mut loss = sample_step(input, &mut neu1e, positive, true, true, lr);
    for neg in negatives.iter_mut() {
        loss += sample_step(input, &mut neu1e, neg, false, false, lr);
    }
    for (x, e) in input.iter_mut().zip(&neu1e) {
        *x += *e;
    }
    loss
}

/// One PV-DM update on explicit vectors: the mean of `paragraph` and
/// `context_words` predicts `positive` against the noise rows; the input
/// gradient is split evenly back (exact mean gradient, factor 1/(C+1)).
pub fn pv_dm_update<F: Real>(
    paragraph: &mut [F],
    context_words: &mut [Vec<F>],
    positive: &mut [F],
    negatives: &mut [Vec<F>],
    lr: F,
) -> f64 {
    let dim = paragraph.len();
    let inv = F::from_f64(1.0 / (context_words.len() + 1) as f64);
    let mut h: Vec<F> = paragraph.to_vec();
    for w in context_words.iter() {
        for (hi, wi) in h.iter_mut().zip(w) {
            *hi += *wi;
        }
    }
    for hi in h.iter_mut() {
        *hi = *hi * inv;
    }

    let mut neu1e = vec![F::zero(); dim];
    let mut loss = sample_step(&h, &mut neu1e, positive, true, true, lr);
    for neg in negatives.iter_mut() {
        loss += sample_step(&h, &mut neu1e, neg, false, false, lr);
    }
    for (p, e) in paragraph.iter_mut().zip(&neu1e) {
        *p += *e * inv;
    }
    for w in context_words.iter_mut() {
        for (wi, e) in w.iter_mut().zip(&neu1e) {
            *wi += *e * inv;
        }
    }
    loss
}

struct Scratch<F> {
    neu1e: Vec<F>,
    hidden: Vec<F>,
    ctx: Vec<u32>,
}

impl<F: Real> Scratch<F> {
    fn new(dim: usize) -> Self {
        Self { neu1e: vec![F::zero(); dim], hidden: vec![F::zero(); dim], ctx: Vec::new() }
    }
}

struct Shared<'a, F> {
    paragraphs: SharedMatrix<'a, F>,
    words: SharedMatrix<'a, F>,
    contexts: SharedMatrix<'a, F>,
}

/// Positive sample plus noise draws against one frozen input. `first`
/// makes the positive sample overwrite `neu1e` instead of accumulating;
/// returns (loss, samples).
#[inline]
fn noise_contrast<F: Real>(
    input: &[F],
    neu1e: &mut [F],
    contexts: &SharedMatrix<'_, F>,
    positive: u32,
    cfg: &TrainConfig,
    vocab: &Vocabulary,
    rng: &mut ChaCha8Rng,
    lr: F,
    first: bool,
) -> (f64, u64) {
    let mut loss =
        sample_step(input, neu1e, unsafe { contexts.row_mut(positive as usize) }, true, first, lr);
    let mut samples = 1u64;
    for _ in 0..cfg.negatives {
        let noise = vocab.sample_noise(rng);
        if noise == positive {
            continue;
        }
        loss += sample_step(input, neu1e, unsafe { contexts.row_mut(noise as usize) }, false, false, lr);
        samples += 1;
    }
    (loss, samples)
}

fn train_sentence<F: Real>(
    sentence: Sentence<'_>,
    shared: &Shared<'_, F>,
    vocab: &Vocabulary,
    cfg: &TrainConfig,
    lr: F,
    rng: &mut ChaCha8Rng,
    scratch: &mut Scratch<F>,
) -> (f64, u64) {
    let tokens = sentence.tokens;
    let tag = sentence.tag as usize;
    let mut loss = 0.0f64;
    let mut samples = 0u64;

    // In DBOW mode the paragraph row is the input of every prediction in
    // the sentence; its gradient is accumulated across the sentence and
    // applied once, so concurrent workers do not thrash its cache lines.
    let para = unsafe { shared.paragraphs.row_mut(tag) };

    for (i, &center) in tokens.iter().enumerate() {
        let reach = rng.random_range(1..=cfg.window);
        let lo = i.saturating_sub(reach);
        let hi = (i + reach + 1).min(tokens.len());
        match cfg.mode {
            TrainMode::PvDbow => {
                // The paragraph vector predicts every token around the
                // current position.
                for j in lo..hi {
                    if j == i {
                        continue;
                    }
                    let (l, s) = noise_contrast(
                        para,
                        &mut scratch.neu1e,
                        &shared.contexts,
                        tokens[j],
                        cfg,
                        vocab,
                        rng,
                        lr,
                        samples == 0,
                    );
                    loss += l;
                    samples += s;
                }
            }
            TrainMode::PvDm => {
                scratch.ctx.clear();
                scratch.ctx.extend(tokens[lo..i].iter().chain(&tokens[i + 1..hi]));
                if scratch.ctx.is_empty() {
                    continue;
                }
                let inv = F::from_f64(1.0 / (scratch.ctx.len() + 1) as f64);
                scratch.hidden.copy_from_slice(para);
                for &c in &scratch.ctx {
                    let w = unsafe { shared.words.row_mut(c as usize) };
                    for (hi_, wi) in scratch.hidden.iter_mut().zip(w.iter()) {
                        *hi_ += *wi;
                    }
                }
                for h in scratch.hidden.iter_mut() {
                    *h = *h * inv;
                }
                let (l, s) = noise_contrast(
                    &scratch.hidden,
                    &mut scratch.neu1e,
                    &shared.contexts,
                    center,
                    cfg,
                    vocab,
                    rng,
                    lr,
                    true,
                );
                for (x, e) in para.iter_mut().zip(&scratch.neu1e) {
                    *x += *e * inv;
                }
                for &c in &scratch.ctx {
                    let w = unsafe { shared.words.row_mut(c as usize) };
                    for (wi, e) in w.iter_mut().zip(&scratch.neu1e) {
                        *wi += *e * inv;
                    }
                }
                loss += l;
                samples += s;
            }
        }
    }
    if cfg.mode == TrainMode::PvDbow && samples > 0 {
        for (x, e) in para.iter_mut().zip(&scratch.neu1e) {
            *x += *e;
        }
    }
    (loss, samples)
}

/// Train paragraph vectors over the corpus.
pub fn train<F: Real>(corpus: &WalkCorpus, cfg: &TrainConfig) -> Result<EmbeddingModel<F>> {
    cfg.validate()?;
    let vocab = build_vocab(corpus, cfg.unigram_power)?;
    let dim = cfg.dim;
    let num_tags = corpus.num_paragraph_tags;
    let num_vertices = corpus.num_vertices;

    // Word and paragraph vectors start uniform in [-0.5/dim, 0.5/dim];
    // context vectors start at zero. Draws are f64 so f32/f64 runs share
    // the same underlying stream.
    let mut rng = stream_rng(cfg.seed, SALT_INIT, dim as u64, 0);
    let scale = 0.5 / dim as f64;
    let mut fill = |n: usize| -> Matrix<F> {
        let data = (0..n * dim)
            .map(|_| F::from_f64(rng.random::<f64>() * 2.0 * scale - scale))
            .collect();
        Matrix::from_vec(n, dim, data)
    };
    let mut words = fill(num_vertices);
    let mut paragraphs = fill(num_tags);
    let mut contexts = Matrix::zeros(num_vertices, dim);

    let total_tokens = (corpus.num_tokens() as u64).saturating_mul(cfg.epochs as u64).max(1);
    let tokens_done = AtomicU64::new(0);
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut total_samples = 0u64;

    let pool = match cfg.workers {
        0 | 1 => None,
        n => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Invalid(format!("worker pool: {e}")))?,
        ),
    };

    for epoch in 0..cfg.epochs {
        let (loss, samples) = {
            let shared = Shared {
                paragraphs: SharedMatrix::new(&mut paragraphs),
                words: SharedMatrix::new(&mut words),
                contexts: SharedMatrix::new(&mut contexts),
            };
            let lr_of = |done: u64| -> F {
                let progress = done as f64 / total_tokens as f64;
                F::from_f64((cfg.lr0 - (cfg.lr0 - cfg.lr_min) * progress).max(cfg.lr_min))
            };
            let run_one = |scratch: &mut Scratch<F>, i: usize| -> (f64, u64) {
                let sentence = corpus.sentence(i);
                let done = tokens_done.fetch_add(sentence.tokens.len() as u64, Ordering::Relaxed);
                let mut rng = stream_rng(cfg.seed, SALT_SENTENCE ^ epoch as u64, i as u64, 0);
                train_sentence(sentence, &shared, &vocab, cfg, lr_of(done), &mut rng, scratch)
            };

            if cfg.workers == 1 {
                let mut scratch = Scratch::new(dim);
                let mut acc = (0.0f64, 0u64);
                for i in 0..corpus.num_sentences() {
                    let (l, s) = run_one(&mut scratch, i);
                    acc.0 += l;
                    acc.1 += s;
                }
                acc
            } else {
                let work = || {
                    (0..corpus.num_sentences())
                        .into_par_iter()
                        .with_min_len(64)
                        .map_init(
                            || Scratch::new(dim),
                            |scratch, i| run_one(scratch, i),
                        )
                        .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
                };
                match &pool {
                    Some(p) => p.install(work),
                    None => work(),
                }
            }
        };
        total_samples += samples;

        let finite = paragraphs.data().iter().all(|x| x.is_finite())
            && words.data().iter().all(|x| x.is_finite())
            && contexts.data().iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFinite { epoch, updates: total_samples });
        }
        epoch_losses.push(if samples > 0 { loss / samples as f64 } else { 0.0 });
    }

    Ok(EmbeddingModel {
        paragraphs,
        words,
        contexts,
        noise_cumulative: vocab.cumulative().to_vec(),
        epoch_losses,
    })
}
