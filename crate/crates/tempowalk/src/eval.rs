//! Snapshot similarity ranking and rank-correlation scoring.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::embed::cosine;
use crate::error::{Error, Result};

/// Row-major f64 snapshot embeddings.
#[derive(Debug, Clone)]
pub struct Embeddings {
    num: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Embeddings {
    pub fn from_parts(num: usize, dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), num * dim);
        Self { num, dim, data }
    }

    pub fn len(&self) -> usize {
        self.num
    }

    pub fn is_empty(&self) -> bool {
        self.num == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }
}

/// Similarity ranking for one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    /// Snapshot indices != t, most similar first; ties break by index.
    pub order: Vec<usize>,
    /// Cosine per entry of `order`; NaN marks an undefined similarity.
    pub scores: Vec<f64>,
    /// Indices whose similarity to t was undefined (zero-norm vectors);
    /// they sort after every defined entry.
    pub zero_norm: Vec<usize>,
}

/// Rank all other snapshots by cosine similarity to snapshot `t`.
pub fn rank_snapshots(embeddings: &Embeddings, t: usize) -> Result<RankedList> {
    if embeddings.len() < 2 {
        return Err(Error::Invalid("ranking needs at least 2 snapshots".into()));
    }
    if t >= embeddings.len() {
        return Err(Error::OutOfRange(format!("snapshot {t} (have {})", embeddings.len())));
    }
    let xt = embeddings.row(t);
    let mut scored: Vec<(usize, f64, bool)> = Vec::with_capacity(embeddings.len() - 1);
    let mut zero_norm = Vec::new();
    for i in (0..embeddings.len()).filter(|&i| i != t) {
        match cosine(xt, embeddings.row(i)) {
            Ok(c) => scored.push((i, c, true)),
            Err(Error::Undefined(_)) => {
                zero_norm.push(i);
                scored.push((i, f64::NEG_INFINITY, false));
            }
            Err(e) => return Err(e),
        }
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let order = scored.iter().map(|&(i, _, _)| i).collect();
    let scores = scored
        .iter()
        .map(|&(_, c, defined)| if defined { c } else { f64::NAN })
        .collect();
    Ok(RankedList { order, scores, zero_norm })
}

/// |top-k(predicted) ∩ top-k(truth)| / k.
pub fn precision_at_k(predicted: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Invalid("k must be >= 1".into()));
    }
    if k > predicted.len() || k > truth.len() {
        return Err(Error::Invalid(format!(
            "k={k} exceeds ranking lengths {} and {}",
            predicted.len(),
            truth.len()
        )));
    }
    let top: std::collections::HashSet<usize> = truth[..k].iter().copied().collect();
    let hits = predicted[..k].iter().filter(|i| top.contains(i)).count();
    Ok(hits as f64 / k as f64)
}

/// Positions 1..=n by ascending value; tied values share their mean rank.
fn average_ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let mean = (i + j + 2) as f64 / 2.0; // 1-based positions i+1 ..= j+1
        for &k in &idx[i..=j] {
            ranks[k] = mean;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Invalid(format!(
            "need two equal-length vectors of size >= 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let mean = (n + 1.0) / 2.0; // ranks always sum to n(n+1)/2
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        let dx = x - mean;
        let dy = y - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("rank vector has zero variance".into()));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Kendall's tau-b via merge-sort inversion counting, O(n log n).
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    let stats = tau_stats_mergesort(a, b)?;
    tau_b_from_stats(stats)
}

/// O(n²) pair-counting reference for `kendall_tau`.
pub fn kendall_tau_quadratic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Invalid("need two equal-length vectors of size >= 2".into()));
    }
    let n = a.len();
    let mut discordant: u64 = 0;
    let mut tied_a: u64 = 0;
    let mut tied_b: u64 = 0;
    let mut tied_both: u64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let da = a[i].total_cmp(&a[j]);
            let db = b[i].total_cmp(&b[j]);
            match (da.is_eq(), db.is_eq()) {
                (true, true) => tied_both += 1,
                (true, false) => tied_a += 1,
                (false, true) => tied_b += 1,
                (false, false) => {
                    if da != db {
                        discordant += 1;
                    }
                }
            }
        }
    }
    let n0 = (n as u64) * (n as u64 - 1) / 2;
    tau_b_from_stats(TauStats {
        n0,
        tied_a: tied_a + tied_both,
        tied_b: tied_b + tied_both,
        tied_both,
        discordant,
    })
}

struct TauStats {
    n0: u64,
    tied_a: u64,
    tied_b: u64,
    tied_both: u64,
    discordant: u64,
}

fn tau_b_from_stats(s: TauStats) -> Result<f64> {
    if s.n0 == s.tied_a || s.n0 == s.tied_b {
        return Err(Error::Undefined("all values tied in one vector".into()));
    }
    // concordant + discordant = n0 - tied_a - tied_b + tied_both
    let numerator = (s.n0 - s.tied_a - s.tied_b + s.tied_both) as i64 - 2 * s.discordant as i64;
    let denominator = ((s.n0 - s.tied_a) as f64).sqrt() * ((s.n0 - s.tied_b) as f64).sqrt();
    Ok(numerator as f64 / denominator)
}

fn run_pairs(sorted: &[(f64, f64)], key: impl Fn(&(f64, f64)) -> f64) -> u64 {
    let mut total = 0u64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && key(&sorted[j + 1]) == key(&sorted[i]) {
            j += 1;
        }
        let run = (j - i + 1) as u64;
        total += run * (run - 1) / 2;
        i = j + 1;
    }
    total
}

fn tau_stats_mergesort(a: &[f64], b: &[f64]) -> Result<TauStats> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Invalid("need two equal-length vectors of size >= 2".into()));
    }
    let n = a.len();
    let mut pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    let tied_a = run_pairs(&pairs, |p| p.0);
    let tied_both = {
        let mut total = 0u64;
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && pairs[j + 1] == pairs[i] {
                j += 1;
            }
            let run = (j - i + 1) as u64;
            total += run * (run - 1) / 2;
            i = j + 1;
        }
        total
    };

    // Merge sort by b; swaps count exactly the strictly discordant pairs
    // (ties in a were pre-sorted by b, ties in b never swap).
    let mut buf = pairs.clone();
    let mut src = &mut pairs;
    let mut dst = &mut buf;
    let mut discordant = 0u64;
    let mut width = 1usize;
    while width < n {
        let mut start = 0usize;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid || j < end {
                if i < mid && (j >= end || src[i].1 <= src[j].1) {
                    dst[k] = src[i];
                    i += 1;
                } else {
                    discordant += (mid - i) as u64;
                    dst[k] = src[j];
                    j += 1;
                }
                k += 1;
            }
            start = end;
        }
        std::mem::swap(&mut src, &mut dst);
        width *= 2;
    }
    let tied_b = run_pairs(src, |p| p.1);

    Ok(TauStats {
        n0: (n as u64) * (n as u64 - 1) / 2,
        tied_a,
        tied_b,
        tied_both,
        discordant,
    })
}

/// Per-snapshot ground-truth orderings: for each t, every other snapshot
/// index from most to least similar.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub rankings: Vec<Vec<usize>>,
}

impl GroundTruth {
    pub fn validate(&self) -> Result<()> {
        let n = self.rankings.len();
        for (t, list) in self.rankings.iter().enumerate() {
            let mut seen = vec![false; n];
            if list.len() != n - 1 {
                return Err(Error::Invalid(format!(
                    "ground truth for snapshot {t} has {} entries, expected {}",
                    list.len(),
                    n - 1
                )));
            }
            for &i in list {
                if i >= n || i == t || seen[i] {
                    return Err(Error::Invalid(format!(
                        "ground truth for snapshot {t} is not a permutation of the others"
                    )));
                }
                seen[i] = true;
            }
        }
        Ok(())
    }

    /// Text form: one `t: i1 i2 i3 ...` line per snapshot.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (t_part, rest) = trimmed.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected `t: i1 i2 ...`".into(),
            })?;
            let t: usize = t_part.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad snapshot index {t_part:?}"),
            })?;
            let list = rest
                .split_whitespace()
                .map(|s| {
                    s.parse::<usize>().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad ranking entry {s:?}"),
                    })
                })
                .collect::<Result<Vec<usize>>>()?;
            rows.push((t, list));
        }
        rows.sort_by_key(|(t, _)| *t);
        let n = rows.len();
        let mut rankings = vec![Vec::new(); n];
        for (expect, (t, list)) in rows.into_iter().enumerate() {
            if t != expect {
                return Err(Error::Invalid(format!("ground truth is missing snapshot {expect}")));
            }
            rankings[t] = list;
        }
        let gt = GroundTruth { rankings };
        gt.validate()?;
        Ok(gt)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, list) in self.rankings.iter().enumerate() {
            let _ = write!(out, "{t}:");
            for i in list {
                let _ = write!(out, " {i}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SnapshotMetrics {
    pub t: usize,
    pub p_at: Vec<f64>,
    pub tau: f64,
    pub rho: f64,
}

#[derive(Debug, Clone)]
pub struct RankingReport {
    pub ks: Vec<usize>,
    pub per_snapshot: Vec<SnapshotMetrics>,
    pub avg_p_at: Vec<f64>,
    pub avg_tau: f64,
    pub avg_rho: f64,
}

impl RankingReport {
    /// Tab-separated table plus a `key = value` block for CI parsing.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "t");
        for k in &self.ks {
            let _ = write!(out, "\tp@{k}");
        }
        let _ = writeln!(out, "\ttau\trho");
        for m in &self.per_snapshot {
            let _ = write!(out, "{}", m.t);
            for p in &m.p_at {
                let _ = write!(out, "\t{p:.6}");
            }
            let _ = writeln!(out, "\t{:.6}\t{:.6}", m.tau, m.rho);
        }
        let _ = write!(out, "avg");
        for p in &self.avg_p_at {
            let _ = write!(out, "\t{p:.6}");
        }
        let _ = writeln!(out, "\t{:.6}\t{:.6}", self.avg_tau, self.avg_rho);
        out.push('\n');
        for (k, p) in self.ks.iter().zip(&self.avg_p_at) {
            let _ = writeln!(out, "avg_p_at_{k} = {p:.6}");
        }
        let _ = writeln!(out, "avg_tau = {:.6}", self.avg_tau);
        let _ = writeln!(out, "avg_rho = {:.6}", self.avg_rho);
        out
    }
}

/// Score predicted orderings against ground truth: per-snapshot p@K for each
/// K, tau and rho over the full orderings, and unweighted macro averages.
pub fn evaluate_rankings(
    predicted: &[Vec<usize>],
    truth: &GroundTruth,
    ks: &[usize],
) -> Result<RankingReport> {
    truth.validate()?;
    let n = predicted.len();
    if truth.rankings.len() != n {
        return Err(Error::Invalid(format!(
            "ground truth covers {} snapshots, predictions cover {n}",
            truth.rankings.len()
        )));
    }
    let mut per_snapshot = Vec::with_capacity(n);
    for (t, pred) in predicted.iter().enumerate() {
        let gt = &truth.rankings[t];
        let mut p_at = Vec::with_capacity(ks.len());
        for &k in ks {
            p_at.push(precision_at_k(pred, gt, k)?);
        }
        // Rank vectors over the common item set (all indices != t).
        let items: Vec<usize> = (0..n).filter(|&i| i != t).collect();
        let rank_of = |list: &[usize]| -> Vec<f64> {
            let mut pos = vec![0.0; n];
            for (r, &i) in list.iter().enumerate() {
                pos[i] = (r + 1) as f64;
            }
            items.iter().map(|&i| pos[i]).collect()
        };
        let pred_ranks = rank_of(pred);
        let truth_ranks = rank_of(gt);
        let tau = kendall_tau(&pred_ranks, &truth_ranks)?;
        let rho = spearman_rho(&pred_ranks, &truth_ranks)?;
        per_snapshot.push(SnapshotMetrics { t, p_at, tau, rho });
    }
    let nf = n as f64;
    let avg_p_at = (0..ks.len())
        .map(|ki| per_snapshot.iter().map(|m| m.p_at[ki]).sum::<f64>() / nf)
        .collect();
    let avg_tau = per_snapshot.iter().map(|m| m.tau).sum::<f64>() / nf;
    let avg_rho = per_snapshot.iter().map(|m| m.rho).sum::<f64>() / nf;
    Ok(RankingReport { ks: ks.to_vec(), per_snapshot, avg_p_at, avg_tau, avg_rho })
}

/// Rank every snapshot by embedding similarity, then score against truth.
pub fn evaluate(embeddings: &Embeddings, truth: &GroundTruth, ks: &[usize]) -> Result<RankingReport> {
    if truth.rankings.len() != embeddings.len() {
        return Err(Error::Invalid(format!(
            "ground truth covers {} snapshots, embeddings cover {}",
            truth.rankings.len(),
            embeddings.len()
        )));
    }
    let predicted: Vec<Vec<usize>> = (0..embeddings.len())
        .map(|t| rank_snapshots(embeddings, t).map(|r| r.order))
        .collect::<Result<_>>()?;
    evaluate_rankings(&predicted, truth, ks)
}
