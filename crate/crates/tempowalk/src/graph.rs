//! Temporal graph model: edge-list parsing, timestamp binning, and
//! per-snapshot adjacency.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// One timestamped directed edge, after binning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalEdge {
    pub src: u32,
    pub dst: u32,
    /// Snapshot index, contiguous from 0.
    pub t: u32,
    pub weight: f64,
}

/// Parsed edge list: dense vertex ids, raw (unbinned) timestamps.
#[derive(Debug, Clone)]
pub struct EdgeList {
    /// Raw label per dense vertex id, in first-appearance order.
    pub labels: Vec<String>,
    /// `(src, dst, raw_time, weight)` in input order.
    pub edges: Vec<(u32, u32, f64, f64)>,
}

impl EdgeList {
    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    /// `None` splits on any run of whitespace.
    pub delimiter: Option<char>,
    /// Require and read a fourth weight column.
    pub has_weight: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { delimiter: None, has_weight: false }
    }
}

/// How raw timestamps become contiguous snapshot indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinScheme {
    /// Each distinct raw time becomes one snapshot, in ascending order.
    AsIs,
    /// Snapshot = floor((time - min_time) / width); empty bins are kept.
    FixedWidth(f64),
    /// Split edges into `count` groups of (near-)equal size by time order,
    /// never separating equal timestamps.
    Quantile(usize),
}

/// A discrete temporal graph: dense vertices, binned timestamped edges.
#[derive(Debug, Clone)]
pub struct TemporalGraph {
    pub num_vertices: usize,
    pub num_snapshots: usize,
    pub edges: Vec<TemporalEdge>,
    /// Raw label per vertex id; `None` for synthetic graphs.
    pub vertex_labels: Option<Vec<String>>,
}

impl TemporalGraph {
    /// Edge count per snapshot index (before any symmetrization or merging).
    pub fn edge_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_snapshots];
        for e in &self.edges {
            counts[e.t as usize] += 1;
        }
        counts
    }

    /// Snapshot manifest: `num_vertices num_snapshots` header, then one edge
    /// count per snapshot line.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.num_vertices, self.num_snapshots);
        for c in self.edge_counts() {
            let _ = writeln!(out, "{c}");
        }
        out
    }

    /// Serialize back to edge-list text (`label label t weight`).
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let (s, d) = match &self.vertex_labels {
                Some(labels) => (labels[e.src as usize].clone(), labels[e.dst as usize].clone()),
                None => (e.src.to_string(), e.dst.to_string()),
            };
            let _ = writeln!(out, "{} {} {} {}", s, d, e.t, e.weight);
        }
        out
    }
}

/// Parse a line-oriented edge list: `src dst timestamp [weight]`, `#`
/// comments and blank lines skipped.
pub fn parse_edge_list<R: BufRead>(source: R, options: &ParseOptions) -> Result<EdgeList> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut edges = Vec::new();

    let intern = |raw: &str, labels: &mut Vec<String>, index: &mut HashMap<String, u32>| -> u32 {
        if let Some(&id) = index.get(raw) {
            return id;
        }
        let id = labels.len() as u32;
        labels.push(raw.to_string());
        index.insert(raw.to_string(), id);
        id
    };

    let expected = if options.has_weight { 4 } else { 3 };
    for (lineno, line) in source.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match options.delimiter {
            Some(d) => trimmed.split(d).map(str::trim).collect(),
            None => trimmed.split_whitespace().collect(),
        };
        if fields.len() != expected {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {expected} columns, got {}", fields.len()),
            });
        }
        let src = intern(fields[0], &mut labels, &mut index);
        let dst = intern(fields[1], &mut labels, &mut index);
        let time: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad timestamp {:?}", fields[2]),
        })?;
        if !time.is_finite() {
            return Err(Error::Parse { line: lineno, msg: format!("non-finite timestamp {time}") });
        }
        let weight = if options.has_weight {
            let w: f64 = fields[3].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad weight {:?}", fields[3]),
            })?;
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Invalid(format!("weight must be positive at line {lineno}, got {w}")));
            }
            w
        } else {
            1.0
        };
        edges.push((src, dst, time, weight));
    }
    if edges.is_empty() {
        return Err(Error::Invalid("empty edge list".into()));
    }
    Ok(EdgeList { labels, edges })
}

/// Bin raw timestamps into contiguous snapshot indices.
pub fn bin_timestamps(list: &EdgeList, scheme: BinScheme) -> Result<TemporalGraph> {
    if list.edges.is_empty() {
        return Err(Error::Invalid("cannot bin an empty edge list".into()));
    }
    let times: Vec<f64> = list.edges.iter().map(|e| e.2).collect();
    let bins: Vec<u32> = match scheme {
        BinScheme::AsIs => {
            let mut uniq: Vec<f64> = times.clone();
            uniq.sort_by(|a, b| a.partial_cmp(b).unwrap());
            uniq.dedup();
            times
                .iter()
                .map(|t| uniq.partition_point(|u| u < t) as u32)
                .collect()
        }
        BinScheme::FixedWidth(width) => {
            if !(width > 0.0) {
                return Err(Error::Invalid(format!("fixed bin width must be > 0, got {width}")));
            }
            let min = times.iter().cloned().fold(f64::INFINITY, f64::min);
            times.iter().map(|t| ((t - min) / width).floor() as u32).collect()
        }
        BinScheme::Quantile(count) => {
            if count == 0 {
                return Err(Error::Invalid("quantile bin count must be > 0".into()));
            }
            if count > times.len() {
                return Err(Error::Invalid(format!(
                    "quantile bin count {count} exceeds edge count {}",
                    times.len()
                )));
            }
            quantile_bins(&times, count)
        }
    };
    // Compact to contiguous indices; fixed-width keeps interior empty bins.
    let max_bin = *bins.iter().max().unwrap() as usize;
    let num_snapshots = match scheme {
        BinScheme::FixedWidth(_) => max_bin + 1,
        _ => {
            debug_assert!({
                let mut seen = vec![false; max_bin + 1];
                bins.iter().for_each(|&b| seen[b as usize] = true);
                seen.into_iter().all(|s| s)
            });
            max_bin + 1
        }
    };

    let edges = list
        .edges
        .iter()
        .zip(&bins)
        .map(|(&(src, dst, _, weight), &t)| TemporalEdge { src, dst, t, weight })
        .collect();
    Ok(TemporalGraph {
        num_vertices: list.num_vertices(),
        num_snapshots,
        edges,
        vertex_labels: Some(list.labels.clone()),
    })
}

/// Equal-count split by time order; equal timestamps stay together, so group
/// sizes can deviate. Bins are relabeled contiguously afterwards.
fn quantile_bins(times: &[f64], count: usize) -> Vec<u32> {
    let m = times.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| times[a].partial_cmp(&times[b]).unwrap());

    let mut raw = vec![0u32; m];
    let mut bin = 0u32;
    let mut filled = 0usize;
    for (rank, &idx) in order.iter().enumerate() {
        if rank > 0 {
            let prev = order[rank - 1];
            let boundary = filled * count >= (bin as usize + 1) * m;
            if boundary && times[idx] != times[prev] && (bin as usize) < count - 1 {
                bin += 1;
            }
        }
        raw[idx] = bin;
        filled += 1;
    }
    // Ties can swallow a boundary and leave a bin unused; relabel densely.
    let used: Vec<u32> = {
        let mut u: Vec<u32> = raw.clone();
        u.sort_unstable();
        u.dedup();
        u
    };
    raw.iter().map(|b| used.partition_point(|x| x < b) as u32).collect()
}

/// Adjacency for one snapshot, CSR layout plus an O(1)-expected edge set.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: u32,
    offsets: Vec<usize>,
    neighbors: Vec<(u32, f64)>,
    edge_set: HashSet<(u32, u32)>,
}

impl Snapshot {
    /// Sorted `(neighbor, weight)` list for `v`.
    #[inline]
    pub fn neighbors(&self, v: u32) -> &[(u32, f64)] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edge_set.contains(&(u, v))
    }

    #[inline]
    pub fn is_active(&self, v: u32) -> bool {
        self.offsets[v as usize] < self.offsets[v as usize + 1]
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Vertices with at least one neighbor.
    pub fn active_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.num_vertices() as u32).filter(move |&v| self.is_active(v))
    }

    /// Directed entry count (each undirected edge appears twice).
    pub fn num_entries(&self) -> usize {
        self.neighbors.len()
    }
}

/// Materialize one `Snapshot` per index, including empty ones. Undirected
/// mode inserts the reverse of every edge before merging; parallel edges
/// merge by weight summation.
pub fn build_snapshots(graph: &TemporalGraph, directed: bool) -> Vec<Snapshot> {
    let n = graph.num_vertices;
    let mut per_t: Vec<Vec<(u32, u32, f64)>> = vec![Vec::new(); graph.num_snapshots];
    for e in &graph.edges {
        per_t[e.t as usize].push((e.src, e.dst, e.weight));
        if !directed && e.src != e.dst {
            per_t[e.t as usize].push((e.dst, e.src, e.weight));
        }
    }

    per_t
        .into_iter()
        .enumerate()
        .map(|(t, mut entries)| {
            entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
            let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(entries.len());
            for (src, dst, w) in entries {
                match merged.last_mut() {
                    Some(last) if last.0 == src && last.1 == dst => last.2 += w,
                    _ => merged.push((src, dst, w)),
                }
            }
            let mut offsets = vec![0usize; n + 1];
            for &(src, _, _) in &merged {
                offsets[src as usize + 1] += 1;
            }
            for i in 0..n {
                offsets[i + 1] += offsets[i];
            }
            let edge_set: HashSet<(u32, u32)> = merged.iter().map(|&(s, d, _)| (s, d)).collect();
            let neighbors = merged.into_iter().map(|(_, d, w)| (d, w)).collect();
            Snapshot { t: t as u32, offsets, neighbors, edge_set }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str) -> EdgeList {
        parse_edge_list(Cursor::new(text), &ParseOptions::default()).unwrap()
    }

    #[test]
    fn parses_labels_in_first_appearance_order() {
        let list = parse("a b 0\nb c 1\n");
        assert_eq!(list.num_vertices(), 3);
        assert_eq!(list.edges.len(), 2);
        assert_eq!(list.labels, vec!["a", "b", "c"]);
        let times: Vec<f64> = list.edges.iter().map(|e| e.2).collect();
        assert_eq!(times, vec![0.0, 1.0]);
    }

    #[test]
    fn short_line_is_a_parse_error_with_line_number() {
        let err = parse_edge_list(Cursor::new("a b\n"), &ParseOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blanks_are_skipped_and_line_numbers_preserved() {
        let err = parse_edge_list(
            Cursor::new("# header\n\na b 0\na b\n"),
            &ParseOptions::default(),
        )
        .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_weight_rejected() {
        let err = parse_edge_list(
            Cursor::new("a b 0 -1.5\n"),
            &ParseOptions { has_weight: true, ..Default::default() },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn empty_input_rejected() {
        let err = parse_edge_list(Cursor::new("# nothing\n"), &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn custom_delimiter() {
        let list = parse_edge_list(
            Cursor::new("a,b,0\nb,c,2\n"),
            &ParseOptions { delimiter: Some(','), ..Default::default() },
        )
        .unwrap();
        assert_eq!(list.num_vertices(), 3);
    }

    #[test]
    fn duplicate_edges_merge_on_build() {
        let mut text = String::new();
        text.push_str("a b 0\na b 0\n");
        for i in 0..8 {
            text.push_str(&format!("x{i} y{i} 1\n"));
        }
        let g = bin_timestamps(&parse(&text), BinScheme::AsIs).unwrap();
        let snaps = build_snapshots(&g, false);
        let n0 = snaps[0].neighbors(0);
        assert_eq!(n0.len(), 1);
        assert_eq!(n0[0], (1, 2.0));
    }

    #[test]
    fn as_is_binning_is_order_preserving() {
        let list = parse("a b 5\nb c 5\nc d 9\n");
        let g = bin_timestamps(&list, BinScheme::AsIs).unwrap();
        let ts: Vec<u32> = g.edges.iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![0, 0, 1]);
        assert_eq!(g.num_snapshots, 2);
    }

    #[test]
    fn fixed_width_binning() {
        let mut text = String::new();
        for t in 0..100 {
            text.push_str(&format!("a{t} b{t} {t}\n"));
        }
        let g = bin_timestamps(&parse(&text), BinScheme::FixedWidth(10.0)).unwrap();
        assert_eq!(g.num_snapshots, 10);
        let counts = g.edge_counts();
        assert!(counts.iter().all(|&c| c == 10));
    }

    #[test]
    fn fixed_width_rejects_nonpositive() {
        let list = parse("a b 0\n");
        assert!(bin_timestamps(&list, BinScheme::FixedWidth(0.0)).is_err());
    }

    #[test]
    fn quantile_median_split() {
        let list = parse("a b 1\nb c 2\nc d 3\nd e 100\n");
        let g = bin_timestamps(&list, BinScheme::Quantile(2)).unwrap();
        assert_eq!(g.num_snapshots, 2);
        assert_eq!(g.edge_counts(), vec![2, 2]);
        let ts: Vec<u32> = g.edges.iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![0, 0, 1, 1]);
    }

    #[test]
    fn quantile_keeps_ties_together() {
        let list = parse("a b 1\nb c 1\nc d 1\nd e 2\n");
        let g = bin_timestamps(&list, BinScheme::Quantile(2)).unwrap();
        // The three t=1 edges stay in one bin.
        let ts: Vec<u32> = g.edges.iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![0, 0, 0, 1]);
    }

    #[test]
    fn quantile_rejects_more_bins_than_edges() {
        let list = parse("a b 1\nb c 2\n");
        assert!(bin_timestamps(&list, BinScheme::Quantile(3)).is_err());
    }

    #[test]
    fn undirected_snapshots_are_symmetric() {
        let g = bin_timestamps(&parse("a b 0\nb c 1\n"), BinScheme::AsIs).unwrap();
        let snaps = build_snapshots(&g, false);
        assert_eq!(snaps.len(), 2);
        assert_eq!(snaps[0].neighbors(0), &[(1, 1.0)]);
        assert_eq!(snaps[0].neighbors(1), &[(0, 1.0)]);
        assert_eq!(snaps[1].neighbors(1), &[(2, 1.0)]);
        assert_eq!(snaps[1].neighbors(2), &[(1, 1.0)]);
        assert!(snaps[0].has_edge(0, 1) && snaps[0].has_edge(1, 0));
    }

    #[test]
    fn directed_snapshots_keep_direction() {
        let g = bin_timestamps(&parse("a b 0\nb c 1\n"), BinScheme::AsIs).unwrap();
        let snaps = build_snapshots(&g, true);
        assert_eq!(snaps[0].neighbors(0), &[(1, 1.0)]);
        assert!(snaps[0].neighbors(1).is_empty());
        assert!(snaps[0].has_edge(0, 1) && !snaps[0].has_edge(1, 0));
    }

    #[test]
    fn empty_snapshots_are_materialized() {
        // Edges only at fixed-width bin 1 of 3.
        let list = parse("a b 10\nb c 12\nc a 29\n");
        let g = bin_timestamps(&list, BinScheme::FixedWidth(10.0)).unwrap();
        assert_eq!(g.num_snapshots, 2);
        let snaps = build_snapshots(&g, false);
        assert_eq!(snaps.len(), 2);

        // An interior empty bin survives.
        let list2 = parse("a b 0\nc d 25\n");
        let g2 = bin_timestamps(&list2, BinScheme::FixedWidth(10.0)).unwrap();
        assert_eq!(g2.num_snapshots, 3);
        let snaps2 = build_snapshots(&g2, false);
        assert!(snaps2[1].active_vertices().next().is_none());
    }

    #[test]
    fn snapshot_edge_counts_sum_to_edge_total() {
        let list = parse("a b 0\nb c 1\nc d 1\nd a 4\n");
        let g = bin_timestamps(&list, BinScheme::AsIs).unwrap();
        assert_eq!(g.edge_counts().iter().sum::<usize>(), g.edges.len());
    }

    #[test]
    fn manifest_format() {
        let g = bin_timestamps(&parse("a b 0\nb c 1\nc d 1\n"), BinScheme::AsIs).unwrap();
        assert_eq!(g.manifest(), "4 2\n1\n2\n");
    }

    #[test]
    fn round_trip_through_text() {
        let g = bin_timestamps(&parse("a b 0\nb c 1\nc a 1 \n"), BinScheme::AsIs).unwrap();
        let text = g.to_edge_list_string();
        let g2 = bin_timestamps(
            &parse_edge_list(Cursor::new(text.as_bytes()), &ParseOptions { has_weight: true, ..Default::default() }).unwrap(),
            BinScheme::AsIs,
        )
        .unwrap();
        assert_eq!(g.num_vertices, g2.num_vertices);
        assert_eq!(g.num_snapshots, g2.num_snapshots);
        assert_eq!(g.edges, g2.edges);
    }

    proptest::proptest! {
        #[test]
        fn round_trip_random_graphs(
            raw_edges in proptest::collection::vec((0u32..12, 0u32..12, 0u32..5, 1u32..50), 1..60)
        ) {
            // Contiguous snapshot indices are guaranteed by as-is binning.
            let mut text = String::new();
            for (s, d, t, w10) in &raw_edges {
                text.push_str(&format!("v{s} v{d} {t} {}\n", *w10 as f64 / 8.0));
            }
            let opts = ParseOptions { has_weight: true, ..Default::default() };
            let list = parse_edge_list(Cursor::new(text.as_bytes()), &opts).unwrap();
            let g = bin_timestamps(&list, BinScheme::AsIs).unwrap();

            let round = g.to_edge_list_string();
            let list2 = parse_edge_list(Cursor::new(round.as_bytes()), &opts).unwrap();
            let g2 = bin_timestamps(&list2, BinScheme::AsIs).unwrap();
            proptest::prop_assert_eq!(g.num_vertices, g2.num_vertices);
            proptest::prop_assert_eq!(&g.edges, &g2.edges);

            // Adjacency symmetry under undirected build.
            let snaps = build_snapshots(&g, false);
            for snap in &snaps {
                for v in 0..g.num_vertices as u32 {
                    for &(u, w) in snap.neighbors(v) {
                        let back = snap.neighbors(u).iter().find(|(x, _)| *x == v);
                        proptest::prop_assert_eq!(back.map(|(_, bw)| *bw), Some(w));
                    }
                }
            }
        }
    }
}
