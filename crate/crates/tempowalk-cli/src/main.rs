//! `tempowalk`: snapshot embeddings for temporal graphs.
//!
//! Subcommands mirror the pipeline stages: `embed` turns an edge list into
//! per-snapshot embeddings, `rank` and `eval` consume embedding files,
//! `bench` sweeps synthetic graphs for scaling curves, `info` summarizes a
//! dataset. Data goes to stdout (or `--out` files); diagnostics and the run
//! log go to stderr.
//!
//! Exit codes: 0 success, 1 pipeline/numeric failure, 2 usage or I/O error.

mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{CommonOpts, RunConfig};
use tempowalk::bench::{run_scaling, BenchConfig};
use tempowalk::embed::{
    read_embeddings_text, save_checkpoint, train, write_embeddings_text, write_word_vectors_text,
    EmbeddingModel, Real, TrainConfig,
};
use tempowalk::eval::{evaluate, rank_snapshots, Embeddings, GroundTruth};
use tempowalk::graph::{bin_timestamps, build_snapshots, parse_edge_list};
use tempowalk::walk::generate_walks;

#[derive(Parser)]
#[command(name = "tempowalk", version, about = "Temporal graph snapshot embeddings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Edge list -> snapshot embedding file
    Embed(EmbedArgs),
    /// Print per-snapshot similarity rankings from an embedding file
    Rank(RankArgs),
    /// Score an embedding file against ground-truth rankings
    Eval(EvalArgs),
    /// Time the pipeline across synthetic graph sizes
    Bench(BenchArgs),
    /// Print the snapshot manifest of a dataset
    Info(InfoArgs),
}

#[derive(Args)]
struct EmbedArgs {
    /// Edge list: `src dst timestamp [weight]`, `#` comments
    input: PathBuf,
    /// Embedding text output path
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Also write the walk corpus (`t<TAB>v1 v2 ...`)
    #[arg(long, value_name = "PATH")]
    corpus_out: Option<PathBuf>,
    /// Also write word vectors in embedding text format
    #[arg(long, value_name = "PATH")]
    emit_words: Option<PathBuf>,
    /// Also write a binary model checkpoint
    #[arg(long, value_name = "PATH")]
    save_model: Option<PathBuf>,
    /// Train and emit in 64-bit floats (verification mode)
    #[arg(long = "f64")]
    use_f64: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct RankArgs {
    /// Embedding text file (as written by `embed`)
    embeddings: PathBuf,
    /// Query snapshot
    #[arg(long, conflicts_with = "all")]
    t: Option<usize>,
    /// Query every snapshot
    #[arg(long)]
    all: bool,
    /// Print only the top K matches
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    /// Embedding text file (as written by `embed`)
    embeddings: PathBuf,
    /// Ground truth: one `t: i1 i2 ...` line per snapshot
    #[arg(long, value_name = "PATH")]
    truth: PathBuf,
    /// Precision cutoffs, comma-separated
    #[arg(long, default_value = "10,20")]
    ks: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Edge counts to sweep, comma-separated (scientific notation ok)
    #[arg(long, value_name = "LIST")]
    sizes: String,
    #[arg(long, default_value_t = 10.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 10)]
    snapshots: usize,
    /// Runs per size; the median is reported
    #[arg(long, default_value_t = 3)]
    runs: usize,
    /// Plot data output path (default: stdout)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct InfoArgs {
    /// Edge list path
    input: PathBuf,
    #[command(flatten)]
    common: CommonOpts,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Embed(args) => cmd_embed(args),
        Cmd::Rank(args) => cmd_rank(args),
        Cmd::Eval(args) => cmd_eval(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::Info(args) => cmd_info(args),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(exit_code(&e));
        }
    }
}

/// 1 for numeric/pipeline failures, 2 for usage and I/O problems.
fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<tempowalk::Error>() {
        Some(tempowalk::Error::NonFinite { .. }) | Some(tempowalk::Error::Undefined(_)) => 1,
        Some(_) => 2,
        None => 2,
    }
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn create_output(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn load_graph(path: &Path, cfg: &RunConfig) -> Result<tempowalk::TemporalGraph> {
    let reader = open_input(path)?;
    let list = parse_edge_list(reader, &cfg.parse).context("parse stage")?;
    bin_timestamps(&list, cfg.bin).context("binning stage")
}

fn cmd_embed(args: EmbedArgs) -> Result<()> {
    let cfg = RunConfig::resolve(RunConfig::default(), &args.common)?;
    eprintln!("# resolved configuration");
    eprint!("{}", cfg.echo());

    let t_io = Instant::now();
    let graph = load_graph(&args.input, &cfg)?;
    let mut io_s = t_io.elapsed().as_secs_f64();
    eprintln!(
        "# graph: vertices={} snapshots={} edges={}",
        graph.num_vertices,
        graph.num_snapshots,
        graph.edges.len()
    );

    let t_walk = Instant::now();
    let snapshots = build_snapshots(&graph, cfg.walk.directed);
    let (corpus, summary) = generate_walks(&snapshots, &cfg.walk).context("walk stage")?;
    let walk_s = t_walk.elapsed().as_secs_f64();
    eprintln!(
        "# corpus: sentences={} tokens={} dropped_short={} skipped_inactive={} tables={:?}",
        summary.sentences, summary.tokens, summary.dropped_short, summary.skipped_inactive, summary.mode_used
    );

    if let Some(path) = &args.corpus_out {
        let t = Instant::now();
        let mut w = create_output(path)?;
        corpus.write_text(&mut w).context("corpus output")?;
        w.flush()?;
        io_s += t.elapsed().as_secs_f64();
    }

    let t_train = Instant::now();
    let train_s;
    let t_out = {
        if args.use_f64 {
            let model = train::<f64>(&corpus, &cfg.train).context("train stage")?;
            train_s = t_train.elapsed().as_secs_f64();
            write_outputs(&args, &model)?
        } else {
            let model = train::<f32>(&corpus, &cfg.train).context("train stage")?;
            train_s = t_train.elapsed().as_secs_f64();
            write_outputs(&args, &model)?
        }
    };
    io_s += t_out;

    eprintln!("# timings: io={io_s:.3}s walk={walk_s:.3}s train={train_s:.3}s");
    Ok(())
}

fn write_outputs<F: Real>(args: &EmbedArgs, model: &EmbeddingModel<F>) -> Result<f64> {
    let t = Instant::now();
    let mut out = create_output(&args.out)?;
    write_embeddings_text(model, &mut out).context("embedding output")?;
    out.flush()?;
    if let Some(path) = &args.emit_words {
        let mut w = create_output(path)?;
        write_word_vectors_text(model, &mut w).context("word vector output")?;
        w.flush()?;
    }
    if let Some(path) = &args.save_model {
        let mut w = create_output(path)?;
        save_checkpoint(model, &mut w).context("checkpoint output")?;
        w.flush()?;
    }
    if !model.epoch_losses.is_empty() {
        let losses: Vec<String> = model.epoch_losses.iter().map(|l| format!("{l:.6}")).collect();
        eprintln!("# epoch mean loss: {}", losses.join(" "));
    }
    Ok(t.elapsed().as_secs_f64())
}

fn read_embeddings(path: &Path) -> Result<Embeddings> {
    let (rows, dim, data) = read_embeddings_text(open_input(path)?)
        .with_context(|| format!("embedding file {}", path.display()))?;
    Ok(Embeddings::from_parts(rows, dim, data))
}

fn cmd_rank(args: RankArgs) -> Result<()> {
    let embeddings = read_embeddings(&args.embeddings)?;
    let queries: Vec<usize> = if args.all {
        (0..embeddings.len()).collect()
    } else {
        match args.t {
            Some(t) => vec![t],
            None => bail!("pass --t <snapshot> or --all"),
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for t in queries {
        let ranked = rank_snapshots(&embeddings, t)?;
        if !ranked.zero_norm.is_empty() {
            eprintln!("# warning: snapshot {t}: zero-norm embeddings {:?} ranked last", ranked.zero_norm);
        }
        let k = args.k.unwrap_or(ranked.order.len()).min(ranked.order.len());
        write!(out, "{t}:")?;
        for (i, score) in ranked.order.iter().zip(&ranked.scores).take(k) {
            if score.is_nan() {
                write!(out, " {i}=undefined")?;
            } else {
                write!(out, " {i}={score:.6}")?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let embeddings = read_embeddings(&args.embeddings)?;
    let truth = GroundTruth::read_text(open_input(&args.truth)?)
        .with_context(|| format!("ground truth {}", args.truth.display()))?;
    let ks: Vec<usize> = args
        .ks
        .split(',')
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad k {s:?}")))
        .collect::<Result<_>>()?;
    let report = evaluate(&embeddings, &truth, &ks).context("evaluation")?;
    print!("{}", report.render());
    Ok(())
}

fn parse_sizes(list: &str) -> Result<Vec<u64>> {
    list.split(',')
        .map(|s| {
            let v: f64 = s.trim().parse().with_context(|| format!("bad size {s:?}"))?;
            if !(v >= 1.0) || (v - v.round()).abs() > 1e-6 * v.max(1.0) {
                bail!("size {s:?} is not a positive integer");
            }
            Ok(v.round() as u64)
        })
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    // Benchmarks default to a single epoch and the full worker pool; the
    // sweep measures pipeline shape, not embedding quality.
    let defaults = RunConfig {
        train: TrainConfig { epochs: 1, workers: 0, ..Default::default() },
        ..Default::default()
    };
    let cfg = RunConfig::resolve(defaults, &args.common)?;
    eprintln!("# resolved configuration");
    eprint!("{}", cfg.echo());

    let sizes = parse_sizes(&args.sizes)?;
    let bench_cfg = BenchConfig {
        avg_degree: args.avg_degree,
        num_snapshots: args.snapshots,
        runs: args.runs,
        seed: cfg.walk.seed,
        walk: cfg.walk.clone(),
        train: cfg.train.clone(),
    };
    let report = run_scaling(&sizes, &bench_cfg).context("scaling sweep")?;
    for p in &report.points {
        eprintln!(
            "# n={} m={} wall={:.3}s walk={:.3}s train={:.3}s workers={}",
            p.num_nodes, p.num_edges, p.wall_time_seconds, p.walk_seconds, p.train_seconds, p.workers
        );
    }
    for f in &report.failures {
        eprintln!("# failed: {f}");
    }
    let plot = report.plot_data(&bench_cfg);
    match &args.out {
        Some(path) => {
            let mut w = create_output(path)?;
            w.write_all(plot.as_bytes())?;
            w.flush()?;
        }
        None => print!("{plot}"),
    }
    Ok(())
}

fn cmd_info(args: InfoArgs) -> Result<()> {
    let cfg = RunConfig::resolve(RunConfig::default(), &args.common)?;
    let graph = load_graph(&args.input, &cfg)?;
    print!("{}", graph.manifest());
    Ok(())
}
