//! Run configuration: defaults < config file < environment < flags.
//!
//! The config file is line-oriented `key = value` with `#` comments. Every
//! key can also come from the environment as `TEMPOWALK_<KEY>` (upper-cased)
//! for CI overrides. The fully resolved configuration is echoed to the run
//! log; feeding that echo back as a config file reproduces the run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tempowalk::embed::{TrainConfig, TrainMode};
use tempowalk::graph::{BinScheme, ParseOptions};
use tempowalk::walk::{TableMode, WalkConfig};

pub const ENV_PREFIX: &str = "TEMPOWALK_";

const KEYS: &[&str] = &[
    "walks",
    "walk_length",
    "p",
    "q",
    "alpha",
    "seed",
    "directed",
    "min_walk_length",
    "tables",
    "workers",
    "dim",
    "window",
    "lr0",
    "lr_min",
    "epochs",
    "negatives",
    "mode",
    "unigram_power",
    "bin",
    "delimiter",
    "weighted",
];

/// Shared tuning flags accepted by `embed`, `bench` and `info`.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonOpts {
    /// Config file (`key = value` lines) applied over built-in defaults
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Walks started from each active vertex
    #[arg(long)]
    pub walks: Option<usize>,
    /// Maximum walk length in tokens
    #[arg(long)]
    pub walk_length: Option<usize>,
    /// Return parameter (weight 1/p for revisiting the previous vertex)
    #[arg(long)]
    pub p: Option<f64>,
    /// In-out parameter (weight 1/q for leaving the previous neighborhood)
    #[arg(long)]
    pub q: Option<f64>,
    /// Probability of staying in the current layer per step
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Run seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Respect edge direction within snapshots
    #[arg(long)]
    pub directed: bool,
    /// Drop walks shorter than this
    #[arg(long)]
    pub min_walk_length: Option<usize>,
    /// Transition-table strategy: precompute | on-the-fly | auto
    #[arg(long)]
    pub tables: Option<String>,
    /// Worker threads (walks always parallelize; training is
    /// bit-reproducible only with 1)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Embedding dimension
    #[arg(long)]
    pub dim: Option<usize>,
    /// Maximum distance between current and predicted token
    #[arg(long)]
    pub window: Option<usize>,
    /// Initial learning rate
    #[arg(long)]
    pub lr0: Option<f64>,
    /// Final learning rate of the linear decay
    #[arg(long)]
    pub lr_min: Option<f64>,
    /// Training epochs
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Negative samples per prediction
    #[arg(long)]
    pub negatives: Option<usize>,
    /// Training mode: pv-dbow | pv-dm
    #[arg(long)]
    pub mode: Option<String>,
    /// Exponent of the unigram noise distribution
    #[arg(long)]
    pub unigram_power: Option<f64>,
    /// Timestamp binning: as-is | width:<w> | quantile:<n>
    #[arg(long)]
    pub bin: Option<String>,
    /// Single-character column delimiter (default: any whitespace)
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Edge list has a fourth weight column
    #[arg(long)]
    pub weighted: bool,
}

/// Fully resolved pipeline configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub walk: WalkConfig,
    pub train: TrainConfig,
    pub bin: BinScheme,
    pub parse: ParseOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            // Walk generation is deterministic for any worker count and
            // defaults to the full pool; training defaults to one worker
            // for reproducibility.
            walk: WalkConfig { workers: 0, ..Default::default() },
            train: TrainConfig { workers: 1, ..Default::default() },
            bin: BinScheme::AsIs,
            parse: ParseOptions::default(),
        }
    }
}

fn parse_bin(value: &str) -> Result<BinScheme> {
    if value == "as-is" {
        return Ok(BinScheme::AsIs);
    }
    if let Some(w) = value.strip_prefix("width:") {
        return Ok(BinScheme::FixedWidth(w.parse().context("bad width")?));
    }
    if let Some(n) = value.strip_prefix("quantile:") {
        return Ok(BinScheme::Quantile(n.parse().context("bad quantile count")?));
    }
    bail!("unknown binning {value:?} (expected as-is | width:<w> | quantile:<n>)")
}

fn bin_to_string(bin: &BinScheme) -> String {
    match bin {
        BinScheme::AsIs => "as-is".into(),
        BinScheme::FixedWidth(w) => format!("width:{w}"),
        BinScheme::Quantile(n) => format!("quantile:{n}"),
    }
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "walks" => self.walk.walks_per_node = v.parse()?,
            "walk_length" => self.walk.walk_length = v.parse()?,
            "p" => self.walk.p = v.parse()?,
            "q" => self.walk.q = v.parse()?,
            "alpha" => self.walk.alpha = v.parse()?,
            "seed" => {
                self.walk.seed = v.parse()?;
                self.train.seed = self.walk.seed;
            }
            "directed" => self.walk.directed = v.parse()?,
            "min_walk_length" => self.walk.min_walk_length = v.parse()?,
            "tables" => self.walk.tables = v.parse::<TableMode>()?,
            "workers" => {
                let w: usize = v.parse()?;
                self.walk.workers = w;
                self.train.workers = w;
            }
            "dim" => self.train.dim = v.parse()?,
            "window" => self.train.window = v.parse()?,
            "lr0" => self.train.lr0 = v.parse()?,
            "lr_min" => self.train.lr_min = v.parse()?,
            "epochs" => self.train.epochs = v.parse()?,
            "negatives" => self.train.negatives = v.parse()?,
            "mode" => self.train.mode = v.parse::<TrainMode>()?,
            "unigram_power" => self.train.unigram_power = v.parse()?,
            "bin" => self.bin = parse_bin(v)?,
            "delimiter" => {
                let mut chars = v.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => self.parse.delimiter = Some(c),
                    _ => bail!("delimiter must be a single character, got {v:?}"),
                }
            }
            "weighted" => self.parse.has_weight = v.parse()?,
            other => bail!("unknown configuration key {other:?}"),
        }
        Ok(())
    }

    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected `key = value`", path.display(), lineno + 1))?;
            self.set(key.trim(), value)
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    fn apply_env(&mut self) -> Result<()> {
        for key in KEYS {
            let var = format!("{ENV_PREFIX}{}", key.to_uppercase());
            if let Ok(value) = std::env::var(&var) {
                self.set(key, &value).with_context(|| format!("environment variable {var}"))?;
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, opts: &CommonOpts) -> Result<()> {
        macro_rules! take {
            ($field:expr, $key:literal) => {
                if let Some(v) = &$field {
                    self.set($key, &v.to_string())?;
                }
            };
        }
        take!(opts.walks, "walks");
        take!(opts.walk_length, "walk_length");
        take!(opts.p, "p");
        take!(opts.q, "q");
        take!(opts.alpha, "alpha");
        take!(opts.seed, "seed");
        take!(opts.min_walk_length, "min_walk_length");
        take!(opts.tables, "tables");
        take!(opts.workers, "workers");
        take!(opts.dim, "dim");
        take!(opts.window, "window");
        take!(opts.lr0, "lr0");
        take!(opts.lr_min, "lr_min");
        take!(opts.epochs, "epochs");
        take!(opts.negatives, "negatives");
        take!(opts.mode, "mode");
        take!(opts.unigram_power, "unigram_power");
        take!(opts.bin, "bin");
        take!(opts.delimiter, "delimiter");
        // Boolean flags can only switch on; use the config file or
        // environment to force them off.
        if opts.directed {
            self.set("directed", "true")?;
        }
        if opts.weighted {
            self.set("weighted", "true")?;
        }
        Ok(())
    }

    /// Resolve the effective configuration for one command.
    pub fn resolve(defaults: RunConfig, opts: &CommonOpts) -> Result<RunConfig> {
        let mut cfg = defaults;
        if let Some(path) = &opts.config {
            cfg.apply_file(path)?;
        }
        cfg.apply_env()?;
        cfg.apply_flags(opts)?;
        Ok(cfg)
    }

    /// Every effective parameter, in config-file syntax.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("walks", self.walk.walks_per_node.to_string());
        kv("walk_length", self.walk.walk_length.to_string());
        kv("p", self.walk.p.to_string());
        kv("q", self.walk.q.to_string());
        kv("alpha", self.walk.alpha.to_string());
        kv("seed", self.walk.seed.to_string());
        kv("directed", self.walk.directed.to_string());
        kv("min_walk_length", self.walk.min_walk_length.to_string());
        kv(
            "tables",
            match self.walk.tables {
                TableMode::Precompute => "precompute".into(),
                TableMode::OnTheFly => "on-the-fly".into(),
                TableMode::Auto => "auto".into(),
            },
        );
        kv("workers", self.train.workers.to_string());
        kv("dim", self.train.dim.to_string());
        kv("window", self.train.window.to_string());
        kv("lr0", self.train.lr0.to_string());
        kv("lr_min", self.train.lr_min.to_string());
        kv("epochs", self.train.epochs.to_string());
        kv("negatives", self.train.negatives.to_string());
        kv(
            "mode",
            match self.train.mode {
                TrainMode::PvDbow => "pv-dbow".into(),
                TrainMode::PvDm => "pv-dm".into(),
            },
        );
        kv("unigram_power", self.train.unigram_power.to_string());
        kv("bin", bin_to_string(&self.bin));
        if let Some(d) = self.parse.delimiter {
            kv("delimiter", d.to_string());
        }
        kv("weighted", self.parse.has_weight.to_string());
        out
    }
}
