use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bench::{run_bench, BenchSettings, PromptSource};
use super::io::{derive_seed, format_sequences, parse_shape, read_sequences, write_text};
use super::report::{BenchReport, CostModel};
use crate::drafting::{DraftMode, DraftStrategy};
use crate::error::{Error, Result};
use crate::model::{format, make_synthetic_target, TabularModel};
use crate::training::{build_training_windows, sample_corpus, train_tabular_drafter, window_loss, TrainConfig};
use crate::verification::VerifyMode;

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::input(format!("bad value {value:?} for {key}")))
}

fn required(path: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    path.clone().ok_or_else(|| Error::input(format!("--{flag} is required")))
}

/// Applies `key = value` settings in order; later ones win.
pub trait Settings {
    /// Returns `false` for keys that are accepted but ignored.
    fn apply(&mut self, key: &str, value: &str) -> Result<bool>;

    fn apply_all(&mut self, pairs: &[(String, String)]) -> Result<()> {
        for (k, v) in pairs {
            if !self.apply(k, v)? {
                log::warn!("ignoring setting {k}: no gradient trainer");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenOptions {
    pub vocab: usize,
    pub order: usize,
    pub alpha: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub corpus: Option<(usize, usize)>,
    pub corpus_out: Option<PathBuf>,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self { vocab: 16, order: 2, alpha: 0.3, seed: 0, out: None, corpus: None, corpus_out: None }
    }
}

impl Settings for GenOptions {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool> {
        match key {
            "vocab" | "v" => self.vocab = parse(key, value)?,
            "order" | "d" => self.order = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = Some(value.into()),
            "corpus" => self.corpus = Some(parse_shape(value)?),
            "corpus_out" => self.corpus_out = Some(value.into()),
            _ => return Err(Error::input(format!("unknown gen setting {key:?}"))),
        }
        Ok(true)
    }
}

/// Writes a synthetic target and, if requested, a corpus sampled from it.
pub fn run_gen(opts: &GenOptions) -> Result<TabularModel<f64>> {
    let out = required(&opts.out, "out")?;
    if opts.corpus.is_some() != opts.corpus_out.is_some() {
        return Err(Error::input("--corpus and --corpus-out go together"));
    }
    let target = make_synthetic_target::<f64>(opts.seed, opts.vocab, opts.order, opts.alpha)?;
    format::save(&target, &out)?;
    if let (Some((n, len)), Some(path)) = (opts.corpus, &opts.corpus_out) {
        let corpus = sample_corpus(&target, n, len, derive_seed(opts.seed, 1))?;
        write_text(path, &format_sequences(&corpus))?;
    }
    Ok(target)
}

pub const DEFAULT_SAMPLE: (usize, usize) = (512, 64);

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub target: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Training sequences; sampled from the target when absent.
    pub corpus: Option<PathBuf>,
    pub sample: (usize, usize),
    /// Drafter order; target order + 1 when unset.
    pub draft_order: Option<usize>,
    pub config: TrainConfig,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            target: None,
            out: None,
            corpus: None,
            sample: DEFAULT_SAMPLE,
            draft_order: None,
            config: TrainConfig::default(),
        }
    }
}

impl Settings for TrainOptions {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool> {
        match key {
            "target" => self.target = Some(value.into()),
            "out" => self.out = Some(value.into()),
            "corpus" => self.corpus = Some(value.into()),
            "sample" => self.sample = parse_shape(value)?,
            "draft_order" => self.draft_order = Some(parse(key, value)?),
            "no_distill" => self.config.distill = !matches!(value.trim(), "true" | "1" | "yes" | "on"),
            _ => return self.config.apply(key, value),
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub windows: usize,
    /// `None` when some window has infinite loss.
    pub mean_loss: Option<f64>,
    pub drafter: TabularModel<f64>,
}

/// Trains a drafter against `target` on `sequences`. Window gating draws from
/// a stream derived from the config seed.
pub fn train_on(target: &TabularModel<f64>, sequences: &[Vec<u32>], config: &TrainConfig) -> Result<TrainSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 2));
    let windows = build_training_windows(target, sequences, config, &mut rng)?;
    let drafter = train_tabular_drafter(&windows, config)?;
    let mut total = 0.0;
    let mut mean_loss = Some(0.0);
    for w in &windows {
        match window_loss(&drafter, w, config) {
            Ok(l) => total += l,
            Err(Error::Numeric(msg)) => {
                log::warn!("{msg}");
                mean_loss = None;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if mean_loss.is_some() {
        mean_loss = Some(total / windows.len() as f64);
    }
    Ok(TrainSummary { windows: windows.len(), mean_loss, drafter })
}

pub fn run_train(opts: &TrainOptions) -> Result<TrainSummary> {
    let target_path = required(&opts.target, "target")?;
    let out = required(&opts.out, "out")?;
    opts.config.validate()?;
    let target = format::load::<f64>(&target_path)?;
    let mut config = opts.config.clone();
    config.draft_order = opts.draft_order.unwrap_or(target.order() + 1);
    config.validate()?;
    let sequences = match &opts.corpus {
        Some(path) => read_sequences(path)?,
        None => sample_corpus(&target, opts.sample.0, opts.sample.1, derive_seed(config.seed, 1))?,
    };
    let summary = train_on(&target, &sequences, &config)?;
    format::save(&summary.drafter, &out)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchOptions {
    pub target: Option<PathBuf>,
    pub drafter: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub positions_out: Option<PathBuf>,
    pub confidence_out: Option<PathBuf>,
    pub prompt_file: Option<PathBuf>,
    pub settings: BenchSettings,
}

fn parse_mode(value: &str) -> Result<DraftMode> {
    match value.trim() {
        "dependent" | "dep" => Ok(DraftMode::Dependent),
        "independent" | "ind" => Ok(DraftMode::Independent),
        other => Err(Error::input(format!("unknown mode {other:?}"))),
    }
}

fn parse_verify(value: &str) -> Result<VerifyMode> {
    match value.trim() {
        "stochastic" | "sample" => Ok(VerifyMode::Stochastic),
        "greedy" => Ok(VerifyMode::Greedy),
        other => Err(Error::input(format!("unknown verifier {other:?}"))),
    }
}

fn parse_strategy(value: &str) -> Result<DraftStrategy> {
    match value.trim() {
        "parallel" => Ok(DraftStrategy::Parallel),
        "autoregressive" | "ar" => Ok(DraftStrategy::Autoregressive),
        other => Err(Error::input(format!("unknown drafting strategy {other:?}"))),
    }
}

impl Settings for BenchOptions {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool> {
        let s = &mut self.settings;
        let (count, len, seed) = match &mut s.prompts {
            PromptSource::Sampled { count, len, seed } => (count, len, seed),
            PromptSource::File(_) => unreachable!("prompt file is stored separately"),
        };
        match key {
            "target" => self.target = Some(value.into()),
            "drafter" => self.drafter = Some(value.into()),
            "out" => self.out = Some(value.into()),
            "positions_out" => self.positions_out = Some(value.into()),
            "confidence_out" => self.confidence_out = Some(value.into()),
            "prompt_file" => self.prompt_file = Some(value.into()),
            "prompts" => *count = parse(key, value)?,
            "prompt_len" => *len = parse(key, value)?,
            "prompt_seed" => *seed = parse(key, value)?,
            "k" | "draft_length" => s.decode.k = parse(key, value)?,
            "mode" => s.decode.mode = parse_mode(value)?,
            "verify" => s.decode.verify = parse_verify(value)?,
            "drafting" => s.decode.strategy = parse_strategy(value)?,
            "max_tokens" => s.max_tokens = parse(key, value)?,
            "seed" => s.seed = parse(key, value)?,
            "draft_cost" => s.cost = CostModel::new(parse(key, value)?)?,
            _ => return Err(Error::input(format!("unknown bench setting {key:?}"))),
        }
        Ok(true)
    }
}

/// `report.json` -> `report.<suffix>.csv` next to it.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

pub fn run_bench_files(opts: &BenchOptions) -> Result<BenchReport> {
    let target = format::load::<f64>(&required(&opts.target, "target")?)?;
    let drafter = format::load::<f64>(&required(&opts.drafter, "drafter")?)?;
    let out = required(&opts.out, "out")?;
    let mut settings = opts.settings.clone();
    if let Some(path) = &opts.prompt_file {
        settings.prompts = PromptSource::File(path.clone());
    }
    let report = run_bench(&target, &drafter, &settings)?;
    write_text(&out, &report.to_json()?)?;
    let positions = opts.positions_out.clone().unwrap_or_else(|| sibling(&out, "positions"));
    let confidence = opts.confidence_out.clone().unwrap_or_else(|| sibling(&out, "confidence"));
    write_text(&positions, &report.positions_csv()?)?;
    write_text(&confidence, &report.confidence_csv()?)?;
    Ok(report)
}
