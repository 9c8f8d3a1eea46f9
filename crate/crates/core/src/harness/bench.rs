use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::io::{derive_seed, read_sequences};
use super::report::{BenchEcho, BenchReport, CostModel};
use crate::drafting::{DraftMode, DraftStrategy, DEFAULT_DRAFT_LEN};
use crate::error::{Error, Result};
use crate::model::{Selection, TabularModel, Token};
use crate::scalar::Scalar;
use crate::verification::{decode_loop, DecodeConfig, DecodeTrace, VerifyMode};

/// Where benchmark prompts come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PromptSource {
    /// `count` prompts of `len` tokens sampled from the target.
    Sampled { count: usize, len: usize, seed: u64 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSettings {
    pub decode: DecodeConfig,
    pub prompts: PromptSource,
    pub max_tokens: usize,
    pub seed: u64,
    pub cost: CostModel,
}

pub const DEFAULT_PROMPTS: usize = 64;
pub const DEFAULT_PROMPT_LEN: usize = 8;
pub const DEFAULT_PROMPT_SEED: u64 = 0x70_72_6f_6d_70_74;
pub const DEFAULT_MAX_TOKENS: usize = 256;

impl Default for BenchSettings {
    fn default() -> Self {
        Self {
            decode: DecodeConfig::new(DEFAULT_DRAFT_LEN, DraftMode::Dependent, VerifyMode::Stochastic),
            prompts: PromptSource::Sampled { count: DEFAULT_PROMPTS, len: DEFAULT_PROMPT_LEN, seed: DEFAULT_PROMPT_SEED },
            max_tokens: DEFAULT_MAX_TOKENS,
            seed: 0,
            cost: CostModel::default(),
        }
    }
}

pub fn load_prompts<S: Scalar>(target: &TabularModel<S>, source: &PromptSource) -> Result<Vec<Vec<Token>>> {
    let prompts = match source {
        PromptSource::Sampled { count, len, seed } => {
            if *len == 0 {
                return Err(Error::input("prompt length must be at least 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*count).map(|_| target.generate(&[], *len, Selection::Sample, &mut rng)).collect::<Result<_>>()?
        }
        PromptSource::File(path) => read_sequences(path)?,
    };
    if prompts.is_empty() {
        return Err(Error::input("no prompts"));
    }
    let vocab = target.vocab();
    for p in &prompts {
        if p.is_empty() {
            return Err(Error::input("empty prompt"));
        }
        for &t in p {
            vocab.check_token(t)?;
        }
    }
    Ok(prompts)
}

/// Decodes every prompt (in parallel; each with its own derived seed) and
/// merges the traces in prompt order.
pub fn run_prompts<S: Scalar>(
    target: &TabularModel<S>,
    drafter: &TabularModel<S>,
    prompts: &[Vec<Token>],
    max_tokens: usize,
    config: &DecodeConfig,
    seed: u64,
) -> Result<DecodeTrace> {
    let traces = prompts
        .par_iter()
        .enumerate()
        .map(|(i, prompt)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            decode_loop(target, drafter, prompt, max_tokens, config, &mut rng).map(|(_, trace)| trace)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = DecodeTrace::new(config.k);
    for t in &traces {
        total.merge(t)?;
    }
    total.check_invariants()?;
    Ok(total)
}

pub fn run_bench<S: Scalar>(
    target: &TabularModel<S>,
    drafter: &TabularModel<S>,
    settings: &BenchSettings,
) -> Result<BenchReport> {
    let decode = &settings.decode;
    if decode.mode == DraftMode::Dependent
        && decode.strategy == DraftStrategy::Parallel
        && !drafter.has_feature_contexts()
    {
        log::warn!("dependent mode requested but the drafter has no feature contexts; it never saw features in training");
    }
    let prompts = load_prompts(target, &settings.prompts)?;
    let trace = run_prompts(target, drafter, &prompts, settings.max_tokens, decode, settings.seed)?;
    let (prompt_len, prompt_source) = match &settings.prompts {
        PromptSource::Sampled { len, seed, .. } => (*len, format!("sampled(seed={seed})")),
        PromptSource::File(_) => (prompts.iter().map(Vec::len).max().unwrap_or(0), "file".to_string()),
    };
    let echo = BenchEcho {
        vocab: target.vocab().size(),
        target_order: target.order(),
        drafter_order: drafter.order(),
        k: decode.k,
        mode: decode.mode,
        verify: decode.verify,
        drafting: decode.strategy,
        prompts: prompts.len(),
        prompt_len,
        prompt_source,
        max_tokens: settings.max_tokens,
        seed: settings.seed,
        draft_cost_per_pass: settings.cost.draft_cost,
    };
    let report = BenchReport::from_trace(&trace, &settings.cost, echo);
    report.check_invariants()?;
    Ok(report)
}
