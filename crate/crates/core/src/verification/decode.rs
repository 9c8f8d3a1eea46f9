use rand::Rng;
use serde::{Deserialize, Serialize};

use super::verify::{verify_greedy, verify_stochastic, VerificationOutcome};
use crate::drafting::{compute_feature, propose, propose_autoregressive, DraftMode, DraftProposal, DraftStrategy, Feature};
use crate::error::{Error, Result};
use crate::model::{Selection, TabularModel, Token};
use crate::scalar::Scalar;

/// Equal-width confidence bins on `[0, 1]`.
pub const CONFIDENCE_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Stochastic,
    Greedy,
}

impl VerifyMode {
    /// Drafts are sampled under stochastic verification, argmax otherwise.
    pub fn draft_selection(self) -> Selection {
        match self {
            VerifyMode::Stochastic => Selection::Sample,
            VerifyMode::Greedy => Selection::Greedy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub k: usize,
    pub mode: DraftMode,
    pub verify: VerifyMode,
    #[serde(default)]
    pub strategy: DraftStrategy,
}

impl DecodeConfig {
    pub fn new(k: usize, mode: DraftMode, verify: VerifyMode) -> Self {
        Self { k, mode, verify, strategy: DraftStrategy::Parallel }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionStat {
    pub k: usize,
    pub attempts: u64,
    pub accepts: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinStat {
    pub lo: f64,
    pub hi: f64,
    pub attempts: u64,
    pub accepts: u64,
}

/// Aggregate acceptance statistics over one or more generations.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeTrace {
    pub steps: u64,
    pub accepted_per_step: Vec<usize>,
    pub position_stats: Vec<PositionStat>,
    pub confidence_bins: Vec<BinStat>,
    pub total_tokens: u64,
}

/// JSON form of a [`DecodeTrace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub steps: u64,
    pub tau: f64,
    pub committed_per_step: f64,
    pub position_stats: Vec<PositionStat>,
    pub confidence_bins: Vec<BinStat>,
    pub total_tokens: u64,
}

impl DecodeTrace {
    pub fn new(k: usize) -> Self {
        let width = 1.0 / CONFIDENCE_BINS as f64;
        Self {
            steps: 0,
            accepted_per_step: Vec::new(),
            position_stats: (0..k).map(|k| PositionStat { k, ..Default::default() }).collect(),
            confidence_bins: (0..CONFIDENCE_BINS)
                .map(|b| BinStat { lo: b as f64 * width, hi: (b + 1) as f64 * width, attempts: 0, accepts: 0 })
                .collect(),
            total_tokens: 0,
        }
    }

    pub fn bin_index(target_prob: f64) -> usize {
        ((target_prob * CONFIDENCE_BINS as f64) as usize).min(CONFIDENCE_BINS - 1)
    }

    pub fn record<S: Scalar>(&mut self, outcome: &VerificationOutcome<S>, with_confidence: bool) {
        self.steps += 1;
        self.accepted_per_step.push(outcome.accepted_len);
        self.total_tokens += outcome.committed.len() as u64;
        for r in &outcome.per_position {
            let stat = &mut self.position_stats[r.k];
            stat.attempts += 1;
            stat.accepts += u64::from(r.accepted);
            if with_confidence {
                let bin = &mut self.confidence_bins[Self::bin_index(r.target_prob.as_f64())];
                bin.attempts += 1;
                bin.accepts += u64::from(r.accepted);
            }
        }
    }

    /// Adds `other` into `self`; counts are plain sums.
    pub fn merge(&mut self, other: &DecodeTrace) -> Result<()> {
        if other.position_stats.len() != self.position_stats.len() {
            return Err(Error::input("cannot merge traces with different draft lengths"));
        }
        self.steps += other.steps;
        self.accepted_per_step.extend_from_slice(&other.accepted_per_step);
        self.total_tokens += other.total_tokens;
        for (a, b) in self.position_stats.iter_mut().zip(&other.position_stats) {
            a.attempts += b.attempts;
            a.accepts += b.accepts;
        }
        for (a, b) in self.confidence_bins.iter_mut().zip(&other.confidence_bins) {
            a.attempts += b.attempts;
            a.accepts += b.accepts;
        }
        Ok(())
    }

    /// Mean accepted drafts per round, bonus/correction excluded.
    pub fn tau(&self) -> f64 {
        if self.steps == 0 {
            return 0.0;
        }
        self.accepted_per_step.iter().sum::<usize>() as f64 / self.steps as f64
    }

    pub fn committed_per_step(&self) -> f64 {
        if self.steps == 0 {
            return 0.0;
        }
        self.total_tokens as f64 / self.steps as f64
    }

    pub fn check_invariants(&self) -> Result<()> {
        let accepted: u64 = self.accepted_per_step.iter().map(|&a| a as u64).sum();
        if accepted + self.steps != self.total_tokens {
            return Err(Error::Numeric(format!(
                "token accounting: {accepted} accepted + {} steps != {} tokens",
                self.steps, self.total_tokens
            )));
        }
        if self.position_stats.windows(2).any(|w| w[1].attempts > w[0].attempts) {
            return Err(Error::Numeric("position attempts increase with k".into()));
        }
        Ok(())
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            steps: self.steps,
            tau: self.tau(),
            committed_per_step: self.committed_per_step(),
            position_stats: self.position_stats.clone(),
            confidence_bins: self.confidence_bins.clone(),
            total_tokens: self.total_tokens,
        }
    }
}

impl Serialize for DecodeTrace {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.summary().serialize(serializer)
    }
}

/// One drafting pass from the committed `context`.
///
/// The target is consulted only for the dependent-mode feature; the
/// independent and autoregressive paths never touch it.
pub fn draft_round<S: Scalar, R: Rng + ?Sized>(
    target: &TabularModel<S>,
    drafter: &TabularModel<S>,
    context: &[Token],
    config: &DecodeConfig,
    rng: &mut R,
) -> Result<DraftProposal<S>> {
    let selection = config.verify.draft_selection();
    match config.strategy {
        DraftStrategy::Autoregressive => propose_autoregressive(drafter, context, config.k, selection, rng),
        DraftStrategy::Parallel => {
            let feature = match config.mode {
                DraftMode::Dependent => compute_feature(target, context)?,
                DraftMode::Independent => Feature::none(&drafter.vocab()),
            };
            propose(drafter, context, config.k, feature, selection, rng)
        }
    }
}

/// Draft/verify until at least `max_tokens` are committed. Returns the new
/// tokens truncated to `max_tokens`; the trace keeps every round in full.
pub fn decode_loop<S: Scalar, R: Rng + ?Sized>(
    target: &TabularModel<S>,
    drafter: &TabularModel<S>,
    prompt: &[Token],
    max_tokens: usize,
    config: &DecodeConfig,
    rng: &mut R,
) -> Result<(Vec<Token>, DecodeTrace)> {
    if prompt.is_empty() {
        return Err(Error::input("prompt must be nonempty"));
    }
    if config.k == 0 {
        return Err(Error::input("draft length K must be at least 1"));
    }
    if target.vocab() != drafter.vocab() {
        return Err(Error::input("target and drafter vocabularies differ"));
    }
    let mut context = prompt.to_vec();
    let mut trace = DecodeTrace::new(config.k);
    let with_confidence = config.verify == VerifyMode::Stochastic;
    while context.len() - prompt.len() < max_tokens {
        let proposal = draft_round(target, drafter, &context, config, rng)?;
        let outcome = match config.verify {
            VerifyMode::Stochastic => verify_stochastic(target, &context, &proposal, rng)?,
            VerifyMode::Greedy => verify_greedy(target, &context, &proposal)?,
        };
        trace.record(&outcome, with_confidence);
        context.extend_from_slice(&outcome.committed);
    }
    let mut generated = context.split_off(prompt.len());
    generated.truncate(max_tokens);
    Ok((generated, trace))
}
