//! Single-pass masked drafting with optional target-feature conditioning.
//!
//! Position `k` of a proposal is predicted from the drafter context
//! `prefix ++ [feature] ++ mask^k`, truncated to the drafter order. The
//! feature slot is present only in target-dependent mode. No drafted token
//! ever enters a drafter context, so all `K` rows are independent lookups.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ContextKey, Distribution, Selection, Symbol, TabularModel, Token, Vocabulary};
use crate::scalar::Scalar;

/// Default draft length.
pub const DEFAULT_DRAFT_LEN: usize = 16;

/// Discrete stand-in for a target hidden-state feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Feature {
    symbol: Symbol,
}

impl Feature {
    pub fn of_token(vocab: &Vocabulary, token: Token) -> Self {
        Self { symbol: vocab.feature(token) }
    }

    pub fn none(vocab: &Vocabulary) -> Self {
        Self { symbol: vocab.none_feature() }
    }

    pub fn from_symbol(vocab: &Vocabulary, symbol: Symbol) -> Result<Self> {
        if vocab.is_feature(symbol) || symbol == vocab.none_feature() {
            Ok(Self { symbol })
        } else {
            Err(Error::input(format!("symbol {symbol} is not a feature")))
        }
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn is_none(&self, vocab: &Vocabulary) -> bool {
        self.symbol == vocab.none_feature()
    }
}

/// Training-time gate: the feature is dropped with probability `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    pub rho: f64,
}

impl GateConfig {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::input(format!("gate ratio must lie in [0, 1], got {rho}")));
        }
        Ok(Self { rho })
    }
}

/// Whether the drafter sees the target feature at inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DraftMode {
    Dependent,
    Independent,
}

/// How the `K` draft tokens are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DraftStrategy {
    /// One pass over masked contexts.
    #[default]
    Parallel,
    /// Token-by-token drafting conditioned on earlier drafts; the classic
    /// baseline, costing `K` drafter passes per round.
    Autoregressive,
}

/// `K` drafted tokens with the drafter rows they were drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct DraftProposal<S> {
    pub tokens: Vec<Token>,
    pub dists: Vec<Distribution<S>>,
    pub feature_used: Feature,
}

impl<S: Scalar> DraftProposal<S> {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tokens.len() != self.dists.len() || self.tokens.is_empty() {
            return Err(Error::input("proposal needs matching, nonempty tokens and rows"));
        }
        for (k, (&t, q)) in self.tokens.iter().zip(&self.dists).enumerate() {
            if t as usize >= q.len() || q.prob(t) <= S::zero() {
                return Err(Error::input(format!("draft token {t} at {k} has zero draft mass")));
            }
        }
        Ok(())
    }
}

/// Target's top-1 prediction after `prefix`, lifted into the feature range.
pub fn compute_feature<S: Scalar>(target: &TabularModel<S>, prefix: &[Token]) -> Result<Feature> {
    if prefix.is_empty() {
        return Err(Error::input("feature extraction needs a nonempty prefix"));
    }
    let top = target.next_distribution(prefix)?.argmax();
    Ok(Feature::of_token(&target.vocab(), top))
}

/// Replaces `feature` by the sentinel with probability `gate.rho`.
///
/// Always consumes one uniform variate; `rho = 0` and `rho = 1` are exact.
pub fn apply_gate<R: Rng + ?Sized>(
    vocab: &Vocabulary,
    feature: Feature,
    gate: GateConfig,
    rng: &mut R,
) -> Feature {
    let u: f64 = rng.random();
    if u < gate.rho {
        Feature::none(vocab)
    } else {
        feature
    }
}

/// Drafter keys for positions `0..k_len`.
pub fn draft_contexts(
    vocab: &Vocabulary,
    order: usize,
    prefix: &[Token],
    feature: Feature,
    k_len: usize,
) -> Vec<ContextKey> {
    let keep = prefix.len().min(order);
    let mut history: Vec<Symbol> = prefix[prefix.len() - keep..].to_vec();
    if !feature.is_none(vocab) {
        history.push(feature.symbol());
    }
    let mut keys = Vec::with_capacity(k_len);
    for _ in 0..k_len {
        keys.push(ContextKey::from_history(vocab, order, &history));
        history.push(vocab.mask());
    }
    keys
}

/// Parallel masked proposal of `k_len` tokens.
pub fn propose<S: Scalar, R: Rng + ?Sized>(
    drafter: &TabularModel<S>,
    prefix: &[Token],
    k_len: usize,
    feature: Feature,
    selection: Selection,
    rng: &mut R,
) -> Result<DraftProposal<S>> {
    if k_len == 0 {
        return Err(Error::input("draft length K must be at least 1"));
    }
    let vocab = drafter.vocab();
    for &t in prefix {
        vocab.check_token(t)?;
    }
    Feature::from_symbol(&vocab, feature.symbol())?;
    let dists: Vec<Distribution<S>> = draft_contexts(&vocab, drafter.order(), prefix, feature, k_len)
        .iter()
        .map(|key| drafter.lookup(key).clone())
        .collect();
    let tokens = dists.iter().map(|q| selection.pick(q, rng)).collect();
    Ok(DraftProposal { tokens, dists, feature_used: feature })
}

/// Autoregressive proposal: each draft conditions on the ones before it.
pub fn propose_autoregressive<S: Scalar, R: Rng + ?Sized>(
    drafter: &TabularModel<S>,
    prefix: &[Token],
    k_len: usize,
    selection: Selection,
    rng: &mut R,
) -> Result<DraftProposal<S>> {
    if k_len == 0 {
        return Err(Error::input("draft length K must be at least 1"));
    }
    let vocab = drafter.vocab();
    let mut history = prefix.to_vec();
    let mut dists = Vec::with_capacity(k_len);
    for _ in 0..k_len {
        let q = drafter.next_distribution(&history)?.clone();
        history.push(selection.pick(&q, rng));
        dists.push(q);
    }
    let tokens = history.split_off(prefix.len());
    Ok(DraftProposal { tokens, dists, feature_used: Feature::none(&vocab) })
}
