use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{TrainConfig, Weighting};
use super::weights::{cat_weights, decay_weights, CatWeights};
use crate::drafting::{apply_gate, compute_feature, Feature, GateConfig};
use crate::error::{Error, Result};
use crate::model::{Distribution, Selection, TabularModel, Token};
use crate::scalar::Scalar;

/// One `(prefix, next K tokens)` training example. Target rows are borrowed
/// from the target model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingWindow<'a, S> {
    /// Trailing prefix tokens, at most the drafter order of them.
    pub prefix: Vec<Token>,
    pub future_tokens: Vec<Token>,
    pub target_dists: Vec<&'a Distribution<S>>,
    /// Feature after gating.
    pub feature: Feature,
    pub weights: CatWeights<S>,
}

impl<S: Scalar> TrainingWindow<'_, S> {
    pub fn len(&self) -> usize {
        self.future_tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.future_tokens.is_empty()
    }
}

/// Sequences sampled from the target itself, starting from an empty history.
pub fn sample_corpus<S: Scalar>(
    target: &TabularModel<S>,
    n_seqs: usize,
    len: usize,
    seed: u64,
) -> Result<Vec<Vec<Token>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_seqs).map(|_| target.generate(&[], len, Selection::Sample, &mut rng)).collect()
}

/// Slides a length-`K` window with stride 1 over every sequence, starting
/// after the first token. Sequences shorter than `K + 1` are skipped.
pub fn build_training_windows<'a, S: Scalar, R: Rng + ?Sized>(
    target: &'a TabularModel<S>,
    sequences: &[Vec<Token>],
    config: &TrainConfig,
    rng: &mut R,
) -> Result<Vec<TrainingWindow<'a, S>>> {
    config.validate()?;
    let vocab = target.vocab();
    let gate = GateConfig::new(config.rho)?;
    let k_len = config.k;
    let fixed = match config.weighting {
        Weighting::Uniform => Some(vec![S::one(); k_len]),
        Weighting::Decay(gamma) => Some(decay_weights(S::lit(gamma), k_len)?),
        Weighting::Cat => None,
    };
    let mut windows = Vec::new();
    for seq in sequences {
        for &t in seq {
            vocab.check_token(t)?;
        }
        if seq.len() < k_len + 1 {
            continue;
        }
        for n in 1..=seq.len() - k_len {
            let target_dists = (n..n + k_len)
                .map(|i| target.next_distribution(&seq[..i]))
                .collect::<Result<Vec<_>>>()?;
            let confidences: Vec<S> =
                target_dists.iter().zip(&seq[n..n + k_len]).map(|(d, &y)| d.prob(y)).collect();
            let mut weights = cat_weights(&confidences);
            if let Some(fixed) = &fixed {
                weights.weights.clone_from(fixed);
            }
            let feature = apply_gate(&vocab, compute_feature(target, &seq[..n])?, gate, rng);
            windows.push(TrainingWindow {
                prefix: seq[n.saturating_sub(config.draft_order)..n].to_vec(),
                future_tokens: seq[n..n + k_len].to_vec(),
                target_dists,
                feature,
                weights,
            });
        }
    }
    if windows.is_empty() && sequences.iter().any(|s| !s.is_empty()) {
        log::warn!("no sequence is longer than K = {k_len}; no training windows");
    }
    Ok(windows)
}

pub(crate) fn check_window<S: Scalar>(window: &TrainingWindow<'_, S>, v: usize) -> Result<()> {
    let k = window.future_tokens.len();
    if window.target_dists.len() != k || window.weights.weights.len() != k || k == 0 {
        return Err(Error::input("window fields have inconsistent lengths"));
    }
    if window.target_dists.iter().any(|d| d.len() != v) {
        return Err(Error::input("target row width differs from the vocabulary"));
    }
    Ok(())
}
