use super::config::TrainConfig;
use super::window::{check_window, TrainingWindow};
use crate::drafting::draft_contexts;
use crate::error::{Error, Result};
use crate::model::{Distribution, TabularModel, Token};
use crate::scalar::Real;

fn infinite(what: &str, k: usize) -> Error {
    Error::Numeric(format!("loss overflow: drafter assigns zero mass in {what} term at position {k}"))
}

/// `-ln q(y)`.
pub fn cross_entropy<S: Real>(q: &Distribution<S>, y: Token) -> Option<S> {
    let qy = q.prob(y);
    (qy > S::zero()).then(|| -qy.ln())
}

/// Forward divergence `KL(p || q)`.
pub fn kl_divergence<S: Real>(p: &Distribution<S>, q: &Distribution<S>) -> Option<S> {
    let mut total = S::zero();
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > S::zero() {
            if qi <= S::zero() {
                return None;
            }
            total = total + pi * (pi / qi).ln();
        }
    }
    Some(total)
}

/// `sum_k s_k (beta CE_k + KD_k)` for the drafter rows selected by the
/// window's masked contexts. Weights are constants.
pub fn window_loss<S: Real>(
    drafter: &TabularModel<S>,
    window: &TrainingWindow<'_, S>,
    config: &TrainConfig,
) -> Result<S> {
    let vocab = drafter.vocab();
    check_window(window, vocab.size())?;
    let beta = S::lit(config.beta);
    let keys = draft_contexts(&vocab, drafter.order(), &window.prefix, window.feature, window.len());
    let mut total = S::zero();
    for (k, key) in keys.iter().enumerate() {
        let weight = window.weights.weights[k];
        if weight == S::zero() {
            continue;
        }
        let q = drafter.lookup(key);
        let mut term = S::zero();
        if beta > S::zero() {
            term = term + beta * cross_entropy(q, window.future_tokens[k]).ok_or_else(|| infinite("CE", k))?;
        }
        if config.distill {
            term = term + kl_divergence(window.target_dists[k], q).ok_or_else(|| infinite("KD", k))?;
        }
        total = total + weight * term;
    }
    Ok(total)
}
