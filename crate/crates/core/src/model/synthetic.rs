//! Random targets with controllable entropy.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Gamma};

use super::distribution::Distribution;
use super::tabular::{ContextKey, TabularModel};
use super::vocab::{Symbol, Vocabulary};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric Dirichlet draw computed in log space.
///
/// For small concentrations the raw gamma variates underflow; using
/// `G(a) = G(a + 1) * U^(1/a)` keeps every component representable before
/// the final softmax.
pub fn sample_dirichlet<R: Rng + ?Sized>(alpha: f64, size: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::input(format!("concentration must be positive, got {alpha}")));
    }
    let gamma = Gamma::new(alpha + 1.0, 1.0).map_err(|e| Error::input(e.to_string()))?;
    let logs: Vec<f64> = (0..size)
        .map(|_| {
            let g: f64 = gamma.sample(rng);
            let u: f64 = rng.random::<f64>();
            // u in [0, 1); shift away from zero to keep the log finite
            g.ln() + (1.0 - u).ln() / alpha
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Every key whose real-token history is left-padded: `pad^j ++ tokens^(d-j)`.
pub fn real_contexts(vocab: &Vocabulary, order: usize) -> Vec<ContextKey> {
    let v = vocab.size() as Symbol;
    let mut keys = Vec::new();
    for pads in (0..=order).rev() {
        let free = order - pads;
        let count = (v as usize).pow(free as u32);
        for mut index in 0..count {
            let mut symbols = vec![vocab.pad(); order];
            for slot in (pads..order).rev() {
                symbols[slot] = (index % v as usize) as Symbol;
                index /= v as usize;
            }
            keys.push(ContextKey::from_symbols(symbols));
        }
    }
    keys
}

/// Target whose every real-token context row is an independent symmetric
/// Dirichlet(`alpha`) draw; unseen contexts fall back to uniform.
pub fn make_synthetic_target<S: Scalar>(
    seed: u64,
    vocab_size: usize,
    order: usize,
    alpha: f64,
) -> Result<TabularModel<S>> {
    if vocab_size < 2 {
        return Err(Error::input("synthetic targets need at least two tokens"));
    }
    if order == 0 {
        return Err(Error::input("order must be at least 1"));
    }
    let vocab = Vocabulary::new(vocab_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = BTreeMap::new();
    for key in real_contexts(&vocab, order) {
        let probs = sample_dirichlet(alpha, vocab_size, &mut rng)?;
        let probs = probs.into_iter().map(S::lit).collect();
        table.insert(key, Distribution::new(probs)?);
    }
    TabularModel::new(vocab, order, table, Distribution::uniform(vocab_size))
}
