//! Closed-form minimizer of the summed window loss over tabular drafters.
//!
//! For one drafter context `c` the loss restricted to rows at `c` is
//! `-sum_y W(c, y) ln q_c(y)` plus a constant, with soft counts
//! `W(c, y) = sum s_k (beta [y = y_k] + distill * p_k(y))`. It is minimized by
//! `q_c = W(c, .) / sum W(c, .)`; add-k smoothing is applied on top.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::config::TrainConfig;
use super::window::{check_window, TrainingWindow};
use crate::drafting::draft_contexts;
use crate::error::{Error, Result};
use crate::model::{ContextKey, Distribution, TabularModel, Vocabulary};
use crate::scalar::Scalar;

/// Windows per accumulation shard. Fixed so results do not depend on the
/// thread count.
const SHARD: usize = 2048;

type SoftCounts<S> = BTreeMap<ContextKey, Vec<S>>;

fn accumulate<S: Scalar>(
    windows: &[TrainingWindow<'_, S>],
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<SoftCounts<S>> {
    let v = vocab.size();
    let beta = S::lit(config.beta);
    let mut counts = SoftCounts::new();
    for window in windows {
        check_window(window, v)?;
        let keys = draft_contexts(vocab, config.draft_order, &window.prefix, window.feature, window.len());
        for (k, key) in keys.into_iter().enumerate() {
            let weight = window.weights.weights[k].clone();
            let row = counts.entry(key).or_insert_with(|| vec![S::zero(); v]);
            let y = window.future_tokens[k] as usize;
            row[y] = row[y].clone() + weight.clone() * beta.clone();
            if config.distill {
                for (cell, p) in row.iter_mut().zip(window.target_dists[k].probs()) {
                    *cell = cell.clone() + weight.clone() * p.clone();
                }
            }
        }
    }
    Ok(counts)
}

fn merge<S: Scalar>(into: &mut SoftCounts<S>, from: SoftCounts<S>) {
    for (key, row) in from {
        match into.get_mut(&key) {
            Some(acc) => {
                for (a, b) in acc.iter_mut().zip(row) {
                    *a = a.clone() + b;
                }
            }
            None => {
                into.insert(key, row);
            }
        }
    }
}

/// Trains a drafter of order `config.draft_order` from `windows`.
pub fn train_tabular_drafter<S: Scalar>(
    windows: &[TrainingWindow<'_, S>],
    config: &TrainConfig,
) -> Result<TabularModel<S>> {
    config.validate()?;
    let first = windows.first().ok_or_else(|| Error::Construction("no training windows".into()))?;
    let vocab = Vocabulary::new(first.target_dists.first().map_or(0, |d| d.len()))?;
    let v = vocab.size();

    let shards = windows
        .par_chunks(SHARD)
        .map(|chunk| accumulate(chunk, &vocab, config))
        .collect::<Result<Vec<_>>>()?;
    let mut counts = SoftCounts::new();
    for shard in shards {
        merge(&mut counts, shard);
    }

    let smoothing = S::lit(config.smoothing);
    let kv = smoothing.clone() * S::from_usize(v).expect("V fits scalar");
    let normalize = |row: Vec<S>| -> Option<Result<Distribution<S>>> {
        let total = row.iter().cloned().fold(S::zero(), |a, b| a + b);
        let denom = total + kv.clone();
        if denom.is_zero() {
            return None;
        }
        Some(Distribution::new(row.into_iter().map(|w| (w + smoothing.clone()) / denom.clone()).collect()))
    };

    let mut unigram = vec![S::zero(); v];
    let mut table = BTreeMap::new();
    for (key, row) in counts {
        for (u, w) in unigram.iter_mut().zip(&row) {
            *u = u.clone() + w.clone();
        }
        if let Some(dist) = normalize(row) {
            table.insert(key, dist?);
        }
    }
    let fallback = match normalize(unigram) {
        Some(dist) => dist?,
        None => Distribution::uniform(v),
    };
    TabularModel::new(vocab, config.draft_order, table, fallback)
}
