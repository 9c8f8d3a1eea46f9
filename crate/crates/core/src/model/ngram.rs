//! Add-k smoothed n-gram estimation.

use std::collections::BTreeMap;

use super::distribution::Distribution;
use super::tabular::{ContextKey, TabularModel};
use super::vocab::{Symbol, Token, Vocabulary};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Count accumulator over `(history, next token)` events.
///
/// Histories may contain any symbol of the extended space, so the same
/// counter estimates plain n-gram models and models over mask-rewritten
/// histories.
#[derive(Debug, Clone)]
pub struct NgramCounter<S> {
    vocab: Vocabulary,
    order: usize,
    counts: BTreeMap<ContextKey, (Vec<S>, S)>,
    unigram: Vec<S>,
    events: S,
}

impl<S: Scalar> NgramCounter<S> {
    pub fn new(vocab: Vocabulary, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::input("order must be at least 1"));
        }
        Ok(Self {
            vocab,
            order,
            counts: BTreeMap::new(),
            unigram: vec![S::zero(); vocab.size()],
            events: S::zero(),
        })
    }

    /// Counts one occurrence of `next` after `history`.
    pub fn observe(&mut self, history: &[Symbol], next: Token) -> Result<()> {
        self.vocab.check_token(next)?;
        let tail = &history[history.len().saturating_sub(self.order)..];
        for &s in tail {
            self.vocab.check_symbol(s)?;
        }
        let key = ContextKey::from_history(&self.vocab, self.order, tail);
        let v = self.vocab.size();
        let (row, total) = self.counts.entry(key).or_insert_with(|| (vec![S::zero(); v], S::zero()));
        row[next as usize] = row[next as usize].clone() + S::one();
        *total = total.clone() + S::one();
        self.unigram[next as usize] = self.unigram[next as usize].clone() + S::one();
        self.events = self.events.clone() + S::one();
        Ok(())
    }

    /// Counts every position of a real-token sequence.
    pub fn observe_sequence(&mut self, sequence: &[Token]) -> Result<()> {
        for i in 0..sequence.len() {
            self.observe(&sequence[..i], sequence[i])?;
        }
        Ok(())
    }

    /// `(count(c, y) + k) / (count(c) + k V)` per observed context, with the
    /// add-k unigram as fallback.
    pub fn finish(self, smoothing: S) -> Result<TabularModel<S>> {
        if smoothing.is_negative() {
            return Err(Error::input("smoothing constant must be nonnegative"));
        }
        if self.events.is_zero() && smoothing.is_zero() {
            return Err(Error::Construction(
                "empty corpus with zero smoothing defines no distribution".into(),
            ));
        }
        let kv = smoothing.clone() * S::from_usize(self.vocab.size()).expect("V fits scalar");
        let normalize = |row: Vec<S>, total: S| -> Result<Distribution<S>> {
            let denom = total + kv.clone();
            Distribution::new(row.into_iter().map(|c| (c + smoothing.clone()) / denom.clone()).collect())
        };
        let mut table = BTreeMap::new();
        for (key, (row, total)) in self.counts {
            table.insert(key, normalize(row, total)?);
        }
        let fallback = normalize(self.unigram, self.events)?;
        TabularModel::new(self.vocab, self.order, table, fallback)
    }
}

/// Add-k n-gram model of order `order` over a corpus of real-token sequences.
pub fn build_ngram_model<S: Scalar>(
    corpus: &[Vec<Token>],
    vocab: Vocabulary,
    order: usize,
    smoothing: S,
) -> Result<TabularModel<S>> {
    let mut counter = NgramCounter::new(vocab, order)?;
    for seq in corpus {
        counter.observe_sequence(seq)?;
    }
    counter.finish(smoothing)
}
