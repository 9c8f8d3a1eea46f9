use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::distribution::Distribution;
use super::vocab::{Symbol, Token, Vocabulary};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fixed-width conditioning key, most recent symbol last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextKey(Vec<Symbol>);

impl ContextKey {
    /// The last `order` symbols of `history`, left-padded with the pad symbol.
    pub fn from_history(vocab: &Vocabulary, order: usize, history: &[Symbol]) -> Self {
        let take = history.len().min(order);
        let mut symbols = Vec::with_capacity(order);
        symbols.resize(order - take, vocab.pad());
        symbols.extend_from_slice(&history[history.len() - take..]);
        ContextKey(symbols)
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        ContextKey(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How a token is chosen from a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Greedy,
    Sample,
}

impl Selection {
    pub fn pick<S: Scalar, R: Rng + ?Sized>(self, dist: &Distribution<S>, rng: &mut R) -> Token {
        match self {
            Selection::Greedy => dist.argmax(),
            Selection::Sample => dist.sample(rng),
        }
    }
}

/// Exact finite-order conditional language model.
///
/// Immutable once built; lookups are total through the fallback row.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularModel<S> {
    order: usize,
    vocab: Vocabulary,
    table: BTreeMap<ContextKey, Distribution<S>>,
    fallback: Distribution<S>,
}

impl<S: Scalar> TabularModel<S> {
    pub fn new(
        vocab: Vocabulary,
        order: usize,
        table: BTreeMap<ContextKey, Distribution<S>>,
        fallback: Distribution<S>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::input("model order must be at least 1"));
        }
        let v = vocab.size();
        if fallback.len() != v {
            return Err(Error::Construction(format!(
                "fallback has {} entries, vocabulary has {v}",
                fallback.len()
            )));
        }
        for (key, dist) in &table {
            if key.len() != order {
                return Err(Error::Construction(format!(
                    "context {:?} has width {}, model order is {order}",
                    key.symbols(),
                    key.len()
                )));
            }
            for &s in key.symbols() {
                vocab.check_symbol(s)?;
            }
            if dist.len() != v {
                return Err(Error::Construction(format!(
                    "distribution for {:?} has {} entries, vocabulary has {v}",
                    key.symbols(),
                    dist.len()
                )));
            }
        }
        Ok(Self { order, vocab, table, fallback })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> Vocabulary {
        self.vocab
    }

    pub fn table(&self) -> &BTreeMap<ContextKey, Distribution<S>> {
        &self.table
    }

    pub fn fallback(&self) -> &Distribution<S> {
        &self.fallback
    }

    pub fn key_for(&self, context: &[Symbol]) -> ContextKey {
        ContextKey::from_history(&self.vocab, self.order, context)
    }

    /// Conditional distribution for the order-`d` suffix of `context`.
    pub fn next_distribution(&self, context: &[Symbol]) -> Result<&Distribution<S>> {
        let tail = &context[context.len().saturating_sub(self.order)..];
        for &s in tail {
            self.vocab.check_symbol(s)?;
        }
        Ok(self.lookup(&self.key_for(tail)))
    }

    pub fn lookup(&self, key: &ContextKey) -> &Distribution<S> {
        self.table.get(key).unwrap_or(&self.fallback)
    }

    /// True when some stored context carries a feature symbol.
    pub fn has_feature_contexts(&self) -> bool {
        self.table.keys().any(|k| k.symbols().iter().any(|&s| self.vocab.is_feature(s)))
    }

    /// Plain token-by-token generation; returns only the `n` new tokens.
    pub fn generate<R: Rng + ?Sized>(
        &self,
        prefix: &[Token],
        n: usize,
        selection: Selection,
        rng: &mut R,
    ) -> Result<Vec<Token>> {
        for &t in prefix {
            self.vocab.check_token(t)?;
        }
        let mut history = prefix.to_vec();
        for _ in 0..n {
            let next = selection.pick(self.next_distribution(&history)?, rng);
            history.push(next);
        }
        Ok(history.split_off(prefix.len()))
    }

    /// Same model in another scalar type.
    pub fn convert<T: Scalar>(&self) -> TabularModel<T> {
        TabularModel {
            order: self.order,
            vocab: self.vocab,
            table: self.table.iter().map(|(k, d)| (k.clone(), d.convert())).collect(),
            fallback: self.fallback.convert(),
        }
    }
}

/// Looks up the conditional distribution of `model` at `context`.
pub fn next_distribution<'m, S: Scalar>(
    model: &'m TabularModel<S>,
    context: &[Symbol],
) -> Result<&'m Distribution<S>> {
    model.next_distribution(context)
}

/// Autoregressive generation of `n` tokens after `prefix`.
pub fn generate_autoregressive<S: Scalar, R: Rng + ?Sized>(
    model: &TabularModel<S>,
    prefix: &[Token],
    n: usize,
    selection: Selection,
    rng: &mut R,
) -> Result<Vec<Token>> {
    model.generate(prefix, n, selection, rng)
}
