use std::ops::Index;

use rand::Rng;

use super::vocab::Token;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Absolute tolerance on the total mass of a distribution.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Categorical distribution over the `V` real tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<S> {
    probs: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    /// Validates nonnegativity and unit mass within [`NORMALIZATION_TOL`].
    pub fn new(probs: Vec<S>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::input("distribution must have at least one entry"));
        }
        let mut total = S::zero();
        for (i, p) in probs.iter().enumerate() {
            if *p < S::zero() || p.as_f64().is_nan() {
                return Err(Error::input(format!("probability {i} is {p:?}")));
            }
            total = total + p.clone();
        }
        if (total - S::one()).abs() > S::lit(NORMALIZATION_TOL) {
            return Err(Error::input(format!(
                "probabilities sum to {} (tolerance {NORMALIZATION_TOL})",
                Self::sum_of(&probs).as_f64()
            )));
        }
        Ok(Self { probs })
    }

    /// Scales nonnegative weights to unit mass.
    pub fn from_weights(weights: Vec<S>) -> Result<Self> {
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::input("negative weight"));
        }
        let total = Self::sum_of(&weights);
        if total.is_zero() {
            return Err(Error::input("weights sum to zero"));
        }
        let probs = weights.into_iter().map(|w| w / total.clone()).collect();
        Ok(Self { probs })
    }

    pub fn uniform(size: usize) -> Self {
        let p = S::one() / S::from_usize(size).expect("size fits scalar");
        Self { probs: vec![p; size] }
    }

    pub fn one_hot(size: usize, token: Token) -> Self {
        let mut probs = vec![S::zero(); size];
        probs[token as usize] = S::one();
        Self { probs }
    }

    fn sum_of(values: &[S]) -> S {
        values.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn prob(&self, token: Token) -> S {
        self.probs[token as usize].clone()
    }

    pub fn total(&self) -> S {
        Self::sum_of(&self.probs)
    }

    /// Re-expresses the distribution in another scalar type, renormalizing in
    /// the target type so the mass is exactly one where the type allows it.
    pub fn convert<T: Scalar>(&self) -> Distribution<T> {
        let weights: Vec<T> = self
            .probs
            .iter()
            .map(|p| T::from_f64(p.as_f64()).expect("finite probability"))
            .collect();
        Distribution::from_weights(weights).expect("converted distribution has mass")
    }

    /// Inverse-CDF draw with cumulative sums in token order.
    ///
    /// Consumes exactly one uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Token {
        let u = S::lit(rng.random::<f64>());
        let mut cumulative = S::zero();
        let mut last_positive = 0;
        for (i, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            last_positive = i;
            cumulative = cumulative + p.clone();
            if u < cumulative {
                return i as Token;
            }
        }
        // u landed in the rounding gap above the final cumulative sum
        last_positive as Token
    }

    /// Argmax with ties broken toward the lowest id.
    pub fn argmax(&self) -> Token {
        let mut best = 0;
        for (i, p) in self.probs.iter().enumerate().skip(1) {
            if *p > self.probs[best] {
                best = i;
            }
        }
        best as Token
    }
}

impl<S> Index<usize> for Distribution<S> {
    type Output = S;

    fn index(&self, index: usize) -> &S {
        &self.probs[index]
    }
}

/// Draws a token from `dist` by inverse CDF.
pub fn sample_token<S: Scalar, R: Rng + ?Sized>(dist: &Distribution<S>, rng: &mut R) -> Token {
    dist.sample(rng)
}

/// Highest-probability token, lowest id on ties.
pub fn greedy_token<S: Scalar>(dist: &Distribution<S>) -> Token {
    dist.argmax()
}
