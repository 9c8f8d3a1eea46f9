//! Acceptance-rule arithmetic.

use crate::error::{Error, Result};
use crate::model::{Distribution, Token};
use crate::scalar::Scalar;

/// `min(1, p[token] / q[token])`.
pub fn accept_prob<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>, token: Token) -> Result<S> {
    let (pt, qt) = (p.prob(token), q.prob(token));
    if qt <= S::zero() {
        return Err(Error::input(format!("draft assigns zero mass to proposed token {token}")));
    }
    Ok(S::min_of(S::one(), pt / qt))
}

/// `normalize(max(0, p - q))`; [`Error::DegenerateResidual`] when `p <= q`
/// everywhere.
pub fn residual_distribution<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Result<Distribution<S>> {
    if p.len() != q.len() {
        return Err(Error::input("residual of distributions with different supports"));
    }
    let excess: Vec<S> = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| S::max_of(S::zero(), a.clone() - b.clone()))
        .collect();
    if excess.iter().all(|e| e.is_zero()) {
        return Err(Error::DegenerateResidual);
    }
    Distribution::from_weights(excess)
}

/// Expected number of accepted drafts, `sum_k prod_{j<=k} a_j`.
pub fn expected_accept_length<S: Scalar>(accept: &[S]) -> S {
    let mut run = S::one();
    let mut total = S::zero();
    for a in accept {
        run = run * a.clone();
        total = total + run.clone();
    }
    total
}

/// Reach probabilities `s_0 = 1`, `s_k = prod_{j<k} a_j`.
pub fn prefix_reach_probs<S: Scalar>(accept: &[S]) -> Vec<S> {
    let mut reach = Vec::with_capacity(accept.len());
    let mut run = S::one();
    for a in accept {
        reach.push(run.clone());
        run = run * a.clone();
    }
    reach
}
