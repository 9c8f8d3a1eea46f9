//! Per-position loss weights.

use crate::error::{Error, Result};
use crate::model::{TabularModel, Token};
use crate::scalar::Scalar;

/// Confidences are clamped to `[CONFIDENCE_FLOOR, 1]` before forming
/// products so a single zero cannot collapse a whole window to weight zero.
pub const CONFIDENCE_FLOOR: f64 = 1e-12;

/// Confidence proxies and the cumulative weights built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct CatWeights<S> {
    /// Clamped target confidences `c_0 .. c_{K-1}`.
    pub confidences: Vec<S>,
    /// Loss weights `s_0 .. s_{K-1}`.
    pub weights: Vec<S>,
}

/// Teacher-forced target probability of each of the `k_len` ground-truth
/// tokens following position `n`.
pub fn target_confidences<S: Scalar>(
    target: &TabularModel<S>,
    sequence: &[Token],
    n: usize,
    k_len: usize,
) -> Result<Vec<S>> {
    if n + k_len > sequence.len() {
        return Err(Error::input(format!(
            "window [{n}, {}) exceeds sequence of length {}",
            n + k_len,
            sequence.len()
        )));
    }
    (n..n + k_len)
        .map(|i| Ok(target.next_distribution(&sequence[..i])?.prob(sequence[i])))
        .collect()
}

/// `s_0 = 1`, `s_{k+1} = s_k * c_k` over the clamped confidences.
pub fn cat_weights<S: Scalar>(confidences: &[S]) -> CatWeights<S> {
    let floor = S::lit(CONFIDENCE_FLOOR);
    let confidences: Vec<S> =
        confidences.iter().map(|c| S::max_of(floor.clone(), S::min_of(S::one(), c.clone()))).collect();
    let mut weights = Vec::with_capacity(confidences.len());
    let mut run = S::one();
    for c in &confidences {
        weights.push(run.clone());
        run = run * c.clone();
    }
    CatWeights { confidences, weights }
}

/// Fixed position decay `gamma^k`, built by repeated multiplication.
pub fn decay_weights<S: Scalar>(gamma: S, k_len: usize) -> Result<Vec<S>> {
    if !(gamma > S::zero() && gamma <= S::one()) {
        return Err(Error::input(format!("decay rate must lie in (0, 1], got {gamma:?}")));
    }
    let mut weights = Vec::with_capacity(k_len);
    let mut run = S::one();
    for _ in 0..k_len {
        weights.push(run.clone());
        run = run * gamma.clone();
    }
    Ok(weights)
}
