use rand::Rng;

use super::acceptance::{accept_prob, residual_distribution};
use crate::drafting::DraftProposal;
use crate::error::{Error, Result};
use crate::model::{TabularModel, Token};
use crate::scalar::Scalar;

/// What happened to one drafted position.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionRecord<S> {
    pub k: usize,
    pub token: Token,
    /// Acceptance probability used (0 or 1 under greedy verification).
    pub accept_prob: S,
    /// Target probability of the drafted token at this position.
    pub target_prob: S,
    pub accepted: bool,
}

/// Result of one draft/verify round.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationOutcome<S> {
    pub accepted_len: usize,
    /// Accepted drafts followed by one correction or bonus token.
    pub committed: Vec<Token>,
    pub per_position: Vec<PositionRecord<S>>,
}

impl<S: Scalar> VerificationOutcome<S> {
    pub fn check_invariants(&self) -> Result<()> {
        if self.committed.len() != self.accepted_len + 1 {
            return Err(Error::Numeric("committed length must be accepted + 1".into()));
        }
        let trues = self.per_position.iter().take_while(|r| r.accepted).count();
        if trues != self.accepted_len || self.per_position[trues..].iter().any(|r| r.accepted) {
            return Err(Error::Numeric("accepted flags are not a contiguous prefix".into()));
        }
        Ok(())
    }
}

/// Speculative sampling: accept draft `k` with probability
/// `min(1, p_k / q_k)`, otherwise emit a token from the residual and stop.
///
/// Target rows are conditioned on `prefix ++ accepted drafts`. One uniform
/// is drawn per attempted position plus one for the final token.
pub fn verify_stochastic<S: Scalar, R: Rng + ?Sized>(
    target: &TabularModel<S>,
    prefix: &[Token],
    proposal: &DraftProposal<S>,
    rng: &mut R,
) -> Result<VerificationOutcome<S>> {
    proposal.validate()?;
    let mut context = prefix.to_vec();
    let mut per_position = Vec::with_capacity(proposal.len());
    for (k, (&token, q)) in proposal.tokens.iter().zip(&proposal.dists).enumerate() {
        let p = target.next_distribution(&context)?;
        let a = accept_prob(p, q, token)?;
        let u = S::lit(rng.random::<f64>());
        let accepted = u < a;
        per_position.push(PositionRecord { k, token, accept_prob: a, target_prob: p.prob(token), accepted });
        if !accepted {
            let correction = match residual_distribution(p, q) {
                Ok(r) => r.sample(rng),
                Err(Error::DegenerateResidual) => p.sample(rng),
                Err(e) => return Err(e),
            };
            let accepted_len = context.len() - prefix.len();
            context.push(correction);
            return Ok(VerificationOutcome {
                accepted_len,
                committed: context.split_off(prefix.len()),
                per_position,
            });
        }
        context.push(token);
    }
    let bonus = target.next_distribution(&context)?.sample(rng);
    context.push(bonus);
    Ok(VerificationOutcome { accepted_len: proposal.len(), committed: context.split_off(prefix.len()), per_position })
}

/// Temperature-0 verification: keep the longest prefix matching the
/// target's greedy continuation, then append the target's greedy token.
pub fn verify_greedy<S: Scalar>(
    target: &TabularModel<S>,
    prefix: &[Token],
    proposal: &DraftProposal<S>,
) -> Result<VerificationOutcome<S>> {
    proposal.validate()?;
    let mut context = prefix.to_vec();
    let mut per_position = Vec::with_capacity(proposal.len());
    for (k, &token) in proposal.tokens.iter().enumerate() {
        let p = target.next_distribution(&context)?;
        let best = p.argmax();
        let accepted = token == best;
        let a = if accepted { S::one() } else { S::zero() };
        per_position.push(PositionRecord { k, token, accept_prob: a, target_prob: p.prob(token), accepted });
        context.push(best);
        if !accepted {
            let accepted_len = context.len() - prefix.len() - 1;
            return Ok(VerificationOutcome { accepted_len, committed: context.split_off(prefix.len()), per_position });
        }
    }
    let bonus = target.next_distribution(&context)?.argmax();
    context.push(bonus);
    Ok(VerificationOutcome { accepted_len: proposal.len(), committed: context.split_off(prefix.len()), per_position })
}
