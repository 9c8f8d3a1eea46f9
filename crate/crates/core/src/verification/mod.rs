//! Lossless verification, the decode loop and acceptance-length algebra.

mod acceptance;
mod decode;
mod verify;

pub use acceptance::{accept_prob, expected_accept_length, prefix_reach_probs, residual_distribution};
pub use decode::{
    decode_loop, draft_round, BinStat, DecodeConfig, DecodeTrace, PositionStat, TraceSummary, VerifyMode,
    CONFIDENCE_BINS,
};
pub use verify::{verify_greedy, verify_stochastic, PositionRecord, VerificationOutcome};
