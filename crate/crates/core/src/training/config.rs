use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::drafting::DEFAULT_DRAFT_LEN;
use crate::error::{Error, Result};

/// Position weighting applied to the per-token loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Uniform,
    /// `gamma^k`.
    Decay(f64),
    /// Cumulative target confidence.
    Cat,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weighting::Uniform => f.write_str("uniform"),
            Weighting::Decay(g) => write!(f, "decay({g})"),
            Weighting::Cat => f.write_str("cat"),
        }
    }
}

/// Drafter training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Training draft length.
    pub k: usize,
    /// Probability of dropping the target feature for a window.
    pub rho: f64,
    /// Cross-entropy coefficient; distillation has coefficient 1.
    pub beta: f64,
    pub weighting: Weighting,
    /// Add-k constant of the trained drafter.
    pub smoothing: f64,
    pub seed: u64,
    /// Include the distillation term. Off reduces the objective to weighted
    /// cross-entropy.
    pub distill: bool,
    /// Context width of the trained drafter. One more than the target order
    /// lets the feature slot sit beside a full target context.
    pub draft_order: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_DRAFT_LEN,
            rho: 0.1,
            beta: 0.1,
            weighting: Weighting::Cat,
            smoothing: 0.01,
            seed: 0,
            distill: true,
            draft_order: 3,
        }
    }
}

/// Keys that only make sense for a gradient trainer; accepted and ignored.
pub const IGNORED_KEYS: &[&str] = &[
    "optimizer",
    "optimizers",
    "learning_rate",
    "lr",
    "per_device_train_batch_size",
    "batch_size",
    "gradient_accumulation_steps",
    "num_processes",
    "num_train_epochs",
    "epochs",
    "max_seq_length",
];

/// Lowercases and maps spaces and dashes to underscores.
pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace([' ', '-'], "_")
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::input(format!("bad value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::input(format!("bad boolean {value:?} for {key}"))),
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::input("K must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::input(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::input(format!("beta must be nonnegative, got {}", self.beta)));
        }
        if let Weighting::Decay(g) = self.weighting {
            if !(g > 0.0 && g <= 1.0) {
                return Err(Error::input(format!("gamma must lie in (0, 1], got {g}")));
            }
        }
        if !(self.smoothing >= 0.0 && self.smoothing.is_finite()) {
            return Err(Error::input("smoothing must be nonnegative"));
        }
        if self.draft_order == 0 {
            return Err(Error::input("draft order must be at least 1"));
        }
        if self.beta == 0.0 && !self.distill {
            return Err(Error::input("beta = 0 without distillation leaves no training signal"));
        }
        Ok(())
    }

    /// Applies one `key = value` setting. Returns `false` for keys that are
    /// recognised but ignored.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<bool> {
        let key = normalize_key(key);
        match key.as_str() {
            "k" | "draft_length" | "training_draft_length" | "training_draft_length_k" => {
                self.k = parse(&key, value)?
            }
            "rho" | "gating_ratio" | "stochastic_gating_ratio" | "stochastic_gating_ratio_rho" => {
                self.rho = parse(&key, value)?
            }
            "beta" | "ce_loss_coefficient" | "ce_loss_coefficient_beta" => self.beta = parse(&key, value)?,
            "gamma" => {
                self.weighting = Weighting::Decay(parse(&key, value)?);
            }
            "weighting" => {
                self.weighting = match value.trim() {
                    "uniform" => Weighting::Uniform,
                    "cat" => Weighting::Cat,
                    "decay" => match self.weighting {
                        Weighting::Decay(g) => Weighting::Decay(g),
                        _ => Weighting::Decay(0.8),
                    },
                    other => return Err(Error::input(format!("unknown weighting {other:?}"))),
                }
            }
            "smoothing" => self.smoothing = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "distill" => self.distill = parse_bool(&key, value)?,
            "draft_order" => self.draft_order = parse(&key, value)?,
            k if IGNORED_KEYS.contains(&k) => return Ok(false),
            _ => return Err(Error::input(format!("unknown training key {key:?}"))),
        }
        Ok(true)
    }
}
