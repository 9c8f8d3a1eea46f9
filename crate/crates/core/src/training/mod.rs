//! Confidence-weighted drafter training.

mod config;
mod loss;
mod trainer;
mod weights;
mod window;

pub use config::{normalize_key, TrainConfig, Weighting, IGNORED_KEYS};
pub use loss::{cross_entropy, kl_divergence, window_loss};
pub use trainer::train_tabular_drafter;
pub use weights::{cat_weights, decay_weights, target_confidences, CatWeights, CONFIDENCE_FLOOR};
pub use window::{build_training_windows, sample_corpus, TrainingWindow};
