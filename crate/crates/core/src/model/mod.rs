//! Exact categorical language models and sampling.

mod distribution;
pub mod format;
mod ngram;
mod synthetic;
mod tabular;
mod vocab;

pub use distribution::{greedy_token, sample_token, Distribution, NORMALIZATION_TOL};
pub use ngram::{build_ngram_model, NgramCounter};
pub use synthetic::{make_synthetic_target, real_contexts, sample_dirichlet};
pub use tabular::{generate_autoregressive, next_distribution, ContextKey, Selection, TabularModel};
pub use vocab::{Symbol, Token, Vocabulary};
