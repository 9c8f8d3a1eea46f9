//! Benchmarking, reports and the end-to-end gen / train / bench pipeline.

mod analyze;
mod bench;
pub mod io;
mod pipeline;
mod report;

pub use analyze::{compare, render, ComparisonRow, TableFormat};
pub use bench::{
    load_prompts, run_bench, run_prompts, BenchSettings, PromptSource, DEFAULT_MAX_TOKENS, DEFAULT_PROMPTS,
    DEFAULT_PROMPT_LEN, DEFAULT_PROMPT_SEED,
};
pub use pipeline::{
    run_bench_files, run_gen, run_train, sibling, train_on, BenchOptions, GenOptions, Settings, TrainOptions,
    TrainSummary, DEFAULT_SAMPLE,
};
pub use report::{spearman, BenchEcho, BenchReport, ConfidencePoint, CostModel, PositionPoint};
