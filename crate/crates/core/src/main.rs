use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use specdraft::harness::{
    self, io::read_config_file, run_bench_files, run_gen, run_train, BenchOptions, BenchReport, GenOptions, Settings,
    TableFormat, TrainOptions,
};
use specdraft::{Error, Result};

#[derive(Parser)]
#[command(name = "specdraft", version, about = "Parallel drafting and speculative verification over tabular models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic target model and optionally a corpus.
    Gen(GenArgs),
    /// Train a tabular drafter against a target.
    Train(TrainArgs),
    /// Benchmark a drafter and write JSON and CSV reports.
    Bench(BenchArgs),
    /// Compare benchmark reports.
    Analyze(AnalyzeArgs),
}

/// Collects `Some` flags as `(key, value)` settings.
macro_rules! pairs {
    ($args:expr; $($field:ident => $key:literal),* $(,)?) => {{
        let mut out: Vec<(String, String)> = Vec::new();
        $(
            if let Some(v) = &$args.$field {
                out.push(($key.to_string(), v.to_string()));
            }
        )*
        out
    }};
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    vocab: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    /// Dirichlet concentration of every context row.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<String>,
    /// Corpus shape, `NxL`.
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long)]
    corpus_out: Option<String>,
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightingArg {
    Uniform,
    Decay,
    Cat,
}

impl WeightingArg {
    fn name(self) -> &'static str {
        match self {
            WeightingArg::Uniform => "uniform",
            WeightingArg::Decay => "decay",
            WeightingArg::Cat => "cat",
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    weighting: Option<WeightingArg>,
    /// Decay rate for `--weighting decay`.
    #[arg(long)]
    gamma: Option<f64>,
    /// Training draft length.
    #[arg(long = "K", alias = "k")]
    k: Option<usize>,
    /// Feature drop probability.
    #[arg(long)]
    rho: Option<f64>,
    /// Cross-entropy coefficient.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    smoothing: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Training sequences, one per line; sampled from the target if absent.
    #[arg(long)]
    corpus: Option<String>,
    /// Shape `NxL` of the sampled training corpus.
    #[arg(long)]
    sample: Option<String>,
    #[arg(long)]
    draft_order: Option<usize>,
    /// Drop the distillation term.
    #[arg(long)]
    no_distill: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dependent,
    Independent,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyArg {
    Stochastic,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum DraftingArg {
    Parallel,
    Autoregressive,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    drafter: Option<String>,
    /// JSON report path; CSV curves go next to it unless given explicitly.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    positions_out: Option<String>,
    #[arg(long)]
    confidence_out: Option<String>,
    #[arg(long = "K", alias = "k")]
    k: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    verify: Option<VerifyArg>,
    #[arg(long, value_enum)]
    drafting: Option<DraftingArg>,
    #[arg(long)]
    prompts: Option<usize>,
    #[arg(long)]
    prompt_len: Option<usize>,
    #[arg(long)]
    prompt_seed: Option<u64>,
    #[arg(long)]
    prompt_file: Option<String>,
    #[arg(long)]
    max_tokens: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cost of one drafter pass relative to one target pass.
    #[arg(long)]
    draft_cost: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Report files to compare.
    #[arg(required = true, num_args = 2..)]
    reports: Vec<PathBuf>,
    /// Baseline report (a path from the list, or its file stem); the first
    /// report by default.
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn file_settings(config: &Option<PathBuf>) -> Result<Vec<(String, String)>> {
    match config {
        Some(path) => read_config_file(path),
        None => Ok(Vec::new()),
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let mut opts = GenOptions::default();
    opts.apply_all(&file_settings(&args.config)?)?;
    opts.apply_all(&pairs!(args;
        vocab => "vocab", order => "order", alpha => "alpha", seed => "seed",
        out => "out", corpus => "corpus", corpus_out => "corpus_out"))?;
    let target = run_gen(&opts)?;
    println!("target: V={} d={} rows={}", target.vocab().size(), target.order(), target.table().len());
    Ok(())
}

fn train(args: TrainArgs) -> Result<()> {
    let mut opts = TrainOptions::default();
    opts.apply_all(&file_settings(&args.config)?)?;
    let weighting = args.weighting.map(WeightingArg::name);
    let mut cli = pairs!(args;
        target => "target", out => "out", corpus => "corpus", sample => "sample",
        gamma => "gamma", k => "k", rho => "rho", beta => "beta", smoothing => "smoothing",
        seed => "seed", draft_order => "draft_order");
    if let Some(w) = weighting {
        cli.push(("weighting".into(), w.into()));
    }
    if args.no_distill {
        cli.push(("distill".into(), "false".into()));
    }
    opts.apply_all(&cli)?;
    let summary = run_train(&opts)?;
    println!("windows: {}", summary.windows);
    match summary.mean_loss {
        Some(loss) => println!("mean window loss: {loss:.12}"),
        None => println!("mean window loss: inf (overflow)"),
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut opts = BenchOptions::default();
    opts.apply_all(&file_settings(&args.config)?)?;
    let mut cli = pairs!(args;
        target => "target", drafter => "drafter", out => "out",
        positions_out => "positions_out", confidence_out => "confidence_out",
        k => "k", prompts => "prompts", prompt_len => "prompt_len", prompt_seed => "prompt_seed",
        prompt_file => "prompt_file", max_tokens => "max_tokens", seed => "seed", draft_cost => "draft_cost");
    if let Some(m) = args.mode {
        cli.push(("mode".into(), match m { ModeArg::Dependent => "dependent", ModeArg::Independent => "independent" }.into()));
    }
    if let Some(v) = args.verify {
        cli.push(("verify".into(), match v { VerifyArg::Stochastic => "stochastic", VerifyArg::Greedy => "greedy" }.into()));
    }
    if let Some(d) = args.drafting {
        cli.push((
            "drafting".into(),
            match d { DraftingArg::Parallel => "parallel", DraftingArg::Autoregressive => "autoregressive" }.into(),
        ));
    }
    opts.apply_all(&cli)?;
    let report = run_bench_files(&opts)?;
    println!("tau: {:.6}", report.tau);
    println!("committed per step: {:.6}", report.committed_per_step);
    println!("speedup estimate (cost model): {:.6}", report.speedup_estimate);
    match report.correlation {
        Some(r) => println!("confidence/acceptance spearman: {r:.4}"),
        None => println!("confidence/acceptance spearman: n/a"),
    }
    Ok(())
}

fn run_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let runs = args
        .reports
        .iter()
        .map(|p| Ok((run_name(p), BenchReport::load(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let baseline = match &args.baseline {
        None => 0,
        Some(b) => args
            .reports
            .iter()
            .position(|p| p.as_os_str() == b.as_str() || run_name(p) == *b)
            .ok_or_else(|| Error::Input(format!("baseline {b:?} is not among the reports")))?,
    };
    let rows = harness::compare(&runs, baseline)?;
    let format = match args.format {
        FormatArg::Csv => TableFormat::Csv,
        FormatArg::Markdown => TableFormat::Markdown,
    };
    let table = harness::render(&rows, format)?;
    match &args.out {
        Some(path) => harness::io::write_text(path, &table)?,
        None => print!("{table}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Train(a) => train(a),
        Command::Bench(a) => bench(a),
        Command::Analyze(a) => analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
