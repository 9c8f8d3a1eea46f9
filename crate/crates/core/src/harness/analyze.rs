use std::fmt::Write as _;

use serde::Serialize;

use super::report::{finish_csv, BenchReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub run: String,
    pub tau: f64,
    pub committed_per_step: f64,
    pub speedup_estimate: f64,
    pub delta_tau: f64,
    pub delta_committed_per_step: f64,
    pub delta_speedup_estimate: f64,
}

/// One row per report with differences against `runs[baseline]`.
pub fn compare(runs: &[(String, BenchReport)], baseline: usize) -> Result<Vec<ComparisonRow>> {
    if runs.len() < 2 {
        return Err(Error::input("analyze needs at least two reports"));
    }
    let base = &runs.get(baseline).ok_or_else(|| Error::input("baseline index out of range"))?.1;
    for (name, r) in runs {
        if r.config.vocab != base.config.vocab || r.config.target_order != base.config.target_order {
            return Err(Error::Comparison(format!(
                "{name} has vocab {} order {}, baseline has vocab {} order {}",
                r.config.vocab, r.config.target_order, base.config.vocab, base.config.target_order
            )));
        }
    }
    Ok(runs
        .iter()
        .map(|(name, r)| ComparisonRow {
            run: name.clone(),
            tau: r.tau,
            committed_per_step: r.committed_per_step,
            speedup_estimate: r.speedup_estimate,
            delta_tau: r.tau - base.tau,
            delta_committed_per_step: r.committed_per_step - base.committed_per_step,
            delta_speedup_estimate: r.speedup_estimate - base.speedup_estimate,
        })
        .collect())
}

pub fn render(rows: &[ComparisonRow], format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)?;
            }
            finish_csv(w)
        }
        TableFormat::Markdown => {
            let mut out = String::from(
                "| run | tau | committed/step | speedup (est.) | Δ tau | Δ committed/step | Δ speedup |\n\
                 |---|---:|---:|---:|---:|---:|---:|\n",
            );
            for r in rows {
                let _ = writeln!(
                    out,
                    "| {} | {:.4} | {:.4} | {:.4} | {:+.4} | {:+.4} | {:+.4} |",
                    r.run,
                    r.tau,
                    r.committed_per_step,
                    r.speedup_estimate,
                    r.delta_tau,
                    r.delta_committed_per_step,
                    r.delta_speedup_estimate
                );
            }
            Ok(out)
        }
    }
}
