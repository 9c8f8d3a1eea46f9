use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::drafting::{DraftMode, DraftStrategy};
use crate::error::{Error, Result};
use crate::verification::{BinStat, DecodeTrace, PositionStat, VerifyMode};

/// Cost of one drafter pass relative to one target pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub draft_cost: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { draft_cost: 0.1 }
    }
}

impl CostModel {
    pub fn new(draft_cost: f64) -> Result<Self> {
        if !(draft_cost >= 0.0 && draft_cost.is_finite()) {
            return Err(Error::input(format!("draft cost must be finite and nonnegative, got {draft_cost}")));
        }
        Ok(Self { draft_cost })
    }

    /// Drafting cost of one round: one pass for parallel drafting, `K` passes
    /// for token-by-token drafting.
    pub fn round_cost(&self, strategy: DraftStrategy, k: usize) -> f64 {
        match strategy {
            DraftStrategy::Parallel => self.draft_cost,
            DraftStrategy::Autoregressive => self.draft_cost * k as f64,
        }
    }

    /// Committed tokens per unit of target-pass time.
    pub fn speedup(&self, committed_per_step: f64, round_cost: f64) -> f64 {
        committed_per_step / (1.0 + round_cost)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionPoint {
    pub k: usize,
    pub attempts: u64,
    pub accepts: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidencePoint {
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
    pub attempts: u64,
    pub accepts: u64,
    pub rate: f64,
}

/// Settings a report was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEcho {
    pub vocab: usize,
    pub target_order: usize,
    pub drafter_order: usize,
    pub k: usize,
    pub mode: DraftMode,
    pub verify: VerifyMode,
    pub drafting: DraftStrategy,
    pub prompts: usize,
    pub prompt_len: usize,
    pub prompt_source: String,
    pub max_tokens: usize,
    pub seed: u64,
    pub draft_cost_per_pass: f64,
}

/// Aggregated benchmark results. `speedup_estimate` comes from the cost
/// model, not from wall-clock time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub steps: u64,
    pub tau: f64,
    pub committed_per_step: f64,
    pub total_tokens: u64,
    pub speedup_estimate: f64,
    /// Drafting cost per round under the cost model.
    pub draft_cost: f64,
    /// `accepted_histogram[j]` = rounds that accepted exactly `j` drafts.
    pub accepted_histogram: Vec<u64>,
    pub position_stats: Vec<PositionStat>,
    pub confidence_bins: Vec<BinStat>,
    pub position_curve: Vec<PositionPoint>,
    pub confidence_curve: Vec<ConfidencePoint>,
    /// Spearman correlation of bin center against acceptance rate over
    /// nonempty bins.
    pub correlation: Option<f64>,
    pub config: BenchEcho,
}

fn rate(accepts: u64, attempts: u64) -> f64 {
    if attempts == 0 {
        0.0
    } else {
        accepts as f64 / attempts as f64
    }
}

impl BenchReport {
    pub fn from_trace(trace: &DecodeTrace, cost: &CostModel, config: BenchEcho) -> Self {
        let round_cost = cost.round_cost(config.drafting, config.k);
        let mut accepted_histogram = vec![0u64; config.k + 1];
        for &a in &trace.accepted_per_step {
            accepted_histogram[a] += 1;
        }
        let position_curve = trace
            .position_stats
            .iter()
            .map(|s| PositionPoint { k: s.k, attempts: s.attempts, accepts: s.accepts, rate: rate(s.accepts, s.attempts) })
            .collect();
        let confidence_curve: Vec<ConfidencePoint> = trace
            .confidence_bins
            .iter()
            .map(|b| ConfidencePoint {
                center: (b.lo + b.hi) / 2.0,
                lo: b.lo,
                hi: b.hi,
                attempts: b.attempts,
                accepts: b.accepts,
                rate: rate(b.accepts, b.attempts),
            })
            .collect();
        let nonempty: Vec<&ConfidencePoint> = confidence_curve.iter().filter(|p| p.attempts > 0).collect();
        let correlation = spearman(
            &nonempty.iter().map(|p| p.center).collect::<Vec<_>>(),
            &nonempty.iter().map(|p| p.rate).collect::<Vec<_>>(),
        );
        let committed = trace.committed_per_step();
        Self {
            steps: trace.steps,
            tau: trace.tau(),
            committed_per_step: committed,
            total_tokens: trace.total_tokens,
            speedup_estimate: cost.speedup(committed, round_cost),
            draft_cost: round_cost,
            accepted_histogram,
            position_stats: trace.position_stats.clone(),
            confidence_bins: trace.confidence_bins.clone(),
            position_curve,
            confidence_curve,
            correlation,
            config,
        }
    }

    /// Mean accepted drafts per round recomputed from the histogram.
    pub fn tau_from_histogram(&self) -> f64 {
        let steps: u64 = self.accepted_histogram.iter().sum();
        if steps == 0 {
            return 0.0;
        }
        let accepted: u64 = self.accepted_histogram.iter().enumerate().map(|(j, &c)| j as u64 * c).sum();
        accepted as f64 / steps as f64
    }

    pub fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Numeric(msg));
        if (self.tau - self.tau_from_histogram()).abs() > 1e-12 {
            return fail(format!("tau {} disagrees with histogram {}", self.tau, self.tau_from_histogram()));
        }
        if (self.speedup_estimate * (1.0 + self.draft_cost) - self.committed_per_step).abs() > 1e-12 {
            return fail("speedup identity violated".into());
        }
        if self.position_curve.iter().any(|p| !(0.0..=1.0).contains(&p.rate)) {
            return fail("position rate outside [0, 1]".into());
        }
        if self.position_curve.windows(2).any(|w| w[1].attempts > w[0].attempts) {
            return fail("position attempts increase with k".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn positions_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "attempts", "accepts", "rate"])?;
        for p in &self.position_curve {
            w.write_record([p.k.to_string(), p.attempts.to_string(), p.accepts.to_string(), p.rate.to_string()])?;
        }
        finish_csv(w)
    }

    pub fn confidence_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bin_lo", "bin_hi", "attempts", "accepts", "rate"])?;
        for p in &self.confidence_curve {
            w.write_record([
                p.lo.to_string(),
                p.hi.to_string(),
                p.attempts.to_string(),
                p.accepts.to_string(),
                p.rate.to_string(),
            ])?;
        }
        finish_csv(w)
    }
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Average ranks, ties sharing the mean of their positions (1-based).
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson over average ranks). `None` for fewer
/// than two points or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "spearman inputs differ in length");
    if x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
