//! Line-oriented model files.
//!
//! ```text
//! ngram v=<V> d=<d>
//! *<TAB>p_0 p_1 ... p_{V-1}          fallback row
//! <ctx symbols><TAB>p_0 ... p_{V-1}  one row per stored context
//! ```
//!
//! Context symbols are space separated: real tokens as integers, `<m>` for
//! the mask, `<fN>` for the feature of token N, `<none>` and `<pad>`.
//! Probabilities carry 17 significant digits so `f64` values round-trip.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::distribution::Distribution;
use super::tabular::{ContextKey, TabularModel};
use super::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::scalar::Real;

const FALLBACK: &str = "*";

fn write_row<S: Real>(out: &mut String, label: &str, dist: &Distribution<S>) {
    out.push_str(label);
    out.push('\t');
    for (i, p) in dist.probs().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.16e}", p.as_f64());
    }
    out.push('\n');
}

pub fn to_text<S: Real>(model: &TabularModel<S>) -> String {
    let vocab = model.vocab();
    let mut out = format!("ngram v={} d={}\n", vocab.size(), model.order());
    write_row(&mut out, FALLBACK, model.fallback());
    for (key, dist) in model.table() {
        let label: Vec<String> = key.symbols().iter().map(|&s| vocab.symbol_name(s)).collect();
        write_row(&mut out, &label.join(" "), dist);
    }
    out
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut parts = line.split_whitespace();
    if parts.next()? != "ngram" {
        return None;
    }
    let v = parts.next()?.strip_prefix("v=")?.parse().ok()?;
    let d = parts.next()?.strip_prefix("d=")?.parse().ok()?;
    parts.next().is_none().then_some((v, d))
}

pub fn from_text<S: Real>(text: &str, source: &str) -> Result<TabularModel<S>> {
    let err = |line: usize, msg: String| Error::Parse { path: source.to_string(), line, msg };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty model file".into()))?;
    let (v, order) =
        parse_header(header).ok_or_else(|| err(1, format!("bad header {header:?}")))?;
    let vocab = Vocabulary::new(v).map_err(|e| err(1, e.to_string()))?;

    let mut fallback = None;
    let mut table = BTreeMap::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (label, values) =
            line.split_once('\t').ok_or_else(|| err(lineno, "missing tab separator".into()))?;
        let probs = values
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map(S::lit)
                    .map_err(|_| err(lineno, format!("bad probability {tok:?}")))
            })
            .collect::<Result<Vec<S>>>()?;
        if probs.len() != v {
            return Err(err(lineno, format!("expected {v} probabilities, found {}", probs.len())));
        }
        let dist = Distribution::new(probs).map_err(|e| err(lineno, e.to_string()))?;
        if label == FALLBACK {
            if fallback.replace(dist).is_some() {
                return Err(err(lineno, "duplicate fallback row".into()));
            }
            continue;
        }
        let symbols = label
            .split(' ')
            .map(|name| vocab.parse_symbol(name).map_err(|e| err(lineno, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if symbols.len() != order {
            return Err(err(lineno, format!("context width {} != order {order}", symbols.len())));
        }
        if table.insert(ContextKey::from_symbols(symbols), dist).is_some() {
            return Err(err(lineno, format!("duplicate context {label:?}")));
        }
    }
    let fallback = fallback.ok_or_else(|| err(0, "missing fallback row".into()))?;
    TabularModel::new(vocab, order, table, fallback)
}

pub fn save<S: Real>(model: &TabularModel<S>, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(model)).map_err(|e| Error::io(path, e))
}

pub fn load<S: Real>(path: &Path) -> Result<TabularModel<S>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_text(&text, &path.display().to_string())
}
