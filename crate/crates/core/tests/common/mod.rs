//! Independent reference computations shared by the integration tests and
//! the acceptance run.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specdraft::drafting::{compute_feature, propose, DraftMode, Feature};
use specdraft::model::{
    real_contexts, sample_dirichlet, ContextKey, Distribution, Selection, Symbol, TabularModel, Token, Vocabulary,
};
use specdraft::training::{TrainConfig, TrainingWindow};
use specdraft::verification::{accept_prob, residual_distribution};
use specdraft::{Error, Scalar};

pub type SeqDist<S> = BTreeMap<Vec<Token>, S>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dirichlet row with roughly a third of the entries forced to zero (at
/// least one survives).
pub fn sparse_row(rng: &mut ChaCha8Rng, v: usize) -> Vec<f64> {
    let mut row = sample_dirichlet(1.0, v, rng).unwrap();
    let keep = rng.random_range(0..v);
    for (i, p) in row.iter_mut().enumerate() {
        if i != keep && rng.random_bool(0.3) {
            *p = 0.0;
        }
    }
    let total: f64 = row.iter().sum();
    row.iter().map(|p| p / total).collect()
}

/// Order-1 target with a row for every real context and for the empty
/// history.
pub fn random_target(seed: u64, v: usize) -> TabularModel<f64> {
    let mut r = rng(seed);
    let vocab = Vocabulary::new(v).unwrap();
    let table = real_contexts(&vocab, 1)
        .into_iter()
        .map(|key| (key, Distribution::new(sparse_row(&mut r, v)).unwrap()))
        .collect();
    TabularModel::new(vocab, 1, table, Distribution::uniform(v)).unwrap()
}

/// Order-1 drafter with random rows at every symbol a masked context can
/// contain: real tokens, the mask and every feature.
pub fn random_drafter(seed: u64, v: usize) -> TabularModel<f64> {
    let mut r = rng(seed ^ 0xd2af7);
    let vocab = Vocabulary::new(v).unwrap();
    let mut symbols: Vec<Symbol> = (0..v as Symbol).collect();
    symbols.push(vocab.mask());
    symbols.extend((0..v as Token).map(|t| Feature::of_token(&vocab, t).symbol()));
    let table = symbols
        .into_iter()
        .map(|s| (ContextKey::from_symbols(vec![s]), Distribution::new(sparse_row(&mut r, v)).unwrap()))
        .collect();
    TabularModel::new(vocab, 1, table, Distribution::new(sparse_row(&mut r, v)).unwrap()).unwrap()
}

/// `P(y_1..y_n | prompt)` under plain sampling from the target.
pub fn autoregressive_dist<S: Scalar>(target: &TabularModel<S>, prompt: &[Token], n: usize) -> SeqDist<S> {
    let mut out = SeqDist::new();
    fn go<S: Scalar>(t: &TabularModel<S>, ctx: &mut Vec<Token>, start: usize, n: usize, w: S, out: &mut SeqDist<S>) {
        if ctx.len() - start == n {
            out.insert(ctx[start..].to_vec(), w);
            return;
        }
        let p = t.next_distribution(ctx).unwrap().clone();
        for (y, py) in p.probs().iter().enumerate() {
            if py.is_zero() {
                continue;
            }
            ctx.push(y as Token);
            go(t, ctx, start, n, w.clone() * py.clone(), out);
            ctx.pop();
        }
    }
    let mut ctx = prompt.to_vec();
    go(target, &mut ctx, prompt.len(), n, S::one(), &mut out);
    out
}

fn add<S: Scalar>(out: &mut SeqDist<S>, seq: Vec<Token>, w: S) {
    let e = out.entry(seq).or_insert_with(S::zero);
    *e = e.clone() + w;
}

/// Drafter rows for one round, built directly from the context rule
/// `suffix_d(prompt ++ [feature] ++ mask^k)`.
pub fn reference_rows<S: Scalar>(
    drafter: &TabularModel<S>,
    context: &[Token],
    feature: Option<Symbol>,
    k_len: usize,
) -> Vec<Distribution<S>> {
    let vocab = drafter.vocab();
    let d = drafter.order();
    (0..k_len)
        .map(|j| {
            let mut syms: Vec<Symbol> = context.to_vec();
            syms.extend(feature);
            syms.extend(std::iter::repeat(vocab.mask()).take(j));
            let mut key = vec![vocab.pad(); d.saturating_sub(syms.len())];
            key.extend_from_slice(&syms[syms.len().saturating_sub(d)..]);
            drafter.lookup(&ContextKey::from_symbols(key)).clone()
        })
        .collect()
}

fn top1<S: Scalar>(p: &Distribution<S>) -> Token {
    let mut best = 0;
    for (i, v) in p.probs().iter().enumerate() {
        if *v > p.probs()[best] {
            best = i;
        }
    }
    best as Token
}

/// Exact distribution of what one stochastic round commits after `context`,
/// truncated to `limit` tokens. Randomness of drafting and verification is
/// integrated out branch by branch using the library's acceptance and
/// residual rules on the library's proposal rows.
pub fn round_dist<S: Scalar>(
    target: &TabularModel<S>,
    drafter: &TabularModel<S>,
    context: &[Token],
    k_len: usize,
    mode: DraftMode,
    limit: usize,
) -> SeqDist<S> {
    let vocab = drafter.vocab();
    let feature = match mode {
        DraftMode::Dependent => compute_feature(target, context).unwrap(),
        DraftMode::Independent => Feature::none(&vocab),
    };
    let rows = propose(drafter, context, k_len, feature, Selection::Greedy, &mut rng(0)).unwrap().dists;
    let expected_feature = match mode {
        DraftMode::Dependent => Some(Feature::of_token(&vocab, top1(target.next_distribution(context).unwrap())).symbol()),
        DraftMode::Independent => None,
    };
    assert_eq!(rows, reference_rows(drafter, context, expected_feature, k_len), "proposal rows differ from the context rule");

    let mut out = SeqDist::new();
    let mut stack: Vec<(Vec<Token>, S)> = vec![(Vec::new(), S::one())];
    while let Some((accepted, w)) = stack.pop() {
        if accepted.len() == limit {
            add(&mut out, accepted, w);
            continue;
        }
        let mut ctx = context.to_vec();
        ctx.extend_from_slice(&accepted);
        let p = target.next_distribution(&ctx).unwrap();
        let j = accepted.len();
        if j == k_len {
            for (y, py) in p.probs().iter().enumerate() {
                if !py.is_zero() {
                    let mut c = accepted.clone();
                    c.push(y as Token);
                    add(&mut out, c, w.clone() * py.clone());
                }
            }
            continue;
        }
        let q = &rows[j];
        let mut reject = S::zero();
        for (x, qx) in q.probs().iter().enumerate() {
            if qx.is_zero() {
                continue;
            }
            let a = accept_prob(p, q, x as Token).unwrap();
            if !a.is_zero() {
                let mut c = accepted.clone();
                c.push(x as Token);
                stack.push((c, w.clone() * qx.clone() * a.clone()));
            }
            reject = reject + qx.clone() * (S::one() - a);
        }
        if reject.is_zero() {
            continue;
        }
        match residual_distribution(p, q) {
            Ok(r) => {
                for (y, ry) in r.probs().iter().enumerate() {
                    if !ry.is_zero() {
                        let mut c = accepted.clone();
                        c.push(y as Token);
                        add(&mut out, c, w.clone() * reject.clone() * ry.clone());
                    }
                }
            }
            // rejection mass is rounding noise when p and q coincide
            Err(Error::DegenerateResidual) => {}
            Err(e) => panic!("{e}"),
        }
    }
    out
}

/// Exact distribution of the first `n` tokens produced by repeated
/// draft/verify rounds.
pub fn speculative_dist<S: Scalar>(
    target: &TabularModel<S>,
    drafter: &TabularModel<S>,
    prompt: &[Token],
    n: usize,
    k_len: usize,
    mode: DraftMode,
) -> SeqDist<S> {
    let mut out = SeqDist::new();
    for (committed, w) in round_dist(target, drafter, prompt, k_len, mode, n) {
        if committed.len() == n {
            add(&mut out, committed, w);
            continue;
        }
        let mut ctx = prompt.to_vec();
        ctx.extend_from_slice(&committed);
        for (rest, w2) in speculative_dist(target, drafter, &ctx, n - committed.len(), k_len, mode) {
            let mut seq = committed.clone();
            seq.extend(rest);
            add(&mut out, seq, w.clone() * w2);
        }
    }
    out
}

/// Largest coordinatewise gap over the union of supports.
pub fn max_gap(a: &SeqDist<f64>, b: &SeqDist<f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Exact rational copy of a float model (entries are exact binary values;
/// rows renormalized in rationals).
pub fn exact_model(m: &TabularModel<f64>) -> TabularModel<BigRational> {
    m.convert()
}

pub type Rows = BTreeMap<ContextKey, Vec<f64>>;

/// Summed loss computed straight from the definition over raw rows (which
/// need not be normalized), with its own context construction.
pub fn direct_loss_rows(
    vocab: &Vocabulary,
    order: usize,
    rows: &Rows,
    fallback: &[f64],
    windows: &[TrainingWindow<'_, f64>],
    cfg: &TrainConfig,
) -> f64 {
    let mut total = 0.0;
    for w in windows {
        let mut syms: Vec<Symbol> = w.prefix.clone();
        if !w.feature.is_none(vocab) {
            syms.push(w.feature.symbol());
        }
        for k in 0..w.len() {
            let mut key = vec![vocab.pad(); order.saturating_sub(syms.len())];
            key.extend_from_slice(&syms[syms.len().saturating_sub(order)..]);
            syms.push(vocab.mask());
            let q = rows.get(&ContextKey::from_symbols(key)).map_or(fallback, Vec::as_slice);
            let p = w.target_dists[k].probs();
            let ce = -q[w.future_tokens[k] as usize].ln();
            let kd: f64 = if cfg.distill {
                p.iter().zip(q).filter(|(pi, _)| **pi > 0.0).map(|(pi, qi)| pi * (pi.ln() - qi.ln())).sum()
            } else {
                0.0
            };
            total += w.weights.weights[k] * (cfg.beta * ce + kd);
        }
    }
    total
}

pub fn rows_of(m: &TabularModel<f64>) -> Rows {
    m.table().iter().map(|(k, d)| (k.clone(), d.probs().to_vec())).collect()
}

pub fn direct_loss(drafter: &TabularModel<f64>, windows: &[TrainingWindow<'_, f64>], cfg: &TrainConfig) -> f64 {
    direct_loss_rows(&drafter.vocab(), drafter.order(), &rows_of(drafter), drafter.fallback().probs(), windows, cfg)
}

/// Numeric minimizer of the summed loss over the rows at `keys`, starting
/// from uniform rows: exponentiated-gradient steps with gradients from
/// central finite differences of [`direct_loss_rows`].
pub fn numeric_minimizer(
    vocab: &Vocabulary,
    order: usize,
    keys: &[ContextKey],
    windows: &[TrainingWindow<'_, f64>],
    cfg: &TrainConfig,
    iters: usize,
) -> Rows {
    let v = vocab.size();
    let fallback = vec![1.0 / v as f64; v];
    let mut rows: Rows = keys.iter().map(|k| (k.clone(), fallback.clone())).collect();
    let (eta, h) = (0.5, 1e-7);
    for _ in 0..iters {
        for key in keys {
            let row = rows[key].clone();
            let mut grad = vec![0.0; v];
            for y in 0..v {
                let mut probe = rows.clone();
                probe.get_mut(key).unwrap()[y] = row[y] + h;
                let lp = direct_loss_rows(vocab, order, &probe, &fallback, windows, cfg);
                probe.get_mut(key).unwrap()[y] = row[y] - h;
                let lm = direct_loss_rows(vocab, order, &probe, &fallback, windows, cfg);
                grad[y] = (lp - lm) / (2.0 * h);
            }
            let scale = grad.iter().map(|g| g.abs()).fold(0.0, f64::max).max(1e-300);
            let mut next: Vec<f64> = row.iter().zip(&grad).map(|(p, g)| p * (-eta * g / scale).exp()).collect();
            let s: f64 = next.iter().sum();
            next.iter_mut().for_each(|p| *p /= s);
            rows.insert(key.clone(), next);
        }
    }
    rows
}
