use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Token;
use crate::training::normalize_key;

/// Reads one whitespace-separated token sequence per line. Blank lines and
/// `#` comments are skipped.
pub fn read_sequences(path: &Path) -> Result<Vec<Vec<Token>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sequences(&text, &path.display().to_string())
}

pub fn parse_sequences(text: &str, source: &str) -> Result<Vec<Vec<Token>>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let seq = line
            .split_whitespace()
            .map(|t| t.parse::<Token>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { path: source.into(), line: i + 1, msg: format!("bad token: {e}") })?;
        out.push(seq);
    }
    Ok(out)
}

pub fn format_sequences(seqs: &[Vec<Token>]) -> String {
    let mut out = String::new();
    for seq in seqs {
        let line: Vec<String> = seq.iter().map(|t| t.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `key = value` lines, in file order. Keys are normalized; blank lines and
/// `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

pub fn parse_config(text: &str, source: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: source.into(),
            line: i + 1,
            msg: "expected key = value".into(),
        })?;
        out.push((normalize_key(key), value.trim().to_string()));
    }
    Ok(out)
}

/// Independent stream seed for item `index` of a run seeded with `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer over a golden-ratio stride
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Parses `NxL`.
pub fn parse_shape(value: &str) -> Result<(usize, usize)> {
    let bad = || Error::input(format!("expected NxL, got {value:?}"));
    let (n, l) = value.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_round_trip() {
        let seqs = vec![vec![1, 2, 3], vec![0], vec![15, 15]];
        assert_eq!(parse_sequences(&format_sequences(&seqs), "x").unwrap(), seqs);
        assert!(matches!(parse_sequences("1 2\n3 z\n", "f"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn config_lines() {
        let kv = parse_config("# c\nK = 8\n\nStochastic Gating Ratio=0.2\n", "c").unwrap();
        assert_eq!(kv, vec![("k".into(), "8".into()), ("stochastic_gating_ratio".into(), "0.2".into())]);
        assert!(parse_config("nope\n", "c").is_err());
    }

    #[test]
    fn shapes_and_seeds() {
        assert_eq!(parse_shape("500x64").unwrap(), (500, 64));
        assert!(parse_shape("500").is_err());
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_ne!(derive_seed(0, 1), derive_seed(1, 0));
        assert_eq!(derive_seed(9, 3), derive_seed(9, 3));
    }
}
