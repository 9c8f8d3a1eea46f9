use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real token id in `[0, V)`.
pub type Token = u32;

/// Any id of the extended symbol space: real tokens plus the reserved
/// mask, feature, no-feature and pad symbols.
pub type Symbol = u32;

/// Token id layout.
///
/// ```text
/// [0, V)          real tokens
/// V               mask placeholder
/// V+1 ..= 2V      feature symbols, one per real token
/// 2V+1            no-feature sentinel
/// 2V+2            left padding for short histories
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    size: u32,
}

impl Vocabulary {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::input("vocabulary size must be positive"));
        }
        let size = u32::try_from(size)
            .ok()
            .filter(|s| s.checked_mul(2).and_then(|s| s.checked_add(3)).is_some())
            .ok_or_else(|| Error::input("vocabulary size too large"))?;
        Ok(Self { size })
    }

    /// Number of real tokens `V`.
    pub fn size(&self) -> usize {
        self.size as usize
    }

    pub fn mask(&self) -> Symbol {
        self.size
    }

    /// Feature symbol lifting real token `token`.
    pub fn feature(&self, token: Token) -> Symbol {
        debug_assert!(token < self.size);
        self.size + 1 + token
    }

    pub fn none_feature(&self) -> Symbol {
        2 * self.size + 1
    }

    pub fn pad(&self) -> Symbol {
        2 * self.size + 2
    }

    /// Size of the full symbol space.
    pub fn symbol_count(&self) -> usize {
        2 * self.size as usize + 3
    }

    pub fn is_real(&self, symbol: Symbol) -> bool {
        symbol < self.size
    }

    pub fn is_feature(&self, symbol: Symbol) -> bool {
        symbol > self.size && symbol <= 2 * self.size
    }

    /// Real token carried by a feature symbol.
    pub fn feature_token(&self, symbol: Symbol) -> Option<Token> {
        self.is_feature(symbol).then(|| symbol - self.size - 1)
    }

    pub fn check_symbol(&self, symbol: Symbol) -> Result<()> {
        if (symbol as usize) < self.symbol_count() {
            Ok(())
        } else {
            Err(Error::input(format!(
                "symbol {symbol} outside symbol space of size {}",
                self.symbol_count()
            )))
        }
    }

    pub fn check_token(&self, token: Token) -> Result<()> {
        if self.is_real(token) {
            Ok(())
        } else {
            Err(Error::input(format!("token {token} is not a real token (V = {})", self.size)))
        }
    }

    /// Human readable name used by the model text format.
    pub fn symbol_name(&self, symbol: Symbol) -> String {
        if self.is_real(symbol) {
            symbol.to_string()
        } else if symbol == self.mask() {
            "<m>".into()
        } else if let Some(t) = self.feature_token(symbol) {
            format!("<f{t}>")
        } else if symbol == self.none_feature() {
            "<none>".into()
        } else if symbol == self.pad() {
            "<pad>".into()
        } else {
            format!("<?{symbol}>")
        }
    }

    pub fn parse_symbol(&self, name: &str) -> Result<Symbol> {
        let symbol = match name {
            "<m>" => self.mask(),
            "<none>" => self.none_feature(),
            "<pad>" => self.pad(),
            _ => {
                if let Some(inner) = name.strip_prefix("<f").and_then(|s| s.strip_suffix('>')) {
                    let t: Token = inner
                        .parse()
                        .map_err(|_| Error::input(format!("bad feature symbol {name:?}")))?;
                    self.check_token(t)?;
                    self.feature(t)
                } else {
                    let t: Token =
                        name.parse().map_err(|_| Error::input(format!("bad symbol {name:?}")))?;
                    self.check_token(t)?;
                    t
                }
            }
        };
        Ok(symbol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_ids_are_distinct_and_outside_real_range() {
        let v = Vocabulary::new(4).unwrap();
        let mut reserved = vec![v.mask(), v.none_feature(), v.pad()];
        reserved.extend((0..4).map(|t| v.feature(t)));
        for &s in &reserved {
            assert!(!v.is_real(s));
            assert!((s as usize) < v.symbol_count());
        }
        let mut sorted = reserved.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), reserved.len());
        assert_eq!(v.mask(), 4);
        assert_eq!(v.feature(0), 5);
        assert_eq!(v.feature(3), 8);
        assert_eq!(v.none_feature(), 9);
    }

    #[test]
    fn symbol_names_round_trip() {
        let v = Vocabulary::new(3).unwrap();
        for s in 0..v.symbol_count() as Symbol {
            assert_eq!(v.parse_symbol(&v.symbol_name(s)).unwrap(), s);
        }
        assert!(v.parse_symbol("7").is_err());
        assert!(v.parse_symbol("<f9>").is_err());
    }

    #[test]
    fn zero_vocab_rejected() {
        assert!(Vocabulary::new(0).is_err());
    }
}
