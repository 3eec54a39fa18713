use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a symbol inside its [`Alphabet`]. The index order is the symbol order.
pub type Letter = usize;

/// A finite, non-empty, ordered set of symbols.
///
/// The declaration order is the global symbol order used for every tie-break.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::Domain("alphabet must not be empty".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Domain("empty symbol in alphabet".into()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate symbol `{s}` in alphabet")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Alphabet `a, b, c, ...` of the given size; sizes above 26 use `s26, s27, ...`.
    pub fn letters(size: usize) -> Self {
        let symbols = (0..size).map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("s{i}")
            }
        });
        Alphabet::new(symbols).expect("generated alphabet is well formed")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, a: Letter) -> &str {
        &self.symbols[a]
    }

    pub fn letter(&self, symbol: &str) -> Option<Letter> {
        self.index.get(symbol).copied()
    }

    pub fn letter_or_err(&self, symbol: &str) -> Result<Letter> {
        self.letter(symbol)
            .ok_or_else(|| Error::Domain(format!("symbol `{symbol}` is not in the alphabet")))
    }

    pub fn iter(&self) -> impl Iterator<Item = Letter> {
        0..self.symbols.len()
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a finite word.
    ///
    /// If every symbol is a single character the word may be written without separators
    /// (`"aab"`); otherwise symbols are separated by whitespace or commas (`"a1 c b2"`).
    /// The empty string and `"ε"` denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        let separated = text.contains(|c: char| c.is_whitespace() || c == ',');
        if self.single_char() && !separated {
            return text
                .chars()
                .map(|c| self.letter_or_err(&c.to_string()))
                .collect();
        }
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| self.letter_or_err(s))
            .collect()
    }

    /// Inverse of [`Alphabet::parse_word`]; `ε` for the empty word.
    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.single_char() { "" } else { " " };
        word.iter()
            .map(|&a| self.symbol(a))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.symbols).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "b", "a"]).is_err());
    }

    #[test]
    fn word_round_trip() {
        let sigma = Alphabet::new(["a", "b"]).unwrap();
        let w = sigma.parse_word("abba").unwrap();
        assert_eq!(w, vec![0, 1, 1, 0]);
        assert_eq!(sigma.format_word(&w), "abba");
        assert_eq!(sigma.parse_word("").unwrap(), Vec::<Letter>::new());

        let multi = Alphabet::new(["a1", "b1", "c"]).unwrap();
        let w = multi.parse_word("a1, c b1").unwrap();
        assert_eq!(w, vec![0, 2, 1]);
        assert_eq!(multi.format_word(&w), "a1 c b1");
        assert!(multi.parse_word("a1 d").is_err());
    }
}
