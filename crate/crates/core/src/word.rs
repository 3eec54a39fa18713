use std::fmt;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

/// An ultimately periodic word `prefix · period^ω`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpWord {
    prefix: Vec<Letter>,
    period: Vec<Letter>,
}

impl UpWord {
    pub fn new(prefix: Vec<Letter>, period: Vec<Letter>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Domain("the period of an up-word must be non-empty".into()));
        }
        Ok(UpWord { prefix, period })
    }

    pub fn parse(alphabet: &Alphabet, prefix: &str, period: &str) -> Result<Self> {
        UpWord::new(alphabet.parse_word(prefix)?, alphabet.parse_word(period)?)
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    /// Number of canonical positions: `|prefix| + |period|`.
    ///
    /// Position `i` of the infinite word is identified with `i` when `i < len()` and with
    /// `|prefix| + (i - |prefix|) mod |period|` otherwise.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn letter_at(&self, pos: usize) -> Letter {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.period[(pos - self.prefix.len()) % self.period.len()]
        }
    }

    /// Canonical successor position.
    pub fn next(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    /// The suffix starting at canonical position `pos`, as an up-word.
    pub fn suffix(&self, pos: usize) -> UpWord {
        if pos < self.prefix.len() {
            UpWord {
                prefix: self.prefix[pos..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let k = pos - self.prefix.len();
            let mut period = self.period[k..].to_vec();
            period.extend_from_slice(&self.period[..k]);
            UpWord {
                prefix: Vec::new(),
                period,
            }
        }
    }

    /// The finite word made of the first `n` letters.
    pub fn take(&self, n: usize) -> Vec<Letter> {
        (0..n)
            .map(|i| {
                if i < self.prefix.len() {
                    self.prefix[i]
                } else {
                    self.period[(i - self.prefix.len()) % self.period.len()]
                }
            })
            .collect()
    }

    pub fn check_alphabet(&self, size: usize) -> Result<()> {
        if self.prefix.iter().chain(&self.period).any(|&a| a >= size) {
            return Err(Error::Domain("up-word uses a letter outside the alphabet".into()));
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        DisplayUpWord {
            word: self,
            alphabet,
        }
    }

    /// All up-words with `|prefix| ≤ max_prefix` and `1 ≤ |period| ≤ max_period` over an
    /// alphabet of `size` letters, in length-lexicographic order.
    pub fn enumerate(size: usize, max_prefix: usize, max_period: usize) -> Vec<UpWord> {
        let prefixes: Vec<Vec<Letter>> = (0..=max_prefix).flat_map(|n| words_of_length(size, n)).collect();
        let periods: Vec<Vec<Letter>> = (1..=max_period).flat_map(|n| words_of_length(size, n)).collect();
        let mut out = Vec::with_capacity(prefixes.len() * periods.len());
        for u in &prefixes {
            for v in &periods {
                out.push(UpWord {
                    prefix: u.clone(),
                    period: v.clone(),
                });
            }
        }
        out
    }
}

/// All words of length `n` over `size` letters in lexicographic order.
pub fn words_of_length(size: usize, n: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * size);
        for w in &out {
            for a in 0..size {
                let mut w2 = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

impl fmt::Debug for UpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({:?})^ω", self.prefix, self.period)
    }
}

struct DisplayUpWord<'a> {
    word: &'a UpWord,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayUpWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({})^ω",
            self.alphabet.format_word(&self.word.prefix),
            self.alphabet.format_word(&self.word.period)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_wrap_into_period() {
        let w = UpWord::new(vec![0, 1], vec![1, 0, 0]).unwrap();
        assert_eq!(w.positions(), 5);
        assert_eq!(w.next(4), 2);
        assert_eq!(w.take(8), vec![0, 1, 1, 0, 0, 1, 0, 0]);
        assert_eq!(w.suffix(3), UpWord::new(vec![], vec![0, 0, 1]).unwrap());
        assert_eq!(w.suffix(1), UpWord::new(vec![1], vec![1, 0, 0]).unwrap());
    }

    #[test]
    fn enumeration_counts() {
        // prefixes: 1 + 2 + 4, periods: 2 + 4
        assert_eq!(UpWord::enumerate(2, 2, 2).len(), 7 * 6);
        assert!(UpWord::new(vec![0], vec![]).is_err());
    }
}
