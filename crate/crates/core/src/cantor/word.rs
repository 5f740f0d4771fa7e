//! Finite binary words.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite binary word. Positions are 0-indexed; the derived order is
/// lexicographic with `0 < 1`, which on equal lengths agrees with
/// [`Word::index`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<bool>);

impl Word {
    pub fn new(bits: Vec<bool>) -> Self {
        Word(bits)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn zeros(n: usize) -> Self {
        Word(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Word(vec![true; n])
    }

    /// The block marker `1^(n-1) 0`.
    pub fn block_marker(n: usize) -> Self {
        assert!(n >= 1, "block index starts at 1");
        let mut w = Word::ones(n - 1);
        w.push(false);
        w
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, b: bool) {
        self.0[i] = b;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.0.pop()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    /// Rank in the lexicographic order of words of the same length
    /// (first position most significant).
    pub fn index(&self) -> u64 {
        assert!(self.len() <= 64, "word too long to index");
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn from_index(index: u64, len: usize) -> Word {
        assert!(len <= 64, "word too long to index");
        Word((0..len).map(|i| (index >> (len - 1 - i)) & 1 == 1).collect())
    }

    /// All words of length `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Word> {
        assert!(n < 64, "word length too large to enumerate");
        (0..1u64 << n).map(move |k| Word::from_index(k, n))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("invalid bit {c:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl TryFrom<String> for Word {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl From<&[bool]> for Word {
    fn from(b: &[bool]) -> Self {
        Word(b.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let w: Word = "0110".parse().unwrap();
        assert_eq!(w.to_string(), "0110");
        assert_eq!(w.index(), 6);
        assert!("01x".parse::<Word>().is_err());
        assert_eq!(Word::block_marker(3).to_string(), "110");
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let all: Vec<String> = Word::all(2).map(|w| w.to_string()).collect();
        assert_eq!(all, ["00", "01", "10", "11"]);
        let words: Vec<Word> = Word::all(4).collect();
        assert!(words.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(Word::all(0).count(), 1);
    }
}
