//! Words over the alphabet `[1, d]`.
//!
//! A word `(i_n, ..., i_1)` is stored in written order, so the letter at
//! position 0 is `i_n`. The same type indexes monomials `X_{i_n} ... X_{i_1}`
//! and Chebyshev basis elements `P_{i_n,...,i_1}`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite sequence of 1-based generator indices.
///
/// Ordering is length first, then lexicographic; this is the canonical
/// term order used throughout the crate.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u32>);

impl Word {
    /// Wraps letters without checking them against an alphabet size.
    pub fn new(letters: Vec<u32>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word and checks that every letter lies in `[1, d]`.
    pub fn checked(d: usize, letters: Vec<u32>) -> Result<Self> {
        let w = Word(letters);
        w.validate(d)?;
        Ok(w)
    }

    /// `[letter; n]`.
    pub fn repeat(letter: u32, n: usize) -> Self {
        Word(vec![letter; n])
    }

    /// Parses a comma separated list such as `1,2,1`. The empty string
    /// is the empty word.
    pub fn parse_csv(d: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let letters = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::invalid(format!("bad letter {t:?} in word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::checked(d, letters)
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::invalid("number of generators must be positive"));
        }
        match self.0.iter().find(|&&l| l == 0 || l as usize > d) {
            Some(l) => Err(Error::invalid(format!(
                "letter {l} outside [1, {d}] in word {self}"
            ))),
            None => Ok(()),
        }
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// All words of length exactly `n` over `[1, d]`, lexicographic.
    pub fn all_of_length(d: usize, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * d);
            for w in &out {
                for l in 1..=d as u32 {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `n`, in canonical order.
    pub fn all_up_to(d: usize, n: usize) -> Vec<Word> {
        (0..=n).flat_map(|m| Word::all_of_length(d, m)).collect()
    }
}

impl From<&[u32]> for Word {
    fn from(s: &[u32]) -> Self {
        Word(s.to_vec())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_length_then_lex() {
        let mut ws = vec![
            Word::new(vec![2]),
            Word::new(vec![1, 1]),
            Word::empty(),
            Word::new(vec![1]),
        ];
        ws.sort();
        assert_eq!(
            ws,
            vec![
                Word::empty(),
                Word::new(vec![1]),
                Word::new(vec![2]),
                Word::new(vec![1, 1])
            ]
        );
    }

    #[test]
    fn validation_rejects_out_of_range_letters() {
        assert!(Word::checked(2, vec![1, 2]).is_ok());
        assert!(Word::checked(2, vec![1, 3]).is_err());
        assert!(Word::checked(2, vec![0]).is_err());
        assert!(Word::checked(0, vec![]).is_err());
    }

    #[test]
    fn parse_csv() {
        assert_eq!(Word::parse_csv(2, "1, 2,1").unwrap(), Word::new(vec![1, 2, 1]));
        assert_eq!(Word::parse_csv(2, "").unwrap(), Word::empty());
        assert!(Word::parse_csv(2, "1,x").is_err());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(Word::all_up_to(2, 5).len(), 63);
        assert_eq!(Word::all_of_length(3, 3).len(), 27);
        assert_eq!(Word::all_up_to(1, 4).len(), 5);
    }

    #[test]
    fn json_is_a_plain_array() {
        let w = Word::new(vec![1, 2, 1]);
        assert_eq!(serde_json::to_string(&w).unwrap(), "[1,2,1]");
    }
}
