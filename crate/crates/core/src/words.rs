//! Digit alphabets, finite words written most significant digit first, the
//! radix order and the distance `delta` that measures carry propagation.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single digit. Alphabets never exceed `2^16` letters.
pub type Digit = u16;

/// The ordered alphabet `{0, 1, ..., size - 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    size: u32,
}

impl Alphabet {
    pub const MAX_SIZE: u32 = 1 << 16;

    pub fn new(size: u32) -> Result<Self> {
        if size == 0 || size > Self::MAX_SIZE {
            return Err(Error::InvalidAlphabet(size as u64));
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn contains(&self, d: Digit) -> bool {
        (d as u32) < self.size
    }

    pub fn digits(&self) -> impl Iterator<Item = Digit> {
        (0..self.size).map(|d| d as Digit)
    }
}

/// A finite word over an [`Alphabet`], most significant digit first.
///
/// The empty word is a valid word and stands for the integer 0 in every
/// system handled by this crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    alphabet: Alphabet,
    digits: Vec<Digit>,
}

impl Word {
    pub fn new(alphabet: Alphabet, digits: Vec<Digit>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| !alphabet.contains(d)) {
            return Err(Error::DigitOutOfRange {
                digit: d as u32,
                size: alphabet.size(),
            });
        }
        Ok(Word { alphabet, digits })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Word {
            alphabet,
            digits: Vec::new(),
        }
    }

    /// Builds a word from digits already known to lie in the alphabet.
    pub(crate) fn from_trusted(alphabet: Alphabet, digits: Vec<Digit>) -> Self {
        debug_assert!(digits.iter().all(|&d| alphabet.contains(d)));
        Word { alphabet, digits }
    }

    /// Parses the textual syntax: `e` for the empty word, digits separated by
    /// `.` when the alphabet has more than ten letters, concatenated otherwise.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "e" || text.is_empty() {
            return Ok(Word::empty(alphabet));
        }
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let digits: Vec<Digit> = if alphabet.size() > 10 || text.contains('.') {
            text.split('.')
                .map(|tok| {
                    tok.parse::<Digit>()
                        .map_err(|_| bad(format!("bad digit `{tok}` in word `{text}`")))
                })
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as Digit)
                        .ok_or_else(|| bad(format!("bad digit `{c}` in word `{text}`")))
                })
                .collect::<Result<_>>()?
        };
        Word::new(alphabet, digits)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<Digit> {
        self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    fn check_same_alphabet(&self, other: &Word) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.size(),
                right: other.alphabet.size(),
            });
        }
        Ok(())
    }

    /// Radix (genealogical) order: shorter words first, then lexicographic.
    pub fn radix_cmp(&self, other: &Word) -> Result<Ordering> {
        self.check_same_alphabet(other)?;
        Ok(radix_cmp_digits(&self.digits, &other.digits))
    }

    /// The longest common prefix `u ∧ v`.
    pub fn longest_common_prefix(&self, other: &Word) -> Result<Word> {
        self.check_same_alphabet(other)?;
        let n = lcp_len(&self.digits, &other.digits);
        Ok(Word::from_trusted(self.alphabet, self.digits[..n].to_vec()))
    }

    /// Number of trailing positions that differ between the two words; the
    /// length of the longer word when lengths differ.
    pub fn delta(&self, other: &Word) -> Result<usize> {
        self.check_same_alphabet(other)?;
        Ok(delta_digits(&self.digits, &other.digits))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_digits(&self.digits, self.alphabet.size()))
    }
}

/// Renders digits in the textual word syntax.
pub fn format_digits(digits: &[Digit], alphabet_size: u32) -> String {
    if digits.is_empty() {
        return "e".to_string();
    }
    if alphabet_size > 10 {
        digits
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(".")
    } else {
        digits
            .iter()
            .map(|&d| char::from_digit(d as u32, 10).unwrap_or('?'))
            .collect()
    }
}

pub fn radix_cmp_digits(u: &[Digit], v: &[Digit]) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| u.cmp(v))
}

pub fn lcp_len(u: &[Digit], v: &[Digit]) -> usize {
    u.iter().zip(v).take_while(|(a, b)| a == b).count()
}

pub fn delta_digits(u: &[Digit], v: &[Digit]) -> usize {
    if u.len() == v.len() {
        u.len() - lcp_len(u, v)
    } else {
        u.len().max(v.len())
    }
}
