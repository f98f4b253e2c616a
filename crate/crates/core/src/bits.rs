//! Bit words and their computational-basis indices.
//!
//! A word `x_1 x_2 ... x_n` maps to the index whose binary expansion is the
//! word read left to right, so `x_1` is the most significant bit. Every
//! state vector and matrix in the crate uses this ordering.

use crate::error::{Error, Result};

/// A single cell value, always 0 or 1.
pub type Bit = u8;

/// Basis index of `word` (first bit most significant).
pub fn word_to_index(word: &[Bit]) -> usize {
    word.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b & 1))
}

/// The `len`-bit word whose basis index is `index`.
pub fn index_to_word(index: usize, len: usize) -> Vec<Bit> {
    (0..len)
        .map(|k| ((index >> (len - 1 - k)) & 1) as Bit)
        .collect()
}

pub fn weight(word: &[Bit]) -> usize {
    word.iter().filter(|&&b| b != 0).count()
}

pub fn is_null(word: &[Bit]) -> bool {
    word.iter().all(|&b| b == 0)
}

/// Sitewise XOR of two equal-length words.
pub fn xor_words(a: &[Bit], b: &[Bit]) -> Vec<Bit> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<Bit>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidBit(other)),
        })
        .collect()
}

pub fn format_bits(word: &[Bit]) -> String {
    word.iter().map(|&b| if b != 0 { '1' } else { '0' }).collect()
}
