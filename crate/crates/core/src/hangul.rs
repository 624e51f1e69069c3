//! Hangul syllable helpers for the template attachment rules.

use thiserror::Error;

/// First codepoint of the precomposed syllable block (가, U+AC00).
pub const SYLLABLE_BASE: u32 = 0xAC00;
/// Last codepoint of the precomposed syllable block (힣, U+D7A3).
pub const SYLLABLE_LAST: u32 = 0xD7A3;
/// Number of trailing-consonant slots per leading/vowel pair, including "none".
const TRAILING_COUNT: u32 = 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HangulError {
    #[error("not a precomposed hangul syllable: {0:?}")]
    NotHangulSyllable(char),
}

/// Returns true when `c` lies in the precomposed syllable block U+AC00..=U+D7A3.
pub fn is_hangul_syllable(c: char) -> bool {
    (SYLLABLE_BASE..=SYLLABLE_LAST).contains(&(c as u32))
}

/// Returns true when the syllable ends in a final consonant (batchim).
///
/// The syllable block is laid out leading-major, so the trailing consonant
/// index is `(codepoint - SYLLABLE_BASE) % 28`, with 0 meaning "no final".
pub fn batchim_final(c: char) -> Result<bool, HangulError> {
    if !is_hangul_syllable(c) {
        return Err(HangulError::NotHangulSyllable(c));
    }
    Ok(!(c as u32 - SYLLABLE_BASE).is_multiple_of(TRAILING_COUNT))
}

/// Final syllable of a string, used to pick the copula form for noun phrases.
pub fn final_syllable(s: &str) -> Option<char> {
    s.trim_end().chars().last()
}
