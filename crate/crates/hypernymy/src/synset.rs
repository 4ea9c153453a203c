//! WordNet synset identifiers.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A WordNet noun synset identifier (WNID), e.g. `n02084071`.
///
/// The textual form is the part-of-speech letter followed by the synset's
/// 8-digit zero-padded database offset. Only nouns are in scope, so the
/// letter is always `n` and the identifier is fully determined by the
/// offset. Ordering follows the numeric offset, which matches the
/// lexicographic order of the textual form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId {
    offset: u32,
}

impl SynsetId {
    /// Largest offset representable in the 8-digit textual form.
    pub const MAX_OFFSET: u32 = 99_999_999;

    /// Build an identifier from a raw database offset.
    pub fn new(offset: u32) -> Result<Self> {
        if offset > Self::MAX_OFFSET {
            return Err(Error::validation(format!(
                "synset offset {offset} exceeds 8 decimal digits"
            )));
        }
        Ok(SynsetId { offset })
    }

    /// Parse the textual `n<8 digits>` form.
    pub fn parse(s: &str) -> Result<Self> {
        let digits = s
            .strip_prefix('n')
            .ok_or_else(|| Error::validation(format!("synset id {s:?} must start with 'n'")))?;
        if digits.len() != 8 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::validation(format!(
                "synset id {s:?} must be 'n' followed by exactly 8 digits"
            )));
        }
        // 8 ASCII digits always fit in u32.
        Ok(SynsetId {
            offset: digits.parse().unwrap(),
        })
    }

    /// The numeric database offset.
    pub fn offset(self) -> u32 {
        self.offset
    }

    /// Part of speech; always `'n'` in scope.
    pub const fn pos(self) -> char {
        'n'
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{:08}", self.offset)
    }
}

impl fmt::Debug for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SynsetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SynsetId::parse(s)
    }
}

impl Serialize for SynsetId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SynsetId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        SynsetId::parse(&raw).map_err(D::Error::custom)
    }
}
