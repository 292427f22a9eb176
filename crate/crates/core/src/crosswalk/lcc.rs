use std::fmt;

use serde::{Deserialize, Serialize};

use super::CrosswalkError;

/// Class letters of an LCC shelf number plus the untouched remainder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LccClass {
    pub class_letters: String,
    pub shelf_remainder: String,
}

impl LccClass {
    /// Single-letter main class (`"HM"` -> `"H"`).
    pub fn top_level(&self) -> &str {
        &self.class_letters[..1]
    }
}

impl fmt::Display for LccClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.class_letters, self.shelf_remainder)
    }
}

/// Extracts up to two leading letters (upper-cased); the rest is kept verbatim.
pub fn parse_lcc(shelf: &str) -> Result<LccClass, CrosswalkError> {
    let s = shelf.trim_start();
    let n = s.chars().take(2).take_while(|c| c.is_ascii_alphabetic()).count();
    if n == 0 {
        return Err(CrosswalkError::InvalidLcc(shelf.to_string()));
    }
    Ok(LccClass { class_letters: s[..n].to_ascii_uppercase(), shelf_remainder: s[n..].to_string() })
}
