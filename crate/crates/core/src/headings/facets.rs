//! Faceted parsing of subject-heading strings.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::HeadingError;

/// The delimiter every variant is rewritten to.
pub const CANONICAL_DELIMITER: &str = " – ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubdivisionKind {
    Topical,
    FormMaterial,
    Geographic,
    Temporal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subdivision {
    pub text: String,
    pub kind: SubdivisionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetedHeading {
    pub raw: String,
    pub main_topic: String,
    pub subdivisions: Vec<Subdivision>,
    /// Main topic plus topical subdivisions, display-folded.
    pub canonical: String,
}

impl FacetedHeading {
    pub fn has_kind(&self, kind: SubdivisionKind) -> bool {
        self.subdivisions.iter().any(|s| s.kind == kind)
    }

    pub fn topical(&self) -> impl Iterator<Item = &str> {
        self.subdivisions.iter().filter(|s| s.kind == SubdivisionKind::Topical).map(|s| s.text.as_str())
    }
}

const DEFAULT_FORMS: &[&str] = &[
    "Abstracts",
    "Atlases",
    "Bibliography",
    "Biography",
    "Case studies",
    "Catalogs",
    "Collected works",
    "Congresses",
    "Databases",
    "Dictionaries",
    "Directories",
    "Early works to 1800",
    "Encyclopedias",
    "Exhibitions",
    "Guidebooks",
    "Handbooks, manuals, etc.",
    "Handbooks",
    "Indexes",
    "Juvenile literature",
    "Maps",
    "Periodicals",
    "Pictorial works",
    "Popular works",
    "Problems, exercises, etc.",
    "Sources",
    "Textbooks",
];

const DEFAULT_PLACES: &[&str] = &[
    "Africa",
    "Asia",
    "Australia",
    "Canada",
    "Cardiff",
    "China",
    "England",
    "Europe",
    "France",
    "Germany",
    "Great Britain",
    "India",
    "Ireland",
    "Italy",
    "Japan",
    "Latin America",
    "London",
    "Netherlands",
    "Russia",
    "Scotland",
    "Soviet Union",
    "Sweden",
    "United States",
    "Wales",
];

const DEFAULT_NAMES: &[&str] = &["Lotka"];

/// Form list, gazetteer and personal-name list used by parsing and removal.
/// Terms are stored by their [`fold_key`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    forms: BTreeSet<String>,
    places: BTreeSet<String>,
    names: BTreeSet<String>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::from_lists(DEFAULT_FORMS, DEFAULT_PLACES, DEFAULT_NAMES)
    }
}

impl Vocabulary {
    pub fn from_lists<S: AsRef<str>>(forms: &[S], places: &[S], names: &[S]) -> Self {
        let keys = |xs: &[S]| xs.iter().map(|s| fold_key(s.as_ref())).filter(|k| !k.is_empty()).collect();
        Vocabulary { forms: keys(forms), places: keys(places), names: keys(names) }
    }

    pub fn with_forms<S: AsRef<str>>(mut self, forms: &[S]) -> Self {
        self.forms = forms.iter().map(|s| fold_key(s.as_ref())).collect();
        self
    }

    pub fn with_places<S: AsRef<str>>(mut self, places: &[S]) -> Self {
        self.places = places.iter().map(|s| fold_key(s.as_ref())).collect();
        self
    }

    pub fn with_names<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.names = names.iter().map(|s| fold_key(s.as_ref())).collect();
        self
    }

    pub fn is_form(&self, text: &str) -> bool {
        self.forms.contains(&fold_key(text))
    }

    pub fn is_place(&self, text: &str) -> bool {
        self.places.contains(&fold_key(text))
    }

    pub fn is_name(&self, text: &str) -> bool {
        self.names.contains(&fold_key(text))
    }

    /// Parses with this vocabulary. See [`parse_heading`].
    pub fn parse(&self, raw: &str) -> Result<FacetedHeading, HeadingError> {
        let segments: Vec<String> =
            split_segments(raw).iter().map(|s| fold_display(s)).filter(|s| !s.is_empty()).collect();
        let Some((main, rest)) = segments.split_first() else {
            return Err(HeadingError::EmptyHeading(raw.to_string()));
        };
        let mut subdivisions = Vec::with_capacity(rest.len());
        let mut after_place = self.is_place(main);
        for text in rest {
            let kind = if self.is_form(text) {
                SubdivisionKind::FormMaterial
            } else if is_period(text) {
                SubdivisionKind::Temporal
            } else if self.is_place(text) || after_place {
                SubdivisionKind::Geographic
            } else {
                SubdivisionKind::Topical
            };
            after_place = kind == SubdivisionKind::Geographic;
            subdivisions.push(Subdivision { text: text.clone(), kind });
        }
        let canonical = recompose(
            std::iter::once(main.as_str())
                .chain(subdivisions.iter().filter(|s| s.kind == SubdivisionKind::Topical).map(|s| s.text.as_str())),
        );
        Ok(FacetedHeading { raw: raw.to_string(), main_topic: main.clone(), subdivisions, canonical })
    }
}

/// Reads a one-term-per-line list; blank lines and `#` comments are skipped.
pub fn load_term_list(path: &Path) -> Result<Vec<String>, HeadingError> {
    let text =
        fs::read_to_string(path).map_err(|e| HeadingError::Io { path: path.display().to_string(), source: e })?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_string).collect())
}

/// Parses a heading with the built-in vocabulary.
///
/// Splits on `" – "`, `" — "`, `" / "` and `"--"`; the first segment is the
/// main topic. A subdivision is form/material if listed as a form, temporal
/// if it looks like a period, geographic if it is a known place or follows
/// one, and topical otherwise.
pub fn parse_heading(raw: &str) -> Result<FacetedHeading, HeadingError> {
    Vocabulary::default().parse(raw)
}

fn delimiter_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\s+[–—]\s+|\s+/\s+|\s*--\s*").unwrap())
}

fn period_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?ix)^(?:
                \d{1,2}(?:st|nd|rd|th)(?:\s*(?:-|–|and|or|to)\s*\d{1,2}(?:st|nd|rd|th))?\s+centur(?:y|ies)(?:\s*b\.?c\.?)?
              | \d{3,4}\s*[-–]\s*(?:\d{2,4})?
              | to\s+\d{3,4}
            )$",
        )
        .unwrap()
    })
}

pub fn is_period(text: &str) -> bool {
    period_re().is_match(text.trim())
}

pub fn split_segments(raw: &str) -> Vec<&str> {
    delimiter_re().split(raw).map(str::trim).collect()
}

/// NFC, collapsed whitespace, trailing `.,;:` stripped, first letter upper-cased.
pub fn fold_display(segment: &str) -> String {
    let nfc: String = segment.nfc().collect();
    let collapsed = nfc.split_whitespace().collect::<Vec<_>>().join(" ");
    let trimmed = collapsed.trim_end_matches(|c: char| matches!(c, '.' | ',' | ';' | ':') || c.is_whitespace());
    let mut chars = trimmed.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Case- and punctuation-insensitive key for one term.
pub fn fold_key(text: &str) -> String {
    text.nfkd()
        .filter(|c| !unicode_normalization::char::is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric())
        .collect()
}

/// Matching key for a whole heading: per-segment [`fold_key`] joined by `/`.
pub fn heading_key(text: &str) -> String {
    split_segments(text).into_iter().map(fold_key).filter(|k| !k.is_empty()).collect::<Vec<_>>().join("/")
}

/// Display-folds every segment and joins them with the canonical delimiter.
pub fn display_fold(text: &str) -> String {
    recompose(
        split_segments(text)
            .into_iter()
            .map(fold_display)
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str),
    )
}

pub fn recompose<'a>(segments: impl IntoIterator<Item = &'a str>) -> String {
    segments.into_iter().collect::<Vec<_>>().join(CANONICAL_DELIMITER)
}
