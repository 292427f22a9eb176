//! Subject-heading parsing and normalization.
//!
//! Three stages: [`dedup_headings`] (trim + NFC exact uniqueness),
//! [`consolidate`] (fold, facet stripping, merge map, removals) and
//! [`heading_stats`] over the per-book canonical lists.

pub mod consolidate;
pub mod facets;
pub mod merge_map;
pub mod stats;

use thiserror::Error;

use crate::ingest::BookRecord;

pub use consolidate::{consolidate, dedup_headings, Consolidation, LedgerEntry, NormalizationLedger};
pub use facets::{parse_heading, FacetedHeading, Subdivision, SubdivisionKind, Vocabulary};
pub use merge_map::{MergeAction, MergeEntry, MergeMap, Rule};
pub use stats::{heading_stats, HeadingStats};

#[derive(Debug, Error)]
pub enum HeadingError {
    #[error("empty subject heading {0:?}")]
    EmptyHeading(String),
    #[error("merge map line {line}: {reason}")]
    MergeMapRow { line: usize, reason: String },
    #[error("merge map cycle: {}", .0.join(" -> "))]
    MergeMapCycle(Vec<String>),
    #[error("book {0} has no canonical subject headings")]
    ZeroHeadings(String),
    #[error("no books to summarize")]
    NoBooks,
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Distinct raw heading strings of a book, taken from editions whose
/// headings are English or unlabeled, in first-seen order.
pub fn english_raw_headings(book: &BookRecord) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    book.editions
        .iter()
        .filter(|e| e.has_english_headings())
        .flat_map(|e| e.raw_subject_headings.iter())
        .filter(|h| seen.insert(h.as_str()))
        .cloned()
        .collect()
}

/// Per-book trim+NFC unique headings, in first-seen order.
pub fn book_dedup_headings(book: &BookRecord) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    english_raw_headings(book)
        .into_iter()
        .map(|h| consolidate::dedup_form(&h))
        .filter(|h| !h.is_empty() && seen.insert(h.clone()))
        .collect()
}
