//! Seed bibliography and catalog ingestion.

pub mod bibtex;
pub mod catalog;
pub mod classify;
pub mod reports;

use thiserror::Error;

pub use bibtex::{parse_bibliography, to_bibtex, EntryType, RawReference};
pub use catalog::{load_catalog_records, CatalogClient, CatalogRecord, CatalogRecordSet, EditionRecord};
pub use classify::{classify_and_filter, BookRecord, Classification, RefType, RemovalEntry, RemovalLog, RemovalReason};
pub use reports::{chapter_citation_report, publication_year_histogram, ChapterCitation, Histogram, TypeCounts};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed BibTeX entry{} at byte {offset}: {reason}", key.as_ref().map(|k| format!(" {k}")).unwrap_or_default())]
    MalformedEntry { offset: usize, key: Option<String>, reason: String },
    #[error("duplicate BibTeX key: {first} (byte {first_offset}) and {second} (byte {second_offset})")]
    DuplicateKey { first: String, first_offset: usize, second: String, second_offset: usize },
    #[error("catalog line {line}: {reason}")]
    CatalogLine { line: usize, reason: String },
    #[error("catalog records without a seed reference: {}", .0.join(", "))]
    OrphanCatalogRecords(Vec<String>),
    #[error("bin width must be at least 1, got {0}")]
    InvalidBinWidth(i32),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
