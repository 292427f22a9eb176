//! LCC shelf numbers, the LCC-to-domain crosswalk and heading domain codes.

pub mod codebook;
pub mod domain;
pub mod lcc;
pub mod reports;

use thiserror::Error;

pub use codebook::{code_heading_domains, CodeBook, HeadingDomainCoding};
pub use domain::{lcc_to_domain, CrosswalkTable, DomainCode, DOMAIN_NAMES};
pub use lcc::{parse_lcc, LccClass};
pub use reports::{domain_book_counts, domain_cooccurrence, lcc_report, CrossTab, Table2Report, Table3Report};

#[derive(Debug, Error)]
pub enum CrosswalkError {
    #[error("LCC shelf number {0:?} has no leading class letter")]
    InvalidLcc(String),
    #[error("invalid domain code {0:?} (expected 0-10)")]
    InvalidDomainCode(String),
    #[error("crosswalk: {0}")]
    InvalidCrosswalkRow(String),
    #[error("codebook line {line}: {reason}")]
    CodebookRow { line: usize, reason: String },
    #[error("headings missing from codebook: {}", .0.join("; "))]
    MissingCodings(Vec<String>),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
