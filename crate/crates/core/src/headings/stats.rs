//! Per-book heading-count statistics.

use serde::{Deserialize, Serialize};

use super::HeadingError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadingStats {
    pub mean: f64,
    pub min: usize,
    pub max: usize,
    pub total: usize,
    pub per_book: Vec<(String, usize)>,
}

impl HeadingStats {
    /// Mean rounded to two decimals, as reported.
    pub fn mean_2dp(&self) -> String {
        format!("{:.2}", self.mean)
    }
}

/// Mean, minimum and maximum number of canonical headings per book.
pub fn heading_stats<S: AsRef<str>>(books: &[(String, Vec<S>)]) -> Result<HeadingStats, HeadingError> {
    if books.is_empty() {
        return Err(HeadingError::NoBooks);
    }
    let mut per_book = Vec::with_capacity(books.len());
    for (id, heads) in books {
        let mut distinct: Vec<&str> = heads.iter().map(AsRef::as_ref).collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.is_empty() {
            return Err(HeadingError::ZeroHeadings(id.clone()));
        }
        per_book.push((id.clone(), distinct.len()));
    }
    let total: usize = per_book.iter().map(|(_, n)| n).sum();
    let min = per_book.iter().map(|(_, n)| *n).min().unwrap_or(0);
    let max = per_book.iter().map(|(_, n)| *n).max().unwrap_or(0);
    Ok(HeadingStats { mean: total as f64 / per_book.len() as f64, min, max, total, per_book })
}
