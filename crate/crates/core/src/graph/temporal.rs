use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::bipartite::{ConceptGraph, NodeKind};
use super::GraphError;

/// Inclusive year range with its legend label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YearBin {
    pub label: String,
    pub start: i32,
    pub end: i32,
}

impl YearBin {
    /// Parses `"1750-1900"` or a single year such as `"2011"`.
    pub fn parse(s: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::InvalidYearBin(s.to_string());
        let t = s.trim();
        let (a, b) = match t.split_once('-') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, t),
        };
        let start: i32 = a.parse().map_err(|_| bad())?;
        let end: i32 = b.parse().map_err(|_| bad())?;
        if end < start {
            return Err(bad());
        }
        Ok(YearBin { label: t.to_string(), start, end })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

impl fmt::Display for YearBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Ordered, disjoint year bins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearScheme {
    bins: Vec<YearBin>,
}

pub const DEFAULT_YEAR_BINS: [&str; 8] =
    ["1750-1900", "1901-1949", "1950-1969", "1970-1979", "1980-1989", "1990-1999", "2000-2010", "2011"];

impl Default for YearScheme {
    fn default() -> Self {
        YearScheme::parse(&DEFAULT_YEAR_BINS).expect("default scheme is valid")
    }
}

impl YearScheme {
    pub fn new(bins: Vec<YearBin>) -> Result<Self, GraphError> {
        for w in bins.windows(2) {
            if w[1].start <= w[0].end {
                return Err(GraphError::InvalidYearBin(format!("{} overlaps or precedes {}", w[1], w[0])));
            }
        }
        Ok(YearScheme { bins })
    }

    pub fn parse<S: AsRef<str>>(labels: &[S]) -> Result<Self, GraphError> {
        YearScheme::new(labels.iter().map(|l| YearBin::parse(l.as_ref())).collect::<Result<_, _>>()?)
    }

    pub fn bins(&self) -> &[YearBin] {
        &self.bins
    }

    pub fn position(&self, year: i32) -> Option<usize> {
        self.bins.iter().position(|b| b.contains(year))
    }
}

pub fn assign_year_bin(year: i32, scheme: &YearScheme) -> Result<&YearBin, GraphError> {
    scheme.position(year).map(|i| &scheme.bins[i]).ok_or(GraphError::UncoveredYear(year))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceReport {
    pub max_year: i32,
    pub books_kept: usize,
    pub books_dropped: usize,
    pub subjects_kept: usize,
    /// Labels of subjects that lost every book.
    pub vanished_subjects: Vec<String>,
}

/// Keeps books dated at or before `max_year` (undated books are dropped)
/// and subjects with at least one remaining book.
pub fn temporal_slice(g: &ConceptGraph, max_year: i32) -> (ConceptGraph, SliceReport) {
    let mut keep: Vec<bool> =
        g.nodes().iter().map(|n| n.kind == NodeKind::Book && n.year.is_some_and(|y| y <= max_year)).collect();
    for e in g.edges() {
        if keep[e.book] {
            keep[e.subject] = true;
        }
    }
    let sliced = g.induced(&keep);
    let before: BTreeSet<&str> = g.subject_labels();
    let after: BTreeSet<&str> = sliced.subject_labels();
    let report = SliceReport {
        max_year,
        books_kept: sliced.count_kind(NodeKind::Book),
        books_dropped: g.count_kind(NodeKind::Book) - sliced.count_kind(NodeKind::Book),
        subjects_kept: after.len(),
        vanished_subjects: before.difference(&after).map(|s| s.to_string()).collect(),
    };
    (sliced, report)
}
