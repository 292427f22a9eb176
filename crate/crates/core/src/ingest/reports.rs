//! Counting reports over the seed list: reference types, multi-chapter
//! citations and publication-year histograms.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::bibtex::{EntryType, RawReference};
use super::classify::BookRecord;
use super::IngestError;

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![])
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Initial and final reference-type counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCounts {
    /// `type -> (initial, final)`.
    pub rows: Vec<(String, usize, usize)>,
    pub initial_total: usize,
    pub final_total: usize,
}

impl TypeCounts {
    pub fn build(refs: &[RawReference], books: &[BookRecord]) -> Self {
        let mut initial: BTreeMap<String, usize> = BTreeMap::new();
        for r in refs {
            *initial.entry(r.entry_type.to_string()).or_default() += 1;
        }
        let mut fin: BTreeMap<String, usize> = BTreeMap::new();
        for b in books {
            *fin.entry(b.ref_type.to_string()).or_default() += 1;
        }
        let mut order: Vec<String> = EntryType::KNOWN.iter().map(|t| t.to_string()).collect();
        for k in initial.keys().chain(fin.keys()) {
            if !order.contains(k) {
                order.push(k.clone());
            }
        }
        let rows = order
            .into_iter()
            .map(|t| {
                let i = initial.get(&t).copied().unwrap_or(0);
                let f = fin.get(&t).copied().unwrap_or(0);
                (t, i, f)
            })
            .collect();
        TypeCounts { rows, initial_total: refs.len(), final_total: books.len() }
    }

    pub fn initial(&self, ty: &str) -> usize {
        self.rows.iter().find(|r| r.0 == ty).map_or(0, |r| r.1)
    }

    pub fn final_count(&self, ty: &str) -> usize {
        self.rows.iter().find(|r| r.0 == ty).map_or(0, |r| r.2)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv_writer();
        w.write_record(["type", "initial_count", "final_count"]).unwrap();
        for (t, i, f) in &self.rows {
            w.write_record([t.clone(), i.to_string(), f.to_string()]).unwrap();
        }
        w.write_record(["Grand Total".to_string(), self.initial_total.to_string(), self.final_total.to_string()])
            .unwrap();
        finish(w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChapterCitation {
    pub title: String,
    pub year: Option<i32>,
    pub chapters: Vec<String>,
}

/// Orders chapter codes as FW, PF, then numbered chapters ascending.
fn chapter_order(tag: &str) -> (u8, u32, String) {
    match tag {
        "FW" => (0, 0, String::new()),
        "PF" => (1, 0, String::new()),
        t => match t.parse::<u32>() {
            Ok(n) => (2, n, String::new()),
            Err(_) => (3, 0, t.to_string()),
        },
    }
}

/// References cited by at least two distinct chapters (counting the
/// Foreword and Preface), sorted by year then title.
pub fn chapter_citation_report(refs: &[RawReference]) -> Vec<ChapterCitation> {
    let mut out: Vec<ChapterCitation> = refs
        .iter()
        .filter_map(|r| {
            let tags: BTreeSet<&str> = r.chapter_tags.iter().map(String::as_str).collect();
            if tags.len() < 2 {
                return None;
            }
            let mut chapters: Vec<String> = tags.into_iter().map(str::to_string).collect();
            chapters.sort_by_key(|t| chapter_order(t));
            Some(ChapterCitation { title: r.title.clone(), year: r.year, chapters })
        })
        .collect();
    out.sort_by(|a, b| {
        a.year
            .unwrap_or(i32::MAX)
            .cmp(&b.year.unwrap_or(i32::MAX))
            .then_with(|| a.title.to_lowercase().cmp(&b.title.to_lowercase()))
    });
    out
}

pub fn chapter_report_csv(rows: &[ChapterCitation]) -> String {
    let mut w = csv_writer();
    w.write_record(["title", "year", "chapters"]).unwrap();
    for r in rows {
        w.write_record([r.title.clone(), r.year.map(|y| y.to_string()).unwrap_or_default(), r.chapters.join(",")])
            .unwrap();
    }
    finish(w)
}

/// Counts per fixed-width year bin, keyed by the bin's inclusive upper
/// bound (width 5: 2001..=2005 is labeled 2005).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: i32,
    pub bins: BTreeMap<i32, usize>,
}

impl Histogram {
    pub fn from_years<I>(years: I, bin_width: i32) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = Option<i32>>,
    {
        if bin_width < 1 {
            return Err(IngestError::InvalidBinWidth(bin_width));
        }
        let mut bins = BTreeMap::new();
        for y in years.into_iter().flatten() {
            *bins.entry(bin_label(y, bin_width)).or_default() += 1;
        }
        Ok(Histogram { bin_width, bins })
    }

    pub fn total(&self) -> usize {
        self.bins.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Label of the fullest bin; ties go to the earliest bin.
    pub fn mode(&self) -> Option<i32> {
        let max = *self.bins.values().max()?;
        self.bins.iter().find(|(_, c)| **c == max).map(|(l, _)| *l)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv_writer();
        w.write_record(["bin_label", "count"]).unwrap();
        for (l, c) in &self.bins {
            w.write_record([l.to_string(), c.to_string()]).unwrap();
        }
        finish(w)
    }
}

pub fn bin_label(year: i32, width: i32) -> i32 {
    (year + width - 1).div_euclid(width) * width
}

pub fn publication_year_histogram(books: &[BookRecord], bin_width: i32) -> Result<Histogram, IngestError> {
    Histogram::from_years(books.iter().map(|b| b.year), bin_width)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagged(title: &str, year: i32, tags: &[&str]) -> RawReference {
        RawReference {
            entry_key: title.replace(' ', ""),
            entry_type: EntryType::Book,
            title: title.into(),
            authors: vec![],
            year: Some(year),
            chapter_tags: tags.iter().map(|t| t.to_string()).collect(),
        }
    }

    #[test]
    fn chapter_report_threshold_and_order() {
        let refs = vec![
            tagged("The structure of scientific revolutions", 1962, &["6", "PF", "1", "FW", "3", "2"]),
            tagged("A single chapter book", 1980, &["4"]),
            tagged("Human behavior and the principle of least effort", 1949, &["3", "1"]),
        ];
        let rows = chapter_citation_report(&refs);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].year, Some(1949));
        assert_eq!(rows[0].chapters, vec!["1", "3"]);
        assert_eq!(rows[1].chapters, vec!["FW", "PF", "1", "2", "3", "6"]);
    }

    #[test]
    fn duplicate_tags_count_once() {
        let rows = chapter_citation_report(&[tagged("X", 2000, &["4", "4"])]);
        assert!(rows.is_empty());
    }

    #[test]
    fn bins_use_inclusive_upper_bound() {
        assert_eq!(bin_label(2003, 5), 2005);
        assert_eq!(bin_label(2005, 5), 2005);
        assert_eq!(bin_label(2001, 5), 2005);
        assert_eq!(bin_label(2000, 5), 2000);
        assert_eq!(bin_label(1962, 1), 1962);
    }

    #[test]
    fn histogram_hand_enumeration() {
        // Bin edges for width 5: (1995, 2000] -> 2000, (2000, 2005] -> 2005.
        let h = Histogram::from_years([Some(1996), Some(2000), Some(2001), None], 5).unwrap();
        let expected: BTreeMap<i32, usize> = [(2000, 2), (2005, 1)].into_iter().collect();
        assert_eq!(h.bins, expected);
        assert_eq!(h.total(), 3);
    }

    #[test]
    fn empty_histogram_and_bad_width() {
        assert!(Histogram::from_years(std::iter::empty(), 5).unwrap().is_empty());
        assert!(matches!(Histogram::from_years([Some(2000)], 0), Err(IngestError::InvalidBinWidth(0))));
    }
}
