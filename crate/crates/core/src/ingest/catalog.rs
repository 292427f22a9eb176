//! Edition-level catalog records.
//!
//! Records come from a JSON Lines file, one object per edition:
//! `{book_id, edition_id, subject_headings: [..], lcc?, heading_language?}`.
//! [`CatalogClient`] is the lookup seam; only the fixture backend
//! ([`CatalogRecordSet`]) ships.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bibtex::{slugify, RawReference};
use super::IngestError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditionRecord {
    pub edition_id: String,
    pub raw_subject_headings: Vec<String>,
    pub language_of_headings: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lcc: Option<String>,
}

impl EditionRecord {
    /// English or unspecified heading language.
    pub fn has_english_headings(&self) -> bool {
        match &self.language_of_headings {
            None => true,
            Some(l) => is_english_tag(l),
        }
    }
}

pub fn is_english_tag(tag: &str) -> bool {
    let t = tag.trim().to_ascii_lowercase();
    t.is_empty() || t == "en" || t == "eng" || t == "english" || t.starts_with("en-")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub book_id: String,
    pub editions: Vec<EditionRecord>,
    pub lcc_shelf_number: Option<String>,
}

impl CatalogRecord {
    /// Union over editions, as a multiset, in file order.
    pub fn raw_heading_multiset(&self) -> Vec<&str> {
        self.editions.iter().flat_map(|e| e.raw_subject_headings.iter().map(String::as_str)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.editions.is_empty()
    }

    /// At least one heading in an English (or unspecified-language) edition.
    pub fn has_english_headings(&self) -> bool {
        self.editions.iter().any(|e| e.has_english_headings() && !e.raw_subject_headings.is_empty())
    }
}

/// Lookup seam between seed filtering and a catalog backend.
pub trait CatalogClient {
    /// Returns the record for `book_id`; a missing book is an empty record.
    fn lookup(&self, book_id: &str) -> CatalogRecord;
}

#[derive(Debug, Clone, Default)]
pub struct CatalogRecordSet {
    records: BTreeMap<String, CatalogRecord>,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
struct EditionLine {
    book_id: Option<String>,
    edition_id: Option<String>,
    #[serde(default)]
    subject_headings: Vec<String>,
    lcc: Option<String>,
    heading_language: Option<String>,
}

impl CatalogRecordSet {
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut set = CatalogRecordSet::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| IngestError::CatalogLine { line: line_no, reason };
            let ed: EditionLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            let book_id = ed.book_id.filter(|b| !b.trim().is_empty()).ok_or_else(|| bad("missing book_id".into()))?;
            let edition_id =
                ed.edition_id.filter(|b| !b.trim().is_empty()).ok_or_else(|| bad("missing edition_id".into()))?;
            if let Some(h) = ed.subject_headings.iter().find(|h| h.trim().is_empty()) {
                return Err(bad(format!("blank subject heading {h:?}")));
            }
            let rec = set
                .records
                .entry(book_id.clone())
                .or_insert_with(|| CatalogRecord { book_id: book_id.clone(), ..Default::default() });
            if rec.editions.iter().any(|e| e.edition_id == edition_id) {
                return Err(bad(format!("duplicate edition {edition_id} for {book_id}")));
            }
            let lcc = ed.lcc.map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
            if let Some(l) = &lcc {
                match &rec.lcc_shelf_number {
                    None => rec.lcc_shelf_number = Some(l.clone()),
                    Some(first) if first != l => {
                        let w = format!("{book_id}: edition {edition_id} has LCC {l:?}, keeping {first:?}");
                        log::warn!("{w}");
                        set.warnings.push(w);
                    }
                    _ => {}
                }
            }
            rec.editions.push(EditionRecord {
                edition_id,
                raw_subject_headings: ed.subject_headings,
                language_of_headings: ed.heading_language,
                lcc,
            });
        }
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let text =
            fs::read_to_string(path).map_err(|e| IngestError::Io { path: path.display().to_string(), source: e })?;
        Self::parse(&text)
    }

    pub fn get(&self, book_id: &str) -> Option<&CatalogRecord> {
        self.records.get(book_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn edition_count(&self) -> usize {
        self.records.values().map(|r| r.editions.len()).sum()
    }

    /// Catalog books with no matching seed reference.
    pub fn check_orphans(&self, refs: &[RawReference]) -> Result<(), IngestError> {
        let known: BTreeSet<String> = refs.iter().map(|r| slugify(&r.entry_key)).collect();
        let orphans: Vec<String> = self.records.keys().filter(|k| !known.contains(*k)).cloned().collect();
        if orphans.is_empty() {
            Ok(())
        } else {
            Err(IngestError::OrphanCatalogRecords(orphans))
        }
    }
}

impl CatalogClient for CatalogRecordSet {
    fn lookup(&self, book_id: &str) -> CatalogRecord {
        self.records
            .get(book_id)
            .cloned()
            .unwrap_or_else(|| CatalogRecord { book_id: book_id.to_string(), ..Default::default() })
    }
}

/// Loads the JSON Lines catalog fixture.
pub fn load_catalog_records(path: &Path) -> Result<CatalogRecordSet, IngestError> {
    CatalogRecordSet::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn editions_group_by_book_with_multiset_union() {
        let text = r#"{"book_id":"b1","edition_id":"e1","subject_headings":["A","B"]}
{"book_id":"b1","edition_id":"e2","subject_headings":["B","C"]}
{"book_id":"b1","edition_id":"e3","subject_headings":["C"]}"#;
        let set = CatalogRecordSet::parse(text).unwrap();
        let rec = set.get("b1").unwrap();
        let mut heads = rec.raw_heading_multiset();
        heads.sort();
        assert_eq!(heads, vec!["A", "B", "B", "C", "C"]);
    }

    #[test]
    fn lcc_comes_from_first_supplier_and_conflicts_warn() {
        let text = r#"{"book_id":"b","edition_id":"1","subject_headings":["A"]}
{"book_id":"b","edition_id":"2","subject_headings":["A"],"lcc":"Q175 .K95"}
{"book_id":"b","edition_id":"3","subject_headings":["A"],"lcc":"Q175 .K9"}
{"book_id":"c","edition_id":"1","subject_headings":["A"]}"#;
        let set = CatalogRecordSet::parse(text).unwrap();
        assert_eq!(set.get("b").unwrap().lcc_shelf_number.as_deref(), Some("Q175 .K95"));
        assert_eq!(set.warnings.len(), 1);
        assert_eq!(set.get("c").unwrap().lcc_shelf_number, None);
    }

    #[test]
    fn missing_book_id_names_the_line() {
        let text = "{\"book_id\":\"b\",\"edition_id\":\"1\"}\n{\"edition_id\":\"2\"}\n";
        match CatalogRecordSet::parse(text) {
            Err(IngestError::CatalogLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unreadable_line_is_an_error() {
        assert!(CatalogRecordSet::parse("{not json}\n").is_err());
    }

    #[test]
    fn english_test_accepts_unspecified_language() {
        let text = r#"{"book_id":"g","edition_id":"1","subject_headings":["Wissenschaft"],"heading_language":"ger"}
{"book_id":"u","edition_id":"1","subject_headings":["Science"]}"#;
        let set = CatalogRecordSet::parse(text).unwrap();
        assert!(!set.get("g").unwrap().has_english_headings());
        assert!(set.get("u").unwrap().has_english_headings());
        assert!(set.lookup("zzz").is_empty());
    }
}
