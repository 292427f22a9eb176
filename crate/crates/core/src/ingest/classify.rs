//! Seed-list filtering: drop non-books, references without English
//! headings, and duplicates; assign the final reference type.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::bibtex::{slugify, EntryType, RawReference};
use super::catalog::{CatalogClient, EditionRecord};

/// Final reference categories kept after filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefType {
    Book,
    Ebook,
    InCollection,
    InProceedings,
}

impl RefType {
    pub const ALL: [RefType; 4] = [RefType::Book, RefType::Ebook, RefType::InCollection, RefType::InProceedings];

    pub fn as_str(self) -> &'static str {
        match self {
            RefType::Book => "book",
            RefType::Ebook => "ebook",
            RefType::InCollection => "incollection",
            RefType::InProceedings => "inproceedings",
        }
    }

    fn from_entry(t: &EntryType) -> Option<RefType> {
        match t {
            EntryType::Book => Some(RefType::Book),
            EntryType::Ebook => Some(RefType::Ebook),
            EntryType::InCollection => Some(RefType::InCollection),
            EntryType::InProceedings => Some(RefType::InProceedings),
            _ => None,
        }
    }
}

impl fmt::Display for RefType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookRecord {
    pub book_id: String,
    pub entry_key: String,
    pub title: String,
    #[serde(default)]
    pub authors: Vec<String>,
    pub year: Option<i32>,
    pub ref_type: RefType,
    pub lcc_shelf_number: Option<String>,
    pub editions: Vec<EditionRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    NotABook,
    NoEnglishHeadings,
    Duplicate,
}

impl RemovalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RemovalReason::NotABook => "not_a_book",
            RemovalReason::NoEnglishHeadings => "no_english_headings",
            RemovalReason::Duplicate => "duplicate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalEntry {
    pub entry_key: String,
    pub reason: RemovalReason,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalLog {
    pub entries: Vec<RemovalEntry>,
}

impl RemovalLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, reason: RemovalReason) -> usize {
        self.entries.iter().filter(|e| e.reason == reason).count()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["entry_key", "reason", "note"]).expect("in-memory write");
        for e in &self.entries {
            w.write_record([e.entry_key.as_str(), e.reason.as_str(), e.note.as_str()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Classification {
    pub books: Vec<BookRecord>,
    pub removals: RemovalLog,
    pub warnings: Vec<String>,
}

/// Duplicate-detection key: case-folded, punctuation-stripped title plus year.
pub fn duplicate_key(title: &str, year: Option<i32>) -> String {
    let folded: String = title
        .nfkd()
        .filter(|c| !unicode_normalization::char::is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    let words: Vec<&str> = folded.split_whitespace().collect();
    match year {
        Some(y) => format!("{}|{y}", words.join(" ")),
        None => format!("{}|", words.join(" ")),
    }
}

fn first_author_surname(authors: &[String]) -> Option<String> {
    let first = authors.first()?;
    let surname = match first.split_once(',') {
        Some((s, _)) => s.to_string(),
        None => first.split_whitespace().last().unwrap_or("").to_string(),
    };
    let s = duplicate_key(&surname, None);
    let s = s.trim_end_matches('|').to_string();
    (!s.is_empty()).then_some(s)
}

/// Filters the seed list against the catalog.
///
/// Checks run in order: entry type, catalog presence, English headings,
/// duplicate title+year. Two entries with the same title and year but
/// different first authors are both kept and a warning is recorded.
pub fn classify_and_filter(refs: &[RawReference], catalog: &dyn CatalogClient) -> Classification {
    let mut out = Classification::default();
    let mut seen: HashMap<String, (String, Option<String>)> = HashMap::new();
    for r in refs {
        let remove = |reason, note: String| RemovalEntry { entry_key: r.entry_key.clone(), reason, note };
        let ref_type = match (&r.entry_type, RefType::from_entry(&r.entry_type)) {
            (_, Some(t)) => t,
            (EntryType::Article, None) => {
                out.removals.entries.push(remove(RemovalReason::NotABook, "journal article".into()));
                continue;
            }
            (EntryType::ElectronicHandbook, None) => {
                out.removals.entries.push(remove(RemovalReason::NotABook, "software tool handbook".into()));
                continue;
            }
            (other, None) => {
                out.removals.entries.push(remove(RemovalReason::NotABook, format!("unrecognized entry type @{other}")));
                continue;
            }
        };
        let book_id = slugify(&r.entry_key);
        let record = catalog.lookup(&book_id);
        if record.is_empty() {
            let note = match ref_type {
                RefType::InProceedings => "proceedings not published as a book; not cataloged",
                _ => "no catalog record (not cataloged as a book)",
            };
            out.removals.entries.push(remove(RemovalReason::NotABook, note.into()));
            continue;
        }
        if !record.has_english_headings() {
            let langs: Vec<String> = record
                .editions
                .iter()
                .filter_map(|e| e.language_of_headings.clone())
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            out.removals.entries.push(remove(
                RemovalReason::NoEnglishHeadings,
                format!("heading languages: {}", if langs.is_empty() { "none".into() } else { langs.join(";") }),
            ));
            continue;
        }
        let key = duplicate_key(&r.title, r.year);
        let surname = first_author_surname(&r.authors);
        if let Some((kept_key, kept_surname)) = seen.get(&key) {
            let distinct = matches!((kept_surname, &surname), (Some(a), Some(b)) if a != b);
            if !distinct {
                out.removals.entries.push(remove(RemovalReason::Duplicate, format!("duplicates {kept_key}")));
                continue;
            }
            let w = format!(
                "{} and {} share title and year but have different authors; keeping both",
                kept_key, r.entry_key
            );
            log::warn!("{w}");
            out.warnings.push(w);
        } else {
            seen.insert(key, (r.entry_key.clone(), surname));
        }
        out.books.push(BookRecord {
            book_id,
            entry_key: r.entry_key.clone(),
            title: r.title.clone(),
            authors: r.authors.clone(),
            year: r.year,
            ref_type,
            lcc_shelf_number: record.lcc_shelf_number.clone(),
            editions: record.editions.clone(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::catalog::CatalogRecordSet;

    fn book(key: &str, title: &str, year: i32, author: &str) -> RawReference {
        RawReference {
            entry_key: key.into(),
            entry_type: EntryType::Book,
            title: title.into(),
            authors: vec![author.into()],
            year: Some(year),
            chapter_tags: vec![],
        }
    }

    fn catalog(ids: &[&str]) -> CatalogRecordSet {
        let lines: Vec<String> = ids
            .iter()
            .map(|id| format!(r#"{{"book_id":"{id}","edition_id":"e1","subject_headings":["Science"]}}"#))
            .collect();
        CatalogRecordSet::parse(&lines.join("\n")).unwrap()
    }

    #[test]
    fn single_book_is_kept() {
        let refs = vec![book("k1", "Little science, big science", 1963, "Price, D.")];
        let c = classify_and_filter(&refs, &catalog(&["k1"]));
        assert_eq!(c.books.len(), 1);
        assert!(c.removals.is_empty());
        assert_eq!(c.books[0].ref_type, RefType::Book);
    }

    #[test]
    fn same_title_and_year_is_a_duplicate() {
        let refs = vec![
            book("price1963", "Little science, big science", 1963, "Price, D."),
            book("price1963b", "Little Science, Big Science.", 1963, "Price, Derek"),
        ];
        let c = classify_and_filter(&refs, &catalog(&["price1963", "price1963b"]));
        assert_eq!(c.books.len(), 1);
        assert_eq!(c.removals.entries[0].entry_key, "price1963b");
        assert_eq!(c.removals.entries[0].reason, RemovalReason::Duplicate);
    }

    #[test]
    fn distinct_authors_with_same_title_are_kept_with_warning() {
        let refs =
            vec![book("a", "Network science", 2005, "Smith, A."), book("b", "Network science", 2005, "Jones, B.")];
        let c = classify_and_filter(&refs, &catalog(&["a", "b"]));
        assert_eq!(c.books.len(), 2);
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn articles_and_uncataloged_entries_are_not_books() {
        let mut art = book("art", "Networks of scientific papers", 1965, "Price, D.");
        art.entry_type = EntryType::Article;
        let mut proc_ = book("proc", "Visualizing similarity", 2009, "Gabel, J.");
        proc_.entry_type = EntryType::InProceedings;
        let refs = vec![art, proc_];
        let c = classify_and_filter(&refs, &catalog(&["art"]));
        assert!(c.books.is_empty());
        assert_eq!(c.removals.count(RemovalReason::NotABook), 2);
    }

    #[test]
    fn non_english_headings_are_removed() {
        let set = CatalogRecordSet::parse(
            r#"{"book_id":"de","edition_id":"1","subject_headings":["Wissenschaft"],"heading_language":"ger"}"#,
        )
        .unwrap();
        let c = classify_and_filter(&[book("de", "Einführung", 2009, "Havemann, F.")], &set);
        assert_eq!(c.removals.count(RemovalReason::NoEnglishHeadings), 1);
    }

    #[test]
    fn duplicate_key_ignores_case_and_punctuation() {
        assert_eq!(
            duplicate_key("Linked: The New Science of Networks", Some(2002)),
            duplicate_key("linked -- the new science of networks.", Some(2002))
        );
        assert_ne!(duplicate_key("Linked", Some(2002)), duplicate_key("Linked", Some(2003)));
    }
}
