use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::domain::DomainCode;
use super::CrosswalkError;
use crate::headings::facets::heading_key;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadingDomainCoding {
    pub heading: String,
    pub primary: DomainCode,
    pub secondary: Option<DomainCode>,
}

impl HeadingDomainCoding {
    pub fn new(heading: &str, primary: DomainCode, secondary: Option<DomainCode>) -> Result<Self, CrosswalkError> {
        if secondary == Some(primary) {
            return Err(CrosswalkError::CodebookRow {
                line: 0,
                reason: format!("{heading:?} has primary and secondary both {primary}"),
            });
        }
        Ok(HeadingDomainCoding { heading: heading.to_string(), primary, secondary })
    }

    pub fn codes(&self) -> Vec<DomainCode> {
        std::iter::once(self.primary).chain(self.secondary).collect()
    }
}

/// Human-supplied heading codings (`heading,primary,secondary,note`).
#[derive(Debug, Clone, Default)]
pub struct CodeBook {
    rows: BTreeMap<String, (HeadingDomainCoding, String)>,
}

#[derive(Deserialize)]
struct Row {
    heading: String,
    primary: String,
    #[serde(default)]
    secondary: Option<String>,
    #[serde(default)]
    note: Option<String>,
}

impl CodeBook {
    pub fn parse_csv(text: &str) -> Result<Self, CrosswalkError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut book = CodeBook::default();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let bad = |reason: String| CrosswalkError::CodebookRow { line, reason };
            let row = row.map_err(|e| bad(e.to_string()))?;
            let primary = DomainCode::parse(&row.primary).map_err(|e| bad(e.to_string()))?;
            let secondary = match row.secondary.as_deref().map(str::trim) {
                None | Some("") => None,
                Some(s) => Some(DomainCode::parse(s).map_err(|e| bad(e.to_string()))?),
            };
            let coding = HeadingDomainCoding::new(&row.heading, primary, secondary).map_err(|e| match e {
                CrosswalkError::CodebookRow { reason, .. } => bad(reason),
                other => other,
            })?;
            let key = heading_key(&row.heading);
            if book.rows.insert(key, (coding, row.note.unwrap_or_default())).is_some() {
                return Err(bad(format!("heading {:?} listed twice", row.heading)));
            }
        }
        Ok(book)
    }

    pub fn load(path: &Path) -> Result<Self, CrosswalkError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CrosswalkError::Io { path: path.display().to_string(), source: e })?;
        Self::parse_csv(&text)
    }

    pub fn insert(&mut self, coding: HeadingDomainCoding, note: &str) {
        self.rows.insert(heading_key(&coding.heading), (coding, note.to_string()));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, heading: &str) -> Option<&HeadingDomainCoding> {
        self.rows.get(&heading_key(heading)).map(|(c, _)| c)
    }

    /// Codes every heading; all missing headings are reported together.
    pub fn code_all<'a, I>(&self, headings: I) -> Result<Vec<HeadingDomainCoding>, CrosswalkError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut out = Vec::new();
        let mut missing = Vec::new();
        for h in headings {
            match self.get(h) {
                Some(c) => out.push(HeadingDomainCoding { heading: h.to_string(), ..c.clone() }),
                None => missing.push(h.to_string()),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(CrosswalkError::MissingCodings(missing))
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["heading", "primary", "secondary", "note"]).unwrap();
        let mut rows: Vec<_> = self.rows.values().collect();
        rows.sort_by(|a, b| a.0.heading.cmp(&b.0.heading));
        for (c, note) in rows {
            w.write_record([
                c.heading.clone(),
                c.primary.to_string(),
                c.secondary.map(|s| s.to_string()).unwrap_or_default(),
                note.clone(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Looks up one canonical heading; a heading absent from the codebook is an error.
pub fn code_heading_domains(heading: &str, codebook: &CodeBook) -> Result<HeadingDomainCoding, CrosswalkError> {
    codebook.code_all([heading]).map(|mut v| v.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOOK: &str = "heading,primary,secondary,note\n\
        Social networks,6,10,method\n\
        Communication in science – Data processing,0,6,\n\
        Science – Psychological aspects,0,7,\n\
        Research,0,,cross-domain\n";

    #[test]
    fn rows_apply() {
        let cb = CodeBook::parse_csv(BOOK).unwrap();
        let c = code_heading_domains("Social networks", &cb).unwrap();
        assert_eq!((c.primary.code(), c.secondary.map(DomainCode::code)), (6, Some(10)));
        let c = code_heading_domains("Communication in science – Data processing", &cb).unwrap();
        assert_eq!(c.codes().iter().map(|d| d.code()).collect::<Vec<_>>(), vec![0, 6]);
        let c = code_heading_domains("Science – Psychological aspects", &cb).unwrap();
        assert_eq!(c.codes().iter().map(|d| d.code()).collect::<Vec<_>>(), vec![0, 7]);
        assert_eq!(code_heading_domains("Research", &cb).unwrap().secondary, None);
    }

    #[test]
    fn missing_headings_are_listed() {
        let cb = CodeBook::parse_csv(BOOK).unwrap();
        match cb.code_all(["Research", "Zebras", "Yaks"]) {
            Err(CrosswalkError::MissingCodings(m)) => assert_eq!(m, vec!["Zebras", "Yaks"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_rows() {
        assert!(CodeBook::parse_csv("heading,primary,secondary,note\nX,3,3,\n").is_err());
        assert!(CodeBook::parse_csv("heading,primary,secondary,note\nX,12,,\n").is_err());
        assert!(CodeBook::parse_csv("heading,primary,secondary,note\nX,1,,\nX,2,,\n").is_err());
    }
}
