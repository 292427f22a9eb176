use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lcc::LccClass;
use super::CrosswalkError;

/// One of the eleven science-domain codes, 0 through 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct DomainCode(u8);

pub const DOMAIN_NAMES: [&str; 11] = [
    "Science General",
    "Biology",
    "Medical Specialties",
    "Engineering",
    "Chemistry",
    "Earth Science",
    "Electrical Engineering & Computer Science",
    "Brain Research",
    "Humanities",
    "Math & Physics",
    "Social Sciences",
];

impl DomainCode {
    pub const COUNT: usize = 11;

    pub fn new(code: u8) -> Result<Self, CrosswalkError> {
        if (code as usize) < Self::COUNT {
            Ok(DomainCode(code))
        } else {
            Err(CrosswalkError::InvalidDomainCode(code.to_string()))
        }
    }

    pub fn all() -> impl Iterator<Item = DomainCode> {
        (0..Self::COUNT as u8).map(DomainCode)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        DOMAIN_NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Self> {
        DOMAIN_NAMES.iter().position(|n| n.eq_ignore_ascii_case(name.trim())).map(|i| DomainCode(i as u8))
    }

    pub fn parse(s: &str) -> Result<Self, CrosswalkError> {
        s.trim().parse::<u8>().map_err(|_| CrosswalkError::InvalidDomainCode(s.to_string())).and_then(DomainCode::new)
    }
}

impl TryFrom<u8> for DomainCode {
    type Error = CrosswalkError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        DomainCode::new(v)
    }
}

impl From<DomainCode> for u8 {
    fn from(d: DomainCode) -> u8 {
        d.0
    }
}

impl fmt::Display for DomainCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// LCC class letters to domain code, matched by longest prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosswalkTable {
    entries: Vec<(String, DomainCode)>,
}

const DEFAULT_ROWS: &[(&str, u8)] = &[
    ("Q", 0),
    ("QH", 1),
    ("QP", 1),
    ("QL", 1),
    ("R", 2),
    ("T", 3),
    ("TA", 3),
    ("UG", 3),
    ("QD", 4),
    ("TK", 6),
    ("Z", 6),
    ("ZA", 6),
    ("BC", 7),
    ("B", 8),
    ("BD", 8),
    ("BF", 8),
    ("BJ", 8),
    ("LC", 8),
    ("QA", 9),
    ("QC", 9),
    ("H", 10),
    ("JN", 10),
];

impl Default for CrosswalkTable {
    fn default() -> Self {
        CrosswalkTable::new(DEFAULT_ROWS.iter().map(|(l, c)| (l.to_string(), DomainCode(*c))).collect())
            .expect("default crosswalk is valid")
    }
}

#[derive(Deserialize)]
struct Row {
    class_letters: String,
    code: String,
}

impl CrosswalkTable {
    pub fn new(entries: Vec<(String, DomainCode)>) -> Result<Self, CrosswalkError> {
        let mut seen = std::collections::BTreeMap::new();
        for (letters, code) in &entries {
            if letters.is_empty() || letters.len() > 2 || !letters.chars().all(|c| c.is_ascii_uppercase()) {
                return Err(CrosswalkError::InvalidCrosswalkRow(format!("class letters {letters:?}")));
            }
            if let Some(prev) = seen.insert(letters.clone(), *code) {
                if prev != *code {
                    return Err(CrosswalkError::InvalidCrosswalkRow(format!(
                        "{letters} maps to both {prev} and {code}"
                    )));
                }
            }
        }
        let mut entries: Vec<(String, DomainCode)> = seen.into_iter().collect();
        entries.sort();
        Ok(CrosswalkTable { entries })
    }

    pub fn parse_csv(text: &str) -> Result<Self, CrosswalkError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| CrosswalkError::InvalidCrosswalkRow(e.to_string()))?;
            entries.push((row.class_letters.to_ascii_uppercase(), DomainCode::parse(&row.code)?));
        }
        CrosswalkTable::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self, CrosswalkError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CrosswalkError::Io { path: path.display().to_string(), source: e })?;
        Self::parse_csv(&text)
    }

    pub fn entries(&self) -> &[(String, DomainCode)] {
        &self.entries
    }

    /// Class letters mapped to `code`, in sorted order.
    pub fn classes_for(&self, code: DomainCode) -> Vec<&str> {
        self.entries.iter().filter(|(_, c)| *c == code).map(|(l, _)| l.as_str()).collect()
    }

    pub fn lookup(&self, class_letters: &str) -> Option<DomainCode> {
        self.entries
            .iter()
            .filter(|(l, _)| class_letters.starts_with(l.as_str()))
            .max_by_key(|(l, _)| l.len())
            .map(|(_, c)| *c)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("class_letters,code\n");
        for (l, c) in &self.entries {
            out.push_str(&format!("{l},{c}\n"));
        }
        out
    }
}

/// Longest matching class prefix wins; no match is `None`.
pub fn lcc_to_domain(cls: &LccClass, xwalk: &CrosswalkTable) -> Option<DomainCode> {
    xwalk.lookup(&cls.class_letters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crosswalk::parse_lcc;

    fn code(s: &str) -> Option<u8> {
        lcc_to_domain(&parse_lcc(s).unwrap(), &CrosswalkTable::default()).map(DomainCode::code)
    }

    #[test]
    fn longest_prefix() {
        assert_eq!(code("QH541"), Some(1));
        assert_eq!(code("Q175"), Some(0));
        assert_eq!(code("TK5105"), Some(6));
        assert_eq!(code("TA345"), Some(3));
        assert_eq!(code("HM851"), Some(10));
        assert_eq!(code("PN1"), None);
    }

    #[test]
    fn names_are_a_bijection() {
        for d in DomainCode::all() {
            assert_eq!(DomainCode::from_name(d.name()), Some(d));
        }
        assert!(DomainCode::new(11).is_err());
    }

    #[test]
    fn conflicting_rows_are_rejected() {
        let text = "class_letters,code\nQ,0\nQ,1\n";
        assert!(CrosswalkTable::parse_csv(text).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = CrosswalkTable::default();
        assert_eq!(CrosswalkTable::parse_csv(&t.to_csv()).unwrap(), t);
    }
}
