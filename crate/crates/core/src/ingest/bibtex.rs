//! A deliberately small BibTeX reader.
//!
//! Supports `@type{key, field = {..} | ".." | bare, ...}` entries, `#`
//! concatenation, and skips `@comment`, `@preamble` and `@string` blocks.
//! String macros and cross-references are not expanded; a bare word value is
//! kept literally.

use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::IngestError;

/// Reference categories found in the seed bibliography.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum EntryType {
    Article,
    Book,
    Ebook,
    ElectronicHandbook,
    InCollection,
    InProceedings,
    /// Unrecognized type, kept and flagged.
    Other(String),
}

impl EntryType {
    pub const KNOWN: [EntryType; 6] = [
        EntryType::Article,
        EntryType::Book,
        EntryType::Ebook,
        EntryType::ElectronicHandbook,
        EntryType::InCollection,
        EntryType::InProceedings,
    ];

    pub fn parse(name: &str) -> EntryType {
        match name.to_ascii_lowercase().as_str() {
            "article" => EntryType::Article,
            "book" => EntryType::Book,
            "ebook" => EntryType::Ebook,
            "electronic" | "electronic_handbook" | "electronichandbook" => EntryType::ElectronicHandbook,
            "incollection" => EntryType::InCollection,
            "inproceedings" => EntryType::InProceedings,
            other => EntryType::Other(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            EntryType::Article => "article",
            EntryType::Book => "book",
            EntryType::Ebook => "ebook",
            EntryType::ElectronicHandbook => "electronic_handbook",
            EntryType::InCollection => "incollection",
            EntryType::InProceedings => "inproceedings",
            EntryType::Other(s) => s,
        }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, EntryType::Other(_))
    }
}

impl fmt::Display for EntryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<String> for EntryType {
    fn from(s: String) -> Self {
        EntryType::parse(&s)
    }
}

impl From<EntryType> for String {
    fn from(t: EntryType) -> Self {
        t.as_str().to_string()
    }
}

/// One entry of the seed bibliography.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawReference {
    pub entry_key: String,
    pub entry_type: EntryType,
    pub title: String,
    pub authors: Vec<String>,
    pub year: Option<i32>,
    /// Chapter codes of the citing book ("FW", "PF", "1".."8").
    pub chapter_tags: Vec<String>,
}

pub const MIN_YEAR: i32 = 1700;
pub const MAX_YEAR: i32 = 2100;

/// Stable identifier derived from an entry key: lowercase ASCII
/// alphanumerics, every other run of characters collapsed to one `-`.
pub fn slugify(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    let mut dash = false;
    for ch in key.nfkd().filter(|c| c.is_ascii()) {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
            dash = false;
        } else if !dash && !out.is_empty() {
            out.push('-');
            dash = true;
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

pub fn parse_bibliography(text: &str) -> Result<Vec<RawReference>, IngestError> {
    let mut parser = Parser { src: text, pos: 0 };
    let mut refs = Vec::new();
    let mut seen: Vec<(String, String, usize)> = Vec::new();
    while let Some(start) = parser.next_entry_start() {
        match parser.entry(start)? {
            Some(raw) => {
                let slug = slugify(&raw.reference.entry_key);
                if let Some((first, _, first_off)) = seen.iter().find(|(_, s, _)| *s == slug) {
                    return Err(IngestError::DuplicateKey {
                        first: first.clone(),
                        first_offset: *first_off,
                        second: raw.reference.entry_key.clone(),
                        second_offset: start,
                    });
                }
                if !raw.reference.entry_type.is_known() {
                    log::warn!("entry {} has unrecognized type @{}", raw.reference.entry_key, raw.reference.entry_type);
                }
                seen.push((raw.reference.entry_key.clone(), slug, start));
                refs.push(raw.reference);
            }
            None => continue,
        }
    }
    Ok(refs)
}

/// Serializes references back to BibTeX for the supported field set.
pub fn to_bibtex(refs: &[RawReference]) -> String {
    let mut out = String::new();
    for r in refs {
        out.push_str(&format!("@{}{{{},\n", r.entry_type, r.entry_key));
        out.push_str(&format!("  title = {{{}}},\n", encode_value(&r.title)));
        if !r.authors.is_empty() {
            let authors: Vec<String> = r.authors.iter().map(|a| encode_value(a)).collect();
            out.push_str(&format!("  author = {{{}}},\n", authors.join(" and ")));
        }
        if let Some(y) = r.year {
            out.push_str(&format!("  year = {{{y}}},\n"));
        }
        if !r.chapter_tags.is_empty() {
            out.push_str(&format!("  chapters = {{{}}},\n", r.chapter_tags.join(";")));
        }
        out.push_str("}\n\n");
    }
    out
}

fn encode_value(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut prev_dash = false;
    for ch in s.chars() {
        match ch {
            '&' | '%' | '$' | '#' | '_' => {
                out.push('\\');
                out.push(ch);
            }
            '-' if prev_dash => out.push_str("{}-"),
            '~' => out.push_str("\\~{}"),
            _ => out.push(ch),
        }
        prev_dash = ch == '-';
    }
    out
}

struct RawEntry {
    reference: RawReference,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn next_entry_start(&mut self) -> Option<usize> {
        let idx = self.rest().find('@')?;
        self.pos += idx;
        Some(self.pos)
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.' | '+' | '/') {
                self.bump();
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn malformed(&self, key: Option<&str>, reason: impl Into<String>) -> IngestError {
        IngestError::MalformedEntry { offset: self.pos, key: key.map(str::to_string), reason: reason.into() }
    }

    fn entry(&mut self, start: usize) -> Result<Option<RawEntry>, IngestError> {
        self.bump(); // '@'
        let ty = self.ident();
        if ty.is_empty() {
            return Err(self.malformed(None, "missing entry type after '@'"));
        }
        self.skip_ws();
        let close = match self.bump() {
            Some('{') => '}',
            Some('(') => ')',
            _ => return Err(self.malformed(None, format!("expected '{{' after @{ty}"))),
        };
        let lower = ty.to_ascii_lowercase();
        if matches!(lower.as_str(), "comment" | "preamble" | "string") {
            self.skip_balanced(close).map_err(|_| IngestError::MalformedEntry {
                offset: start,
                key: None,
                reason: format!("unterminated @{ty} block"),
            })?;
            return Ok(None);
        }
        self.skip_ws();
        let key_start = self.pos;
        while let Some(c) = self.peek() {
            if c == ',' || c == close || c.is_whitespace() {
                break;
            }
            self.bump();
        }
        let key = self.src[key_start..self.pos].to_string();
        if key.is_empty() {
            return Err(self.malformed(None, "missing entry key"));
        }
        self.skip_ws();
        let mut fields: Vec<(String, String)> = Vec::new();
        match self.bump() {
            Some(',') => {}
            Some(c) if c == close => {}
            _ => return Err(self.malformed(Some(&key), "expected ',' after entry key")),
        }
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Err(self.malformed(Some(&key), "unterminated entry")),
                Some(c) if c == close => {
                    self.bump();
                    break;
                }
                _ => {}
            }
            let name = self.ident().to_ascii_lowercase();
            if name.is_empty() {
                return Err(self.malformed(Some(&key), "expected field name"));
            }
            self.skip_ws();
            if self.bump() != Some('=') {
                return Err(self.malformed(Some(&key), format!("expected '=' after field {name}")));
            }
            let value = self.value(&key, close)?;
            if fields.iter().any(|(n, _)| *n == name) {
                return Err(self.malformed(Some(&key), format!("field {name} given twice")));
            }
            fields.push((name, value));
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(c) if c == close => {}
                _ => return Err(self.malformed(Some(&key), "expected ',' or end of entry")),
            }
        }
        let reference = build_reference(EntryType::parse(ty), key, fields, start)?;
        Ok(Some(RawEntry { reference }))
    }

    fn value(&mut self, key: &str, close: char) -> Result<String, IngestError> {
        let mut out = String::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('{') => {
                    self.bump();
                    let s = self.pos;
                    self.skip_balanced('}').map_err(|_| self.malformed(Some(key), "unbalanced braces in value"))?;
                    out.push_str(&self.src[s..self.pos - 1]);
                }
                Some('"') => {
                    self.bump();
                    let s = self.pos;
                    let mut depth = 0usize;
                    loop {
                        match self.bump() {
                            None => return Err(self.malformed(Some(key), "unterminated quoted value")),
                            Some('{') => depth += 1,
                            Some('}') => depth = depth.saturating_sub(1),
                            Some('"') if depth == 0 => break,
                            _ => {}
                        }
                    }
                    out.push_str(&self.src[s..self.pos - 1]);
                }
                Some(c) if c.is_alphanumeric() => {
                    out.push_str(self.ident());
                }
                Some(c) if c == close || c == ',' => {
                    return Err(self.malformed(Some(key), "empty field value"));
                }
                _ => return Err(self.malformed(Some(key), "unexpected character in value")),
            }
            self.skip_ws();
            if self.peek() == Some('#') {
                self.bump();
                continue;
            }
            return Ok(out);
        }
    }

    /// Consumes up to and including the closing delimiter at depth zero.
    fn skip_balanced(&mut self, close: char) -> Result<(), ()> {
        let mut depth = 0usize;
        while let Some(c) = self.bump() {
            match c {
                '{' => depth += 1,
                '}' if depth > 0 => depth -= 1,
                c if c == close && depth == 0 => return Ok(()),
                _ => {}
            }
        }
        Err(())
    }
}

fn build_reference(
    entry_type: EntryType,
    key: String,
    fields: Vec<(String, String)>,
    offset: usize,
) -> Result<RawReference, IngestError> {
    let mut title = String::new();
    let mut authors = Vec::new();
    let mut year = None;
    let mut chapter_tags = Vec::new();
    for (name, value) in fields {
        match name.as_str() {
            "title" => title = decode_latex(&value),
            "author" | "editor" if authors.is_empty() => {
                authors = split_authors(&value).iter().map(|a| decode_latex(a)).collect();
            }
            "year" => {
                let y = parse_year(&value).ok_or_else(|| IngestError::MalformedEntry {
                    offset,
                    key: Some(key.clone()),
                    reason: format!("unparsable year {value:?}"),
                })?;
                if !(MIN_YEAR..=MAX_YEAR).contains(&y) {
                    return Err(IngestError::MalformedEntry {
                        offset,
                        key: Some(key.clone()),
                        reason: format!("year {y} outside [{MIN_YEAR}, {MAX_YEAR}]"),
                    });
                }
                year = Some(y);
            }
            "chapters" => {
                chapter_tags =
                    value.split([';', ',']).map(|t| t.trim().to_ascii_uppercase()).filter(|t| !t.is_empty()).collect();
            }
            _ => {}
        }
    }
    Ok(RawReference { entry_key: key, entry_type, title, authors, year, chapter_tags })
}

fn parse_year(value: &str) -> Option<i32> {
    let v = value.trim();
    let digits: String = v.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.len() != 4 || !v[digits.len()..].chars().all(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    digits.parse().ok()
}

/// Splits an author list on ` and ` at brace depth zero.
fn split_authors(value: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    let words: Vec<&str> = value.split_whitespace().collect();
    for w in words {
        if depth == 0 && w.eq_ignore_ascii_case("and") {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        for c in w.chars() {
            match c {
                '{' => depth += 1,
                '}' => depth = depth.saturating_sub(1),
                _ => {}
            }
        }
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(w);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn combining_mark(cmd: char) -> Option<char> {
    Some(match cmd {
        '"' => '\u{0308}',
        '\'' => '\u{0301}',
        '`' => '\u{0300}',
        '^' => '\u{0302}',
        '~' => '\u{0303}',
        '=' => '\u{0304}',
        '.' => '\u{0307}',
        'c' => '\u{0327}',
        'v' => '\u{030C}',
        'u' => '\u{0306}',
        'H' => '\u{030B}',
        'k' => '\u{0328}',
        _ => return None,
    })
}

fn named_symbol(name: &str) -> Option<&'static str> {
    Some(match name {
        "ss" => "ß",
        "o" => "ø",
        "O" => "Ø",
        "i" => "ı",
        "l" => "ł",
        "L" => "Ł",
        "aa" => "å",
        "AA" => "Å",
        "ae" => "æ",
        "AE" => "Æ",
        "oe" => "œ",
        "OE" => "Œ",
        "textendash" => "–",
        "textemdash" => "—",
        "textasciitilde" => "~",
        _ => return None,
    })
}

/// Removes braces and resolves the common LaTeX escapes found in titles and
/// author names. Output is NFC with collapsed whitespace.
pub fn decode_latex(raw: &str) -> String {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = String::with_capacity(raw.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '{' | '}' => i += 1,
            '~' => {
                out.push(' ');
                i += 1;
            }
            '-' => {
                let run = chars[i..].iter().take_while(|&&d| d == '-').count();
                match run {
                    1 => out.push('-'),
                    2 => out.push('–'),
                    _ => out.push('—'),
                }
                i += run;
            }
            '\\' if i + 1 < chars.len() => {
                let next = chars[i + 1];
                if matches!(next, '&' | '%' | '$' | '#' | '_' | '{' | '}' | ' ') {
                    out.push(next);
                    i += 2;
                } else if let Some(mark) = combining_mark(next).filter(|_| {
                    !next.is_ascii_alphabetic() || chars.get(i + 2).is_some_and(|c| *c == '{' || c.is_whitespace())
                }) {
                    let mut j = i + 2;
                    while j < chars.len() && chars[j].is_whitespace() {
                        j += 1;
                    }
                    let braced = chars.get(j) == Some(&'{');
                    if braced {
                        j += 1;
                    }
                    if let Some(&base) = chars.get(j) {
                        if base == '}' && braced {
                            // `\~{}` is a literal tilde.
                            if next == '~' {
                                out.push('~');
                            }
                            i = j + 1;
                            continue;
                        }
                        let base = if base == '\\' && chars.get(j + 1) == Some(&'i') {
                            j += 1;
                            'i'
                        } else {
                            base
                        };
                        out.push(base);
                        out.push(mark);
                        j += 1;
                        if braced && chars.get(j) == Some(&'}') {
                            j += 1;
                        }
                    }
                    i = j;
                } else {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j].is_ascii_alphabetic() {
                        j += 1;
                    }
                    let name: String = chars[i + 1..j].iter().collect();
                    if let Some(sym) = named_symbol(&name) {
                        out.push_str(sym);
                    }
                    // Unknown commands drop their name; their argument stays.
                    if !name.is_empty() && chars.get(j) == Some(&' ') {
                        j += 1;
                    }
                    i = j;
                }
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
    let nfc: String = out.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_book_entry() {
        let refs = parse_bibliography(
            "@book{kuhn1962,\n title = {The Structure of Scientific Revolutions},\n author = {Kuhn, Thomas S.},\n year = {1962},\n chapters = {FW;PF;1;2;3;6}\n}",
        )
        .unwrap();
        assert_eq!(refs.len(), 1);
        let r = &refs[0];
        assert_eq!(r.entry_type, EntryType::Book);
        assert_eq!(r.year, Some(1962));
        assert_eq!(r.authors, vec!["Kuhn, Thomas S."]);
        assert_eq!(r.chapter_tags, vec!["FW", "PF", "1", "2", "3", "6"]);
    }

    #[test]
    fn empty_input_gives_no_references() {
        assert!(parse_bibliography("").unwrap().is_empty());
        assert!(parse_bibliography("% just a comment line\n").unwrap().is_empty());
    }

    #[test]
    fn missing_year_is_absent() {
        let refs = parse_bibliography("@article{a, title={X}}").unwrap();
        assert_eq!(refs[0].year, None);
    }

    #[test]
    fn decodes_escapes_and_braces() {
        assert_eq!(decode_latex(r#"B{\"o}rner and \&co"#), "Börner and &co");
        assert_eq!(decode_latex(r"Yablonski{\u{\i}}"), "Yablonskiĭ");
        assert_eq!(decode_latex("{Physik} der  Evolutionsprozesse"), "Physik der Evolutionsprozesse");
        assert_eq!(decode_latex("1900--2004"), "1900–2004");
        assert_eq!(decode_latex(r#"S\"{o}llner"#), "Söllner");
    }

    #[test]
    fn unknown_types_pass_through() {
        let refs = parse_bibliography("@misc{m1, title = \"Notes\", year = 2001}").unwrap();
        assert_eq!(refs[0].entry_type, EntryType::Other("misc".into()));
        assert_eq!(refs[0].year, Some(2001));
    }

    #[test]
    fn skips_comment_and_string_blocks() {
        let refs = parse_bibliography("@comment{ignore {me}}\n@string{x = {y}}\n@book{b, title={T}}").unwrap();
        assert_eq!(refs.len(), 1);
    }

    #[test]
    fn malformed_entry_reports_offset_and_key() {
        let text = "@book{good, title={A}}\n@book{bad title={B}}";
        match parse_bibliography(text) {
            Err(IngestError::MalformedEntry { offset, key, .. }) => {
                assert!(offset > 20);
                assert_eq!(key.as_deref(), Some("bad"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_bibliography("@book{k, title={unterminated}").unwrap_err();
        assert!(err.to_string().contains('k'));
    }

    #[test]
    fn duplicate_keys_list_both() {
        let err = parse_bibliography("@book{Kuhn1962, title={A}}\n@book{kuhn1962, title={B}}").unwrap_err();
        match err {
            IngestError::DuplicateKey { first, second, .. } => {
                assert_eq!(first, "Kuhn1962");
                assert_eq!(second, "kuhn1962");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_year_is_rejected() {
        assert!(parse_bibliography("@book{b, title={T}, year={1492}}").is_err());
    }

    #[test]
    fn slugs_are_lowercase_dashed() {
        assert_eq!(slugify("Kuhn:1962"), "kuhn-1962");
        assert_eq!(slugify("Börner2010"), "borner2010");
    }
}
