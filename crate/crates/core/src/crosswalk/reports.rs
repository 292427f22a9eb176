//! LCC class counts, domain crosswalk counts and the domain cross-tab.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::codebook::HeadingDomainCoding;
use super::domain::{CrosswalkTable, DomainCode};
use super::lcc::parse_lcc;
use super::CrosswalkError;

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![])
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub books: usize,
    pub headings: usize,
}

impl Counts {
    fn add(&mut self, headings: usize) {
        self.books += 1;
        self.headings += headings;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: String,
    pub counts: Counts,
    /// Ordered by book count, then heading count (both descending), then letters.
    pub subclasses: Vec<(String, Counts)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2Report {
    pub classes: Vec<ClassRow>,
    pub no_lcc: Counts,
    pub total: Counts,
}

impl Table2Report {
    pub fn class(&self, letter: &str) -> Option<&ClassRow> {
        self.classes.iter().find(|c| c.class == letter)
    }

    pub fn subclass(&self, letters: &str) -> Option<Counts> {
        self.classes.iter().flat_map(|c| c.subclasses.iter()).find(|(l, _)| l == letters).map(|(_, c)| *c)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv_writer();
        w.write_record(["class", "subclass", "book_count", "heading_count"]).unwrap();
        for c in &self.classes {
            w.write_record([c.class.clone(), String::new(), c.counts.books.to_string(), c.counts.headings.to_string()])
                .unwrap();
            for (l, n) in &c.subclasses {
                w.write_record([c.class.clone(), l.clone(), n.books.to_string(), n.headings.to_string()]).unwrap();
            }
        }
        w.write_record([
            "Books without LCC Codes".to_string(),
            String::new(),
            self.no_lcc.books.to_string(),
            self.no_lcc.headings.to_string(),
        ])
        .unwrap();
        w.write_record([
            "Total".to_string(),
            String::new(),
            self.total.books.to_string(),
            self.total.headings.to_string(),
        ])
        .unwrap();
        finish(w)
    }
}

/// Counts books and per-book heading totals by LCC class and subclass.
///
/// Input is one `(lcc_shelf_number, heading_count)` pair per book. Books
/// without a shelf number go to the no-LCC row; totals include them.
pub fn lcc_report<'a, I>(books: I) -> Result<Table2Report, CrosswalkError>
where
    I: IntoIterator<Item = (Option<&'a str>, usize)>,
{
    let mut by_class: BTreeMap<String, (Counts, BTreeMap<String, Counts>)> = BTreeMap::new();
    let mut report = Table2Report::default();
    for (lcc, n) in books {
        report.total.add(n);
        let Some(shelf) = lcc else {
            report.no_lcc.add(n);
            continue;
        };
        let cls = parse_lcc(shelf)?;
        let slot = by_class.entry(cls.top_level().to_string()).or_default();
        slot.0.add(n);
        slot.1.entry(cls.class_letters.clone()).or_default().add(n);
    }
    report.classes = by_class
        .into_iter()
        .map(|(class, (counts, subs))| {
            let mut subclasses: Vec<(String, Counts)> = subs.into_iter().collect();
            subclasses
                .sort_by(|(la, a), (lb, b)| b.books.cmp(&a.books).then(b.headings.cmp(&a.headings)).then(la.cmp(lb)));
            ClassRow { class, counts, subclasses }
        })
        .collect();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainBookRow {
    pub code: DomainCode,
    pub classes: Vec<String>,
    pub books: usize,
}

/// Books per domain code through the crosswalk, plus books whose class
/// has no mapping and books without a shelf number.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table3Report {
    pub rows: Vec<DomainBookRow>,
    pub unmapped: usize,
    pub no_lcc: usize,
}

impl Table3Report {
    pub fn to_csv(&self) -> String {
        let mut w = csv_writer();
        w.write_record(["code", "domain", "lcc_classes", "book_count"]).unwrap();
        for r in &self.rows {
            w.write_record([r.code.to_string(), r.code.name().to_string(), r.classes.join(" "), r.books.to_string()])
                .unwrap();
        }
        finish(w)
    }
}

pub fn domain_book_counts<'a, I>(lccs: I, xwalk: &CrosswalkTable) -> Result<Table3Report, CrosswalkError>
where
    I: IntoIterator<Item = Option<&'a str>>,
{
    let mut counts = [0usize; DomainCode::COUNT];
    let mut report = Table3Report::default();
    for lcc in lccs {
        let Some(shelf) = lcc else {
            report.no_lcc += 1;
            continue;
        };
        match xwalk.lookup(&parse_lcc(shelf)?.class_letters) {
            Some(d) => counts[d.index()] += 1,
            None => report.unmapped += 1,
        }
    }
    report.rows = DomainCode::all()
        .map(|d| DomainBookRow {
            code: d,
            classes: xwalk.classes_for(d).into_iter().map(str::to_string).collect(),
            books: counts[d.index()],
        })
        .collect();
    Ok(report)
}

/// Primary code rows by secondary code columns, plus single-code counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossTab {
    pub cells: [[usize; DomainCode::COUNT]; DomainCode::COUNT],
    pub single: [usize; DomainCode::COUNT],
}

impl CrossTab {
    pub fn cell(&self, primary: u8, secondary: u8) -> usize {
        self.cells[primary as usize][secondary as usize]
    }

    pub fn row_total(&self, primary: u8) -> usize {
        let p = primary as usize;
        self.cells[p].iter().sum::<usize>() + self.single[p]
    }

    pub fn single_total(&self) -> usize {
        self.single.iter().sum()
    }

    pub fn dual_total(&self) -> usize {
        self.cells.iter().flatten().sum()
    }

    pub fn total(&self) -> usize {
        self.single_total() + self.dual_total()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Eleven primary rows; secondary columns 0–10 unless
    /// `suppress_zero_columns` drops those that are zero everywhere.
    pub fn to_csv(&self, suppress_zero_columns: bool) -> String {
        let cols: Vec<usize> = (0..DomainCode::COUNT)
            .filter(|&c| !suppress_zero_columns || self.cells.iter().any(|row| row[c] > 0))
            .collect();
        let mut w = csv_writer();
        let mut header = vec!["domain".to_string(), "code".to_string()];
        header.extend(cols.iter().map(|c| c.to_string()));
        header.push("single_domain_code".into());
        header.push("grand_total".into());
        w.write_record(&header).unwrap();
        for d in DomainCode::all() {
            let mut rec = vec![d.name().to_string(), d.to_string()];
            rec.extend(cols.iter().map(|&c| self.cells[d.index()][c].to_string()));
            rec.push(self.single[d.index()].to_string());
            rec.push(self.row_total(d.code()).to_string());
            w.write_record(&rec).unwrap();
        }
        finish(w)
    }
}

pub fn domain_cooccurrence(codings: &[HeadingDomainCoding]) -> CrossTab {
    let mut t = CrossTab::default();
    for c in codings {
        match c.secondary {
            Some(s) => t.cells[c.primary.index()][s.index()] += 1,
            None => t.single[c.primary.index()] += 1,
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_zero() {
        let r = lcc_report(std::iter::empty()).unwrap();
        assert!(r.classes.is_empty());
        assert_eq!(r.total, Counts::default());
        assert_eq!(r.no_lcc, Counts::default());
    }

    #[test]
    fn one_book_hand_count() {
        let r = lcc_report([(Some("QA76.9"), 4)]).unwrap();
        assert_eq!(r.class("Q").unwrap().counts, Counts { books: 1, headings: 4 });
        assert_eq!(r.subclass("QA"), Some(Counts { books: 1, headings: 4 }));
    }

    #[test]
    fn subclass_order_and_no_lcc_row() {
        let r =
            lcc_report([(Some("HB1"), 3), (Some("HM2"), 2), (Some("HM3"), 2), (Some("H61"), 9), (None, 5)]).unwrap();
        let subs: Vec<&str> = r.class("H").unwrap().subclasses.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(subs, vec!["HM", "H", "HB"]);
        assert_eq!(r.no_lcc, Counts { books: 1, headings: 5 });
        assert_eq!(r.total, Counts { books: 5, headings: 21 });
    }

    fn coding(p: u8, s: Option<u8>) -> HeadingDomainCoding {
        HeadingDomainCoding {
            heading: String::new(),
            primary: DomainCode::new(p).unwrap(),
            secondary: s.map(|s| DomainCode::new(s).unwrap()),
        }
    }

    #[test]
    fn cross_tab_hand_count() {
        let t = domain_cooccurrence(&[coding(9, Some(6)), coding(9, Some(6))]);
        assert_eq!(t.cell(9, 6), 2);
        assert_eq!(t.row_total(9), 2);
        assert!(domain_cooccurrence(&[]).is_empty());
    }

    #[test]
    fn suppressed_columns() {
        let t = domain_cooccurrence(&[coding(1, Some(5)), coding(2, None)]);
        let full = t.to_csv(false);
        assert!(full.lines().next().unwrap().contains(",5,"));
        let t = domain_cooccurrence(&[coding(1, Some(2))]);
        let compact = t.to_csv(true);
        assert_eq!(compact.lines().next().unwrap(), "domain,code,2,single_domain_code,grand_total");
    }

    #[test]
    fn domain_counts_use_crosswalk() {
        let r = domain_book_counts([Some("QH1"), Some("TK5"), Some("PN3"), None], &CrosswalkTable::default()).unwrap();
        assert_eq!(r.rows[1].books, 1);
        assert_eq!(r.rows[6].books, 1);
        assert_eq!((r.unmapped, r.no_lcc), (1, 1));
    }
}
