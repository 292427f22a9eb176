use std::path::Path;

use biblionet::crosswalk::{
    code_heading_domains, domain_book_counts, domain_cooccurrence, lcc_report, lcc_to_domain, parse_lcc, CodeBook,
    CrosswalkTable, DomainCode, HeadingDomainCoding,
};
use biblionet::CrosswalkError;
use proptest::prelude::*;

const TABLE2_SUBCLASSES: &[&str] = &[
    "B", "BF", "BC", "BD", "BJ", "HM", "HB", "H", "HD", "HC", "HV", "HQ", "HA", "HF", "HG", "JN", "LC", "Q", "QH",
    "QA", "QC", "QP", "QD", "QL", "RC", "RA", "T", "TK", "TA", "UG", "Z", "ZA",
];

fn code(n: u8) -> DomainCode {
    DomainCode::new(n).unwrap()
}

fn fixture_codebook() -> CodeBook {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/full_corpus/codebook.csv");
    CodeBook::load(&p).unwrap()
}

#[test]
fn shelf_numbers() {
    assert_eq!(parse_lcc("HM851 .S56").unwrap().class_letters, "HM");
    assert_eq!(parse_lcc("Q175").unwrap().class_letters, "Q");
    assert_eq!(parse_lcc("ZA3075").unwrap().class_letters, "ZA");
    assert!(matches!(parse_lcc("175"), Err(CrosswalkError::InvalidLcc(_))));
}

#[test]
fn default_crosswalk_examples() {
    let x = CrosswalkTable::default();
    let d = |s: &str| lcc_to_domain(&parse_lcc(s).unwrap(), &x).map(DomainCode::code);
    assert_eq!(d("QH541"), Some(1));
    assert_eq!(d("TK5105"), Some(6));
    assert_eq!(d("TA345"), Some(3));
    assert_eq!(d("HM851"), Some(10));
    assert_eq!(d("Q175"), Some(0));
    assert_eq!(d("PN1"), None);
    for sub in TABLE2_SUBCLASSES {
        assert!(x.lookup(sub).is_some(), "{sub} unmapped");
    }
}

#[test]
fn report_examples() {
    let empty = lcc_report(std::iter::empty()).unwrap();
    assert!(empty.classes.is_empty());
    assert_eq!((empty.total.books, empty.total.headings), (0, 0));

    let r = lcc_report([(Some("QA76 .A1"), 4)]).unwrap();
    let q = r.class("Q").unwrap();
    assert_eq!((q.counts.books, q.counts.headings), (1, 4));
    let qa = r.subclass("QA").unwrap();
    assert_eq!((qa.books, qa.headings), (1, 4));

    let r = lcc_report([(None, 3), (Some("B1"), 2)]).unwrap();
    assert_eq!((r.no_lcc.books, r.no_lcc.headings), (1, 3));
    assert_eq!((r.total.books, r.total.headings), (2, 5));
}

#[test]
fn codebook_examples() {
    let cb = fixture_codebook();
    let sn = code_heading_domains("Social networks", &cb).unwrap();
    assert_eq!((sn.primary, sn.secondary), (code(6), Some(code(10))));
    let cs = code_heading_domains("Communication in science – Data processing", &cb).unwrap();
    assert_eq!(cs.codes(), [code(0), code(6)]);

    let inline = CodeBook::parse_csv("heading,primary,secondary,note\nScience – Psychological aspects,0,7,\n").unwrap();
    assert_eq!(code_heading_domains("Science – Psychological aspects", &inline).unwrap().codes(), [code(0), code(7)]);
    match cb.code_all(["Science", "Not in the book"]) {
        Err(CrosswalkError::MissingCodings(m)) => assert_eq!(m, ["Not in the book"]),
        other => panic!("unexpected {other:?}"),
    }
    assert!(CodeBook::parse_csv("heading,primary,secondary,note\nX,3,3,\n").is_err());
}

#[test]
fn crosstab_examples() {
    assert!(domain_cooccurrence(&[]).is_empty());
    let c = HeadingDomainCoding::new("a", code(9), Some(code(6))).unwrap();
    let d = HeadingDomainCoding { heading: "b".into(), ..c.clone() };
    let t = domain_cooccurrence(&[c, d]);
    assert_eq!(t.cell(9, 6), 2);
    assert_eq!(t.row_total(9), 2);
    assert_eq!(t.total(), 2);
}

#[test]
fn fixture_codebook_reproduces_table4() {
    let cb = fixture_codebook();
    assert_eq!(cb.len(), 675);
    let text =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/full_corpus/codebook.csv"))
            .unwrap();
    let headings: Vec<String> =
        csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()[0].to_string()).collect();
    let t = domain_cooccurrence(&cb.code_all(headings.iter().map(String::as_str)).unwrap());
    assert_eq!((t.single_total(), t.dual_total(), t.total()), (317, 358, 675));
    assert_eq!(t.row_total(10), 232);
    assert_eq!(t.cell(10, 8), 50);
    let csv = t.to_csv(true);
    assert!(!csv.lines().next().unwrap().split(',').any(|c| c == "5"));
}

#[test]
fn table3_counts_books_per_domain() {
    let x = CrosswalkTable::default();
    let r = domain_book_counts([Some("QH1"), Some("QP1"), Some("TK1"), None, Some("PN1")], &x).unwrap();
    let books = |c: u8| r.rows.iter().find(|row| row.code == code(c)).map_or(0, |row| row.books);
    assert_eq!((books(1), books(6)), (2, 1));
    assert_eq!((r.no_lcc, r.unmapped), (1, 1));
}

proptest! {
    #[test]
    fn lookup_ignores_row_order(seed in any::<u64>(), class in prop::sample::select(TABLE2_SUBCLASSES)) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let base = CrosswalkTable::default();
        let mut rows = base.entries().to_vec();
        rows.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let shuffled = CrosswalkTable::new(rows).unwrap();
        prop_assert_eq!(shuffled.lookup(class), base.lookup(class));
    }

    #[test]
    fn crosstab_conserves_codings(codes in prop::collection::vec((0u8..11, prop::option::of(0u8..11)), 0..60)) {
        let codings: Vec<HeadingDomainCoding> = codes
            .iter()
            .enumerate()
            .filter(|(_, (p, s))| Some(*p) != *s)
            .map(|(i, (p, s))| HeadingDomainCoding::new(&format!("h{i}"), code(*p), s.map(code)).unwrap())
            .collect();
        let t = domain_cooccurrence(&codings);
        let cells: usize = t.cells.iter().flatten().sum();
        prop_assert_eq!(cells + t.single.iter().sum::<usize>(), codings.len());
        prop_assert_eq!((0..11).map(|r| t.row_total(r)).sum::<usize>(), codings.len());
    }

    #[test]
    fn subclasses_add_up(books in prop::collection::vec((prop::option::of(prop::sample::select(TABLE2_SUBCLASSES)), 1usize..30), 0..40)) {
        let shelves: Vec<(Option<String>, usize)> = books.iter().map(|(s, n)| (s.map(|s| format!("{s}1 .A1")), *n)).collect();
        let r = lcc_report(shelves.iter().map(|(s, n)| (s.as_deref(), *n))).unwrap();
        let mut books_sum = r.no_lcc.books;
        let mut heads_sum = r.no_lcc.headings;
        for c in &r.classes {
            let b: usize = c.subclasses.iter().map(|(_, n)| n.books).sum();
            let h: usize = c.subclasses.iter().map(|(_, n)| n.headings).sum();
            prop_assert_eq!((b, h), (c.counts.books, c.counts.headings));
            books_sum += b;
            heads_sum += h;
        }
        prop_assert_eq!((books_sum, heads_sum), (r.total.books, r.total.headings));
    }
}
