use std::collections::BTreeSet;
use std::path::Path;

use biblionet::headings::facets::{fold_key, heading_key, load_term_list};
use biblionet::headings::{
    book_dedup_headings, consolidate, dedup_headings, english_raw_headings, heading_stats, parse_heading, MergeMap,
    Rule, SubdivisionKind, Vocabulary,
};
use biblionet::ingest::{classify_and_filter, parse_bibliography, CatalogRecordSet};
use proptest::prelude::*;

fn fixture_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/full_corpus")
}

fn fixture_vocab() -> Vocabulary {
    let d = fixture_dir();
    Vocabulary::default()
        .with_forms(&load_term_list(&d.join("forms.txt")).unwrap())
        .with_places(&load_term_list(&d.join("gazetteer.txt")).unwrap())
        .with_names(&load_term_list(&d.join("names.txt")).unwrap())
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn parse_examples() {
    let h = parse_heading("Biology – Mathematical models – Textbooks").unwrap();
    assert_eq!(h.main_topic, "Biology");
    let subs: Vec<(&str, SubdivisionKind)> = h.subdivisions.iter().map(|s| (s.text.as_str(), s.kind)).collect();
    assert_eq!(subs, [("Mathematical models", SubdivisionKind::Topical), ("Textbooks", SubdivisionKind::FormMaterial)]);

    let h = parse_heading("Alcoholism and crime – Wales – Cardiff").unwrap();
    assert!(h.subdivisions.iter().all(|s| s.kind == SubdivisionKind::Geographic));
    assert_eq!(h.subdivisions.len(), 2);

    let h = parse_heading("Science").unwrap();
    assert_eq!((h.main_topic.as_str(), h.subdivisions.len()), ("Science", 0));
    assert!(parse_heading("  ").is_err());
}

#[test]
fn dedup_examples() {
    assert_eq!(dedup_headings(["A", "A", "B"]), set(&["A", "B"]));
    assert_eq!(dedup_headings(["A ", "A"]), set(&["A"]));
    let nfd = "Go\u{308}del's theorem";
    assert_eq!(dedup_headings([nfd, "Gödel's theorem"]).len(), 1);
}

#[test]
fn worked_examples_with_defaults() {
    let unique = set(&[
        "Biology / Mathematical model",
        "Biology – Mathematical models",
        "Biology – Mathematical models – Textbooks",
        "Alcoholism and crime – Wales – Cardiff",
        "Economic history – 16th century",
        "Japan",
        "Lotka",
        "Electronic books",
        "Science – Atlases",
        "Science",
    ]);
    let c = consolidate(&unique, &MergeMap::defaults(), &Vocabulary::default()).unwrap();
    let of = |raw: &str| c.ledger.canonical_of(raw).map(String::from);
    assert_eq!(of("Biology / Mathematical model").as_deref(), Some("Biology – Mathematical models"));
    assert_eq!(of("Biology – Mathematical models – Textbooks").as_deref(), Some("Biology – Mathematical models"));
    assert_eq!(of("Alcoholism and crime – Wales – Cardiff").as_deref(), Some("Alcoholism and crime"));
    assert_eq!(of("Economic history – 16th century").as_deref(), Some("Economic history"));
    assert_eq!(of("Science – Atlases").as_deref(), Some("Science – Atlases"));
    let rules = |raw: &str| c.ledger.get(raw).unwrap().rules.clone();
    assert_eq!(rules("Japan"), [Rule::X2GeoOnly]);
    assert_eq!(rules("Lotka"), [Rule::X3PersonalName]);
    assert_eq!(rules("Electronic books"), [Rule::X1Materiality]);
    assert_eq!(
        c.canonical,
        set(&[
            "Alcoholism and crime",
            "Biology – Mathematical models",
            "Economic history",
            "Science",
            "Science – Atlases"
        ])
    );
}

#[test]
fn fixture_count_chain() {
    let d = fixture_dir();
    let refs = parse_bibliography(&std::fs::read_to_string(d.join("books.bib")).unwrap()).unwrap();
    let cat = CatalogRecordSet::load(&d.join("catalog.jsonl")).unwrap();
    let books = classify_and_filter(&refs, &cat).books;
    let raw: Vec<String> = books.iter().flat_map(english_raw_headings).collect();
    assert_eq!(raw.len(), 1313);
    let unique = dedup_headings(raw.iter().map(String::as_str));
    assert_eq!(unique.len(), 876);
    let c = consolidate(&unique, &MergeMap::load(&d.join("merge_map.csv")).unwrap(), &fixture_vocab()).unwrap();
    assert_eq!(c.canonical.len(), 675);
    assert_eq!(c.ledger.entries.len(), 876);
    assert_eq!(c.ledger.summary.removed, 30);
    assert_eq!(books.iter().map(|b| book_dedup_headings(b).len()).sum::<usize>(), 1305);

    let per_book: Vec<(String, Vec<String>)> = books
        .iter()
        .map(|b| {
            let hs = english_raw_headings(b)
                .iter()
                .filter_map(|r| {
                    c.ledger.canonical_of(&biblionet::headings::consolidate::dedup_form(r)).map(String::from)
                })
                .collect();
            (b.book_id.clone(), hs)
        })
        .collect();
    let s = heading_stats(&per_book).unwrap();
    assert_eq!((s.mean_2dp().as_str(), s.min, s.max, s.total), ("6.31", 1, 31, 1117));
    let newman = s.per_book.iter().find(|(id, _)| id == "newman2006").unwrap();
    assert_eq!(newman.1, 31);
}

#[test]
fn stats_examples() {
    let b = |id: &str, n: usize| (id.to_string(), (0..n).map(|i| format!("h{i}")).collect::<Vec<_>>());
    let s = heading_stats(&[b("a", 5)]).unwrap();
    assert_eq!((s.mean_2dp().as_str(), s.min, s.max), ("5.00", 5, 5));
    let s = heading_stats(&[b("a", 1), b("b", 2), b("c", 3)]).unwrap();
    assert_eq!(s.mean_2dp(), "2.00");
    assert!(heading_stats::<String>(&[]).is_err());
    assert!(heading_stats(&[b("a", 0)]).is_err());
}

const MAINS: &[&str] = &["Science", "Biology", "Economic history", "Social networks", "Japan", "Lotka", "Game theory"];
const SUBS: &[&str] = &[
    "Mathematical models",
    "Philosophy",
    "Social aspects",
    "Textbooks",
    "Periodicals",
    "Wales",
    "Great Britain",
    "20th century",
    "16th century",
    "1945-",
];
const DELIMS: &[&str] = &[" – ", " -- ", "--", " / ", " — "];

fn arb_heading() -> impl Strategy<Value = String> {
    (
        prop::sample::select(MAINS),
        prop::collection::vec(prop::sample::select(SUBS), 0..3),
        prop::sample::select(DELIMS),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(main, subs, delim, upper, dot)| {
            let mut s = std::iter::once(main).chain(subs).collect::<Vec<_>>().join(delim);
            if upper {
                s = s.to_uppercase();
            }
            if dot {
                s.push('.');
            }
            s
        })
}

proptest! {
    #[test]
    fn consolidation_invariants(raw in prop::collection::vec(arb_heading(), 1..30)) {
        let vocab = Vocabulary::default();
        let mm = MergeMap::defaults();
        let unique = dedup_headings(raw.iter().map(String::as_str));
        prop_assert!(unique.len() <= raw.len());
        let c = consolidate(&unique, &mm, &vocab).unwrap();
        prop_assert!(c.canonical.len() <= unique.len());
        prop_assert_eq!(c.ledger.entries.len(), unique.len());
        prop_assert_eq!(c.ledger.summary.kept + c.ledger.summary.removed, unique.len());

        for h in &c.canonical {
            let p = parse_heading(h).unwrap();
            prop_assert!(p.subdivisions.iter().all(|s| s.kind == SubdivisionKind::Topical), "{}", h);
        }

        let again = consolidate(&c.canonical, &mm, &vocab).unwrap();
        prop_assert_eq!(&again.canonical, &c.canonical);
        for h in &c.canonical {
            prop_assert_eq!(again.ledger.canonical_of(h), Some(h.as_str()));
        }

        let mut rev = raw.clone();
        rev.reverse();
        prop_assert_eq!(dedup_headings(rev.iter().map(String::as_str)), unique);
    }

    #[test]
    fn facet_rules_keep_the_main_topic(raw in prop::collection::vec(arb_heading(), 1..20)) {
        let empty = MergeMap::new(Vec::new()).unwrap();
        let unique = dedup_headings(raw.iter().map(String::as_str));
        let c = consolidate(&unique, &empty, &Vocabulary::default()).unwrap();
        for e in &c.ledger.entries {
            if let Some(canon) = &e.canonical {
                let main_raw = fold_key(&parse_heading(&e.raw).unwrap().main_topic);
                let main_canon = fold_key(&parse_heading(canon).unwrap().main_topic);
                prop_assert_eq!(main_raw, main_canon);
                prop_assert!(e.rules.iter().all(|r| *r != Rule::R5Topical));
                prop_assert_eq!(heading_key(canon), heading_key(&parse_heading(&e.raw).unwrap().canonical));
            }
        }
    }
}
