//! Dedup and rule-based consolidation of unique headings.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::facets::{display_fold, heading_key, SubdivisionKind, Vocabulary};
use super::merge_map::{MergeMap, Resolution, Rule};
use super::HeadingError;

pub const REMOVED: &str = "REMOVED";

/// Trim plus NFC; the identity used by [`dedup_headings`].
pub fn dedup_form(raw: &str) -> String {
    raw.trim().nfc().collect()
}

/// Exact-string uniqueness after whitespace trim and Unicode normalization.
pub fn dedup_headings<'a, I>(raw: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a str>,
{
    raw.into_iter().map(dedup_form).filter(|s| !s.is_empty()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub raw: String,
    /// `None` when the heading was removed.
    pub canonical: Option<String>,
    pub rules: Vec<Rule>,
}

impl LedgerEntry {
    pub fn rule_label(&self) -> String {
        if self.rules.is_empty() {
            "unchanged".into()
        } else {
            self.rules.iter().map(|r| r.code()).collect::<Vec<_>>().join("+")
        }
    }

    pub fn is_removed(&self) -> bool {
        self.canonical.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub input: usize,
    pub kept: usize,
    pub removed: usize,
    pub canonical: usize,
    pub by_rule: BTreeMap<String, usize>,
}

/// One row per unique input heading, sorted by raw string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationLedger {
    pub entries: Vec<LedgerEntry>,
    pub summary: LedgerSummary,
}

impl NormalizationLedger {
    pub fn get(&self, raw: &str) -> Option<&LedgerEntry> {
        self.entries.binary_search_by(|e| e.raw.as_str().cmp(raw)).ok().map(|i| &self.entries[i])
    }

    /// Canonical heading for a raw string, after applying [`dedup_form`].
    pub fn canonical_of(&self, raw: &str) -> Option<&str> {
        self.get(&dedup_form(raw)).and_then(|e| e.canonical.as_deref())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["raw", "canonical_or_REMOVED", "rule"]).unwrap();
        for e in &self.entries {
            w.write_record([e.raw.as_str(), e.canonical.as_deref().unwrap_or(REMOVED), &e.rule_label()]).unwrap();
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Consolidation {
    pub canonical: BTreeSet<String>,
    pub ledger: NormalizationLedger,
}

fn initial_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\p{Lu}[\p{L}'’-]+, (?:[^,]*\s)?\p{Lu}\.(?:[\s,]|$)").unwrap())
}

fn dated_name_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\p{Lu}[\p{L}'’-]+, [^,]+, (?:ca\. )?\d{3,4}-(?:\d{3,4})?$").unwrap())
}

/// Personal-name test: listed name (whole topic or the part before a
/// comma), or an inverted `Surname, Given` form carrying an initial or
/// life dates.
pub fn is_personal_name(main_topic: &str, vocab: &Vocabulary) -> bool {
    if vocab.is_name(main_topic) {
        return true;
    }
    if let Some((surname, _)) = main_topic.split_once(',') {
        if vocab.is_name(surname) {
            return true;
        }
    }
    initial_re().is_match(main_topic) || dated_name_re().is_match(main_topic)
}

enum Outcome {
    Kept { display: String, authoritative: bool },
    Removed,
}

fn push_rule(rules: &mut Vec<Rule>, r: Rule) {
    if !rules.contains(&r) {
        rules.push(r);
    }
}

fn normalize_one(raw: &str, mm: &MergeMap, vocab: &Vocabulary) -> Result<(Outcome, Vec<Rule>), HeadingError> {
    let mut rules = Vec::new();
    let folded = display_fold(raw);
    if folded.is_empty() {
        return Err(HeadingError::EmptyHeading(raw.to_string()));
    }
    if folded != raw {
        push_rule(&mut rules, Rule::R1Spelling);
    }
    let mut current = folded;
    let mut authoritative = false;
    let mut pinned = false;
    match mm.resolve(&heading_key(&current)) {
        Some(Resolution::Remove { rules: rs }) => {
            rs.into_iter().for_each(|r| push_rule(&mut rules, r));
            return Ok((Outcome::Removed, rules));
        }
        Some(Resolution::Combine { target, rules: rs, pinned: p }) => {
            if !p {
                rs.into_iter().for_each(|r| push_rule(&mut rules, r));
            }
            current = target;
            authoritative = true;
            pinned = p;
        }
        None => {}
    }
    let parsed = vocab.parse(&current)?;
    if !pinned {
        for (kind, rule) in [
            (SubdivisionKind::FormMaterial, Rule::R2Form),
            (SubdivisionKind::Geographic, Rule::R3Geographic),
            (SubdivisionKind::Temporal, Rule::R4Temporal),
        ] {
            if parsed.has_kind(kind) {
                push_rule(&mut rules, rule);
            }
        }
        if parsed.canonical != current {
            current = parsed.canonical.clone();
            authoritative = false;
            match mm.resolve(&heading_key(&current)) {
                Some(Resolution::Remove { rules: rs }) => {
                    rs.into_iter().for_each(|r| push_rule(&mut rules, r));
                    return Ok((Outcome::Removed, rules));
                }
                Some(Resolution::Combine { target, rules: rs, pinned: p }) => {
                    if !p {
                        rs.into_iter().for_each(|r| push_rule(&mut rules, r));
                    }
                    current = target;
                    authoritative = true;
                }
                None => {}
            }
        }
    }
    let final_parse = vocab.parse(&current)?;
    if vocab.is_place(&final_parse.main_topic) && final_parse.topical().next().is_none() {
        push_rule(&mut rules, Rule::X2GeoOnly);
        return Ok((Outcome::Removed, rules));
    }
    if is_personal_name(&final_parse.main_topic, vocab) {
        push_rule(&mut rules, Rule::X3PersonalName);
        return Ok((Outcome::Removed, rules));
    }
    Ok((Outcome::Kept { display: current, authoritative }, rules))
}

fn display_rank(s: &str) -> (usize, &str) {
    (s.chars().filter(|c| c.is_uppercase()).count(), s)
}

/// Applies R1 (fold), the merge map, R2–R4 (strip form, geographic and
/// temporal subdivisions), merge-map lookups on the stripped form (R5), and
/// the removals X1–X3. Headings landing on the same key share one canonical
/// display: a merge-map target if one applies, otherwise the variant with
/// the fewest capitals (ties broken lexicographically).
pub fn consolidate(
    unique: &BTreeSet<String>,
    merge_map: &MergeMap,
    vocab: &Vocabulary,
) -> Result<Consolidation, HeadingError> {
    struct Pending {
        raw: String,
        key: Option<String>,
        rules: Vec<Rule>,
    }
    let mut groups: BTreeMap<String, (bool, String)> = BTreeMap::new();
    let mut pending = Vec::with_capacity(unique.len());
    for raw in unique {
        let (outcome, rules) = normalize_one(raw, merge_map, vocab)?;
        let key = match outcome {
            Outcome::Removed => None,
            Outcome::Kept { display, authoritative } => {
                let key = heading_key(&display);
                let slot = groups.entry(key.clone()).or_insert_with(|| (authoritative, display.clone()));
                let better = match (slot.0, authoritative) {
                    (false, true) => true,
                    (true, false) => false,
                    _ => display_rank(&display) < display_rank(&slot.1),
                };
                if better {
                    *slot = (authoritative, display);
                }
                Some(key)
            }
        };
        pending.push(Pending { raw: raw.clone(), key, rules });
    }
    let mut entries: Vec<LedgerEntry> = pending
        .into_iter()
        .map(|p| LedgerEntry { raw: p.raw, canonical: p.key.map(|k| groups[&k].1.clone()), rules: p.rules })
        .collect();
    entries.sort_by(|a, b| a.raw.cmp(&b.raw));
    let canonical: BTreeSet<String> = groups.into_values().map(|(_, d)| d).collect();
    let mut summary = LedgerSummary { input: entries.len(), canonical: canonical.len(), ..Default::default() };
    for e in &entries {
        if e.is_removed() {
            summary.removed += 1;
        } else {
            summary.kept += 1;
        }
        *summary.by_rule.entry(e.rule_label()).or_default() += 1;
    }
    Ok(Consolidation { canonical, ledger: NormalizationLedger { entries, summary } })
}
