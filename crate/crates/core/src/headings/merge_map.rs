//! User-supplied merge and removal rules (`merge_map.csv`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::facets::{display_fold, heading_key};
use super::HeadingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "R1_spelling")]
    R1Spelling,
    #[serde(rename = "R2_form")]
    R2Form,
    #[serde(rename = "R3_geographic")]
    R3Geographic,
    #[serde(rename = "R4_temporal")]
    R4Temporal,
    #[serde(rename = "R5_topical")]
    R5Topical,
    #[serde(rename = "X1_materiality")]
    X1Materiality,
    #[serde(rename = "X2_geo_only")]
    X2GeoOnly,
    #[serde(rename = "X3_personal_name")]
    X3PersonalName,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::R1Spelling,
        Rule::R2Form,
        Rule::R3Geographic,
        Rule::R4Temporal,
        Rule::R5Topical,
        Rule::X1Materiality,
        Rule::X2GeoOnly,
        Rule::X3PersonalName,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::R1Spelling => "R1_spelling",
            Rule::R2Form => "R2_form",
            Rule::R3Geographic => "R3_geographic",
            Rule::R4Temporal => "R4_temporal",
            Rule::R5Topical => "R5_topical",
            Rule::X1Materiality => "X1_materiality",
            Rule::X2GeoOnly => "X2_geo_only",
            Rule::X3PersonalName => "X3_personal_name",
        }
    }

    /// Short code used in the ledger (`R1`, `X2`, ...).
    pub fn code(self) -> &'static str {
        &self.name()[..2]
    }

    pub fn is_removal(self) -> bool {
        matches!(self, Rule::X1Materiality | Rule::X2GeoOnly | Rule::X3PersonalName)
    }

    pub fn parse(s: &str) -> Option<Rule> {
        let s = s.trim();
        Rule::ALL.into_iter().find(|r| r.name().eq_ignore_ascii_case(s) || r.code().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeAction {
    CombineInto,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeEntry {
    pub pattern: String,
    pub action: MergeAction,
    pub target: Option<String>,
    pub rule: Rule,
    pub note: String,
}

impl MergeEntry {
    pub fn combine(pattern: &str, target: &str, rule: Rule, note: &str) -> Self {
        MergeEntry {
            pattern: pattern.into(),
            action: MergeAction::CombineInto,
            target: Some(target.into()),
            rule,
            note: note.into(),
        }
    }

    pub fn remove(pattern: &str, rule: Rule, note: &str) -> Self {
        MergeEntry { pattern: pattern.into(), action: MergeAction::Remove, target: None, rule, note: note.into() }
    }

    /// A combine row whose target is its own pattern: the heading is kept
    /// verbatim and facet stripping is skipped.
    pub fn is_pin(&self) -> bool {
        self.action == MergeAction::CombineInto
            && self.target.as_deref().map(heading_key) == Some(heading_key(&self.pattern))
    }
}

/// Result of following a merge-map chain from one key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Combine { target: String, rules: Vec<Rule>, pinned: bool },
    Remove { rules: Vec<Rule> },
}

/// Validated, acyclic merge map, indexed by [`heading_key`] of each pattern.
#[derive(Debug, Clone, Default)]
pub struct MergeMap {
    entries: Vec<MergeEntry>,
    index: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct Row {
    pattern: String,
    action: String,
    #[serde(default)]
    target: Option<String>,
    rule: String,
    #[serde(default)]
    note: Option<String>,
}

impl MergeMap {
    pub fn new(entries: Vec<MergeEntry>) -> Result<Self, HeadingError> {
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if e.pattern.trim().is_empty() {
                return Err(HeadingError::MergeMapRow { line: i + 2, reason: "empty pattern".into() });
            }
            if e.action == MergeAction::CombineInto && e.target.as_deref().is_none_or(|t| heading_key(t).is_empty()) {
                return Err(HeadingError::MergeMapRow {
                    line: i + 2,
                    reason: format!("combine_into row {:?} has no target", e.pattern),
                });
            }
            let key = heading_key(&e.pattern);
            if let Some(&prev) = index.get(&key) {
                let p: &MergeEntry = &entries[prev];
                let same_target = p.target.as_deref().map(heading_key) == e.target.as_deref().map(heading_key);
                if p.action != e.action || !same_target {
                    return Err(HeadingError::MergeMapRow {
                        line: i + 2,
                        reason: format!("pattern {:?} conflicts with line {}", e.pattern, prev + 2),
                    });
                }
                continue;
            }
            index.insert(key, i);
        }
        let map = MergeMap { entries, index };
        map.check_cycles()?;
        Ok(map)
    }

    /// Reads `pattern,action,target,rule,note` CSV with a header row.
    pub fn parse_csv(text: &str) -> Result<Self, HeadingError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| HeadingError::MergeMapRow { line, reason: e.to_string() })?;
            let action = match row.action.as_str() {
                "combine_into" | "combine" => MergeAction::CombineInto,
                "remove" => MergeAction::Remove,
                other => return Err(HeadingError::MergeMapRow { line, reason: format!("unknown action {other:?}") }),
            };
            let rule = Rule::parse(&row.rule)
                .ok_or_else(|| HeadingError::MergeMapRow { line, reason: format!("unknown rule {:?}", row.rule) })?;
            entries.push(MergeEntry {
                pattern: row.pattern,
                action,
                target: row.target.filter(|t| !t.is_empty()),
                rule,
                note: row.note.unwrap_or_default(),
            });
        }
        MergeMap::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self, HeadingError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HeadingError::Io { path: path.display().to_string(), source: e })?;
        Self::parse_csv(&text)
    }

    /// The worked examples: one spelling merge, two topical merges, the
    /// materiality removal, and "Science – Atlases" kept unmerged.
    pub fn defaults() -> Self {
        MergeMap::new(vec![
            MergeEntry::combine(
                "Biology / Mathematical model",
                "Biology – Mathematical models",
                Rule::R1Spelling,
                "spelling and punctuation variant",
            ),
            MergeEntry::combine("Biophysics/Biomedical Physics", "Biophysics", Rule::R5Topical, "topical grouping"),
            MergeEntry::combine(
                "Comprehension (Theory of knowledge)",
                "Comprehension",
                Rule::R5Topical,
                "topical grouping",
            ),
            MergeEntry::remove("Electronic books", Rule::X1Materiality, "describes the medium"),
            MergeEntry::combine("Science – Atlases", "Science – Atlases", Rule::R2Form, "kept unmerged"),
        ])
        .expect("default merge map is valid")
    }

    pub fn entries(&self) -> &[MergeEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&MergeEntry> {
        self.index.get(key).map(|&i| &self.entries[i])
    }

    /// Follows combine rows from `key` to a terminal heading or a removal.
    pub fn resolve(&self, key: &str) -> Option<Resolution> {
        let mut entry = self.get(key)?;
        let mut rules = Vec::new();
        loop {
            if !rules.contains(&entry.rule) {
                rules.push(entry.rule);
            }
            match entry.action {
                MergeAction::Remove => return Some(Resolution::Remove { rules }),
                MergeAction::CombineInto => {
                    let target = entry.target.as_deref().expect("validated");
                    if entry.is_pin() {
                        return Some(Resolution::Combine { target: display_fold(target), rules, pinned: true });
                    }
                    match self.get(&heading_key(target)) {
                        Some(next) => entry = next,
                        None => {
                            return Some(Resolution::Combine { target: display_fold(target), rules, pinned: false })
                        }
                    }
                }
            }
        }
    }

    fn check_cycles(&self) -> Result<(), HeadingError> {
        // 0 = unvisited, 1 = on the current path, 2 = done
        let mut state: BTreeMap<&str, u8> = BTreeMap::new();
        for start in self.index.keys() {
            let mut path: Vec<&str> = Vec::new();
            let mut key: &str = start;
            loop {
                match state.get(key).copied().unwrap_or(0) {
                    2 => break,
                    1 => {
                        let from = path.iter().position(|k| *k == key).unwrap_or(0);
                        let mut cycle: Vec<String> = path[from..]
                            .iter()
                            .map(|k| self.get(k).map(|e| e.pattern.clone()).unwrap_or_else(|| k.to_string()))
                            .collect();
                        cycle.push(cycle[0].clone());
                        return Err(HeadingError::MergeMapCycle(cycle));
                    }
                    _ => {}
                }
                let Some(entry) = self.get(key) else { break };
                if entry.action != MergeAction::CombineInto || entry.is_pin() {
                    break;
                }
                state.insert(key, 1);
                path.push(key);
                let target_key = heading_key(entry.target.as_deref().expect("validated"));
                let Some((k, _)) = self.index.get_key_value(&target_key) else { break };
                key = k.as_str();
            }
            for k in path {
                state.insert(k, 2);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_and_lookup() {
        let text = "pattern,action,target,rule,note\n\
                    Systems theory,combine_into,System theory,R1_spelling,variant\n\
                    Electronic books,remove,,X1_materiality,medium\n";
        let mm = MergeMap::parse_csv(text).unwrap();
        assert_eq!(mm.len(), 2);
        assert_eq!(
            mm.resolve(&heading_key("systems theory.")),
            Some(Resolution::Combine { target: "System theory".into(), rules: vec![Rule::R1Spelling], pinned: false })
        );
        assert_eq!(
            mm.resolve(&heading_key("Electronic books")),
            Some(Resolution::Remove { rules: vec![Rule::X1Materiality] })
        );
    }

    #[test]
    fn chains_resolve_to_their_terminal() {
        let mm = MergeMap::new(vec![
            MergeEntry::combine("Social network analysis", "Social network", Rule::R5Topical, ""),
            MergeEntry::combine("Social network", "Social networks", Rule::R1Spelling, ""),
        ])
        .unwrap();
        assert_eq!(
            mm.resolve(&heading_key("Social network analysis")),
            Some(Resolution::Combine {
                target: "Social networks".into(),
                rules: vec![Rule::R5Topical, Rule::R1Spelling],
                pinned: false
            })
        );
    }

    #[test]
    fn cycles_are_rejected_with_their_members() {
        let err = MergeMap::new(vec![
            MergeEntry::combine("A", "B", Rule::R5Topical, ""),
            MergeEntry::combine("B", "C", Rule::R5Topical, ""),
            MergeEntry::combine("C", "A", Rule::R5Topical, ""),
        ])
        .unwrap_err();
        match err {
            HeadingError::MergeMapCycle(c) => {
                assert_eq!(c.len(), 4);
                assert_eq!(c.first(), c.last());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn self_target_is_a_pin_not_a_cycle() {
        let mm = MergeMap::defaults();
        assert!(matches!(
            mm.resolve(&heading_key("Science – Atlases")),
            Some(Resolution::Combine { pinned: true, .. })
        ));
    }

    #[test]
    fn combine_without_target_is_rejected() {
        let text = "pattern,action,target,rule,note\nX,combine_into,,R5_topical,\n";
        assert!(matches!(MergeMap::parse_csv(text), Err(HeadingError::MergeMapRow { line: 2, .. })));
    }

    #[test]
    fn unknown_rule_is_rejected() {
        let text = "pattern,action,target,rule,note\nX,remove,,R9,\n";
        assert!(MergeMap::parse_csv(text).is_err());
    }
}
