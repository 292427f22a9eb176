//! Per-stage provenance records, stored as `provenance.json` in the output
//! directory. Records carry no timestamps or absolute paths, so identical
//! inputs give identical logs wherever they run.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Normalize,
    Crosswalk,
    Graph,
    Detect,
    Layout,
    Export,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Ingest, Stage::Normalize, Stage::Crosswalk, Stage::Graph, Stage::Detect, Stage::Layout, Stage::Export];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Normalize => "normalize",
            Stage::Crosswalk => "crosswalk",
            Stage::Graph => "graph",
            Stage::Detect => "detect",
            Stage::Layout => "layout",
            Stage::Export => "export",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|st| st.as_str() == s)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    /// Input name to SHA-256 digest.
    pub inputs: BTreeMap<String, String>,
    pub params: Value,
    /// Output file name to SHA-256 digest.
    pub outputs: BTreeMap<String, String>,
    pub counts: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl StageRecord {
    pub fn count(&self, name: &str) -> Option<&Value> {
        self.counts.get(name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceLog {
    pub stages: Vec<StageRecord>,
}

pub const PROVENANCE_FILE: &str = "provenance.json";

impl ProvenanceLog {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| PipelineError::Io { path: path.display().to_string(), source })?;
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Invalid { file: path.display().to_string(), reason: e.to_string() })
    }

    /// Empty log when the file does not exist yet.
    pub fn load_or_default(path: &Path) -> Result<Self, PipelineError> {
        if path.exists() {
            ProvenanceLog::load(path)
        } else {
            Ok(ProvenanceLog::default())
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("provenance serializes");
        s.push('\n');
        s
    }

    pub fn get(&self, stage: Stage) -> Option<&StageRecord> {
        self.stages.iter().find(|r| r.stage == stage)
    }

    /// Replaces any record of the same stage, keeping execution order.
    pub fn upsert(&mut self, record: StageRecord) {
        self.stages.retain(|r| r.stage != record.stage);
        self.stages.push(record);
        self.stages.sort_by_key(|r| r.stage);
    }

    /// Stage, metric and value for every recorded count.
    pub fn summary_table(&self) -> String {
        let mut rows: Vec<(String, String, String)> = Vec::new();
        for r in &self.stages {
            for (k, v) in &r.counts {
                let v = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                rows.push((r.stage.to_string(), k.clone(), v));
            }
            if r.status == StageStatus::Failed {
                rows.push((r.stage.to_string(), "status".into(), "FAILED".into()));
            }
        }
        let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
        let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(6);
        let mut out = format!("{:<w0$}  {:<w1$}  value\n", "stage", "metric");
        for (s, m, v) in rows {
            out.push_str(&format!("{s:<w0$}  {m:<w1$}  {v}\n"));
        }
        out
    }
}
