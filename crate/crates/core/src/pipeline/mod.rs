//! End-to-end orchestration: config, stages, caching and provenance.
//!
//! Stages run in the order ingest, normalize, crosswalk, graph, detect,
//! layout, export. Each one reads its inputs (config files or earlier
//! stage outputs in `out_dir`) and writes its own files. A stage whose
//! input digests and parameters match its provenance record, and whose
//! outputs are still intact, is skipped.

pub mod config;
pub mod provenance;
pub mod stages;

use thiserror::Error;

pub use config::{Params, Paths, PipelineConfig};
pub use provenance::{ProvenanceLog, Stage, StageRecord, StageStatus, PROVENANCE_FILE};
pub use stages::{run_pipeline, run_stage, ArtifactBundle, PARTIAL_DIR};

use crate::{CrosswalkError, GraphError, HeadingError, IngestError, VizError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("input {role} not found at {path}")]
    MissingInput { role: String, path: String },
    #[error("stage {stage} needs {file}; run the earlier stages first")]
    MissingStageInput { stage: String, file: String },
    #[error("{file}: {reason}")]
    Invalid { file: String, reason: String },
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<PipelineError>,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Heading(#[from] HeadingError),
    #[error(transparent)]
    Crosswalk(#[from] CrosswalkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Viz(#[from] VizError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// 2 for configuration problems, 3 for stage failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::MissingInput { .. } => 2,
            _ => 3,
        }
    }

    /// Name of the failing stage, if the error came from one.
    pub fn stage(&self) -> Option<&str> {
        match self {
            PipelineError::Stage { stage, .. } => Some(stage),
            PipelineError::MissingStageInput { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.display().to_string(), source }
}
