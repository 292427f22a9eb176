//! Bibliographic-bibliometric mapping of a book corpus.
//!
//! The crate turns a BibTeX seed list plus edition-level catalog records into
//! normalized subject headings, LCC-to-domain crosswalk reports, bipartite
//! book/subject networks with Louvain communities, and SVG/GraphML exports.
//!
//! Modules follow the pipeline order:
//!
//! - [`ingest`]: BibTeX parsing, catalog fixtures, seed filtering, Table-1 style counts
//! - [`headings`]: faceted heading parsing, dedup, rule-based consolidation
//! - [`crosswalk`]: LCC parsing, domain codes, class and domain reports
//! - [`graph`]: bipartite network, projections, modularity, Louvain, temporal slices
//! - [`viz`]: force-directed layout, styling, SVG/GraphML/DOT writers
//! - [`pipeline`]: config, stage orchestration, provenance

pub mod crosswalk;
pub mod digest;
pub mod graph;
pub mod headings;
pub mod ingest;
pub mod pipeline;
pub mod viz;

mod fsutil;

pub use crosswalk::{CrosswalkError, DomainCode, LccClass};
pub use graph::{CommunityPartition, ConceptGraph, GraphError, NodeKind};
pub use headings::{FacetedHeading, HeadingError, MergeMap, Vocabulary};
pub use ingest::{BookRecord, CatalogRecordSet, IngestError, RawReference};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError};
pub use viz::VizError;
