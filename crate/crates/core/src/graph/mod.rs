//! Book–subject networks, projections, modularity and community detection.

pub mod bipartite;
pub mod graphml;
pub mod louvain;
pub mod modularity;
pub mod projection;
pub mod temporal;
pub mod weighted;

use thiserror::Error;

pub use bipartite::{
    build_bipartite, filter_by_subject_degree, BookHeadings, ConceptGraph, DegreeFilter, Edge, Node, NodeKind,
};
pub use louvain::{louvain, louvain_with_restarts, CommunityPartition};
pub use modularity::modularity;
pub use projection::{project_cooccurrence, ProjectedGraph};
pub use temporal::{assign_year_bin, temporal_slice, SliceReport, YearBin, YearScheme};
pub use weighted::WeightedGraph;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("book {book} lists heading {heading:?} that is not in the canonical set")]
    UnknownHeading { book: String, heading: String },
    #[error("canonical headings attached to no book: {}", .0.join("; "))]
    UnattachedHeadings(Vec<String>),
    #[error("duplicate book id {0}")]
    DuplicateBook(String),
    #[error("duplicate node id {0}")]
    DuplicateNode(String),
    #[error("total edge weight is zero")]
    ZeroWeight,
    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("partition covers {got} nodes, graph has {expected}")]
    PartitionSize { expected: usize, got: usize },
    #[error("year {0} is not covered by the bin scheme")]
    UncoveredYear(i32),
    #[error("invalid year bin {0:?}")]
    InvalidYearBin(String),
    #[error("graphml: {0}")]
    GraphMl(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("edge {0} -> {1} does not join a book to a subject")]
    NotBipartite(String, String),
}
