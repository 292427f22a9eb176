//! Layout, styling and file exporters for network figures and charts.

pub mod chart;
pub mod export;
pub mod layout;
pub mod style;
pub mod svg;

use thiserror::Error;

pub use chart::{render_histogram_svg, HistogramSeries};
pub use export::{export_dot, export_edges_csv, export_graphml, export_svg, to_dot};
pub use layout::{force_layout, LayoutParams, LayoutResult};
pub use style::{style_by_community, style_by_degree, style_by_year_bin, truncate_label, NodeStyle, StyleMap};
pub use svg::render_svg;

#[derive(Debug, Error)]
pub enum VizError {
    #[error("cannot lay out an empty graph")]
    EmptyGraph,
    #[error("iterations must be at least 1")]
    InvalidIterations,
    #[error("node {0} has no layout position")]
    MissingPosition(String),
    #[error("histogram series use different bin widths: {0} and {1}")]
    MismatchedBins(i32, i32),
    #[error("layout file line {line}: {reason}")]
    LayoutLine { line: usize, reason: String },
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
