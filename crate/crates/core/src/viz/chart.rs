//! Grouped bar chart of publication-year histograms.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use quick_xml::escape::escape;

use super::VizError;
use crate::ingest::reports::Histogram;

pub const INITIAL_COLOR: &str = "#1f77b4";
pub const FINAL_COLOR: &str = "#d62728";

pub struct HistogramSeries<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub histogram: &'a Histogram,
}

const BAR_W: f64 = 10.0;
const GAP: f64 = 6.0;
const PLOT_H: f64 = 300.0;
const LEFT: f64 = 50.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Bars grouped per bin, one colour per series; every bin between the
/// first and last occupied one gets a tick. Series with no counts are
/// left out of both bars and legend.
pub fn render_histogram_svg(series: &[HistogramSeries<'_>]) -> Result<String, VizError> {
    let shown: Vec<&HistogramSeries<'_>> = series.iter().filter(|s| s.histogram.total() > 0).collect();
    if let Some(first) = series.first() {
        for s in series {
            if s.histogram.bin_width != first.histogram.bin_width {
                return Err(VizError::MismatchedBins(first.histogram.bin_width, s.histogram.bin_width));
            }
        }
    }
    let width_step = series.first().map_or(1, |s| s.histogram.bin_width);
    let occupied: BTreeSet<i32> = shown.iter().flat_map(|s| s.histogram.bins.keys().copied()).collect();
    let labels: Vec<i32> = match (occupied.first(), occupied.last()) {
        (Some(&a), Some(&b)) => (a..=b).step_by(width_step as usize).collect(),
        _ => vec![],
    };
    let max = shown.iter().flat_map(|s| s.histogram.bins.values().copied()).max().unwrap_or(0).max(1);
    let group_w = BAR_W * shown.len().max(1) as f64 + GAP;
    let width = LEFT + group_w * labels.len() as f64 + 200.0;
    let height = TOP + PLOT_H + BOTTOM;
    let base = TOP + PLOT_H;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.3}\" height=\"{height:.3}\" \
         viewBox=\"0 0 {width:.3} {height:.3}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT:.3}\" y1=\"{base:.3}\" x2=\"{:.3}\" y2=\"{base:.3}\" stroke=\"#000000\"/>",
        LEFT + group_w * labels.len() as f64
    );
    let _ =
        writeln!(out, "<line x1=\"{LEFT:.3}\" y1=\"{TOP:.3}\" x2=\"{LEFT:.3}\" y2=\"{base:.3}\" stroke=\"#000000\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"10\" text-anchor=\"end\">{max}</text>",
        LEFT - 4.0,
        TOP + 4.0
    );
    out.push_str("<g id=\"bars\">\n");
    for (gi, label) in labels.iter().enumerate() {
        let gx = LEFT + GAP / 2.0 + group_w * gi as f64;
        for (si, s) in shown.iter().enumerate() {
            let count = s.histogram.bins.get(label).copied().unwrap_or(0);
            if count == 0 {
                continue;
            }
            let h = PLOT_H * count as f64 / max as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{BAR_W:.3}\" height=\"{h:.3}\" fill=\"{}\" \
                 data-series=\"{}\" data-label=\"{label}\" data-count=\"{count}\"/>",
                gx + BAR_W * si as f64,
                base - h,
                escape(s.color),
                escape(s.name)
            );
        }
    }
    out.push_str("</g>\n<g id=\"x-axis\" font-size=\"10\">\n");
    for (gi, label) in labels.iter().enumerate() {
        let cx = LEFT + group_w * (gi as f64 + 0.5);
        let _ = writeln!(
            out,
            "<text x=\"{cx:.3}\" y=\"{:.3}\" text-anchor=\"end\" transform=\"rotate(-60 {cx:.3} {:.3})\">{label}</text>",
            base + 12.0,
            base + 12.0
        );
    }
    out.push_str("</g>\n");
    if !shown.is_empty() {
        let lx = LEFT + group_w * labels.len() as f64 + 20.0;
        out.push_str("<g id=\"legend\" font-size=\"12\">\n");
        for (i, s) in shown.iter().enumerate() {
            let y = TOP + 20.0 * i as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{lx:.3}\" y=\"{y:.3}\" width=\"12\" height=\"12\" fill=\"{}\"/>\
                 <text x=\"{:.3}\" y=\"{:.3}\" data-total=\"{}\">{} ({})</text>",
                escape(s.color),
                lx + 18.0,
                y + 10.0,
                s.histogram.total(),
                escape(s.name),
                s.histogram.total()
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
