//! Stage bodies and the runner that caches, writes and records them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::PipelineConfig;
use super::provenance::{ProvenanceLog, Stage, StageRecord, StageStatus, PROVENANCE_FILE};
use super::{io_err, PipelineError};
use crate::crosswalk::{
    domain_book_counts, domain_cooccurrence, lcc_report, CodeBook, CrosswalkTable, HeadingDomainCoding,
};
use crate::digest::{child_seed, file_digest, sha256_hex};
use crate::fsutil::{with_trailing_newline, write_atomic};
use crate::graph::graphml::{from_graphml, to_graphml};
use crate::graph::{
    build_bipartite, filter_by_subject_degree, louvain_with_restarts, temporal_slice, BookHeadings, CommunityPartition,
    ConceptGraph, DegreeFilter, NodeKind,
};
use crate::headings::facets::load_term_list;
use crate::headings::{
    book_dedup_headings, consolidate, dedup_headings, english_raw_headings, heading_stats, HeadingStats, MergeMap,
    NormalizationLedger, Vocabulary,
};
use crate::ingest::reports::{
    chapter_citation_report, chapter_report_csv, publication_year_histogram, Histogram, TypeCounts,
};
use crate::ingest::{classify_and_filter, parse_bibliography, BookRecord, CatalogRecordSet, RemovalReason};
use crate::viz::chart::{render_histogram_svg, HistogramSeries, FINAL_COLOR, INITIAL_COLOR};
use crate::viz::export::to_dot;
use crate::viz::layout::{force_layout, LayoutParams, LayoutResult};
use crate::viz::style::{
    style_by_community, style_by_degree, style_by_year_bin, truncate_label, StyleMap, COMMUNITY_PALETTE,
};
use crate::viz::svg::render_svg;

pub const PARTIAL_DIR: &str = "partial";

pub const BOOKS_JSON: &str = "books.json";
pub const HEADINGS_JSON: &str = "headings.json";
pub const DOMAINS_JSON: &str = "domains.json";
pub const FULL_GRAPHML: &str = "network_full.graphml";
pub const FILTERED_GRAPHML: &str = "network_filtered.graphml";
pub const SLICE_GRAPHML: &str = "network_slice.graphml";
pub const COMMUNITIES_CSV: &str = "communities.csv";
pub const LAYOUT_CSV: &str = "layout.csv";

/// Canonical headings of one book with the number of English-language
/// editions carrying each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookCanonical {
    pub book_id: String,
    pub headings: Vec<(String, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadingsFile {
    pub canonical: BTreeSet<String>,
    pub books: Vec<BookCanonical>,
    pub stats: HeadingStats,
}

/// Files written by a completed run, with the final provenance log.
#[derive(Debug, Clone, PartialEq)]
pub struct ArtifactBundle {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub provenance: ProvenanceLog,
}

#[derive(Default)]
struct StageOutput {
    files: Vec<(String, Vec<u8>)>,
    counts: BTreeMap<String, Value>,
    warnings: Vec<String>,
}

impl StageOutput {
    fn text(&mut self, name: &str, text: String) {
        self.files.push((name.to_string(), with_trailing_newline(text).into_bytes()));
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) {
        self.text(name, serde_json::to_string_pretty(v).expect("stage data serializes"));
    }

    fn count(&mut self, name: &str, v: impl Into<Value>) {
        self.counts.insert(name.to_string(), v.into());
    }
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn prior(stage: Stage, out: &Path, file: &str) -> Result<String, PipelineError> {
    let p = out.join(file);
    if !p.is_file() {
        return Err(PipelineError::MissingStageInput { stage: stage.to_string(), file: file.to_string() });
    }
    read_text(&p)
}

fn prior_json<T: for<'de> Deserialize<'de>>(stage: Stage, out: &Path, file: &str) -> Result<T, PipelineError> {
    serde_json::from_str(&prior(stage, out, file)?)
        .map_err(|e| PipelineError::Invalid { file: file.to_string(), reason: e.to_string() })
}

fn prior_graph(stage: Stage, out: &Path, file: &str) -> Result<ConceptGraph, PipelineError> {
    Ok(from_graphml(&prior(stage, out, file)?)?)
}

/// Config inputs as `config:<role>` and earlier outputs by file name.
fn stage_inputs(stage: Stage, cfg: &PipelineConfig, out: &Path) -> Vec<(String, PathBuf)> {
    let ext = |roles: &[&str]| -> Vec<(String, PathBuf)> {
        roles.iter().filter_map(|r| cfg.input(r).map(|p| (format!("config:{r}"), p.to_path_buf()))).collect()
    };
    let prev =
        |files: &[&str]| -> Vec<(String, PathBuf)> { files.iter().map(|f| (f.to_string(), out.join(f))).collect() };
    let mut v = match stage {
        Stage::Ingest => ext(&["bibtex", "catalog"]),
        Stage::Normalize => ext(&["merge_map", "forms", "places", "names"]),
        Stage::Crosswalk => ext(&["codebook", "crosswalk"]),
        _ => vec![],
    };
    v.extend(match stage {
        Stage::Ingest => vec![],
        Stage::Normalize => prev(&[BOOKS_JSON]),
        Stage::Crosswalk => prev(&[BOOKS_JSON, HEADINGS_JSON]),
        Stage::Graph => prev(&[BOOKS_JSON, HEADINGS_JSON, DOMAINS_JSON]),
        Stage::Detect | Stage::Layout => prev(&[FILTERED_GRAPHML]),
        Stage::Export => prev(&[FILTERED_GRAPHML, SLICE_GRAPHML, COMMUNITIES_CSV, LAYOUT_CSV]),
    });
    v
}

fn stage_params(stage: Stage, cfg: &PipelineConfig) -> Value {
    let p = &cfg.params;
    match stage {
        Stage::Ingest => json!({ "bin_width": p.bin_width }),
        Stage::Normalize | Stage::Crosswalk => json!({}),
        Stage::Graph => json!({
            "degree_gt": p.degree_gt,
            "preserve_multiplicity": p.preserve_multiplicity,
            "slice_max_year": p.slice_max_year,
        }),
        Stage::Detect => json!({
            "gamma": p.gamma,
            "seed": p.seed,
            "stage_seed": child_seed(p.seed, "detect"),
            "restarts": p.restarts,
        }),
        Stage::Layout => json!({
            "iterations": p.layout_iterations,
            "seed": p.seed,
            "stage_seed": child_seed(p.seed, "layout"),
        }),
        Stage::Export => json!({ "year_bins": p.year_bins, "label_length": p.label_length }),
    }
}

fn ingest(cfg: &PipelineConfig) -> Result<StageOutput, PipelineError> {
    let refs = parse_bibliography(&read_text(&cfg.paths.bibtex)?)?;
    let catalog = CatalogRecordSet::load(&cfg.paths.catalog)?;
    catalog.check_orphans(&refs)?;
    let cls = classify_and_filter(&refs, &catalog);
    let types = TypeCounts::build(&refs, &cls.books);
    let chapters = chapter_citation_report(&refs);
    let bw = cfg.params.bin_width;
    let initial = Histogram::from_years(refs.iter().map(|r| r.year), bw)?;
    let fin = publication_year_histogram(&cls.books, bw)?;
    let svg = render_histogram_svg(&[
        HistogramSeries { name: "initial", color: INITIAL_COLOR, histogram: &initial },
        HistogramSeries { name: "final", color: FINAL_COLOR, histogram: &fin },
    ])?;

    let mut out = StageOutput::default();
    out.json(BOOKS_JSON, &cls.books);
    out.text("removals.csv", cls.removals.to_csv());
    out.text("table1_types.csv", types.to_csv());
    out.text("table5_chapters.csv", chapter_report_csv(&chapters));
    out.text("figure1_initial.csv", initial.to_csv());
    out.text("figure1_final.csv", fin.to_csv());
    out.text("figure1.svg", svg);
    out.count("references", refs.len());
    out.count("books", cls.books.len());
    out.count("removed", cls.removals.len());
    for r in [RemovalReason::NotABook, RemovalReason::NoEnglishHeadings, RemovalReason::Duplicate] {
        out.count(&format!("removed_{}", r.as_str()), cls.removals.count(r));
    }
    out.count("catalog_records", catalog.len());
    out.count("editions", catalog.edition_count());
    out.count("multi_chapter_citations", chapters.len());
    out.count("figure1_mode_bin", fin.mode());
    out.warnings.extend(catalog.warnings.iter().cloned());
    out.warnings.extend(cls.warnings);
    Ok(out)
}

fn vocabulary(cfg: &PipelineConfig) -> Result<Vocabulary, PipelineError> {
    let mut v = Vocabulary::default();
    if let Some(p) = &cfg.paths.forms {
        v = v.with_forms(&load_term_list(p)?);
    }
    if let Some(p) = &cfg.paths.places {
        v = v.with_places(&load_term_list(p)?);
    }
    if let Some(p) = &cfg.paths.names {
        v = v.with_names(&load_term_list(p)?);
    }
    Ok(v)
}

/// Canonical headings per book, weighted by the number of English
/// editions listing a heading that maps to each.
fn book_canonicals(book: &BookRecord, ledger: &NormalizationLedger) -> BookCanonical {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for e in book.editions.iter().filter(|e| e.has_english_headings()) {
        let here: BTreeSet<&str> = e.raw_subject_headings.iter().filter_map(|h| ledger.canonical_of(h)).collect();
        for h in here {
            *counts.entry(h.to_string()).or_default() += 1;
        }
    }
    BookCanonical { book_id: book.book_id.clone(), headings: counts.into_iter().collect() }
}

fn normalize(cfg: &PipelineConfig, out_dir: &Path) -> Result<StageOutput, PipelineError> {
    let books: Vec<BookRecord> = prior_json(Stage::Normalize, out_dir, BOOKS_JSON)?;
    let merge_map = match &cfg.paths.merge_map {
        Some(p) => MergeMap::load(p)?,
        None => MergeMap::defaults(),
    };
    let vocab = vocabulary(cfg)?;
    let raw: Vec<Vec<String>> = books.iter().map(english_raw_headings).collect();
    let raw_total: usize = raw.iter().map(Vec::len).sum();
    let per_book_unique: usize = books.iter().map(|b| book_dedup_headings(b).len()).sum();
    let unique = dedup_headings(raw.iter().flatten().map(String::as_str));
    let cons = consolidate(&unique, &merge_map, &vocab)?;
    let summary = &cons.ledger.summary;
    if summary.kept + summary.removed != unique.len() {
        return Err(PipelineError::Invalid {
            file: "ledger.csv".into(),
            reason: format!("{} kept + {} removed != {} unique", summary.kept, summary.removed, unique.len()),
        });
    }
    let per_book: Vec<BookCanonical> = books.iter().map(|b| book_canonicals(b, &cons.ledger)).collect();
    let named: Vec<(String, Vec<&str>)> =
        per_book.iter().map(|b| (b.book_id.clone(), b.headings.iter().map(|(h, _)| h.as_str()).collect())).collect();
    let stats = heading_stats(&named)?;
    let attached: BTreeSet<&str> = per_book.iter().flat_map(|b| b.headings.iter().map(|(h, _)| h.as_str())).collect();

    let mut out = StageOutput::default();
    out.text("ledger.csv", cons.ledger.to_csv());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(["book_id", "canonical_headings"]).unwrap();
    for (id, n) in &stats.per_book {
        w.write_record([id.clone(), n.to_string()]).unwrap();
    }
    out.text("heading_stats.csv", String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
    out.count("raw_headings", raw_total);
    out.count("per_book_unique_headings", per_book_unique);
    out.count("unique_headings", unique.len());
    out.count("ledger_kept", summary.kept);
    out.count("ledger_removed", summary.removed);
    out.count("canonical_headings", cons.canonical.len());
    out.count("canonical_attached", attached.len());
    out.count("assignments", stats.total);
    out.count("mean_per_book", stats.mean_2dp());
    out.count("min_per_book", stats.min);
    out.count("max_per_book", stats.max);
    for (rule, n) in &summary.by_rule {
        out.count(&format!("rule_{rule}"), *n);
    }
    out.json(HEADINGS_JSON, &HeadingsFile { canonical: cons.canonical, books: per_book, stats });
    Ok(out)
}

fn crosswalk(cfg: &PipelineConfig, out_dir: &Path) -> Result<StageOutput, PipelineError> {
    let books: Vec<BookRecord> = prior_json(Stage::Crosswalk, out_dir, BOOKS_JSON)?;
    let headings: HeadingsFile = prior_json(Stage::Crosswalk, out_dir, HEADINGS_JSON)?;
    let table2 = lcc_report(books.iter().map(|b| (b.lcc_shelf_number.as_deref(), book_dedup_headings(b).len())))?;
    let xwalk = match &cfg.paths.crosswalk {
        Some(p) => CrosswalkTable::load(p)?,
        None => CrosswalkTable::default(),
    };
    let table3 = domain_book_counts(books.iter().map(|b| b.lcc_shelf_number.as_deref()), &xwalk)?;
    let codebook = CodeBook::load(&cfg.paths.codebook)?;
    let codings = codebook.code_all(headings.canonical.iter().map(String::as_str))?;
    let tab = domain_cooccurrence(&codings);

    let mut out = StageOutput::default();
    out.text("table2_lcc.csv", table2.to_csv());
    out.text("table3_domains.csv", table3.to_csv());
    out.text("table4_crosstab.csv", tab.to_csv(false));
    out.json(DOMAINS_JSON, &codings);
    out.count("books", table2.total.books);
    out.count("book_headings", table2.total.headings);
    out.count("no_lcc_books", table2.no_lcc.books);
    out.count("no_lcc_headings", table2.no_lcc.headings);
    out.count("unmapped_books", table3.unmapped);
    out.count("coded_headings", tab.total());
    out.count("single_coded", tab.single_total());
    out.count("dual_coded", tab.dual_total());
    Ok(out)
}

fn graph(cfg: &PipelineConfig, out_dir: &Path) -> Result<StageOutput, PipelineError> {
    let books: Vec<BookRecord> = prior_json(Stage::Graph, out_dir, BOOKS_JSON)?;
    let headings: HeadingsFile = prior_json(Stage::Graph, out_dir, HEADINGS_JSON)?;
    let codings: Vec<HeadingDomainCoding> = prior_json(Stage::Graph, out_dir, DOMAINS_JSON)?;
    let by_id: HashMap<&str, &BookCanonical> = headings.books.iter().map(|b| (b.book_id.as_str(), b)).collect();
    let bh: Vec<BookHeadings> = books
        .iter()
        .map(|b| BookHeadings {
            book_id: b.book_id.clone(),
            label: b.title.clone(),
            year: b.year,
            headings: by_id.get(b.book_id.as_str()).map(|c| c.headings.clone()).unwrap_or_default(),
        })
        .collect();
    let mut g = build_bipartite(&bh, &headings.canonical, cfg.params.preserve_multiplicity)?;
    let primary: HashMap<&str, u8> = codings.iter().map(|c| (c.heading.as_str(), c.primary.code())).collect();
    for i in 0..g.node_count() {
        let code = match &g.nodes()[i] {
            n if n.kind == NodeKind::Subject => primary.get(n.label.as_str()).copied(),
            _ => None,
        };
        if code.is_some() {
            g.node_mut(i).domain_code = code;
        }
    }
    let filtered = filter_by_subject_degree(&g, DegreeFilter::GreaterThan(cfg.params.degree_gt));
    let (slice, report) = temporal_slice(&filtered, cfg.params.slice_max_year);

    let mut out = StageOutput::default();
    out.text(FULL_GRAPHML, to_graphml(&g));
    out.text("network_full_edges.csv", g.edges_csv());
    out.text(FILTERED_GRAPHML, to_graphml(&filtered));
    out.text("network_filtered_edges.csv", filtered.edges_csv());
    out.text(SLICE_GRAPHML, to_graphml(&slice));
    out.json("slice_report.json", &report);
    out.count("nodes", g.node_count());
    out.count("book_nodes", g.count_kind(NodeKind::Book));
    out.count("subject_nodes", g.count_kind(NodeKind::Subject));
    out.count("edges", g.edge_count());
    out.count("filtered_subjects", filtered.count_kind(NodeKind::Subject));
    out.count("filtered_books", filtered.count_kind(NodeKind::Book));
    out.count("filtered_edges", filtered.edge_count());
    out.count("slice_subjects", report.subjects_kept);
    out.count("slice_books", report.books_kept);
    out.count("slice_vanished", report.vanished_subjects.join("; "));
    Ok(out)
}

pub fn communities_csv(g: &ConceptGraph, p: &CommunityPartition) -> String {
    let mut s = format!("# q={},gamma={},seed={}\nnode_id,community\n", p.modularity_q, p.resolution_gamma, p.seed);
    for (n, c) in g.nodes().iter().zip(&p.assignment) {
        s.push_str(&format!("{},{c}\n", n.id));
    }
    s
}

/// Reads a communities file back into a partition indexed like `g`.
pub fn parse_communities(text: &str, g: &ConceptGraph) -> Result<CommunityPartition, PipelineError> {
    let bad = |reason: String| PipelineError::Invalid { file: COMMUNITIES_CSV.into(), reason };
    let mut lines = text.lines();
    let header = lines.next().and_then(|l| l.strip_prefix("# ")).ok_or_else(|| bad("missing header".into()))?;
    let mut meta: HashMap<&str, &str> = HashMap::new();
    for kv in header.split(',') {
        if let Some((k, v)) = kv.split_once('=') {
            meta.insert(k.trim(), v.trim());
        }
    }
    let num = |k: &str| meta.get(k).ok_or_else(|| bad(format!("header lacks {k}")));
    let q: f64 = num("q")?.parse().map_err(|_| bad("bad q".into()))?;
    let gamma: f64 = num("gamma")?.parse().map_err(|_| bad("bad gamma".into()))?;
    let seed: u64 = num("seed")?.parse().map_err(|_| bad("bad seed".into()))?;
    let mut by_id: HashMap<&str, usize> = HashMap::new();
    for l in lines.skip(1).filter(|l| !l.is_empty()) {
        let (id, c) = l.rsplit_once(',').ok_or_else(|| bad(format!("bad row {l:?}")))?;
        by_id.insert(id, c.parse().map_err(|_| bad(format!("bad community in {l:?}")))?);
    }
    let assignment = g
        .nodes()
        .iter()
        .map(|n| by_id.get(n.id.as_str()).copied().ok_or_else(|| bad(format!("no community for {}", n.id))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CommunityPartition { assignment, modularity_q: q, resolution_gamma: gamma, seed, level_q: vec![] })
}

fn detect(cfg: &PipelineConfig, out_dir: &Path) -> Result<StageOutput, PipelineError> {
    let g = prior_graph(Stage::Detect, out_dir, FILTERED_GRAPHML)?;
    let p = &cfg.params;
    let part = louvain_with_restarts(&g.to_weighted(false), p.gamma, child_seed(p.seed, "detect"), p.restarts)?;
    let mut out = StageOutput::default();
    out.text(COMMUNITIES_CSV, communities_csv(&g, &part));
    out.count("modularity", part.modularity_q);
    out.count("communities", part.community_count());
    out.count("community_sizes", part.sizes().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "));
    Ok(out)
}

fn layout(cfg: &PipelineConfig, out_dir: &Path) -> Result<StageOutput, PipelineError> {
    let g = prior_graph(Stage::Layout, out_dir, FILTERED_GRAPHML)?;
    let params = LayoutParams {
        iterations: cfg.params.layout_iterations,
        area: None,
        seed: child_seed(cfg.params.seed, "layout"),
    };
    let l = force_layout(&g, params)?;
    let mut out = StageOutput::default();
    out.text(LAYOUT_CSV, l.to_csv());
    out.count("positioned_nodes", l.node_ids.len());
    Ok(out)
}

fn with_title(mut s: StyleMap, g: &ConceptGraph, title: &str, label_len: usize) -> StyleMap {
    for n in g.nodes() {
        if let Some(st) = s.nodes.get_mut(&n.id) {
            st.label = truncate_label(&n.label, label_len);
        }
    }
    s.title = Some(title.to_string());
    s
}

fn export(cfg: &PipelineConfig, out_dir: &Path) -> Result<StageOutput, PipelineError> {
    let mut g = prior_graph(Stage::Export, out_dir, FILTERED_GRAPHML)?;
    let slice = prior_graph(Stage::Export, out_dir, SLICE_GRAPHML)?;
    let part = parse_communities(&prior(Stage::Export, out_dir, COMMUNITIES_CSV)?, &g)?;
    let lp = LayoutParams {
        iterations: cfg.params.layout_iterations,
        area: None,
        seed: child_seed(cfg.params.seed, "layout"),
    };
    let lay = LayoutResult::from_csv(&prior(Stage::Export, out_dir, LAYOUT_CSV)?, lp)?;
    let scheme = cfg.year_scheme()?;
    let len = cfg.params.label_length;

    let degree = with_title(style_by_degree(&g), &g, "High-degree subjects and linked books", len);
    let community = with_title(style_by_community(&g, &part, &COMMUNITY_PALETTE), &g, "Communities", len);
    let years = with_title(style_by_year_bin(&g, &scheme), &g, "Books by publication year", len);
    let title = format!("Books published up to {}", cfg.params.slice_max_year);
    let slice_years = with_title(style_by_year_bin(&slice, &scheme), &slice, &title, len);

    let mut out = StageOutput::default();
    out.text("figure2_degree.svg", render_svg(&g, &lay, &degree)?);
    out.text("figure3_communities.svg", render_svg(&g, &lay, &community)?);
    out.text("figure4_years.svg", render_svg(&g, &lay, &years)?);
    out.text("figure4_slice.svg", render_svg(&slice, &lay, &slice_years)?);
    for (i, c) in part.assignment.iter().enumerate() {
        g.node_mut(i).community = Some(*c as u32);
    }
    out.text("network_communities.graphml", to_graphml(&g));
    out.text("network_filtered.dot", to_dot(&g));
    out.count("figures", 4);
    for s in [&community, &years, &slice_years] {
        out.warnings.extend(s.warnings.iter().cloned());
    }
    Ok(out)
}

fn execute(stage: Stage, cfg: &PipelineConfig, out_dir: &Path) -> Result<StageOutput, PipelineError> {
    match stage {
        Stage::Ingest => ingest(cfg),
        Stage::Normalize => normalize(cfg, out_dir),
        Stage::Crosswalk => crosswalk(cfg, out_dir),
        Stage::Graph => graph(cfg, out_dir),
        Stage::Detect => detect(cfg, out_dir),
        Stage::Layout => layout(cfg, out_dir),
        Stage::Export => export(cfg, out_dir),
    }
}

fn digest_inputs(
    stage: Stage,
    cfg: &PipelineConfig,
    out_dir: &Path,
) -> Result<BTreeMap<String, String>, PipelineError> {
    let mut m = BTreeMap::new();
    for (name, path) in stage_inputs(stage, cfg, out_dir) {
        if !path.is_file() {
            return Err(match name.strip_prefix("config:") {
                Some(role) => PipelineError::MissingInput { role: role.into(), path: path.display().to_string() },
                None => PipelineError::MissingStageInput { stage: stage.to_string(), file: name },
            });
        }
        m.insert(name, file_digest(&path).map_err(io_err(&path))?);
    }
    Ok(m)
}

fn outputs_intact(rec: &StageRecord, out_dir: &Path) -> bool {
    rec.outputs.iter().all(|(name, d)| file_digest(&out_dir.join(name)).is_ok_and(|x| &x == d))
}

/// Runs one stage against `out_dir`, reusing it when the provenance record
/// shows identical inputs, parameters and outputs. The provenance log is
/// updated either way; a failure is recorded before the error returns.
pub fn run_stage(stage: Stage, cfg: &PipelineConfig, out_dir: &Path) -> Result<StageRecord, PipelineError> {
    let prov_path = out_dir.join(PROVENANCE_FILE);
    let mut prov = ProvenanceLog::load_or_default(&prov_path)?;
    let params = stage_params(stage, cfg);
    let wrap = |e: PipelineError| match e {
        e @ (PipelineError::MissingStageInput { .. } | PipelineError::MissingInput { .. }) => e,
        e => PipelineError::Stage { stage: stage.to_string(), source: Box::new(e) },
    };
    let result = digest_inputs(stage, cfg, out_dir).and_then(|inputs| {
        if let Some(rec) = prov.get(stage) {
            if rec.status == StageStatus::Ok
                && rec.inputs == inputs
                && rec.params == params
                && outputs_intact(rec, out_dir)
            {
                log::info!("{stage}: inputs unchanged, reusing outputs");
                return Ok(rec.clone());
            }
        }
        log::info!("{stage}: running");
        let out = execute(stage, cfg, out_dir)?;
        let mut outputs = BTreeMap::new();
        for (name, bytes) in &out.files {
            let path = out_dir.join(name);
            write_atomic(&path, bytes).map_err(io_err(&path))?;
            outputs.insert(name.clone(), sha256_hex(bytes));
        }
        for w in &out.warnings {
            log::warn!("{stage}: {w}");
        }
        Ok(StageRecord {
            stage,
            status: StageStatus::Ok,
            inputs,
            params: params.clone(),
            outputs,
            counts: out.counts,
            warnings: out.warnings,
            error: None,
        })
    });
    let rec = match result {
        Ok(rec) => rec,
        Err(e) => {
            let e = wrap(e);
            prov.upsert(StageRecord {
                stage,
                status: StageStatus::Failed,
                inputs: BTreeMap::new(),
                params,
                outputs: BTreeMap::new(),
                counts: BTreeMap::new(),
                warnings: vec![],
                error: Some(e.to_string()),
            });
            fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
            write_atomic(&prov_path, prov.to_json().as_bytes()).map_err(io_err(&prov_path))?;
            return Err(e);
        }
    };
    prov.upsert(rec.clone());
    write_atomic(&prov_path, prov.to_json().as_bytes()).map_err(io_err(&prov_path))?;
    Ok(rec)
}

/// Moves every recorded output and the provenance log under `partial/`.
fn retain_partial(out_dir: &Path) -> Result<(), PipelineError> {
    let prov_path = out_dir.join(PROVENANCE_FILE);
    let prov = ProvenanceLog::load_or_default(&prov_path)?;
    let dest = out_dir.join(PARTIAL_DIR);
    fs::create_dir_all(&dest).map_err(io_err(&dest))?;
    let names = prov.stages.iter().flat_map(|r| r.outputs.keys().cloned()).chain([PROVENANCE_FILE.to_string()]);
    for name in names {
        let from = out_dir.join(&name);
        if from.is_file() {
            fs::rename(&from, dest.join(&name)).map_err(io_err(&from))?;
        }
    }
    Ok(())
}

/// Validates the config and runs every stage. On failure the outputs
/// produced so far, with a provenance log naming the failed stage, are
/// moved to `out_dir/partial/`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<ArtifactBundle, PipelineError> {
    cfg.validate()?;
    let out_dir = cfg.out_dir();
    let partial = out_dir.join(PARTIAL_DIR);
    if partial.exists() {
        fs::remove_dir_all(&partial).map_err(io_err(&partial))?;
    }
    fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
    for stage in Stage::ALL {
        if let Err(e) = run_stage(stage, cfg, &out_dir) {
            retain_partial(&out_dir)?;
            return Err(e);
        }
    }
    let provenance = ProvenanceLog::load(&out_dir.join(PROVENANCE_FILE))?;
    let mut files: Vec<String> = provenance.stages.iter().flat_map(|r| r.outputs.keys().cloned()).collect();
    files.push(PROVENANCE_FILE.into());
    files.sort();
    Ok(ArtifactBundle { out_dir, files, provenance })
}
