//! `biblionet`: run the whole pipeline or a single stage from a TOML config.

use std::path::PathBuf;
use std::process::ExitCode;

use biblionet::pipeline::{run_pipeline, run_stage, ProvenanceLog, Stage, PROVENANCE_FILE};
use biblionet::{PipelineConfig, PipelineError};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "biblionet", version, about = "Book-subject networks from a seed bibliography")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Overrides {
    /// Pipeline config file.
    #[arg(short, long, default_value = "pipeline.toml")]
    config: PathBuf,
    /// Output directory; falls back to the config, then $BIBLIONET_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Louvain resolution.
    #[arg(long)]
    gamma: Option<f64>,
    /// Keep subjects with more than this many books.
    #[arg(long, conflicts_with = "min_degree")]
    degree_gt: Option<usize>,
    /// Keep subjects with at least this many books.
    #[arg(long)]
    min_degree: Option<usize>,
    #[arg(long)]
    bin_width: Option<i32>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage.
    Run(Overrides),
    Ingest(Overrides),
    Normalize(Overrides),
    Crosswalk(Overrides),
    Graph(Overrides),
    Detect(Overrides),
    Layout(Overrides),
    Export(Overrides),
    /// Print the count-chain summary recorded in the provenance log.
    Report(Overrides),
}

fn load(o: &Overrides) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = PipelineConfig::load(&o.config)?;
    if let Some(out) = &o.out {
        cfg.paths.out_dir = Some(out.clone());
    } else if cfg.paths.out_dir.is_none() {
        if let Some(env) = std::env::var_os("BIBLIONET_OUT") {
            cfg.paths.out_dir = Some(PathBuf::from(env));
        }
    }
    let p = &mut cfg.params;
    if let Some(v) = o.seed {
        p.seed = v;
    }
    if let Some(v) = o.gamma {
        p.gamma = v;
    }
    if let Some(v) = o.degree_gt {
        p.degree_gt = v;
    }
    if let Some(v) = o.min_degree {
        if v == 0 {
            return Err(PipelineError::Config("--min-degree must be at least 1".into()));
        }
        p.degree_gt = v - 1;
    }
    if let Some(v) = o.bin_width {
        p.bin_width = v;
    }
    if let Some(v) = o.restarts {
        p.restarts = v;
    }
    if let Some(v) = o.iterations {
        p.layout_iterations = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: Command) -> Result<(), PipelineError> {
    let (stage, o) = match cmd {
        Command::Run(o) => {
            let bundle = run_pipeline(&load(&o)?)?;
            print!("{}", bundle.provenance.summary_table());
            return Ok(());
        }
        Command::Report(o) => {
            let cfg = load(&o)?;
            let path = cfg.out_dir().join(PROVENANCE_FILE);
            if !path.is_file() {
                return Err(PipelineError::MissingStageInput { stage: "report".into(), file: PROVENANCE_FILE.into() });
            }
            print!("{}", ProvenanceLog::load(&path)?.summary_table());
            return Ok(());
        }
        Command::Ingest(o) => (Stage::Ingest, o),
        Command::Normalize(o) => (Stage::Normalize, o),
        Command::Crosswalk(o) => (Stage::Crosswalk, o),
        Command::Graph(o) => (Stage::Graph, o),
        Command::Detect(o) => (Stage::Detect, o),
        Command::Layout(o) => (Stage::Layout, o),
        Command::Export(o) => (Stage::Export, o),
    };
    let cfg = load(&o)?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|source| PipelineError::Io { path: out.display().to_string(), source })?;
    let rec = run_stage(stage, &cfg, &out)?;
    let log = ProvenanceLog { stages: vec![rec] };
    print!("{}", log.summary_table());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
