//! TOML run configuration.
//!
//! ```toml
//! [paths]
//! bibtex = "books.bib"          # required
//! catalog = "catalog.jsonl"     # required
//! codebook = "codebook.csv"     # required
//! merge_map = "merge_map.csv"   # optional, built-in rules otherwise
//! crosswalk = "crosswalk.csv"   # optional, built-in LCC table otherwise
//! forms = "forms.txt"           # optional term lists replacing the
//! places = "gazetteer.txt"      #   built-in vocabularies
//! names = "names.txt"
//! out_dir = "out"             # optional, see `out_dir()`
//!
//! [params]
//! degree_gt = 5
//! gamma = 0.9
//! seed = 42
//! bin_width = 5
//! layout_iterations = 500
//! restarts = 1
//! preserve_multiplicity = false
//! slice_max_year = 1990
//! label_length = 28
//! year_bins = ["1750-1900", "1901-1949", "..."]
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::graph::temporal::DEFAULT_YEAR_BINS;
use crate::graph::YearScheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub bibtex: PathBuf,
    pub catalog: PathBuf,
    pub codebook: PathBuf,
    #[serde(default)]
    pub merge_map: Option<PathBuf>,
    #[serde(default)]
    pub crosswalk: Option<PathBuf>,
    #[serde(default)]
    pub forms: Option<PathBuf>,
    #[serde(default)]
    pub places: Option<PathBuf>,
    #[serde(default)]
    pub names: Option<PathBuf>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub degree_gt: usize,
    pub gamma: f64,
    pub seed: u64,
    pub bin_width: i32,
    pub layout_iterations: usize,
    pub restarts: usize,
    pub preserve_multiplicity: bool,
    pub slice_max_year: i32,
    pub label_length: usize,
    pub year_bins: Vec<String>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            degree_gt: 5,
            gamma: 0.9,
            seed: 42,
            bin_width: 5,
            layout_iterations: 500,
            restarts: 1,
            preserve_multiplicity: false,
            slice_max_year: 1990,
            label_length: crate::viz::style::DEFAULT_LABEL_LEN,
            year_bins: DEFAULT_YEAR_BINS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    #[serde(default)]
    pub params: Params,
    /// Directory relative paths were resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.resolve_paths(base);
        cfg.base_dir = base.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("reading {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::parse(&text, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let p = &mut self.paths;
        fix(&mut p.bibtex);
        fix(&mut p.catalog);
        fix(&mut p.codebook);
        for o in [&mut p.out_dir, &mut p.merge_map, &mut p.crosswalk, &mut p.forms, &mut p.places, &mut p.names] {
            if let Some(p) = o.as_mut() {
                fix(p);
            }
        }
    }

    /// Configured output directory, or `out` next to the config file.
    pub fn out_dir(&self) -> PathBuf {
        self.paths.out_dir.clone().unwrap_or_else(|| self.base_dir.join("out"))
    }

    /// Named input files that must exist, in a fixed order.
    pub fn inputs(&self) -> Vec<(&'static str, &Path)> {
        let p = &self.paths;
        let mut v: Vec<(&'static str, &Path)> =
            vec![("bibtex", &p.bibtex), ("catalog", &p.catalog), ("codebook", &p.codebook)];
        let optional = [
            ("merge_map", &p.merge_map),
            ("crosswalk", &p.crosswalk),
            ("forms", &p.forms),
            ("places", &p.places),
            ("names", &p.names),
        ];
        v.extend(optional.into_iter().filter_map(|(n, o)| o.as_deref().map(|p| (n, p))));
        v
    }

    pub fn input(&self, role: &str) -> Option<&Path> {
        self.inputs().into_iter().find(|(r, _)| *r == role).map(|(_, p)| p)
    }

    pub fn year_scheme(&self) -> Result<YearScheme, PipelineError> {
        YearScheme::parse(&self.params.year_bins).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Checks parameters and that every referenced input exists.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let p = &self.params;
        if !(p.gamma > 0.0 && p.gamma.is_finite()) {
            return Err(PipelineError::Config(format!("gamma must be positive, got {}", p.gamma)));
        }
        if p.bin_width < 1 {
            return Err(PipelineError::Config(format!("bin_width must be at least 1, got {}", p.bin_width)));
        }
        if p.layout_iterations == 0 {
            return Err(PipelineError::Config("layout_iterations must be at least 1".into()));
        }
        self.year_scheme()?;
        for (role, path) in self.inputs() {
            if !path.is_file() {
                return Err(PipelineError::MissingInput { role: role.to_string(), path: path.display().to_string() });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_relative_paths() {
        let cfg = PipelineConfig::parse(
            "[paths]\nbibtex = \"a.bib\"\ncatalog = \"c.jsonl\"\ncodebook = \"k.csv\"\n",
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(cfg.paths.bibtex, PathBuf::from("/data/a.bib"));
        assert_eq!(cfg.out_dir(), PathBuf::from("/data/out"));
        assert_eq!(cfg.params.degree_gt, 5);
        assert_eq!(cfg.params.gamma, 0.9);
        assert_eq!(cfg.params.year_bins.len(), 8);
    }

    #[test]
    fn bad_gamma_and_unknown_key() {
        let text = "[paths]\nbibtex = \"a\"\ncatalog = \"b\"\ncodebook = \"c\"\n[params]\ngamma = 0.0\n";
        let cfg = PipelineConfig::parse(text, Path::new(".")).unwrap();
        assert!(matches!(cfg.validate(), Err(PipelineError::Config(m)) if m.contains("gamma")));
        let text = "[paths]\nbibtex = \"a\"\ncatalog = \"b\"\ncodebook = \"c\"\n[params]\ngama = 1.0\n";
        assert!(PipelineConfig::parse(text, Path::new(".")).is_err());
    }
}
