//! Audit configuration: the panels to analyze, their data files and the
//! analysis parameters. Relative paths are resolved against the directory
//! of the config file.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::islands::IslandParams;
use crate::metrics::{DensityConvention, EigenMatrix, PathMode};
use crate::stats::{Adjustment, Indicator, KsPValue};

pub const DEFAULT_IMPORTANCE_K: usize = 17;
pub const DEFAULT_AFFINITY_ISLAND_MAX: usize = 17;
pub const DEFAULT_BETWEENNESS_THRESHOLD: f64 = 0.002;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Parameters {
    /// Overrides the publication window of every roster when set.
    pub window_years: Option<u32>,
    pub importance_k: usize,
    pub island_min_size: usize,
    /// Journal projection island bound; `⌊3n/5⌋` of the analyzed panelists
    /// when unset.
    pub journal_island_max_size: Option<usize>,
    pub affinity_island_max_size: usize,
    pub betweenness_threshold: f64,
    pub betweenness_paths: PathMode,
    pub density_convention: DensityConvention,
    pub eigen_matrix: EigenMatrix,
    pub ks_p_value: KsPValue,
    pub adjustment: Adjustment,
    pub max_authors: Option<usize>,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            window_years: None,
            importance_k: DEFAULT_IMPORTANCE_K,
            island_min_size: 1,
            journal_island_max_size: None,
            affinity_island_max_size: DEFAULT_AFFINITY_ISLAND_MAX,
            betweenness_threshold: DEFAULT_BETWEENNESS_THRESHOLD,
            betweenness_paths: PathMode::default(),
            density_convention: DensityConvention::default(),
            eigen_matrix: EigenMatrix::default(),
            ks_p_value: KsPValue::default(),
            adjustment: Adjustment::default(),
            max_authors: None,
        }
    }
}

impl Parameters {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.window_years == Some(0) {
            return bad("window_years must be at least 1".into());
        }
        if self.importance_k == 0 {
            return bad("importance_k must be at least 1".into());
        }
        if self.betweenness_threshold.is_nan() || self.betweenness_threshold < 0.0 {
            return bad("betweenness_threshold must be non-negative".into());
        }
        let check = |max: usize, what: &str| {
            IslandParams::new(self.island_min_size, max)
                .map(|_| ())
                .map_err(|e| Error::Validation(format!("{what}: {e}")))
        };
        check(self.affinity_island_max_size, "affinity islands")?;
        if let Some(max) = self.journal_island_max_size {
            check(max, "journal islands")?;
        }
        if self.max_authors == Some(0) {
            return bad("max_authors must be at least 1".into());
        }
        Ok(())
    }

    pub fn journal_islands(&self, panelists: usize) -> Result<IslandParams> {
        let max = self
            .journal_island_max_size
            .unwrap_or_else(|| IslandParams::journal_default(panelists).max_size);
        IslandParams::new(self.island_min_size.min(max), max)
    }

    pub fn affinity_islands(&self) -> Result<IslandParams> {
        IslandParams::new(self.island_min_size, self.affinity_island_max_size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelEntry {
    pub label: String,
    pub roster: PathBuf,
    pub publications: PathBuf,
    #[serde(default)]
    pub affiliations: Option<PathBuf>,
    /// Candidate pool for the random-panel null model.
    #[serde(default)]
    pub pool: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullModelSection {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_indicators")]
    pub indicators: Vec<Indicator>,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_indicators() -> Vec<Indicator> {
    vec![Indicator::FragmentationRatio]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    /// Label of the control panel.
    pub control: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub parameters: Parameters,
    pub panels: Vec<PanelEntry>,
    #[serde(default)]
    pub null_model: Option<NullModelSection>,
}

impl AuditConfig {
    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(1);
            Error::parse(source, line, e.message().to_string())
        })
    }

    /// Reads, validates and resolves relative paths against the config
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = AuditConfig::parse(&text, path)?;
        cfg.validate()?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for e in &mut self.panels {
            fix(&mut e.roster);
            fix(&mut e.publications);
            if let Some(a) = e.affiliations.as_mut() {
                fix(a);
            }
            if let Some(p) = e.pool.as_mut() {
                fix(p);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels.is_empty() {
            return Err(Error::Validation("config lists no panels".into()));
        }
        let mut seen = HashSet::new();
        for e in &self.panels {
            if !seen.insert(e.label.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate panel label `{}`",
                    e.label
                )));
            }
        }
        if !seen.contains(self.control.as_str()) {
            return Err(Error::Validation(format!(
                "control panel `{}` is not among the configured panels",
                self.control
            )));
        }
        if let Some(nm) = &self.null_model {
            if nm.samples == 0 {
                return Err(Error::Validation(
                    "null_model.samples must be at least 1".into(),
                ));
            }
        }
        self.parameters.validate()
    }
}
