use std::path::{Path, PathBuf};

use sasv_core::fusion::{default_pathways, FusionConfig, PathwaySpec};
use sasv_core::metrics::ADCFConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_io::read_json;

/// Keywords accepted in place of an explicit pathway list. Both expand to
/// the full default grid.
pub const DEFAULT_PATHWAYS_KEYWORDS: [&str; 2] = ["default17", "default"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathwaySelection {
    Keyword(String),
    List(Vec<PathwaySpec>),
}

impl Default for PathwaySelection {
    fn default() -> Self {
        PathwaySelection::Keyword(DEFAULT_PATHWAYS_KEYWORDS[0].into())
    }
}

impl PathwaySelection {
    pub fn expand(&self) -> Result<Vec<PathwaySpec>> {
        match self {
            PathwaySelection::Keyword(k) if DEFAULT_PATHWAYS_KEYWORDS.contains(&k.as_str()) => Ok(default_pathways()),
            PathwaySelection::Keyword(k) => Err(Error::Config(format!("unknown pathway set `{k}`"))),
            PathwaySelection::List(specs) => Ok(specs.clone()),
        }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("sasv-run")
}

fn default_bins() -> usize {
    50
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub train: PathBuf,
    pub dev: PathBuf,
    pub eval: PathBuf,
    #[serde(default)]
    pub pathways: PathwaySelection,
    #[serde(default)]
    pub adcf: ADCFConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub fusion: FusionConfig,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    /// Also write every pathway's fused dev and eval tables.
    #[serde(default = "yes")]
    pub write_scores: bool,
}

impl RunConfig {
    pub fn new(train: PathBuf, dev: PathBuf, eval: PathBuf, out_dir: PathBuf) -> Self {
        Self {
            train,
            dev,
            eval,
            pathways: PathwaySelection::default(),
            adcf: ADCFConfig::default(),
            seed: 0,
            out_dir,
            fusion: FusionConfig::default(),
            histogram_bins: default_bins(),
            write_scores: true,
        }
    }

    /// Loads a config; relative paths are taken relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.train, &mut cfg.dev, &mut cfg.eval, &mut cfg.out_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.adcf.validate()?;
        if self.histogram_bins == 0 {
            return Err(Error::Config("histogram_bins must be positive".into()));
        }
        let specs = self.pathways.expand()?;
        if specs.is_empty() {
            return Err(Error::Config("no pathways configured".into()));
        }
        for s in &specs {
            s.validate()?;
        }
        Ok(())
    }
}
