use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::ModelConfig;
use crate::error::{Error, Result};
use crate::gazetteer::{GroupSpec, Tiers};

/// Switches for the two ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ablation {
    /// When false, all three NER stages use the exact matcher.
    pub use_tiered_ner: bool,
    /// When false, matched entities are recorded but their tokens stay in
    /// the query.
    pub use_tag_substitution: bool,
}

impl Default for Ablation {
    fn default() -> Self {
        Ablation {
            use_tiered_ner: true,
            use_tag_substitution: true,
        }
    }
}

impl Ablation {
    pub const FINAL: Ablation = Ablation {
        use_tiered_ner: true,
        use_tag_substitution: true,
    };
    pub const SINGLE_TIER: Ablation = Ablation {
        use_tiered_ner: false,
        use_tag_substitution: true,
    };
    pub const NO_SUBSTITUTION: Ablation = Ablation {
        use_tiered_ner: true,
        use_tag_substitution: false,
    };
}

/// Engine configuration. Relative paths are resolved against the directory
/// of the config file.
///
/// ```json
/// {
///   "dataset": "dataset.jsonl",
///   "gazetteer": "gazetteer.tsv",
///   "taxonomy": "taxonomy.json",
///   "rules": "rules.json",
///   "tiers": {"tier2": 0.85, "tier3": 0.70},
///   "groups": null,
///   "bias_pct": 0.10,
///   "seed": 0,
///   "limit": null,
///   "ablation": {"use_tiered_ner": true, "use_tag_substitution": true}
/// }
/// ```
///
/// `groups: null` derives the category groups from the training split.
/// `category_model` and `subcategory_model` default to the stock
/// architectures; their `output_classes` always follow the taxonomy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub dataset: PathBuf,
    pub gazetteer: PathBuf,
    pub taxonomy: PathBuf,
    pub rules: PathBuf,
    #[serde(default)]
    pub tiers: Tiers,
    #[serde(default)]
    pub groups: Option<Vec<GroupSpec>>,
    #[serde(default = "ModelConfig::category")]
    pub category_model: ModelConfig,
    #[serde(default = "ModelConfig::subcategory")]
    pub subcategory_model: ModelConfig,
    #[serde(default = "default_bias")]
    pub bias_pct: f64,
    #[serde(default)]
    pub seed: u64,
    /// Caps the training split; validation and test shrink in proportion.
    #[serde(default)]
    pub limit: Option<usize>,
    #[serde(default)]
    pub ablation: Ablation,
}

fn default_bias() -> f64 {
    0.10
}

impl PipelineConfig {
    /// Defaults for the file names `gen-data` writes into `dir`.
    pub fn in_dir(dir: &Path) -> Self {
        PipelineConfig {
            dataset: dir.join("dataset.jsonl"),
            gazetteer: dir.join("gazetteer.tsv"),
            taxonomy: dir.join("taxonomy.json"),
            rules: dir.join("rules.json"),
            tiers: Tiers::default(),
            groups: None,
            category_model: ModelConfig::category(),
            subcategory_model: ModelConfig::subcategory(),
            bias_pct: default_bias(),
            seed: 0,
            limit: None,
            ablation: Ablation::default(),
        }
    }

    pub fn parse(json: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
        for p in [&mut cfg.dataset, &mut cfg.gazetteer, &mut cfg.taxonomy, &mut cfg.rules] {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.bias_pct) {
            return Err(Error::Config(format!("bias_pct {} outside [0, 1)", self.bias_pct)));
        }
        if self.limit == Some(0) {
            return Err(Error::Config("limit must be positive".into()));
        }
        self.category_model.validate()?;
        self.subcategory_model.validate()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ablation(mut self, ablation: Ablation) -> Self {
        self.ablation = ablation;
        self
    }
}
