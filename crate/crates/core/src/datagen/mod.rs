//! Seeded synthetic queries for a career-guidance domain.
//!
//! Queries are filled templates with noise on the context words. Entity
//! surfaces stay exact unless entity typos are switched on, in which case
//! some entities are misspelled or truncated while keeping their gold span.

mod lexicon;
mod noise;
mod templates;

use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use lexicon::{Lexicon, LexiconSizes};
pub use noise::{inject_noise, typo, NoiseRates, Segment, ARTICLES};
pub use templates::{CategorySpec, SubcategorySpec, CATEGORIES, ENTITY_TYPES, RULES};

use crate::error::{Error, Result};
use crate::gazetteer::Gazetteer;
use crate::pipeline::PipelineConfig;
use crate::rules::{RuleKind, RuleRecord, RuleSet};
use crate::text::{Dataset, EntitySpan, LabeledExample, RawQuery, Taxonomy, TaxonomyFile};

/// Default dataset size; the standard split turns it into 10980 / 2353 / 2354.
pub const DEFAULT_TOTAL: usize = 15687;

/// Entity typo rate used when the mode is switched on without a rate.
pub const DEFAULT_ENTITY_TYPO_RATE: f64 = 0.35;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub total: usize,
    pub noise: NoiseRates,
    /// Probability that an entity surface is misspelled or truncated; 0 keeps
    /// every entity exact.
    pub entity_typo_rate: f64,
    /// Chance that an entity is written in lower case.
    pub lowercase_rate: f64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            seed: 0,
            total: DEFAULT_TOTAL,
            noise: NoiseRates::default(),
            entity_typo_rate: 0.0,
            lowercase_rate: 0.5,
        }
    }
}

impl GenSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_entity_typos(mut self, rate: f64) -> Self {
        self.entity_typo_rate = rate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.total == 0 {
            return Err(Error::precondition("total must be positive"));
        }
        self.noise.validate()?;
        for (name, r) in [
            ("typo", self.noise.typo),
            ("article_drop", self.noise.article_drop),
            ("word_swap", self.noise.word_swap),
            ("entity_typo", self.entity_typo_rate),
            ("lowercase", self.lowercase_rate),
        ] {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::precondition(format!("{name} rate {r} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

pub struct Generated {
    pub taxonomy: Arc<Taxonomy>,
    pub gazetteer: Gazetteer,
    pub dataset: Dataset,
    pub rules: Vec<RuleRecord>,
}

pub fn taxonomy() -> Taxonomy {
    let categories: IndexMap<String, Vec<String>> = CATEGORIES
        .iter()
        .map(|c| {
            (
                c.name.to_string(),
                c.subcategories.iter().map(|s| s.name.to_string()).collect(),
            )
        })
        .collect();
    TaxonomyFile {
        categories,
        entity_types: ENTITY_TYPES.iter().map(|s| s.to_string()).collect(),
    }
    .try_into()
    .expect("built-in taxonomy is valid")
}

pub fn starter_rules() -> Vec<RuleRecord> {
    RULES
        .iter()
        .map(|&(category, subcategory, kind, pattern, priority)| RuleRecord {
            category: category.into(),
            subcategory: subcategory.into(),
            kind: if kind == "phrase" {
                RuleKind::Phrase
            } else {
                RuleKind::Keyword
            },
            pattern: pattern.into(),
            priority,
        })
        .collect()
}

enum Piece {
    Word(&'static str),
    Slot(usize),
}

fn parse_template(t: &'static str) -> Vec<Piece> {
    t.split(' ')
        .map(|w| match w.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            Some(ty) => Piece::Slot(
                ENTITY_TYPES
                    .iter()
                    .position(|e| *e == ty)
                    .unwrap_or_else(|| panic!("unknown slot {ty} in template {t:?}")),
            ),
            None => Piece::Word(w),
        })
        .collect()
}

fn is_separator(c: char) -> bool {
    c.is_whitespace() || c.is_ascii_punctuation()
}

/// Misspells one word of at least four alphanumeric characters, or keeps a
/// proper prefix of two or more words of a longer phrase.
fn perturb_entity(surface: &str, rng: &mut impl Rng) -> String {
    let words: Vec<&str> = surface.split(' ').collect();
    if words.len() >= 3 && rng.gen_bool(0.4) {
        let k = rng.gen_range(2..words.len());
        return words[..k].join(" ");
    }
    let eligible: Vec<usize> = (0..words.len())
        .filter(|&i| words[i].chars().count() >= 4 && words[i].chars().all(char::is_alphanumeric))
        .collect();
    if eligible.is_empty() {
        return surface.to_string();
    }
    let i = eligible[rng.gen_range(0..eligible.len())];
    let mut out: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    out[i] = typo(words[i], rng);
    out.join(" ")
}

/// Joins segments with single spaces; returns the text and the entity spans
/// trimmed to their first and last non-separator characters.
fn render(segments: &[Segment]) -> (String, Vec<EntitySpan>) {
    let mut text = String::new();
    let mut spans = Vec::new();
    let mut pos = 0;
    for (i, s) in segments.iter().enumerate() {
        if i > 0 {
            text.push(' ');
            pos += 1;
        }
        let chars: Vec<char> = s.text.chars().collect();
        if let Some(ty) = s.entity {
            let first = chars.iter().position(|&c| !is_separator(c));
            let last = chars.iter().rposition(|&c| !is_separator(c));
            if let (Some(a), Some(b)) = (first, last) {
                spans.push(EntitySpan {
                    start: pos + a,
                    end: pos + b + 1,
                    entity_type: ty,
                });
            }
        }
        text.push_str(&s.text);
        pos += chars.len();
    }
    (text, spans)
}

fn pick<'a>(values: &'a [String], rng: &mut impl Rng) -> &'a str {
    &values[rng.gen_range(0..values.len())]
}

pub fn generate(spec: &GenSpec) -> Result<Generated> {
    spec.validate()?;
    let taxonomy = Arc::new(taxonomy());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let lex = lexicon::build(LexiconSizes::default(), &mut rng);

    let mut gazetteer = Gazetteer::new(taxonomy.entity_types().to_vec());
    for (ty, values) in lex.values.iter().enumerate() {
        for v in values {
            gazetteer.insert(v, ty)?;
        }
    }

    // (category id, subcategory id, parsed templates), flattened in taxonomy order.
    let mut subs = Vec::new();
    let mut weights = Vec::new();
    for (ci, c) in CATEGORIES.iter().enumerate() {
        for s in c.subcategories {
            let id = taxonomy.subcategory_id(s.name).expect("subcategory in taxonomy");
            let parsed: Vec<Vec<Piece>> = s.templates.iter().map(|t| parse_template(t)).collect();
            subs.push((ci, id, parsed));
            weights.push(s.weight);
        }
    }
    let chooser = WeightedIndex::new(&weights).map_err(|e| Error::precondition(e.to_string()))?;

    let mut examples = Vec::with_capacity(spec.total);
    for _ in 0..spec.total {
        let (category, subcategory, templates) = &subs[chooser.sample(&mut rng)];
        let template = &templates[rng.gen_range(0..templates.len())];
        let mut used: Vec<(usize, &str)> = Vec::new();
        let mut segments = Vec::with_capacity(template.len());
        for piece in template {
            match piece {
                Piece::Word(w) => segments.push(Segment::word(*w)),
                Piece::Slot(ty) => {
                    let values = &lex.values[*ty];
                    let mut v = pick(values, &mut rng);
                    while values.len() > 1 && used.contains(&(*ty, v)) {
                        v = pick(values, &mut rng);
                    }
                    used.push((*ty, v));
                    let mut surface = if rng.gen::<f64>() < spec.lowercase_rate {
                        v.to_lowercase()
                    } else {
                        v.to_string()
                    };
                    if spec.entity_typo_rate > 0.0 && rng.gen::<f64>() < spec.entity_typo_rate {
                        surface = perturb_entity(&surface, &mut rng);
                    }
                    segments.push(Segment::entity(surface, *ty));
                }
            }
        }
        let noisy = inject_noise(&segments, &spec.noise, &mut rng);
        let (text, spans) = render(&noisy);
        let raw = RawQuery::new(text)?;
        let ex = LabeledExample::new(raw, *category, *subcategory, spans, &taxonomy)
            .map_err(Error::precondition)?;
        examples.push(ex);
    }

    let rules = starter_rules();
    RuleSet::from_records(&rules, &taxonomy)?;
    Ok(Generated {
        dataset: Dataset::new(examples, Arc::clone(&taxonomy)).with_own_vocab(),
        taxonomy,
        gazetteer,
        rules,
    })
}

/// Writes `dataset.jsonl`, `gazetteer.tsv`, `taxonomy.json`, `rules.json`
/// and a `config.json` that points at them.
pub fn write_outputs(g: &Generated, dir: &Path, seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, contents: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))
    };
    g.dataset.write_jsonl(&dir.join("dataset.jsonl"))?;
    write("gazetteer.tsv", g.gazetteer.to_tsv())?;
    write("taxonomy.json", g.taxonomy.to_json()? + "\n")?;
    write("rules.json", serde_json::to_string_pretty(&g.rules)? + "\n")?;
    let cfg = PipelineConfig::in_dir(Path::new("")).with_seed(seed);
    write("config.json", serde_json::to_string_pretty(&cfg)? + "\n")
}
