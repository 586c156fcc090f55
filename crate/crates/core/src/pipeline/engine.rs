use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::stages::{subcategory_input, Slot, Tagger};
use crate::classifier::{top_k, TrainedModel};
use crate::error::Result;
use crate::rules::RuleSet;
use crate::text::{RawQuery, Taxonomy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubcategorySource {
    Rule,
    Model,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub category: usize,
    pub category_probs: Vec<f64>,
    pub subcategory: usize,
    pub subcategory_source: SubcategorySource,
    pub slots: Vec<Slot>,
}

/// JSON shape of a [`PipelineOutput`], with names resolved.
///
/// ```json
/// {"category": "Colleges", "category_id": 0, "category_probs": [..],
///  "subcategory": "Find Colleges", "subcategory_id": 0, "subcategory_source": "model",
///  "slots": [{"start": 27, "end": 33, "type": "city", "text": "Mumbai", "tier": 1}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub category: String,
    pub category_id: usize,
    pub category_probs: Vec<f64>,
    pub subcategory: String,
    pub subcategory_id: usize,
    pub subcategory_source: SubcategorySource,
    pub slots: Vec<SlotRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub entity_type: String,
    pub text: String,
    pub tier: u8,
}

/// Everything needed to answer queries: taxonomy, NER stages, rules and the
/// two trained models.
#[derive(Debug)]
pub struct Engine {
    pub taxonomy: Arc<Taxonomy>,
    pub tagger: Tagger,
    pub rules: RuleSet,
    pub category_model: TrainedModel,
    pub subcategory_model: TrainedModel,
    pub meta: BundleMeta,
    subcategory_calls: AtomicUsize,
}

/// Training provenance carried in a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub seed: u64,
    pub bias_pct: f64,
    pub limit: Option<usize>,
}

impl Engine {
    pub fn new(
        taxonomy: Arc<Taxonomy>,
        tagger: Tagger,
        rules: RuleSet,
        category_model: TrainedModel,
        subcategory_model: TrainedModel,
        meta: BundleMeta,
    ) -> Self {
        Engine {
            taxonomy,
            tagger,
            rules,
            category_model,
            subcategory_model,
            meta,
            subcategory_calls: AtomicUsize::new(0),
        }
    }

    /// How many times the subcategory model has been run.
    pub fn subcategory_calls(&self) -> usize {
        self.subcategory_calls.load(Ordering::Relaxed)
    }

    pub fn run(&self, raw: &RawQuery) -> Result<PipelineOutput> {
        let a = self.tagger.stage_a(raw)?;
        let category_probs = self.category_model.forward_tokens(a.tokens())?;
        let category = top_k(&category_probs, 1)?[0].0;
        let c = self.tagger.stage_c(raw, &a, category)?;
        let (subcategory, subcategory_source) = match self.rules.apply(c.tokens(), category) {
            Some(sub) => (sub, SubcategorySource::Rule),
            None => {
                self.subcategory_calls.fetch_add(1, Ordering::Relaxed);
                let input = subcategory_input(&c, category);
                let probs = self.subcategory_model.forward_tokens(&input)?;
                (top_k(&probs, 1)?[0].0, SubcategorySource::Model)
            }
        };
        let f = self.tagger.stage_f(raw, &c, category)?;
        Ok(PipelineOutput {
            category,
            category_probs,
            subcategory,
            subcategory_source,
            slots: f.slots,
        })
    }

    pub fn run_text(&self, text: &str) -> Result<PipelineOutput> {
        self.run(&RawQuery::new(text)?)
    }

    pub fn to_record(&self, out: &PipelineOutput) -> OutputRecord {
        let types = self.taxonomy.entity_types();
        OutputRecord {
            category: self.taxonomy.categories()[out.category].name.clone(),
            category_id: out.category,
            category_probs: out.category_probs.clone(),
            subcategory: self.taxonomy.subcategories()[out.subcategory].name.clone(),
            subcategory_id: out.subcategory,
            subcategory_source: out.subcategory_source,
            slots: out
                .slots
                .iter()
                .map(|s| SlotRecord {
                    start: s.start,
                    end: s.end,
                    entity_type: types[s.entity_type].clone(),
                    text: s.text.clone(),
                    tier: s.tier,
                })
                .collect(),
        }
    }
}
