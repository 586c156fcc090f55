use serde::{Deserialize, Serialize};

use super::Ablation;
use crate::classifier::category_token;
use crate::error::Result;
use crate::gazetteer::{match_entities_masked, substitute_tags, CategoryGroups, Gazetteer, Tier, Tiers};
use crate::text::{tokenize, RawQuery, TokenizedQuery};

/// An entity found in the raw text. `start..end` is a code-point range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub start: usize,
    pub end: usize,
    pub entity_type: usize,
    pub text: String,
    pub tier: u8,
}

/// The query as one stage leaves it: current tokens, which of them later
/// stages may not touch, and the slots found so far.
#[derive(Debug, Clone, PartialEq)]
pub struct View {
    pub query: TokenizedQuery,
    blocked: Vec<bool>,
    pub slots: Vec<Slot>,
}

impl View {
    pub fn tokens(&self) -> &[String] {
        &self.query.tokens
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    First,
    Second,
    Third,
}

/// The three NER passes with their tiers, type restrictions and the
/// substitution switch.
#[derive(Debug, Clone)]
pub struct Tagger {
    pub gazetteer: Gazetteer,
    pub groups: CategoryGroups,
    pub tiers: Tiers,
    pub ablation: Ablation,
    all_types: Vec<usize>,
}

impl Tagger {
    pub fn new(gazetteer: Gazetteer, groups: CategoryGroups, tiers: Tiers, ablation: Ablation) -> Self {
        let all_types = (0..gazetteer.entity_types().len()).collect();
        Tagger {
            gazetteer,
            groups,
            tiers,
            ablation,
            all_types,
        }
    }

    fn tier(&self, stage: Stage) -> Tier {
        if !self.ablation.use_tiered_ner {
            return self.tiers.strict;
        }
        match stage {
            Stage::First => self.tiers.strict,
            Stage::Second => self.tiers.fuzzy,
            Stage::Third => self.tiers.fringe,
        }
    }

    fn pass(&self, raw: &RawQuery, view: &View, tier: Tier, types: &[usize]) -> Result<View> {
        let matches = match_entities_masked(&view.query, &self.gazetteer, tier, types, &view.blocked);
        let mut slots = view.slots.clone();
        for m in &matches {
            let (start, end) = view.query.char_span(m.token_span.0, m.token_span.1);
            slots.push(Slot {
                start,
                end,
                entity_type: m.entity_type,
                text: raw.slice(start, end),
                tier: m.tier,
            });
        }
        slots.sort_by_key(|s| s.start);
        if self.ablation.use_tag_substitution {
            let (query, _) = substitute_tags(&view.query, &matches, self.gazetteer.entity_types())?;
            // Tag tokens are never matched again, so nothing else is blocked.
            let blocked = vec![false; query.len()];
            Ok(View { query, blocked, slots })
        } else {
            let mut blocked = view.blocked.clone();
            for m in &matches {
                blocked[m.token_span.0..m.token_span.1].fill(true);
            }
            Ok(View {
                query: view.query.clone(),
                blocked,
                slots,
            })
        }
    }

    /// NER-1: exact matching over every entity type.
    pub fn stage_a(&self, raw: &RawQuery) -> Result<View> {
        let query = tokenize(raw)?;
        let start = View {
            blocked: vec![false; query.len()],
            query,
            slots: Vec::new(),
        };
        self.pass(raw, &start, self.tier(Stage::First), &self.all_types)
    }

    /// NER-2: the category's entity-type group.
    pub fn stage_c(&self, raw: &RawQuery, view: &View, category: usize) -> Result<View> {
        self.pass(raw, view, self.tier(Stage::Second), self.groups.types_for(category))
    }

    /// NER-3: remaining tokens, partial matches allowed.
    pub fn stage_f(&self, raw: &RawQuery, view: &View, category: usize) -> Result<View> {
        self.pass(raw, view, self.tier(Stage::Third), self.groups.types_for(category))
    }
}

/// Subcategory model input: the category indicator followed by the stage-C
/// tokens.
pub fn subcategory_input(view: &View, category: usize) -> Vec<String> {
    let mut tokens = Vec::with_capacity(view.query.len() + 1);
    tokens.push(category_token(category));
    tokens.extend_from_slice(view.tokens());
    tokens
}
