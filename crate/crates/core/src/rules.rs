//! Keyword and phrase rules that pick a subcategory before the subcategory
//! model runs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::Taxonomy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    /// Any single token equals the pattern.
    Keyword,
    /// The pattern occurs as a contiguous token run.
    Phrase,
}

/// One entry of a rules file, with names instead of ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub category: String,
    pub subcategory: String,
    pub kind: RuleKind,
    pub pattern: String,
    pub priority: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub subcategory: usize,
    pub applies_to_category: usize,
    pub kind: RuleKind,
    pub pattern: Vec<String>,
    pub priority: i64,
}

/// Splits a pattern on whitespace and lowercases it. Tag tokens such as
/// `<exam>` are written as-is.
pub fn pattern_tokens(pattern: &str) -> Vec<String> {
    pattern.split_whitespace().map(str::to_lowercase).collect()
}

impl Rule {
    pub fn from_record(rec: &RuleRecord, taxonomy: &Taxonomy) -> Result<Self> {
        let category = taxonomy
            .category_id(&rec.category)
            .ok_or_else(|| Error::Config(format!("rule names unknown category {:?}", rec.category)))?;
        let subcategory = taxonomy
            .subcategory_id(&rec.subcategory)
            .ok_or_else(|| Error::Config(format!("rule names unknown subcategory {:?}", rec.subcategory)))?;
        if taxonomy.parent_of(subcategory) != category {
            return Err(Error::Config(format!(
                "subcategory {:?} is not under category {:?}",
                rec.subcategory, rec.category
            )));
        }
        let pattern = pattern_tokens(&rec.pattern);
        if pattern.is_empty() {
            return Err(Error::Config("rule pattern is empty".into()));
        }
        if rec.kind == RuleKind::Keyword && pattern.len() != 1 {
            return Err(Error::Config(format!(
                "keyword rule pattern {:?} must be a single token",
                rec.pattern
            )));
        }
        Ok(Rule {
            subcategory,
            applies_to_category: category,
            kind: rec.kind,
            pattern,
            priority: rec.priority,
        })
    }

    pub fn to_record(&self, taxonomy: &Taxonomy) -> RuleRecord {
        RuleRecord {
            category: taxonomy.categories()[self.applies_to_category].name.clone(),
            subcategory: taxonomy.subcategories()[self.subcategory].name.clone(),
            kind: self.kind,
            pattern: self.pattern.join(" "),
            priority: self.priority,
        }
    }

    pub fn fires(&self, tokens: &[String]) -> bool {
        match self.kind {
            RuleKind::Keyword => tokens.contains(&self.pattern[0]),
            RuleKind::Phrase => tokens.windows(self.pattern.len()).any(|w| w == self.pattern.as_slice()),
        }
    }
}

/// Validated rule list, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn from_records(records: &[RuleRecord], taxonomy: &Taxonomy) -> Result<Self> {
        let rules = records
            .iter()
            .enumerate()
            .map(|(i, r)| Rule::from_record(r, taxonomy).map_err(|e| Error::Config(format!("rule {i}: {e}"))))
            .collect::<Result<_>>()?;
        Ok(RuleSet { rules })
    }

    pub fn parse(json: &str, taxonomy: &Taxonomy) -> Result<Self> {
        let records: Vec<RuleRecord> = serde_json::from_str(json)?;
        Self::from_records(&records, taxonomy)
    }

    pub fn load(path: &Path, taxonomy: &Taxonomy) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, taxonomy)
    }

    pub fn to_records(&self, taxonomy: &Taxonomy) -> Vec<RuleRecord> {
        self.rules.iter().map(|r| r.to_record(taxonomy)).collect()
    }

    pub fn apply(&self, tokens: &[String], category: usize) -> Option<usize> {
        apply_rules(tokens, category, &self.rules)
    }
}

/// Subcategory of the highest-priority rule for `category` whose pattern
/// occurs in `tokens`; ties go to the earlier rule.
pub fn apply_rules(tokens: &[String], category: usize, rules: &[Rule]) -> Option<usize> {
    let mut best: Option<&Rule> = None;
    for rule in rules {
        if rule.applies_to_category == category
            && rule.fires(tokens)
            && best.map_or(true, |b| rule.priority > b.priority)
        {
            best = Some(rule);
        }
    }
    best.map(|r| r.subcategory)
}
