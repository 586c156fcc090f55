//! Tiered gazetteer tagging and entity-to-tag substitution.
//!
//! Three matchers of decreasing strictness share one phrase dictionary:
//! exact matches, fuzzy matches above a similarity threshold, and fringe
//! matches that also accept a truncated multi-word phrase.

mod distance;
mod groups;

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use distance::{char_similarity, joined_chars, osa_bounded, osa_distance, similarity};
pub use groups::{CategoryGroups, GroupSpec};

use crate::error::{Error, Result};
use crate::text::{is_tag, normalize_phrase, tag_token, TokenizedQuery};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    pub tokens: Vec<String>,
    pub entity_type: usize,
    chars: Vec<char>,
}

impl Phrase {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Per-type phrase dictionary.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entity_types: Vec<String>,
    phrases: Vec<Phrase>,
    exact: HashMap<Vec<String>, usize>,
    /// Strict multi-token prefixes used by partial matching: (phrase id, prefix length).
    prefixes: Vec<(usize, usize, Vec<char>)>,
}

impl Gazetteer {
    pub fn new(entity_types: Vec<String>) -> Self {
        Gazetteer {
            entity_types,
            phrases: Vec::new(),
            exact: HashMap::new(),
            prefixes: Vec::new(),
        }
    }

    /// Adds a phrase; duplicates of an existing (phrase, type) pair are ignored.
    pub fn insert(&mut self, phrase: &str, entity_type: usize) -> Result<()> {
        if entity_type >= self.entity_types.len() {
            return Err(Error::Index {
                index: entity_type,
                len: self.entity_types.len(),
            });
        }
        let tokens = normalize_phrase(phrase);
        if tokens.is_empty() {
            return Err(Error::precondition(format!("empty gazetteer phrase {phrase:?}")));
        }
        if self
            .phrases
            .iter()
            .any(|p| p.entity_type == entity_type && p.tokens == tokens)
        {
            return Ok(());
        }
        let id = self.phrases.len();
        self.exact.entry(tokens.clone()).or_insert(id);
        for k in 2..tokens.len() {
            self.prefixes.push((id, k, joined_chars(&tokens[..k])));
        }
        self.phrases.push(Phrase {
            chars: joined_chars(&tokens),
            tokens,
            entity_type,
        });
        Ok(())
    }

    /// Parses `phrase<TAB>entity_type` lines; `#` starts a comment line.
    pub fn parse_tsv(text: &str, entity_types: &[String]) -> Result<Self> {
        let mut g = Gazetteer::new(entity_types.to_vec());
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parse_err = |reason: String| Error::Parse { line: i + 1, reason };
            let (phrase, ty) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected phrase<TAB>entity_type".into()))?;
            let ty = ty.trim();
            let type_id = entity_types
                .iter()
                .position(|t| t == ty)
                .ok_or_else(|| parse_err(format!("unknown entity type {ty:?}")))?;
            g.insert(phrase, type_id).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(g)
    }

    pub fn load(path: &Path, entity_types: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text, entity_types)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for p in &self.phrases {
            out.push_str(&p.text());
            out.push('\t');
            out.push_str(&self.entity_types[p.entity_type]);
            out.push('\n');
        }
        out
    }

    /// SHA-256 of the canonical TSV rendering, hex encoded.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_tsv().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn entity_types(&self) -> &[String] {
        &self.entity_types
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    fn max_phrase_tokens(&self, enabled: &[bool]) -> usize {
        self.phrases
            .iter()
            .filter(|p| enabled[p.entity_type])
            .map(|p| p.tokens.len())
            .max()
            .unwrap_or(0)
    }
}

/// Strictness level of a matcher.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tier {
    pub level: u8,
    pub threshold: f64,
    pub allow_partial: bool,
}

impl Tier {
    pub fn new(level: u8, threshold: f64, allow_partial: bool) -> Result<Self> {
        if !(1..=3).contains(&level) {
            return Err(Error::Config(format!("tier level {level} not in 1..=3")));
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::Config(format!("tier threshold {threshold} not in [0, 1]")));
        }
        if level == 1 && threshold != 1.0 {
            return Err(Error::Config("tier 1 must use threshold 1.0".into()));
        }
        if allow_partial && level != 3 {
            return Err(Error::Config("partial matching is only allowed at tier 3".into()));
        }
        Ok(Tier {
            level,
            threshold,
            allow_partial,
        })
    }

    pub fn strict() -> Self {
        Tier {
            level: 1,
            threshold: 1.0,
            allow_partial: false,
        }
    }
}

/// The three matchers used by the pipeline, strictest first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TierThresholds", into = "TierThresholds")]
pub struct Tiers {
    pub strict: Tier,
    pub fuzzy: Tier,
    pub fringe: Tier,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TierThresholds {
    pub tier2: f64,
    pub tier3: f64,
}

impl TryFrom<TierThresholds> for Tiers {
    type Error = Error;

    fn try_from(t: TierThresholds) -> Result<Self> {
        Tiers::new(t.tier2, t.tier3)
    }
}

impl From<Tiers> for TierThresholds {
    fn from(t: Tiers) -> Self {
        TierThresholds {
            tier2: t.fuzzy.threshold,
            tier3: t.fringe.threshold,
        }
    }
}

impl Default for Tiers {
    fn default() -> Self {
        Tiers::new(0.85, 0.70).expect("default thresholds are ordered")
    }
}

impl Tiers {
    pub fn new(tier2: f64, tier3: f64) -> Result<Self> {
        if !(tier2 >= tier3) {
            return Err(Error::Config(format!(
                "tier thresholds must be non-increasing, got {tier2} then {tier3}"
            )));
        }
        Ok(Tiers {
            strict: Tier::strict(),
            fuzzy: Tier::new(2, tier2, false)?,
            fringe: Tier::new(3, tier3, true)?,
        })
    }
}

/// A tagged span. `token_span` is half-open over the query it was found in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityMatch {
    pub token_span: (usize, usize),
    pub entity_type: usize,
    pub matched_phrase: String,
    pub score: f64,
    pub tier: u8,
    pub partial: bool,
}

impl EntityMatch {
    pub fn len(&self) -> usize {
        self.token_span.1 - self.token_span.0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn overlaps(&self, other: &EntityMatch) -> bool {
        self.token_span.0 < other.token_span.1 && other.token_span.0 < self.token_span.1
    }
}

fn type_mask(g: &Gazetteer, enabled_types: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; g.entity_types.len()];
    for &t in enabled_types {
        if t < mask.len() {
            mask[t] = true;
        }
    }
    mask
}

/// Every window whose best phrase scores at or above the tier threshold,
/// before overlap resolution.
///
/// Windows never include tag tokens or tokens flagged in `blocked`.
pub fn candidates(
    q: &TokenizedQuery,
    g: &Gazetteer,
    tier: Tier,
    enabled_types: &[usize],
    blocked: Option<&[bool]>,
) -> Vec<EntityMatch> {
    let enabled = type_mask(g, enabled_types);
    let max_len = g.max_phrase_tokens(&enabled);
    if max_len == 0 {
        return Vec::new();
    }
    let usable: Vec<bool> = q
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| !is_tag(t) && !blocked.is_some_and(|b| b[i]))
        .collect();
    let mut out = Vec::new();
    for start in 0..q.len() {
        for end in start + 1..=(start + max_len + 1).min(q.len()) {
            if !usable[end - 1] {
                break;
            }
            let window = &q.tokens[start..end];
            if let Some((score, phrase_id, partial)) = best_phrase(window, g, tier, &enabled) {
                let p = &g.phrases[phrase_id];
                out.push(EntityMatch {
                    token_span: (start, end),
                    entity_type: p.entity_type,
                    matched_phrase: p.text(),
                    score,
                    tier: tier.level,
                    partial,
                });
            }
        }
    }
    out
}

/// Largest edit distance that can still reach `threshold` for strings whose
/// longer side has `longest` characters.
fn distance_budget(threshold: f64, longest: usize) -> usize {
    let raw = ((1.0 - threshold) * longest as f64 + 1e-9).floor();
    raw.max(0.0) as usize
}

fn best_phrase(
    window: &[String],
    g: &Gazetteer,
    tier: Tier,
    enabled: &[bool],
) -> Option<(f64, usize, bool)> {
    if tier.threshold >= 1.0 {
        return g
            .exact
            .get(window)
            .copied()
            .and_then(|id| {
                if enabled[g.phrases[id].entity_type] {
                    Some(id)
                } else {
                    g.phrases
                        .iter()
                        .position(|p| enabled[p.entity_type] && p.tokens == window)
                }
            })
            .map(|id| (1.0, id, false));
    }
    let wc = joined_chars(window);
    let mut best: Option<(f64, usize, bool)> = None;
    let mut consider = |target: &[char], id: usize, partial: bool| {
        let longest = wc.len().max(target.len());
        let budget = distance_budget(tier.threshold, longest);
        if let Some(d) = osa_bounded(&wc, target, budget) {
            let score = 1.0 - d as f64 / longest as f64;
            if score + 1e-12 < tier.threshold {
                return;
            }
            let better = match best {
                None => true,
                Some((bs, bid, bpartial)) => {
                    score > bs || (score == bs && (bpartial && !partial || (bpartial == partial && id < bid)))
                }
            };
            if better {
                best = Some((score, id, partial));
            }
        }
    };
    for (id, p) in g.phrases.iter().enumerate() {
        if enabled[p.entity_type] {
            consider(&p.chars, id, false);
        }
    }
    if tier.allow_partial {
        for (id, _, chars) in &g.prefixes {
            if enabled[g.phrases[*id].entity_type] {
                consider(chars, *id, true);
            }
        }
    }
    best
}

/// Greedy non-overlapping selection by (score desc, length desc, start asc),
/// returned in left-to-right order.
pub fn resolve_overlaps(mut cands: Vec<EntityMatch>) -> Vec<EntityMatch> {
    cands.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(b.len().cmp(&a.len()))
            .then(a.token_span.0.cmp(&b.token_span.0))
    });
    let mut chosen: Vec<EntityMatch> = Vec::new();
    for c in cands {
        if chosen.iter().all(|m| !m.overlaps(&c)) {
            chosen.push(c);
        }
    }
    chosen.sort_by_key(|m| m.token_span.0);
    chosen
}

pub fn match_entities(
    q: &TokenizedQuery,
    g: &Gazetteer,
    tier: Tier,
    enabled_types: &[usize],
) -> Vec<EntityMatch> {
    resolve_overlaps(candidates(q, g, tier, enabled_types, None))
}

/// [`match_entities`] restricted to tokens not flagged in `blocked`.
pub fn match_entities_masked(
    q: &TokenizedQuery,
    g: &Gazetteer,
    tier: Tier,
    enabled_types: &[usize],
    blocked: &[bool],
) -> Vec<EntityMatch> {
    resolve_overlaps(candidates(q, g, tier, enabled_types, Some(blocked)))
}

/// Where a tag token came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    /// Index of the tag token in the substituted query.
    pub tag_index: usize,
    /// Token span in the query before substitution.
    pub original_span: (usize, usize),
    pub char_span: (usize, usize),
    pub entity_type: usize,
}

/// Replaces each matched span with its `<type>` tag token.
pub fn substitute_tags(
    q: &TokenizedQuery,
    matches: &[EntityMatch],
    entity_types: &[String],
) -> Result<(TokenizedQuery, Vec<Substitution>)> {
    let mut sorted: Vec<&EntityMatch> = matches.iter().collect();
    sorted.sort_by_key(|m| m.token_span);
    for w in sorted.windows(2) {
        if w[1].token_span.0 < w[0].token_span.1 {
            return Err(Error::Overlap(w[0].token_span, w[1].token_span));
        }
    }
    let mut tokens = Vec::with_capacity(q.len());
    let mut offsets = Vec::with_capacity(q.len());
    let mut subs = Vec::with_capacity(sorted.len());
    let mut i = 0;
    for m in sorted {
        let (s, e) = m.token_span;
        if e > q.len() || s >= e {
            return Err(Error::Index { index: e, len: q.len() });
        }
        tokens.extend_from_slice(&q.tokens[i..s]);
        offsets.extend_from_slice(&q.offsets[i..s]);
        let char_span = q.char_span(s, e);
        subs.push(Substitution {
            tag_index: tokens.len(),
            original_span: (s, e),
            char_span,
            entity_type: m.entity_type,
        });
        tokens.push(tag_token(&entity_types[m.entity_type]));
        offsets.push(char_span);
        i = e;
    }
    tokens.extend_from_slice(&q.tokens[i..]);
    offsets.extend_from_slice(&q.offsets[i..]);
    Ok((TokenizedQuery { tokens, offsets }, subs))
}
