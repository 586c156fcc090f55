use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ARTICLES: [&str; 3] = ["a", "an", "the"];

/// Per-token probabilities of the three context perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseRates {
    pub typo: f64,
    pub article_drop: f64,
    pub word_swap: f64,
}

impl NoiseRates {
    pub const NONE: NoiseRates = NoiseRates {
        typo: 0.0,
        article_drop: 0.0,
        word_swap: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("typo", self.typo),
            ("article_drop", self.article_drop),
            ("word_swap", self.word_swap),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::precondition(format!("{name} rate {r} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

impl Default for NoiseRates {
    fn default() -> Self {
        NoiseRates {
            typo: 0.03,
            article_drop: 0.15,
            word_swap: 0.03,
        }
    }
}

/// A word of a generated query. Entity segments may hold several words and
/// are never touched by [`inject_noise`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub text: String,
    pub entity: Option<usize>,
}

impl Segment {
    pub fn word(text: impl Into<String>) -> Self {
        Segment {
            text: text.into(),
            entity: None,
        }
    }

    pub fn entity(text: impl Into<String>, entity_type: usize) -> Self {
        Segment {
            text: text.into(),
            entity: Some(entity_type),
        }
    }

    pub fn is_entity(&self) -> bool {
        self.entity.is_some()
    }
}

/// One edit: swaps two differing adjacent characters, or deletes one
/// character when no such pair exists or the coin says so. Words shorter
/// than two characters are returned unchanged.
pub fn typo(word: &str, rng: &mut impl Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    if chars.len() < 2 {
        return word.to_string();
    }
    let swappable: Vec<usize> = (0..chars.len() - 1).filter(|&i| chars[i] != chars[i + 1]).collect();
    if !swappable.is_empty() && rng.gen_bool(0.5) {
        let i = swappable[rng.gen_range(0..swappable.len())];
        chars.swap(i, i + 1);
    } else {
        chars.remove(rng.gen_range(0..chars.len()));
    }
    chars.into_iter().collect()
}

fn is_article(w: &str) -> bool {
    ARTICLES.iter().any(|a| a.eq_ignore_ascii_case(w))
}

/// Drops articles, misspells words and swaps adjacent words, all
/// independently per context token. Entity segments pass through unchanged
/// and never move past a neighbour.
pub fn inject_noise(tokens: &[Segment], rates: &NoiseRates, rng: &mut impl Rng) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::with_capacity(tokens.len());
    for s in tokens {
        if s.is_entity() {
            out.push(s.clone());
            continue;
        }
        if is_article(&s.text) && rng.gen::<f64>() < rates.article_drop {
            continue;
        }
        if rng.gen::<f64>() < rates.typo {
            out.push(Segment::word(typo(&s.text, rng)));
        } else {
            out.push(s.clone());
        }
    }
    if out.len() > 1 {
        let mut i = 0;
        while i + 1 < out.len() {
            if !out[i].is_entity() && !out[i + 1].is_entity() && rng.gen::<f64>() < rates.word_swap {
                out.swap(i, i + 1);
                i += 2;
            } else {
                i += 1;
            }
        }
    }
    // Every word dropped: keep the input so queries never become empty.
    if out.is_empty() {
        return tokens.to_vec();
    }
    out
}
