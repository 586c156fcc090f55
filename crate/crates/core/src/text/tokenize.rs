use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest accepted query, in characters.
pub const MAX_QUERY_CHARS: usize = 512;

/// A validated user query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RawQuery(String);

impl RawQuery {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::EmptyQuery);
        }
        let len = text.chars().count();
        if len > MAX_QUERY_CHARS {
            return Err(Error::QueryTooLong(len));
        }
        Ok(RawQuery(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Substring by half-open code-point range.
    pub fn slice(&self, start: usize, end: usize) -> String {
        self.0.chars().skip(start).take(end.saturating_sub(start)).collect()
    }

    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }
}

impl TryFrom<String> for RawQuery {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        RawQuery::new(value)
    }
}

impl From<RawQuery> for String {
    fn from(q: RawQuery) -> String {
        q.0
    }
}

/// Lowercased tokens aligned to the raw text by half-open code-point offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedQuery {
    pub tokens: Vec<String>,
    pub offsets: Vec<(usize, usize)>,
}

impl TokenizedQuery {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Character range covered by tokens `start..end`.
    pub fn char_span(&self, start: usize, end: usize) -> (usize, usize) {
        (self.offsets[start].0, self.offsets[end - 1].1)
    }
}

/// The reserved placeholder token for an entity type, e.g. `<city>`.
pub fn tag_token(entity_type: &str) -> String {
    format!("<{entity_type}>")
}

/// True for substituted placeholders. Raw text can never produce one because
/// `<` and `>` are separators.
pub fn is_tag(token: &str) -> bool {
    token.len() > 2 && token.starts_with('<') && token.ends_with('>')
}

fn is_separator(c: char) -> bool {
    c.is_whitespace() || c.is_ascii_punctuation()
}

/// Splits on Unicode whitespace and ASCII punctuation, lowercasing each token.
pub fn tokenize(raw: &RawQuery) -> Result<TokenizedQuery> {
    let mut tokens = Vec::new();
    let mut offsets = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut end = 0;
    for (i, c) in raw.as_str().chars().enumerate() {
        if is_separator(c) {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
                offsets.push((start, i));
            }
        } else {
            if current.is_empty() {
                start = i;
            }
            current.extend(c.to_lowercase());
        }
        end = i + 1;
    }
    if !current.is_empty() {
        tokens.push(current);
        offsets.push((start, end));
    }
    if tokens.is_empty() {
        return Err(Error::EmptyQuery);
    }
    Ok(TokenizedQuery { tokens, offsets })
}

/// Tokenizes free text (gazetteer phrases, rule patterns) without the
/// query-length constraint.
pub fn normalize_phrase(text: &str) -> Vec<String> {
    text.split(is_separator)
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}
