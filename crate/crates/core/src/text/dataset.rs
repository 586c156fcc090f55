use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::taxonomy::Taxonomy;
use super::tokenize::{tokenize, RawQuery};
use crate::error::{Error, Result};

pub const PAD: usize = 0;
pub const UNK: usize = 1;
const PAD_TOKEN: &str = "<pad>";
const UNK_TOKEN: &str = "<unk>";

/// A gold slot: half-open code-point range plus entity type id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub entity_type: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExample {
    pub raw: RawQuery,
    pub category: usize,
    pub subcategory: usize,
    pub entities: Vec<EntitySpan>,
}

/// One JSONL line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub text: String,
    pub category: String,
    pub subcategory: String,
    #[serde(default)]
    pub entities: Vec<EntityRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntityRecord {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub entity_type: String,
}

impl LabeledExample {
    pub fn new(
        raw: RawQuery,
        category: usize,
        subcategory: usize,
        mut entities: Vec<EntitySpan>,
        taxonomy: &Taxonomy,
    ) -> std::result::Result<Self, String> {
        if category >= taxonomy.num_categories() {
            return Err(format!("category id {category} out of range"));
        }
        if subcategory >= taxonomy.num_subcategories() {
            return Err(format!("subcategory id {subcategory} out of range"));
        }
        if taxonomy.parent_of(subcategory) != category {
            return Err(format!(
                "subcategory {:?} does not belong to category {:?}",
                taxonomy.subcategories()[subcategory].name,
                taxonomy.categories()[category].name
            ));
        }
        let len = raw.char_len();
        entities.sort();
        for e in &entities {
            if e.start >= e.end || e.end > len {
                return Err(format!("entity span {}..{} outside text of length {len}", e.start, e.end));
            }
            if e.entity_type >= taxonomy.entity_types().len() {
                return Err(format!("entity type id {} out of range", e.entity_type));
            }
        }
        for w in entities.windows(2) {
            if w[1].start < w[0].end {
                return Err(format!(
                    "overlapping entity spans {}..{} and {}..{}",
                    w[0].start, w[0].end, w[1].start, w[1].end
                ));
            }
        }
        Ok(LabeledExample {
            raw,
            category,
            subcategory,
            entities,
        })
    }

    pub fn from_record(rec: ExampleRecord, taxonomy: &Taxonomy) -> std::result::Result<Self, String> {
        let raw = RawQuery::new(rec.text).map_err(|e| e.to_string())?;
        let category = taxonomy
            .category_id(&rec.category)
            .ok_or_else(|| format!("unknown category {:?}", rec.category))?;
        let subcategory = taxonomy
            .subcategory_id(&rec.subcategory)
            .ok_or_else(|| format!("unknown subcategory {:?}", rec.subcategory))?;
        let entities = rec
            .entities
            .into_iter()
            .map(|e| {
                let entity_type = taxonomy
                    .entity_type_id(&e.entity_type)
                    .ok_or_else(|| format!("unknown entity type {:?}", e.entity_type))?;
                Ok(EntitySpan {
                    start: e.start,
                    end: e.end,
                    entity_type,
                })
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        LabeledExample::new(raw, category, subcategory, entities, taxonomy)
    }

    pub fn to_record(&self, taxonomy: &Taxonomy) -> ExampleRecord {
        ExampleRecord {
            text: self.raw.as_str().to_string(),
            category: taxonomy.categories()[self.category].name.clone(),
            subcategory: taxonomy.subcategories()[self.subcategory].name.clone(),
            entities: self
                .entities
                .iter()
                .map(|e| EntityRecord {
                    start: e.start,
                    end: e.end,
                    entity_type: taxonomy.entity_types()[e.entity_type].clone(),
                })
                .collect(),
        }
    }
}

/// Token to index map. Index 0 is padding, 1 is the unknown token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Default for Vocab {
    fn default() -> Self {
        Vocab::from(vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()])
    }
}

impl From<Vec<String>> for Vocab {
    fn from(tokens: Vec<String>) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocab { tokens, index }
    }
}

impl From<Vocab> for Vec<String> {
    fn from(v: Vocab) -> Self {
        v.tokens
    }
}

impl Vocab {
    /// Builds a vocabulary in first-occurrence order.
    pub fn build<'a, I, S>(sequences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = &'a String>,
    {
        let mut vocab = Vocab::default();
        for seq in sequences {
            for tok in seq {
                vocab.insert(tok);
            }
        }
        vocab
    }

    pub fn insert(&mut self, token: &str) -> usize {
        if let Some(&i) = self.index.get(token) {
            return i;
        }
        let i = self.tokens.len();
        self.tokens.push(token.to_string());
        self.index.insert(token.to_string(), i);
        i
    }

    pub fn get(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn encode(&self, tokens: &[String]) -> Vec<usize> {
        tokens.iter().map(|t| self.get(t)).collect()
    }

    /// Number of entries including PAD and UNK.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= 2
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub examples: Vec<LabeledExample>,
    pub taxonomy: Arc<Taxonomy>,
    pub vocab: Vocab,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>, taxonomy: Arc<Taxonomy>) -> Self {
        Dataset {
            examples,
            taxonomy,
            vocab: Vocab::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Rebuilds `vocab` from this dataset's own tokens.
    pub fn with_own_vocab(mut self) -> Self {
        self.vocab = token_vocab(&self.examples);
        self
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        for ex in &self.examples {
            let line = serde_json::to_string(&ex.to_record(&self.taxonomy))?;
            writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    fn subset(&self, idx: &[usize], vocab: &Vocab) -> Dataset {
        Dataset {
            examples: idx.iter().map(|&i| self.examples[i].clone()).collect(),
            taxonomy: Arc::clone(&self.taxonomy),
            vocab: vocab.clone(),
        }
    }
}

fn token_vocab(examples: &[LabeledExample]) -> Vocab {
    let seqs: Vec<Vec<String>> = examples
        .iter()
        .map(|e| tokenize(&e.raw).map(|q| q.tokens).unwrap_or_default())
        .collect();
    Vocab::build(seqs.iter())
}

/// Parses JSONL examples, reporting the first malformed line.
pub fn parse_jsonl(reader: impl BufRead, taxonomy: &Taxonomy) -> Result<Vec<LabeledExample>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ExampleRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        let ex = LabeledExample::from_record(rec, taxonomy).map_err(|reason| Error::Parse {
            line: line_no,
            reason,
        })?;
        out.push(ex);
    }
    Ok(out)
}

/// Loads a JSONL dataset. The vocabulary is built from the training portion of
/// `split_dataset(_, split_seed)` only.
pub fn load_dataset(path: &Path, taxonomy: Arc<Taxonomy>, split_seed: u64) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let examples = parse_jsonl(BufReader::new(file), &taxonomy)?;
    let mut ds = Dataset::new(examples, taxonomy);
    if ds.len() >= MIN_SPLIT_SIZE {
        let assignment = split_indices(&ds, split_seed)?;
        ds.vocab = token_vocab(&ds.subset(&assignment.train, &Vocab::default()).examples);
    } else {
        ds = ds.with_own_vocab();
    }
    Ok(ds)
}

pub const MIN_SPLIT_SIZE: usize = 20;

/// Example indices of a train/validation/test partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitIndices {
    /// Caps the training part at `limit` and shrinks validation and test to
    /// keep the 70:15:15 ratio.
    pub fn limited(mut self, limit: Option<usize>) -> Self {
        if let Some(limit) = limit {
            if limit < self.train.len() {
                let held_out = (limit * 15).div_ceil(70);
                self.train.truncate(limit);
                self.validation.truncate(held_out.max(1));
                self.test.truncate(held_out.max(1));
            }
        }
        self
    }
}

#[derive(Debug, Clone)]
pub struct Split {
    pub indices: SplitIndices,
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

/// Deterministic 70:15:15 split, stratified by subcategory.
///
/// Members of each subcategory with at least two examples are shuffled and
/// spread evenly over the ordering, so every such class lands in train.
/// Singleton classes are placed uniformly at random.
pub fn split_indices(d: &Dataset, seed: u64) -> Result<SplitIndices> {
    let n = d.len();
    if n < MIN_SPLIT_SIZE {
        return Err(Error::precondition(format!(
            "need at least {MIN_SPLIT_SIZE} examples to split, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); d.taxonomy.num_subcategories()];
    for (i, ex) in d.examples.iter().enumerate() {
        by_class[ex.subcategory].push(i);
    }
    let mut keyed: Vec<(f64, u64, usize)> = Vec::with_capacity(n);
    for members in &mut by_class {
        members.shuffle(&mut rng);
        let c = members.len();
        for (rank, &i) in members.iter().enumerate() {
            let key = if c >= 2 {
                (rank as f64 + 0.5) / c as f64
            } else {
                rng.gen::<f64>()
            };
            keyed.push((key, rng.gen::<u64>(), i));
        }
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = keyed.into_iter().map(|(_, _, i)| i).collect();

    let n_train = n * 70 / 100;
    let n_val = n * 15 / 100;
    let mut train = order[..n_train].to_vec();
    let mut validation = order[n_train..n_train + n_val].to_vec();
    let mut test = order[n_train + n_val..].to_vec();
    // Within each part, a seeded shuffle removes the key ordering.
    train.shuffle(&mut rng);
    validation.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok(SplitIndices {
        train,
        validation,
        test,
    })
}

/// Splits and attaches a train-only vocabulary to all three parts.
pub fn split_dataset(d: &Dataset, seed: u64) -> Result<Split> {
    let indices = split_indices(d, seed)?;
    Ok(materialize(d, indices))
}

pub fn materialize(d: &Dataset, indices: SplitIndices) -> Split {
    let train_examples = d.subset(&indices.train, &Vocab::default());
    let vocab = token_vocab(&train_examples.examples);
    Split {
        train: d.subset(&indices.train, &vocab),
        validation: d.subset(&indices.validation, &vocab),
        test: d.subset(&indices.test, &vocab),
        indices,
    }
}
