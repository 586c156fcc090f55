//! Tokenization, the intent taxonomy, and labeled datasets.

mod dataset;
mod taxonomy;
mod tokenize;

pub use dataset::{
    load_dataset, materialize, parse_jsonl, split_dataset, split_indices, Dataset, EntityRecord,
    EntitySpan, ExampleRecord, LabeledExample, Split, SplitIndices, Vocab, MIN_SPLIT_SIZE, PAD,
    UNK,
};
pub use taxonomy::{Category, Subcategory, Taxonomy, TaxonomyFile};
pub use tokenize::{
    is_tag, normalize_phrase, tag_token, tokenize, RawQuery, TokenizedQuery, MAX_QUERY_CHARS,
};
