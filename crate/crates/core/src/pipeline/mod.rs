//! The staged flow: NER-1 and substitution, category model, NER-2 within
//! the category's entity group, rules, subcategory model, NER-3.

mod bundle;
mod config;
mod engine;
mod stages;
mod train;

pub use bundle::{from_bytes, load_bundle, save_bundle, to_bytes, FORMAT_VERSION, MAGIC};
pub use config::{Ablation, PipelineConfig};
pub use engine::{BundleMeta, Engine, OutputRecord, PipelineOutput, SlotRecord, SubcategorySource};
pub use stages::{subcategory_input, Slot, Tagger, View};
pub use train::{
    derive_seed, prepare, train_category_stage, train_pipeline, train_subcategory_stage, CategoryStage, Prepared,
    SubcategoryStage, TrainedPipeline,
};
