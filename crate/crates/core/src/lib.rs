//! Staged intent classification and slot tagging for closed-domain queries.
//!
//! A query flows through alternating entity taggers and classifiers:
//! strict gazetteer tagging, category prediction, category-scoped fuzzy
//! tagging, keyword rules or a subcategory model, and a final relaxed
//! tagging pass. See [`pipeline::Engine::run`].

pub mod classifier;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod gazetteer;
pub mod pipeline;
pub mod rules;
pub mod tensor;
pub mod text;

pub use error::{Error, Result};
