use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TrainedModel;
use crate::error::{Error, Result};

/// Indicator token telling the subcategory model which category was
/// predicted.
pub fn category_token(category: usize) -> String {
    format!("<cat_{category}>")
}

/// Which category indicator each training example carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasAssignment {
    pub indicators: Vec<usize>,
    /// Examples whose indicator came from the category model's second
    /// choice.
    pub altered: Vec<bool>,
}

impl BiasAssignment {
    pub fn num_altered(&self) -> usize {
        self.altered.iter().filter(|&&a| a).count()
    }
}

/// Picks a seeded uniform subset of `floor(bias_pct · N)` examples and
/// assigns them the category model's second most probable category; every
/// other example keeps its gold category.
///
/// `queries` are the token sequences the category model sees.
pub fn inject_bias(
    category_model: &TrainedModel,
    queries: &[Vec<String>],
    gold: &[usize],
    bias_pct: f64,
    seed: u64,
) -> Result<BiasAssignment> {
    if queries.len() != gold.len() {
        return Err(Error::LengthMismatch(queries.len(), gold.len()));
    }
    if !(0.0..1.0).contains(&bias_pct) {
        return Err(Error::precondition(format!("bias_pct {bias_pct} outside [0, 1)")));
    }
    let n = queries.len();
    // The epsilon keeps e.g. 0.29 · 100 from flooring to 28.
    let count = ((bias_pct * n as f64) + 1e-9).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = rand::seq::index::sample(&mut rng, n, count).into_vec();
    chosen.sort_unstable();
    let mut indicators = gold.to_vec();
    let mut altered = vec![false; n];
    for i in chosen {
        indicators[i] = category_model.predict_tokens_topk(&queries[i], 2)?[1].0;
        altered[i] = true;
    }
    Ok(BiasAssignment { indicators, altered })
}
