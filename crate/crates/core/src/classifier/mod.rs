//! The category and subcategory intent models.

mod bias;
mod network;
mod train;

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use bias::{category_token, inject_bias, BiasAssignment};
pub use network::{DropoutMasks, ExampleLoss, Network, Trace};
pub use train::{train, EpochStats, Sample, TrainingLog};

use crate::error::{Error, Result};
use crate::tensor::{ParamStore, Tensor};
use crate::text::{TokenizedQuery, Vocab};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub embedding_dim: usize,
    pub lstm_units: usize,
    pub dropout_after_lstm: f64,
    pub dense_units: usize,
    pub dropout_after_dense: f64,
    pub output_classes: usize,
    pub max_seq_len: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub epochs: usize,
    pub patience: usize,
}

impl ModelConfig {
    fn base(lstm_units: usize, d1: f64, dense_units: usize, d2: f64, output_classes: usize) -> Self {
        ModelConfig {
            embedding_dim: 38,
            lstm_units,
            dropout_after_lstm: d1,
            dense_units,
            dropout_after_dense: d2,
            output_classes,
            max_seq_len: 30,
            batch_size: 300,
            lr: 7e-4,
            epochs: 100,
            patience: 5,
        }
    }

    pub fn category() -> Self {
        Self::base(64, 0.02, 256, 0.01, 9)
    }

    pub fn subcategory() -> Self {
        Self::base(32, 0.01, 128, 0.01, 19)
    }

    pub fn with_classes(mut self, output_classes: usize) -> Self {
        self.output_classes = output_classes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("embedding_dim", self.embedding_dim),
            ("lstm_units", self.lstm_units),
            ("dense_units", self.dense_units),
            ("max_seq_len", self.max_seq_len),
            ("batch_size", self.batch_size),
            ("epochs", self.epochs),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.output_classes < 2 {
            return Err(Error::Config("output_classes must be at least 2".into()));
        }
        for (name, r) in [
            ("dropout_after_lstm", self.dropout_after_lstm),
            ("dropout_after_dense", self.dropout_after_dense),
        ] {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::Config(format!("{name} must be in [0, 1)")));
            }
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config("lr must be positive".into()));
        }
        Ok(())
    }
}

/// Classes sorted by probability, highest first; ties go to the lower id.
pub fn top_k(probs: &[f64], k: usize) -> Result<Vec<(usize, f64)>> {
    if k == 0 || k > probs.len() {
        return Err(Error::precondition(format!("k = {k} outside 1..={}", probs.len())));
    }
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].partial_cmp(&probs[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    Ok(order.into_iter().take(k).map(|i| (i, probs[i])).collect())
}

/// A trained, immutable intent model.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub config: ModelConfig,
    pub vocab: Vocab,
    network: Network,
    params: ParamStore,
}

impl TrainedModel {
    /// Freshly initialised model.
    pub fn init(config: ModelConfig, vocab: Vocab, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamStore::new();
        let network = Network::new(&config, vocab.len(), &mut params, &mut rng)?;
        Ok(TrainedModel {
            config,
            vocab,
            network,
            params,
        })
    }

    /// Rebuilds a model from saved tensors, checking names and shapes.
    pub fn from_parts(config: ModelConfig, vocab: Vocab, names: &[String], tensors: Vec<Tensor>) -> Result<Self> {
        let mut model = Self::init(config, vocab, 0)?;
        if names != model.params.names() || tensors.len() != model.params.len() {
            return Err(Error::CorruptFile("parameter layout does not match the model config".into()));
        }
        for (slot, t) in model.params.values_mut().iter_mut().zip(tensors) {
            if slot.shape() != t.shape() {
                return Err(Error::CorruptFile(format!(
                    "parameter shape {:?} does not match expected {:?}",
                    t.shape(),
                    slot.shape()
                )));
            }
            *slot = t;
        }
        Ok(model)
    }

    pub(crate) fn from_trained(config: ModelConfig, vocab: Vocab, network: Network, params: ParamStore) -> Self {
        TrainedModel {
            config,
            vocab,
            network,
            params: params.frozen(),
        }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn params(&self) -> &ParamStore {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.num_scalars()
    }

    /// Token ids, truncated to `max_seq_len`.
    pub fn encode(&self, tokens: &[String]) -> Vec<usize> {
        let n = tokens.len().min(self.config.max_seq_len);
        self.vocab.encode(&tokens[..n])
    }

    pub fn forward_ids(&self, ids: &[usize]) -> Result<Vec<f64>> {
        self.network.probabilities(self.params.values(), ids)
    }

    pub fn forward_tokens(&self, tokens: &[String]) -> Result<Vec<f64>> {
        self.forward_ids(&self.encode(tokens))
    }

    pub fn forward(&self, q: &TokenizedQuery) -> Result<Vec<f64>> {
        self.forward_tokens(&q.tokens)
    }

    pub fn predict_topk(&self, q: &TokenizedQuery, k: usize) -> Result<Vec<(usize, f64)>> {
        top_k(&self.forward(q)?, k)
    }

    pub fn predict_tokens_topk(&self, tokens: &[String], k: usize) -> Result<Vec<(usize, f64)>> {
        top_k(&self.forward_tokens(tokens)?, k)
    }
}
