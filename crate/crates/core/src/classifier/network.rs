use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ModelConfig;
use crate::error::{Error, Result};
use crate::tensor::{
    softmax, softmax_cross_entropy, Activation, Attention, AttentionCache, BiLstm, BiLstmCache, Dense, DenseCache,
    Differentiable, Dropout, Embedding, LstmDirection, ParamStore, Tensor,
};
use crate::text::PAD;

/// Layer layout of an intent model. Holds parameter handles only; the
/// values live in a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub embedding: Embedding,
    pub lstm: BiLstm,
    pub attention: Attention,
    pub hidden: Dense,
    pub output: Dense,
    pub dropout_lstm: Dropout,
    pub dropout_dense: Dropout,
}

/// Dropout masks for one example (`0` or `1/keep`).
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks {
    pub after_lstm: Option<Vec<f64>>,
    pub after_dense: Option<Vec<f64>>,
}

impl DropoutMasks {
    pub fn sample(net: &Network, rng: &mut impl Rng) -> Self {
        let draw = |d: &Dropout, n: usize, rng: &mut _| d.forward(&vec![1.0; n], rng, true).1;
        DropoutMasks {
            after_lstm: draw(&net.dropout_lstm, net.context_dim(), rng),
            after_dense: draw(&net.dropout_dense, net.hidden.output_dim, rng),
        }
    }
}

/// Everything the backward pass needs from one forward pass.
#[derive(Debug, Clone)]
pub struct Trace {
    ids: Vec<usize>,
    x: Tensor,
    lstm: BiLstmCache,
    h: Tensor,
    attention: AttentionCache,
    masks: Option<DropoutMasks>,
    hidden: DenseCache,
    output: DenseCache,
    pub logits: Vec<f64>,
}

fn apply_mask(x: &mut [f64], mask: Option<&Vec<f64>>) {
    if let Some(m) = mask {
        x.iter_mut().zip(m).for_each(|(v, k)| *v *= k);
    }
}

impl Network {
    /// Registers every parameter in `store`. Parameter order, and therefore
    /// the layout of a saved model, is fixed by this function.
    pub fn new(config: &ModelConfig, vocab_size: usize, store: &mut ParamStore, rng: &mut impl Rng) -> Result<Self> {
        config.validate()?;
        let u = config.lstm_units;
        let embedding = Embedding::new(store, "embedding", vocab_size, config.embedding_dim, rng);
        let lstm = BiLstm::new(store, "lstm", config.embedding_dim, u, rng);
        let attention = Attention::new(store, "attention", 2 * u, 2 * u, rng);
        let hidden = Dense::new(store, "dense", 2 * u, config.dense_units, Activation::Selu, rng);
        // Softmax is applied outside the layer so the loss works on logits.
        let output = Dense::new(store, "output", config.dense_units, config.output_classes, Activation::None, rng);
        Ok(Network {
            embedding,
            lstm,
            attention,
            hidden,
            output,
            dropout_lstm: Dropout::new(config.dropout_after_lstm)?,
            dropout_dense: Dropout::new(config.dropout_after_dense)?,
        })
    }

    /// Exact number of scalar parameters for a configuration.
    pub fn num_params(config: &ModelConfig, vocab_size: usize) -> usize {
        let (d, u) = (config.embedding_dim, config.lstm_units);
        vocab_size * d
            + 2 * LstmDirection::num_params(d, u)
            + Attention::num_params(2 * u, 2 * u)
            + Dense::num_params(2 * u, config.dense_units)
            + Dense::num_params(config.dense_units, config.output_classes)
    }

    pub fn context_dim(&self) -> usize {
        2 * self.lstm.units()
    }

    pub fn output_classes(&self) -> usize {
        self.output.output_dim
    }

    /// Forward pass. `masks` enables dropout with the given masks; `None` is
    /// inference.
    pub fn forward(&self, values: &[Tensor], ids: &[usize], masks: Option<DropoutMasks>) -> Result<Trace> {
        if ids.is_empty() || ids.iter().all(|&i| i == PAD) {
            return Err(Error::precondition("input has no non-padding tokens"));
        }
        let x = self.embedding.forward(values, ids)?;
        let (h, lstm) = self.lstm.forward(values, &x)?;
        let pad: Vec<bool> = ids.iter().map(|&i| i == PAD).collect();
        let mask = pad.contains(&true).then_some(pad.as_slice());
        let (mut ctx, attention) = self.attention.forward(values, &h, mask)?;
        apply_mask(&mut ctx, masks.as_ref().and_then(|m| m.after_lstm.as_ref()));
        let (mut z, hidden) = self.hidden.forward(values, &ctx);
        apply_mask(&mut z, masks.as_ref().and_then(|m| m.after_dense.as_ref()));
        let (logits, output) = self.output.forward(values, &z);
        Ok(Trace {
            ids: ids.to_vec(),
            x,
            lstm,
            h,
            attention,
            masks,
            hidden,
            output,
            logits,
        })
    }

    pub fn probabilities(&self, values: &[Tensor], ids: &[usize]) -> Result<Vec<f64>> {
        Ok(softmax(&self.forward(values, ids, None)?.logits))
    }

    /// Accumulates parameter gradients given `dL/dlogits`.
    pub fn backward(&self, values: &[Tensor], grads: &mut [Tensor], trace: &Trace, dlogits: &[f64]) {
        let mut dz = self.output.backward(values, grads, &trace.output, dlogits);
        apply_mask(&mut dz, trace.masks.as_ref().and_then(|m| m.after_dense.as_ref()));
        let mut dctx = self.hidden.backward(values, grads, &trace.hidden, &dz);
        apply_mask(&mut dctx, trace.masks.as_ref().and_then(|m| m.after_lstm.as_ref()));
        let dh = self.attention.backward(values, grads, &trace.h, &trace.attention, &dctx);
        let dx = self.lstm.backward(values, grads, &trace.x, &trace.lstm, &dh);
        self.embedding.backward(grads, &trace.ids, &dx);
    }

    /// Cross-entropy for one example; accumulates gradients when asked.
    pub fn loss(
        &self,
        values: &[Tensor],
        grads: Option<&mut [Tensor]>,
        ids: &[usize],
        label: usize,
        masks: Option<DropoutMasks>,
    ) -> Result<(f64, Vec<f64>)> {
        let trace = self.forward(values, ids, masks)?;
        let (loss, probs, dlogits) = softmax_cross_entropy(&trace.logits, label);
        if let Some(g) = grads {
            self.backward(values, g, &trace, &dlogits);
        }
        Ok((loss, probs))
    }

    /// The single-example loss as a function of the parameters, for
    /// gradient checking.
    pub fn example_loss<'a>(&'a self, ids: &'a [usize], label: usize, masks: Option<DropoutMasks>) -> ExampleLoss<'a> {
        ExampleLoss {
            net: self,
            ids,
            label,
            masks,
        }
    }
}

pub struct ExampleLoss<'a> {
    net: &'a Network,
    ids: &'a [usize],
    label: usize,
    masks: Option<DropoutMasks>,
}

impl Differentiable for ExampleLoss<'_> {
    fn evaluate(&self, params: &[Tensor], grads: Option<&mut [Tensor]>) -> f64 {
        self.net
            .loss(params, grads, self.ids, self.label, self.masks.clone())
            .map(|(l, _)| l)
            .unwrap_or(f64::NAN)
    }
}
