//! Dense f64 arrays, the layers the intent classifiers are built from, and
//! their hand-written backward passes.
//!
//! Every layer exposes `forward`, returning its output plus a cache, and
//! `backward`, which accumulates parameter gradients into a gradient slice
//! aligned with the [`ParamStore`] and returns the gradient of its input.

mod gradcheck;
mod kernels;
mod layers;
mod optim;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use gradcheck::{gradient_check, relative_error, Differentiable, GradCheckReport, FD_STEP};
pub use kernels::{axpy, dot};
pub use layers::{
    cross_entropy_loss, selu, selu_grad, softmax, softmax_cross_entropy, Activation, Attention,
    AttentionCache, BiLstm, BiLstmCache, Dense, DenseCache, Dropout, Embedding, LstmCache,
    LstmDirection, SELU_ALPHA, SELU_LAMBDA,
};
pub use optim::Nadam;

use crate::error::{Error, Result};

/// Row-major dense array.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::precondition(format!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn uniform(shape: &[usize], bound: f64, rng: &mut impl Rng) -> Self {
        let n = shape.iter().product();
        let data = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
        Tensor {
            shape: shape.to_vec(),
            data,
        }
    }

    /// Glorot-uniform for a `[fan_in, fan_out]` matrix.
    pub fn glorot(fan_in: usize, fan_out: usize, rng: &mut impl Rng) -> Self {
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        Tensor::uniform(&[fan_in, fan_out], bound, rng)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.shape.first().copied().unwrap_or(0)
    }

    /// Width of a 2-D tensor (or length of a 1-D one).
    pub fn cols(&self) -> usize {
        match self.shape.len() {
            0 => 0,
            1 => self.shape[0],
            _ => self.shape[1..].iter().product(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols();
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Handle into a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamId(pub usize);

/// Named trainable tensors with their gradients and Nadam moments.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    names: Vec<String>,
    values: Vec<Tensor>,
    grads: Vec<Tensor>,
    first_moment: Vec<Tensor>,
    second_moment: Vec<Tensor>,
    steps: Vec<u64>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor) -> ParamId {
        let id = ParamId(self.values.len());
        let zeros = Tensor::zeros(value.shape());
        self.names.push(name.into());
        self.grads.push(zeros.clone());
        self.first_moment.push(zeros.clone());
        self.second_moment.push(zeros);
        self.values.push(value);
        self.steps.push(0);
        id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name).map(ParamId)
    }

    pub fn value(&self, id: ParamId) -> &Tensor {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.values[id.0]
    }

    pub fn grad(&self, id: ParamId) -> &Tensor {
        &self.grads[id.0]
    }

    pub fn values(&self) -> &[Tensor] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Tensor] {
        &mut self.values
    }

    pub fn grads(&self) -> &[Tensor] {
        &self.grads
    }

    pub fn grads_mut(&mut self) -> &mut [Tensor] {
        &mut self.grads
    }

    /// Values for reading alongside gradients for accumulation.
    pub fn split_mut(&mut self) -> (&[Tensor], &mut [Tensor]) {
        (&self.values, &mut self.grads)
    }

    pub fn zero_grads(&mut self) {
        self.grads.iter_mut().for_each(|g| g.fill(0.0));
    }

    /// Fresh zeroed gradient buffers shaped like the parameters.
    pub fn zeros_like(&self) -> Vec<Tensor> {
        self.values.iter().map(|v| Tensor::zeros(v.shape())).collect()
    }

    /// Number of scalar parameters.
    pub fn num_scalars(&self) -> usize {
        self.values.iter().map(Tensor::len).sum()
    }

    pub fn step_count(&self, id: ParamId) -> u64 {
        self.steps[id.0]
    }

    /// A copy without gradient or optimizer state.
    pub fn frozen(&self) -> ParamStore {
        let mut out = ParamStore::new();
        for (n, v) in self.names.iter().zip(&self.values) {
            out.add(n.clone(), v.clone());
        }
        out
    }

    pub(crate) fn optimizer_state_mut(
        &mut self,
    ) -> impl Iterator<Item = (&mut Tensor, &Tensor, &mut Tensor, &mut Tensor, &mut u64)> {
        self.values
            .iter_mut()
            .zip(&self.grads)
            .zip(&mut self.first_moment)
            .zip(&mut self.second_moment)
            .zip(&mut self.steps)
            .map(|((((v, g), m), s), t)| (v, g, m, s, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_checked() {
        assert!(Tensor::from_vec(&[2, 3], vec![0.0; 5]).is_err());
        let t = Tensor::from_vec(&[2, 3], (0..6).map(f64::from).collect()).unwrap();
        assert_eq!(t.row(1), [3.0, 4.0, 5.0]);
        assert_eq!(t.cols(), 3);
    }

    #[test]
    fn store_shapes_stay_aligned() {
        let mut s = ParamStore::new();
        let a = s.add("a", Tensor::zeros(&[3, 2]));
        let b = s.add("b", Tensor::zeros(&[4]));
        assert_eq!(s.grad(a).shape(), [3, 2]);
        assert_eq!(s.grad(b).shape(), [4]);
        assert_eq!(s.num_scalars(), 10);
        assert_eq!(s.id("b"), Some(b));
    }
}
