use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernels::{axpy, dot, mat_vec_acc, outer_acc, vec_mat_acc};
use super::{ParamId, ParamStore, Tensor};
use crate::error::{Error, Result};

pub const SELU_LAMBDA: f64 = 1.050_700_987_355_480_5;
pub const SELU_ALPHA: f64 = 1.673_263_242_354_377_3;

#[inline]
pub fn selu(x: f64) -> f64 {
    if x > 0.0 {
        SELU_LAMBDA * x
    } else {
        SELU_LAMBDA * SELU_ALPHA * x.exp_m1()
    }
}

#[inline]
pub fn selu_grad(x: f64) -> f64 {
    if x > 0.0 {
        SELU_LAMBDA
    } else {
        SELU_LAMBDA * SELU_ALPHA * x.exp()
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable softmax.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= sum);
    out
}

/// `-ln probs[label]` and its gradient with respect to the logits that
/// produced `probs` through a softmax (`probs - onehot(label)`).
pub fn cross_entropy_loss(probs: &[f64], label: usize) -> (f64, Vec<f64>) {
    let loss = -probs[label].ln();
    let mut grad = probs.to_vec();
    grad[label] -= 1.0;
    (loss, grad)
}

/// Softmax followed by cross-entropy, computed from logits via log-sum-exp.
/// Returns `(loss, probs, dlogits)`.
pub fn softmax_cross_entropy(logits: &[f64], label: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
    let probs = softmax(logits);
    let mut grad = probs.clone();
    grad[label] -= 1.0;
    (lse - logits[label], probs, grad)
}

/// Row lookup into a `[vocab, dim]` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub table: ParamId,
    pub vocab_size: usize,
    pub dim: usize,
}

impl Embedding {
    /// Uniform(-0.05, 0.05) initialization.
    pub fn new(store: &mut ParamStore, name: &str, vocab_size: usize, dim: usize, rng: &mut impl Rng) -> Self {
        let table = store.add(name, Tensor::uniform(&[vocab_size, dim], 0.05, rng));
        Embedding {
            table,
            vocab_size,
            dim,
        }
    }

    pub fn forward(&self, values: &[Tensor], ids: &[usize]) -> Result<Tensor> {
        let table = &values[self.table.0];
        let mut out = Tensor::zeros(&[ids.len(), self.dim]);
        for (t, &id) in ids.iter().enumerate() {
            if id >= self.vocab_size {
                return Err(Error::Index {
                    index: id,
                    len: self.vocab_size,
                });
            }
            out.row_mut(t).copy_from_slice(table.row(id));
        }
        Ok(out)
    }

    /// Scatters output gradients back into the table rows.
    pub fn backward(&self, grads: &mut [Tensor], ids: &[usize], dout: &Tensor) {
        let g = &mut grads[self.table.0];
        for (t, &id) in ids.iter().enumerate() {
            axpy(1.0, dout.row(t), g.row_mut(id));
        }
    }
}

/// One direction of an LSTM whose cell output goes through SELU instead of
/// tanh: `h = o * selu(c)`. Gates are sigmoid, the candidate is tanh.
///
/// Weights are stored input-major: `wx` is `[input, 4·units]`, `wh` is
/// `[units, 4·units]`, gate blocks ordered input, forget, candidate, output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LstmDirection {
    pub wx: ParamId,
    pub wh: ParamId,
    pub b: ParamId,
    pub input_dim: usize,
    pub units: usize,
    pub reverse: bool,
}

#[derive(Debug, Clone)]
struct LstmStep {
    t: usize,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    /// Post-activation gates, `[i | f | g | o]`.
    gates: Vec<f64>,
    /// `selu(c)`
    act: Vec<f64>,
    /// `selu'(c)`
    act_grad: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LstmCache {
    steps: Vec<LstmStep>,
}

impl LstmDirection {
    /// Glorot-uniform weights, zero biases, forget-gate bias 1.
    pub fn new(
        store: &mut ParamStore,
        prefix: &str,
        input_dim: usize,
        units: usize,
        reverse: bool,
        rng: &mut impl Rng,
    ) -> Self {
        let wx = store.add(format!("{prefix}.wx"), Tensor::glorot(input_dim, 4 * units, rng));
        let wh = store.add(format!("{prefix}.wh"), Tensor::glorot(units, 4 * units, rng));
        let mut bias = Tensor::zeros(&[4 * units]);
        bias.data_mut()[units..2 * units].fill(1.0);
        let b = store.add(format!("{prefix}.b"), bias);
        LstmDirection {
            wx,
            wh,
            b,
            input_dim,
            units,
            reverse,
        }
    }

    fn time_order(&self, len: usize) -> Vec<usize> {
        if self.reverse {
            (0..len).rev().collect()
        } else {
            (0..len).collect()
        }
    }

    /// Hidden states `[T, units]` in input time order.
    pub fn forward(&self, values: &[Tensor], x: &Tensor) -> (Tensor, LstmCache) {
        let h_units = self.units;
        let (wx, wh, b) = (&values[self.wx.0], &values[self.wh.0], &values[self.b.0]);
        let len = x.rows();
        let mut out = Tensor::zeros(&[len, h_units]);
        let mut h = vec![0.0; h_units];
        let mut c = vec![0.0; h_units];
        let mut steps = Vec::with_capacity(len);
        for t in self.time_order(len) {
            let mut z = b.data().to_vec();
            vec_mat_acc(x.row(t), wx.data(), &mut z);
            vec_mat_acc(&h, wh.data(), &mut z);
            let mut gates = z;
            for (k, g) in gates.iter_mut().enumerate() {
                *g = if (2 * h_units..3 * h_units).contains(&k) {
                    g.tanh()
                } else {
                    sigmoid(*g)
                };
            }
            let mut c_new = vec![0.0; h_units];
            let mut act = vec![0.0; h_units];
            let mut act_grad = vec![0.0; h_units];
            let mut h_new = vec![0.0; h_units];
            for j in 0..h_units {
                let (i_g, f_g, g_g, o_g) = (
                    gates[j],
                    gates[h_units + j],
                    gates[2 * h_units + j],
                    gates[3 * h_units + j],
                );
                c_new[j] = f_g * c[j] + i_g * g_g;
                act[j] = selu(c_new[j]);
                act_grad[j] = selu_grad(c_new[j]);
                h_new[j] = o_g * act[j];
            }
            out.row_mut(t).copy_from_slice(&h_new);
            steps.push(LstmStep {
                t,
                h_prev: std::mem::replace(&mut h, h_new),
                c_prev: std::mem::replace(&mut c, c_new),
                gates,
                act,
                act_grad,
            });
        }
        (out, LstmCache { steps })
    }

    /// Backpropagation through time. `dh` is `[T, units]` in input time order.
    pub fn backward(
        &self,
        values: &[Tensor],
        grads: &mut [Tensor],
        x: &Tensor,
        cache: &LstmCache,
        dh: &Tensor,
    ) -> Tensor {
        let h_units = self.units;
        let (wx, wh) = (&values[self.wx.0], &values[self.wh.0]);
        let mut dx = Tensor::zeros(&[x.rows(), self.input_dim]);
        let mut dh_next = vec![0.0; h_units];
        let mut dc_next = vec![0.0; h_units];
        let mut dz = vec![0.0; 4 * h_units];
        let mut dwx = std::mem::take(&mut grads[self.wx.0]);
        let mut dwh = std::mem::take(&mut grads[self.wh.0]);
        let mut db = std::mem::take(&mut grads[self.b.0]);
        for step in cache.steps.iter().rev() {
            let g = &step.gates;
            let dh_row = dh.row(step.t);
            for j in 0..h_units {
                let (i_g, f_g, g_g, o_g) = (g[j], g[h_units + j], g[2 * h_units + j], g[3 * h_units + j]);
                let dht = dh_row[j] + dh_next[j];
                let d_o = dht * step.act[j];
                let dc = dc_next[j] + dht * o_g * step.act_grad[j];
                let d_i = dc * g_g;
                let d_g = dc * i_g;
                let d_f = dc * step.c_prev[j];
                dc_next[j] = dc * f_g;
                dz[j] = d_i * i_g * (1.0 - i_g);
                dz[h_units + j] = d_f * f_g * (1.0 - f_g);
                dz[2 * h_units + j] = d_g * (1.0 - g_g * g_g);
                dz[3 * h_units + j] = d_o * o_g * (1.0 - o_g);
            }
            axpy(1.0, &dz, db.data_mut());
            outer_acc(x.row(step.t), &dz, dwx.data_mut());
            outer_acc(&step.h_prev, &dz, dwh.data_mut());
            mat_vec_acc(wx.data(), &dz, dx.row_mut(step.t));
            dh_next.fill(0.0);
            mat_vec_acc(wh.data(), &dz, &mut dh_next);
        }
        grads[self.wx.0] = dwx;
        grads[self.wh.0] = dwh;
        grads[self.b.0] = db;
        dx
    }

    pub fn num_params(input_dim: usize, units: usize) -> usize {
        4 * units * (input_dim + units + 1)
    }
}

/// Forward and backward LSTMs, outputs concatenated per timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiLstm {
    pub forward: LstmDirection,
    pub backward: LstmDirection,
}

#[derive(Debug, Clone)]
pub struct BiLstmCache {
    fwd: LstmCache,
    bwd: LstmCache,
}

impl BiLstm {
    pub fn new(store: &mut ParamStore, prefix: &str, input_dim: usize, units: usize, rng: &mut impl Rng) -> Self {
        BiLstm {
            forward: LstmDirection::new(store, &format!("{prefix}.fwd"), input_dim, units, false, rng),
            backward: LstmDirection::new(store, &format!("{prefix}.bwd"), input_dim, units, true, rng),
        }
    }

    pub fn units(&self) -> usize {
        self.forward.units
    }

    /// `[T, 2·units]`: forward half first.
    pub fn forward(&self, values: &[Tensor], x: &Tensor) -> Result<(Tensor, BiLstmCache)> {
        if x.rows() == 0 {
            return Err(Error::precondition("bidirectional LSTM needs at least one timestep"));
        }
        let u = self.units();
        let (hf, fwd) = self.forward.forward(values, x);
        let (hb, bwd) = self.backward.forward(values, x);
        let mut out = Tensor::zeros(&[x.rows(), 2 * u]);
        for t in 0..x.rows() {
            let row = out.row_mut(t);
            row[..u].copy_from_slice(hf.row(t));
            row[u..].copy_from_slice(hb.row(t));
        }
        Ok((out, BiLstmCache { fwd, bwd }))
    }

    pub fn backward(
        &self,
        values: &[Tensor],
        grads: &mut [Tensor],
        x: &Tensor,
        cache: &BiLstmCache,
        dout: &Tensor,
    ) -> Tensor {
        let u = self.units();
        let len = x.rows();
        let mut dhf = Tensor::zeros(&[len, u]);
        let mut dhb = Tensor::zeros(&[len, u]);
        for t in 0..len {
            dhf.row_mut(t).copy_from_slice(&dout.row(t)[..u]);
            dhb.row_mut(t).copy_from_slice(&dout.row(t)[u..]);
        }
        let mut dx = self.forward.backward(values, grads, x, &cache.fwd, &dhf);
        let dxb = self.backward.backward(values, grads, x, &cache.bwd, &dhb);
        axpy(1.0, dxb.data(), dx.data_mut());
        dx
    }
}

/// Additive attention pooling: `score_t = v · tanh(W h_t + b)`,
/// `context = Σ softmax(score)_t h_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attention {
    /// `[hidden, attn_dim]`
    pub w: ParamId,
    pub b: ParamId,
    pub v: ParamId,
    pub hidden: usize,
    pub attn_dim: usize,
}

#[derive(Debug, Clone)]
pub struct AttentionCache {
    /// `tanh(W h_t + b)`, `[T, attn_dim]`
    u: Tensor,
    pub weights: Vec<f64>,
}

impl Attention {
    pub fn new(store: &mut ParamStore, prefix: &str, hidden: usize, attn_dim: usize, rng: &mut impl Rng) -> Self {
        let w = store.add(format!("{prefix}.w"), Tensor::glorot(hidden, attn_dim, rng));
        let b = store.add(format!("{prefix}.b"), Tensor::zeros(&[attn_dim]));
        let bound = (6.0 / (attn_dim + 1) as f64).sqrt();
        let v = store.add(format!("{prefix}.v"), Tensor::uniform(&[attn_dim], bound, rng));
        Attention {
            w,
            b,
            v,
            hidden,
            attn_dim,
        }
    }

    /// `mask[t] == true` marks padding, which gets zero weight.
    pub fn forward(&self, values: &[Tensor], h: &Tensor, mask: Option<&[bool]>) -> Result<(Vec<f64>, AttentionCache)> {
        let len = h.rows();
        let is_pad = |t: usize| mask.is_some_and(|m| m[t]);
        if len == 0 || (0..len).all(is_pad) {
            return Err(Error::precondition("attention needs at least one unmasked timestep"));
        }
        let (w, b, v) = (&values[self.w.0], &values[self.b.0], &values[self.v.0]);
        let mut u = Tensor::zeros(&[len, self.attn_dim]);
        let mut scores = vec![f64::NEG_INFINITY; len];
        for t in 0..len {
            let row = u.row_mut(t);
            row.copy_from_slice(b.data());
            vec_mat_acc(h.row(t), w.data(), row);
            row.iter_mut().for_each(|x| *x = x.tanh());
            if !is_pad(t) {
                scores[t] = dot(row, v.data());
            }
        }
        let weights = softmax(&scores);
        let mut ctx = vec![0.0; self.hidden];
        for (t, &a) in weights.iter().enumerate() {
            if a != 0.0 {
                axpy(a, h.row(t), &mut ctx);
            }
        }
        Ok((ctx, AttentionCache { u, weights }))
    }

    pub fn backward(
        &self,
        values: &[Tensor],
        grads: &mut [Tensor],
        h: &Tensor,
        cache: &AttentionCache,
        dctx: &[f64],
    ) -> Tensor {
        let len = h.rows();
        let (w, v) = (&values[self.w.0], &values[self.v.0]);
        let mut dh = Tensor::zeros(&[len, self.hidden]);
        let alpha = &cache.weights;
        let dalpha: Vec<f64> = (0..len).map(|t| dot(h.row(t), dctx)).collect();
        let mean: f64 = alpha.iter().zip(&dalpha).map(|(a, d)| a * d).sum();
        let mut dw = std::mem::take(&mut grads[self.w.0]);
        let mut db = std::mem::take(&mut grads[self.b.0]);
        let mut dv = std::mem::take(&mut grads[self.v.0]);
        let mut dz = vec![0.0; self.attn_dim];
        for t in 0..len {
            axpy(alpha[t], dctx, dh.row_mut(t));
            let dscore = alpha[t] * (dalpha[t] - mean);
            if dscore == 0.0 {
                continue;
            }
            let u = cache.u.row(t);
            axpy(dscore, u, dv.data_mut());
            for k in 0..self.attn_dim {
                dz[k] = dscore * v.data()[k] * (1.0 - u[k] * u[k]);
            }
            axpy(1.0, &dz, db.data_mut());
            outer_acc(h.row(t), &dz, dw.data_mut());
            mat_vec_acc(w.data(), &dz, dh.row_mut(t));
        }
        grads[self.w.0] = dw;
        grads[self.b.0] = db;
        grads[self.v.0] = dv;
        dh
    }

    pub fn num_params(hidden: usize, attn_dim: usize) -> usize {
        hidden * attn_dim + 2 * attn_dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Selu,
    Softmax,
    None,
}

/// `activation(x · W + b)` with `W` shaped `[in, out]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dense {
    pub w: ParamId,
    pub b: ParamId,
    pub input_dim: usize,
    pub output_dim: usize,
    pub activation: Activation,
}

#[derive(Debug, Clone)]
pub struct DenseCache {
    x: Vec<f64>,
    z: Vec<f64>,
    pub y: Vec<f64>,
}

impl Dense {
    pub fn new(
        store: &mut ParamStore,
        prefix: &str,
        input_dim: usize,
        output_dim: usize,
        activation: Activation,
        rng: &mut impl Rng,
    ) -> Self {
        let w = store.add(format!("{prefix}.w"), Tensor::glorot(input_dim, output_dim, rng));
        let b = store.add(format!("{prefix}.b"), Tensor::zeros(&[output_dim]));
        Dense {
            w,
            b,
            input_dim,
            output_dim,
            activation,
        }
    }

    pub fn forward(&self, values: &[Tensor], x: &[f64]) -> (Vec<f64>, DenseCache) {
        debug_assert_eq!(x.len(), self.input_dim);
        let mut z = values[self.b.0].data().to_vec();
        vec_mat_acc(x, values[self.w.0].data(), &mut z);
        let y = match self.activation {
            Activation::Selu => z.iter().map(|&v| selu(v)).collect(),
            Activation::Softmax => softmax(&z),
            Activation::None => z.clone(),
        };
        (
            y.clone(),
            DenseCache {
                x: x.to_vec(),
                z,
                y,
            },
        )
    }

    /// Gradient through the activation, then the affine map.
    pub fn backward(&self, values: &[Tensor], grads: &mut [Tensor], cache: &DenseCache, dy: &[f64]) -> Vec<f64> {
        let dz: Vec<f64> = match self.activation {
            Activation::Selu => cache.z.iter().zip(dy).map(|(&z, &d)| d * selu_grad(z)).collect(),
            Activation::Softmax => {
                let s = dot(dy, &cache.y);
                cache.y.iter().zip(dy).map(|(&y, &d)| y * (d - s)).collect()
            }
            Activation::None => dy.to_vec(),
        };
        self.backward_pre(values, grads, cache, &dz)
    }

    /// Gradient given directly with respect to the pre-activation `z`.
    pub fn backward_pre(&self, values: &[Tensor], grads: &mut [Tensor], cache: &DenseCache, dz: &[f64]) -> Vec<f64> {
        axpy(1.0, dz, grads[self.b.0].data_mut());
        outer_acc(&cache.x, dz, grads[self.w.0].data_mut());
        let mut dx = vec![0.0; self.input_dim];
        mat_vec_acc(values[self.w.0].data(), dz, &mut dx);
        dx
    }

    pub fn num_params(input_dim: usize, output_dim: usize) -> usize {
        input_dim * output_dim + output_dim
    }
}

/// Inverted dropout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dropout {
    pub rate: f64,
}

impl Dropout {
    pub fn new(rate: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::precondition(format!("dropout rate {rate} not in [0, 1)")));
        }
        Ok(Dropout { rate })
    }

    /// Returns the output and, when units were dropped, the scaling mask.
    pub fn forward(&self, x: &[f64], rng: &mut impl Rng, training: bool) -> (Vec<f64>, Option<Vec<f64>>) {
        if !training || self.rate == 0.0 {
            return (x.to_vec(), None);
        }
        let scale = 1.0 / (1.0 - self.rate);
        let mask: Vec<f64> = x
            .iter()
            .map(|_| if rng.gen::<f64>() < self.rate { 0.0 } else { scale })
            .collect();
        let y = x.iter().zip(&mask).map(|(a, m)| a * m).collect();
        (y, Some(mask))
    }

    pub fn backward(dy: &[f64], mask: Option<&[f64]>) -> Vec<f64> {
        match mask {
            None => dy.to_vec(),
            Some(m) => dy.iter().zip(m).map(|(d, m)| d * m).collect(),
        }
    }
}
