use serde::{Deserialize, Serialize};

use super::ParamStore;

/// Adam with a Nesterov look-ahead on the first moment, constant momentum:
///
/// ```text
/// m  = β1·m + (1-β1)·g
/// v  = β2·v + (1-β2)·g²
/// m̂  = β1·m / (1-β1^(t+1)) + (1-β1)·g / (1-β1^t)
/// v̂  = v / (1-β2^t)
/// θ -= lr · m̂ / (√v̂ + ε)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nadam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for Nadam {
    fn default() -> Self {
        Nadam {
            lr: 7e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl Nadam {
    pub fn with_lr(lr: f64) -> Self {
        Nadam {
            lr,
            ..Self::default()
        }
    }

    /// Applies one update to every parameter from its stored gradient.
    pub fn step(&self, store: &mut ParamStore) {
        for (value, grad, m, v, t) in store.optimizer_state_mut() {
            *t += 1;
            let step = *t as i32;
            let bc1 = 1.0 - self.beta1.powi(step);
            let bc1_next = 1.0 - self.beta1.powi(step + 1);
            let bc2 = 1.0 - self.beta2.powi(step);
            let (vals, g) = (value.data_mut(), grad.data());
            let (m, v) = (m.data_mut(), v.data_mut());
            for k in 0..vals.len() {
                m[k] = self.beta1 * m[k] + (1.0 - self.beta1) * g[k];
                v[k] = self.beta2 * v[k] + (1.0 - self.beta2) * g[k] * g[k];
                let m_hat = self.beta1 * m[k] / bc1_next + (1.0 - self.beta1) * g[k] / bc1;
                let v_hat = v[k] / bc2;
                vals[k] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
    }
}
