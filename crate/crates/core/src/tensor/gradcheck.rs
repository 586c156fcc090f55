use super::{ParamStore, Tensor};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Gradients smaller than this are compared in absolute terms; below it the
/// finite-difference estimate is dominated by rounding in the loss.
const REL_FLOOR: f64 = 1e-6;

/// A scalar function of the parameters with an analytic gradient.
pub trait Differentiable {
    /// Loss at `params`. When `grads` is given, the analytic gradient is
    /// accumulated into it.
    fn evaluate(&self, params: &[Tensor], grads: Option<&mut [Tensor]>) -> f64;
}

impl<F> Differentiable for F
where
    F: Fn(&[Tensor], Option<&mut [Tensor]>) -> f64,
{
    fn evaluate(&self, params: &[Tensor], grads: Option<&mut [Tensor]>) -> f64 {
        self(params, grads)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub worst_param: String,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub checked: usize,
}

/// `|a - n| / max(|a|, |n|, 1e-6)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

/// Compares the analytic gradient against central finite differences over
/// every scalar parameter in `store`. Parameters are restored afterwards.
pub fn gradient_check(model: &impl Differentiable, store: &mut ParamStore, h: f64) -> GradCheckReport {
    let mut analytic = store.zeros_like();
    model.evaluate(store.values(), Some(&mut analytic));
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_param: String::new(),
        worst_index: 0,
        analytic: 0.0,
        numeric: 0.0,
        checked: 0,
    };
    for p in 0..store.len() {
        for k in 0..analytic[p].len() {
            let original = store.values()[p].data()[k];
            store.values_mut()[p].data_mut()[k] = original + h;
            let plus = model.evaluate(store.values(), None);
            store.values_mut()[p].data_mut()[k] = original - h;
            let minus = model.evaluate(store.values(), None);
            store.values_mut()[p].data_mut()[k] = original;
            let numeric = (plus - minus) / (2.0 * h);
            let a = analytic[p].data()[k];
            let err = relative_error(a, numeric);
            report.checked += 1;
            if err > report.max_rel_error || err.is_nan() {
                report.max_rel_error = err;
                report.worst_param = store.names()[p].clone();
                report.worst_index = k;
                report.analytic = a;
                report.numeric = numeric;
            }
        }
    }
    report
}
