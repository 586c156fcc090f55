use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentMetrics {
    /// Classes present in the gold labels, ascending.
    pub per_class: Vec<ClassMetrics>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Per-class and macro-averaged precision and recall over the classes that
/// occur in `gold`. The macro F1 is the harmonic mean of macro precision and
/// macro recall.
pub fn intent_metrics(pred: &[usize], gold: &[usize]) -> Result<IntentMetrics> {
    if pred.len() != gold.len() {
        return Err(Error::LengthMismatch(pred.len(), gold.len()));
    }
    if gold.is_empty() {
        return Err(Error::precondition("no examples to score"));
    }
    // class -> (true positives, predicted, gold)
    let mut counts: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
    for &g in gold {
        counts.entry(g).or_default().2 += 1;
    }
    let mut correct = 0;
    for (&p, &g) in pred.iter().zip(gold) {
        if let Some(c) = counts.get_mut(&p) {
            c.1 += 1;
        }
        if p == g {
            correct += 1;
            counts.get_mut(&g).expect("gold class counted").0 += 1;
        }
    }
    let per_class: Vec<ClassMetrics> = counts
        .into_iter()
        .map(|(class, (tp, npred, ngold))| {
            let precision = ratio(tp, npred);
            let recall = ratio(tp, ngold);
            ClassMetrics {
                class,
                precision,
                recall,
                f1: harmonic(precision, recall),
                support: ngold,
            }
        })
        .collect();
    let k = per_class.len() as f64;
    let precision = per_class.iter().map(|c| c.precision).sum::<f64>() / k;
    let recall = per_class.iter().map(|c| c.recall).sum::<f64>() / k;
    Ok(IntentMetrics {
        per_class,
        precision,
        recall,
        f1: harmonic(precision, recall),
        accuracy: correct as f64 / gold.len() as f64,
    })
}

/// `(start, end, entity type)` with a code-point span.
pub type Chunk = (usize, usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub predicted: usize,
    pub gold: usize,
}

/// Micro-averaged exact-match chunk scores. `pred[i]` and `gold[i]` are the
/// chunks of query `i`. When there are neither gold nor predicted chunks all
/// scores are 1.
pub fn slot_chunk_f1(pred: &[Vec<Chunk>], gold: &[Vec<Chunk>]) -> Result<SlotMetrics> {
    if pred.len() != gold.len() {
        return Err(Error::LengthMismatch(pred.len(), gold.len()));
    }
    let (mut tp, mut npred, mut ngold) = (0, 0, 0);
    for (p, g) in pred.iter().zip(gold) {
        npred += p.len();
        ngold += g.len();
        let mut remaining: Vec<Chunk> = g.clone();
        for c in p {
            if let Some(i) = remaining.iter().position(|x| x == c) {
                remaining.swap_remove(i);
                tp += 1;
            }
        }
    }
    if npred == 0 && ngold == 0 {
        return Ok(SlotMetrics {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
            true_positives: 0,
            predicted: 0,
            gold: 0,
        });
    }
    let precision = ratio(tp, npred);
    let recall = ratio(tp, ngold);
    Ok(SlotMetrics {
        precision,
        recall,
        f1: harmonic(precision, recall),
        true_positives: tp,
        predicted: npred,
        gold: ngold,
    })
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// One-sided Welch t-test of `mean(a) > mean(b)`; returns the p-value.
pub fn significance(a: &[f64], b: &[f64]) -> Result<f64> {
    for s in [a, b] {
        if s.len() < 3 {
            return Err(Error::InsufficientSamples { needed: 3, got: s.len() });
        }
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se = (sa + sb).sqrt();
    let diff = ma - mb;
    if se == 0.0 {
        return Ok(if diff > 0.0 {
            0.0
        } else if diff < 0.0 {
            1.0
        } else {
            0.5
        });
    }
    let df = (sa + sb).powi(2) / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let t = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::precondition(e.to_string()))?;
    Ok(t.sf(diff / se))
}
