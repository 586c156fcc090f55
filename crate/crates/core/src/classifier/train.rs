use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::{DropoutMasks, Network};
use super::{ModelConfig, TrainedModel};
use crate::error::{Error, Result};
use crate::tensor::{Nadam, ParamStore};
use crate::text::Vocab;

/// An encoded training example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub ids: Vec<usize>,
    pub label: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub epochs: Vec<EpochStats>,
    /// Epoch whose weights were kept.
    pub best_epoch: usize,
}

impl TrainingLog {
    pub const CSV_HEADER: &'static str = "epoch,train_loss,train_acc,val_loss,val_acc";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.epoch, e.train_loss, e.train_acc, e.val_loss, e.val_acc
            ));
        }
        out
    }
}

fn argmax(p: &[f64]) -> usize {
    super::top_k(p, 1).map(|v| v[0].0).unwrap_or(0)
}

fn check_samples(samples: &[Sample], classes: usize, vocab_size: usize, what: &str) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::precondition(format!("{what} set is empty")));
    }
    for s in samples {
        if s.label >= classes {
            return Err(Error::precondition(format!(
                "{what} label {} outside 0..{classes}",
                s.label
            )));
        }
        if let Some(&bad) = s.ids.iter().find(|&&i| i >= vocab_size) {
            return Err(Error::Index { index: bad, len: vocab_size });
        }
    }
    Ok(())
}

/// Mean loss and accuracy with dropout off.
fn evaluate(net: &Network, params: &ParamStore, samples: &[Sample]) -> Result<(f64, f64)> {
    let mut loss = 0.0;
    let mut correct = 0usize;
    for s in samples {
        let (l, probs) = net.loss(params.values(), None, &s.ids, s.label, None)?;
        loss += l;
        correct += usize::from(argmax(&probs) == s.label);
    }
    let n = samples.len() as f64;
    Ok((loss / n, correct as f64 / n))
}

/// Mini-batch cross-entropy training with Nadam and early stopping on
/// validation loss. Returns the weights of the best validation epoch.
pub fn train(
    config: &ModelConfig,
    vocab: &Vocab,
    train_set: &[Sample],
    validation: &[Sample],
    seed: u64,
) -> Result<(TrainedModel, TrainingLog)> {
    config.validate()?;
    check_samples(train_set, config.output_classes, vocab.len(), "training")?;
    check_samples(validation, config.output_classes, vocab.len(), "validation")?;
    let truncate = |s: &Sample| Sample {
        ids: s.ids[..s.ids.len().min(config.max_seq_len)].to_vec(),
        label: s.label,
    };
    let train_set: Vec<Sample> = train_set.iter().map(truncate).collect();
    let validation: Vec<Sample> = validation.iter().map(truncate).collect();

    let mut init_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ParamStore::new();
    let net = Network::new(config, vocab.len(), &mut params, &mut init_rng)?;
    let optimizer = Nadam::with_lr(config.lr);

    let mut log = TrainingLog::default();
    let mut best: Option<(f64, ParamStore)> = None;
    let mut since_best = 0;
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=config.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(epoch as u64);
        order.shuffle(&mut rng);
        let mut total_loss = 0.0;
        let mut correct = 0usize;
        for batch in order.chunks(config.batch_size) {
            params.zero_grads();
            let (values, grads) = params.split_mut();
            for &i in batch {
                let s = &train_set[i];
                let masks = DropoutMasks::sample(&net, &mut rng);
                let (loss, probs) = net.loss(values, Some(grads), &s.ids, s.label, Some(masks))?;
                if !loss.is_finite() {
                    return Err(Error::Divergence { epoch });
                }
                total_loss += loss;
                correct += usize::from(argmax(&probs) == s.label);
            }
            let scale = 1.0 / batch.len() as f64;
            for g in params.grads_mut() {
                g.data_mut().iter_mut().for_each(|v| *v *= scale);
            }
            optimizer.step(&mut params);
        }
        let (val_loss, val_acc) = evaluate(&net, &params, &validation)?;
        if !val_loss.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        let stats = EpochStats {
            epoch,
            train_loss: total_loss / train_set.len() as f64,
            train_acc: correct as f64 / train_set.len() as f64,
            val_loss,
            val_acc,
        };
        debug!(
            "epoch {epoch}: train_loss {:.4} train_acc {:.4} val_loss {val_loss:.4} val_acc {val_acc:.4}",
            stats.train_loss, stats.train_acc
        );
        log.epochs.push(stats);
        if best.as_ref().map_or(true, |(l, _)| val_loss < *l) {
            best = Some((val_loss, params.frozen()));
            log.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                break;
            }
        }
    }
    info!(
        "trained {} epochs, best epoch {} (val_loss {:.4})",
        log.epochs.len(),
        log.best_epoch,
        log.epochs[log.best_epoch - 1].val_loss
    );
    let (_, best_params) = best.expect("at least one epoch runs");
    Ok((
        TrainedModel::from_trained(*config, vocab.clone(), net, best_params),
        log,
    ))
}
