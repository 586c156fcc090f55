//! Intent and slot metrics, the significance test, and the bias-sweep and
//! ablation experiments.

mod experiments;
mod metrics;

pub use experiments::{
    ablation_run, bias_sweep, evaluate, gold_chunks, mean_sd, median, predicted_chunks, AblationCell, AblationTable,
    BiasCell, BiasSweep, Evaluation, Variant,
};
pub use metrics::{
    harmonic, intent_metrics, significance, slot_chunk_f1, Chunk, ClassMetrics, IntentMetrics, SlotMetrics,
};
