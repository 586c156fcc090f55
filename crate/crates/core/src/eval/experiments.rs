use log::info;
use serde::{Deserialize, Serialize};

use super::metrics::{intent_metrics, slot_chunk_f1, Chunk, IntentMetrics, SlotMetrics};
use crate::error::{Error, Result};
use crate::pipeline::{
    prepare, train_category_stage, train_subcategory_stage, Ablation, CategoryStage, Engine, PipelineConfig,
    PipelineOutput,
};
use crate::text::Dataset;

/// Test-set scores of one engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub intent: IntentMetrics,
    pub slots: SlotMetrics,
}

pub fn gold_chunks(d: &Dataset) -> Vec<Vec<Chunk>> {
    d.examples
        .iter()
        .map(|ex| ex.entities.iter().map(|e| (e.start, e.end, e.entity_type)).collect())
        .collect()
}

pub fn predicted_chunks(out: &PipelineOutput) -> Vec<Chunk> {
    out.slots.iter().map(|s| (s.start, s.end, s.entity_type)).collect()
}

/// Runs every example of `d` through the engine and scores subcategory
/// intents and slots.
pub fn evaluate(engine: &Engine, d: &Dataset) -> Result<Evaluation> {
    let outputs = d
        .examples
        .iter()
        .map(|ex| engine.run(&ex.raw))
        .collect::<Result<Vec<_>>>()?;
    let pred: Vec<usize> = outputs.iter().map(|o| o.subcategory).collect();
    let gold: Vec<usize> = d.examples.iter().map(|ex| ex.subcategory).collect();
    let pred_chunks: Vec<Vec<Chunk>> = outputs.iter().map(predicted_chunks).collect();
    Ok(Evaluation {
        intent: intent_metrics(&pred, &gold)?,
        slots: slot_chunk_f1(&pred_chunks, &gold_chunks(d))?,
    })
}

impl Evaluation {
    pub const CSV_HEADER: &'static str = "int_p,int_r,int_f1,int_acc,slot_p,slot_r,slot_f1";

    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.intent.precision,
            self.intent.recall,
            self.intent.f1,
            self.intent.accuracy,
            self.slots.precision,
            self.slots.recall,
            self.slots.f1
        )
    }

    fn columns(&self) -> [f64; 7] {
        [
            self.intent.precision,
            self.intent.recall,
            self.intent.f1,
            self.intent.accuracy,
            self.slots.precision,
            self.slots.recall,
            self.slots.f1,
        ]
    }
}

fn check_seeds(seeds: &[u64]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::precondition("no seeds given"));
    }
    Ok(())
}

pub fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = if x.len() > 1 {
        (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

pub fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasCell {
    pub bias: f64,
    pub seed: u64,
    pub accuracy: f64,
    /// Indicators replaced by the second-ranked category.
    pub altered: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasSweep {
    pub cells: Vec<BiasCell>,
}

impl BiasSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bias,seed,accuracy\n");
        for c in &self.cells {
            out.push_str(&format!("{},{},{}\n", c.bias, c.seed, c.accuracy));
        }
        out
    }

    pub fn accuracies(&self, bias: f64) -> Vec<f64> {
        self.cells.iter().filter(|c| c.bias == bias).map(|c| c.accuracy).collect()
    }

    /// `(bias, mean, sd)` per bias value, in sweep order.
    pub fn summary(&self) -> Vec<(f64, f64, f64)> {
        let mut biases: Vec<f64> = Vec::new();
        for c in &self.cells {
            if !biases.contains(&c.bias) {
                biases.push(c.bias);
            }
        }
        biases
            .into_iter()
            .map(|b| {
                let (m, s) = mean_sd(&self.accuracies(b));
                (b, m, s)
            })
            .collect()
    }
}

/// Test accuracy of the full pipeline for each bias value and seed. The
/// category model is trained once per seed and shared across bias values.
pub fn bias_sweep(cfg: &PipelineConfig, biases: &[f64], seeds: &[u64]) -> Result<BiasSweep> {
    check_seeds(seeds)?;
    if let Some(b) = biases.iter().find(|b| !(0.0..1.0).contains(*b)) {
        return Err(Error::precondition(format!("bias value {b} outside [0, 1)")));
    }
    let mut cells = Vec::new();
    for &seed in seeds {
        let base = cfg.clone().with_seed(seed);
        let prepared = prepare(&base)?;
        let category = train_category_stage(&base, &prepared)?;
        for &bias in biases {
            let run = PipelineConfig {
                bias_pct: bias,
                ..base.clone()
            };
            let (engine, sub) = train_subcategory_stage(&run, &prepared, &category)?;
            let accuracy = evaluate(&engine, &prepared.split.test)?.intent.accuracy;
            info!("bias {bias} seed {seed}: accuracy {accuracy:.4}");
            cells.push(BiasCell {
                bias,
                seed,
                accuracy,
                altered: sub.bias.num_altered(),
            });
        }
    }
    Ok(BiasSweep { cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Exact matching at every stage.
    SingleTier,
    /// Entities tagged but left in the query text.
    NoSubstitution,
    Final,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::SingleTier, Variant::NoSubstitution, Variant::Final];

    pub fn name(self) -> &'static str {
        match self {
            Variant::SingleTier => "single_tier",
            Variant::NoSubstitution => "no_substitution",
            Variant::Final => "final",
        }
    }

    pub fn ablation(self) -> Ablation {
        match self {
            Variant::SingleTier => Ablation::SINGLE_TIER,
            Variant::NoSubstitution => Ablation::NO_SUBSTITUTION,
            Variant::Final => Ablation::FINAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationCell {
    pub variant: Variant,
    pub seed: u64,
    pub evaluation: Evaluation,
    /// Dataset indices of the test split.
    pub test_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub cells: Vec<AblationCell>,
}

impl AblationTable {
    pub fn cells_for(&self, v: Variant) -> impl Iterator<Item = &AblationCell> {
        self.cells.iter().filter(move |c| c.variant == v)
    }

    /// Per-column median over seeds: `[int_p, int_r, int_f1, int_acc,
    /// slot_p, slot_r, slot_f1]`.
    pub fn medians(&self, v: Variant) -> [f64; 7] {
        let rows: Vec<[f64; 7]> = self.cells_for(v).map(|c| c.evaluation.columns()).collect();
        std::array::from_fn(|k| median(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("variant,{}\n", Evaluation::CSV_HEADER);
        for v in Variant::ALL {
            if self.cells_for(v).next().is_none() {
                continue;
            }
            let m = self.medians(v).map(|x| x.to_string()).join(",");
            out.push_str(&format!("{},{m}\n", v.name()));
        }
        out
    }
}

/// Trains and evaluates the given variants for each seed on a shared split.
/// The category model of the final configuration is reused by variants
/// with the same substitution setting.
pub fn ablation_run(cfg: &PipelineConfig, variants: &[Variant], seeds: &[u64]) -> Result<AblationTable> {
    check_seeds(seeds)?;
    let mut cells = Vec::new();
    for &seed in seeds {
        let mut shared: Vec<(bool, CategoryStage)> = Vec::new();
        for &variant in variants {
            let run = cfg.clone().with_seed(seed).with_ablation(variant.ablation());
            let prepared = prepare(&run)?;
            let substitution = run.ablation.use_tag_substitution;
            let category = match shared.iter().find(|(s, _)| *s == substitution) {
                Some((_, c)) => c.clone(),
                None => {
                    let c = train_category_stage(&run, &prepared)?;
                    shared.push((substitution, c.clone()));
                    c
                }
            };
            let (engine, _) = train_subcategory_stage(&run, &prepared, &category)?;
            let evaluation = evaluate(&engine, &prepared.split.test)?;
            info!(
                "{} seed {seed}: intent acc {:.4}, slot f1 {:.4}",
                variant.name(),
                evaluation.intent.accuracy,
                evaluation.slots.f1
            );
            cells.push(AblationCell {
                variant,
                seed,
                evaluation,
                test_ids: prepared.split.indices.test.clone(),
            });
        }
    }
    Ok(AblationTable { cells })
}
