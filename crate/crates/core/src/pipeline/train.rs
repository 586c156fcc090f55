use std::sync::Arc;

use log::info;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::engine::{BundleMeta, Engine};
use super::stages::{subcategory_input, Tagger, View};
use super::PipelineConfig;
use crate::classifier::{category_token, inject_bias, train, BiasAssignment, Sample, TrainedModel, TrainingLog};
use crate::error::Result;
use crate::gazetteer::{CategoryGroups, Gazetteer};
use crate::rules::RuleSet;
use crate::text::{materialize, parse_jsonl, split_indices, tag_token, Dataset, Split, Taxonomy, Vocab};

/// Independent seed for one training sub-step.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

const CATEGORY_STREAM: u64 = 1;
const BIAS_STREAM: u64 = 2;
const SUBCATEGORY_STREAM: u64 = 3;

/// Loaded inputs and the data split for one configuration.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub taxonomy: Arc<Taxonomy>,
    pub tagger: Tagger,
    pub rules: RuleSet,
    pub split: Split,
}

/// Reads every input named in `cfg` and splits the dataset with `cfg.seed`.
pub fn prepare(cfg: &PipelineConfig) -> Result<Prepared> {
    cfg.validate()?;
    let taxonomy = Arc::new(Taxonomy::load(&cfg.taxonomy)?);
    let gazetteer = Gazetteer::load(&cfg.gazetteer, taxonomy.entity_types())?;
    let rules = RuleSet::load(&cfg.rules, &taxonomy)?;
    let file = std::fs::File::open(&cfg.dataset).map_err(|e| crate::Error::io(&cfg.dataset, e))?;
    let examples = parse_jsonl(std::io::BufReader::new(file), &taxonomy)?;
    let dataset = Dataset::new(examples, taxonomy.clone());
    let split = materialize(&dataset, split_indices(&dataset, cfg.seed)?.limited(cfg.limit));
    let groups = match &cfg.groups {
        Some(specs) => CategoryGroups::from_specs(specs, &taxonomy)?,
        None => CategoryGroups::from_examples(&split.train.examples, &taxonomy),
    };
    let tagger = Tagger::new(gazetteer, groups, cfg.tiers, cfg.ablation);
    Ok(Prepared {
        taxonomy,
        tagger,
        rules,
        split,
    })
}

/// Trained category model plus the stage-A views it was trained on.
#[derive(Debug, Clone)]
pub struct CategoryStage {
    pub model: TrainedModel,
    pub log: TrainingLog,
    pub train_views: Vec<View>,
    pub validation_views: Vec<View>,
}

fn stage_a_views(tagger: &Tagger, d: &Dataset) -> Result<Vec<View>> {
    d.examples.iter().map(|ex| tagger.stage_a(&ex.raw)).collect()
}

fn encode(model_vocab: &Vocab, max_len: usize, tokens: &[String], label: usize) -> Sample {
    let n = tokens.len().min(max_len);
    Sample {
        ids: model_vocab.encode(&tokens[..n]),
        label,
    }
}

/// Trains the category model on NER-1-substituted training queries.
///
/// The result depends only on the data, the seed, the limit, the category
/// model config and the substitution switch, so it can be shared between
/// configurations that agree on those.
pub fn train_category_stage(cfg: &PipelineConfig, p: &Prepared) -> Result<CategoryStage> {
    let config = cfg.category_model.with_classes(p.taxonomy.num_categories());
    let train_views = stage_a_views(&p.tagger, &p.split.train)?;
    let validation_views = stage_a_views(&p.tagger, &p.split.validation)?;
    let mut vocab = Vocab::build(train_views.iter().map(|v| v.tokens()));
    for t in p.taxonomy.entity_types() {
        vocab.insert(&tag_token(t));
    }
    let samples = |views: &[View], d: &Dataset| -> Vec<Sample> {
        views
            .iter()
            .zip(&d.examples)
            .map(|(v, ex)| encode(&vocab, config.max_seq_len, v.tokens(), ex.category))
            .collect()
    };
    let train_samples = samples(&train_views, &p.split.train);
    let val_samples = samples(&validation_views, &p.split.validation);
    info!(
        "training category model on {} queries, vocabulary {}",
        train_samples.len(),
        vocab.len()
    );
    let (model, log) = train(
        &config,
        &vocab,
        &train_samples,
        &val_samples,
        derive_seed(cfg.seed, CATEGORY_STREAM),
    )?;
    Ok(CategoryStage {
        model,
        log,
        train_views,
        validation_views,
    })
}

#[derive(Debug, Clone)]
pub struct SubcategoryStage {
    pub log: TrainingLog,
    pub bias: BiasAssignment,
    /// Subcategory-model inputs for the training split, indicator first.
    pub train_inputs: Vec<Vec<String>>,
}

/// Bias injection, NER-2 and subcategory training; returns the finished
/// engine.
pub fn train_subcategory_stage(
    cfg: &PipelineConfig,
    p: &Prepared,
    category: &CategoryStage,
) -> Result<(Engine, SubcategoryStage)> {
    let config = cfg.subcategory_model.with_classes(p.taxonomy.num_subcategories());
    let train = &p.split.train;
    let gold: Vec<usize> = train.examples.iter().map(|ex| ex.category).collect();
    let a_tokens: Vec<Vec<String>> = category.train_views.iter().map(|v| v.tokens().to_vec()).collect();
    let bias = inject_bias(
        &category.model,
        &a_tokens,
        &gold,
        cfg.bias_pct,
        derive_seed(cfg.seed, BIAS_STREAM),
    )?;
    info!("bias injection altered {} of {} indicators", bias.num_altered(), gold.len());

    let inputs = |views: &[View], d: &Dataset, indicators: &[usize]| -> Result<Vec<Vec<String>>> {
        views
            .iter()
            .zip(&d.examples)
            .zip(indicators)
            .map(|((v, ex), &cat)| Ok(subcategory_input(&p.tagger.stage_c(&ex.raw, v, cat)?, cat)))
            .collect()
    };
    let train_inputs = inputs(&category.train_views, train, &bias.indicators)?;
    // Validation queries carry the category the model would pass at
    // inference time.
    let val_indicators = category
        .validation_views
        .iter()
        .map(|v| Ok(top_k_1(&category.model, v.tokens())?))
        .collect::<Result<Vec<usize>>>()?;
    let val_inputs = inputs(&category.validation_views, &p.split.validation, &val_indicators)?;

    let mut vocab = Vocab::build(&train_inputs);
    for t in p.taxonomy.entity_types() {
        vocab.insert(&tag_token(t));
    }
    for c in 0..p.taxonomy.num_categories() {
        vocab.insert(&category_token(c));
    }
    let samples = |inputs: &[Vec<String>], d: &Dataset| -> Vec<Sample> {
        inputs
            .iter()
            .zip(&d.examples)
            .map(|(t, ex)| encode(&vocab, config.max_seq_len, t, ex.subcategory))
            .collect()
    };
    let train_samples = samples(&train_inputs, train);
    let val_samples = samples(&val_inputs, &p.split.validation);
    info!(
        "training subcategory model on {} queries, vocabulary {}",
        train_samples.len(),
        vocab.len()
    );
    let (model, log) = crate::classifier::train(
        &config,
        &vocab,
        &train_samples,
        &val_samples,
        derive_seed(cfg.seed, SUBCATEGORY_STREAM),
    )?;
    let engine = Engine::new(
        p.taxonomy.clone(),
        p.tagger.clone(),
        p.rules.clone(),
        category.model.clone(),
        model,
        BundleMeta {
            seed: cfg.seed,
            bias_pct: cfg.bias_pct,
            limit: cfg.limit,
        },
    );
    Ok((
        engine,
        SubcategoryStage {
            log,
            bias,
            train_inputs,
        },
    ))
}

fn top_k_1(model: &TrainedModel, tokens: &[String]) -> Result<usize> {
    Ok(model.predict_tokens_topk(tokens, 1)?[0].0)
}

/// A trained engine with its training logs.
#[derive(Debug)]
pub struct TrainedPipeline {
    pub engine: Engine,
    pub category_log: TrainingLog,
    pub subcategory: SubcategoryStage,
    pub split: Split,
}

/// Runs every training step for `cfg`.
pub fn train_pipeline(cfg: &PipelineConfig) -> Result<TrainedPipeline> {
    let prepared = prepare(cfg)?;
    let category = train_category_stage(cfg, &prepared)?;
    let (engine, subcategory) = train_subcategory_stage(cfg, &prepared, &category)?;
    Ok(TrainedPipeline {
        engine,
        category_log: category.log,
        subcategory,
        split: prepared.split,
    })
}
