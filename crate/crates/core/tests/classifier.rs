use std::time::Instant;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snlu::classifier::*;
use snlu::tensor::{gradient_check, FD_STEP};
use snlu::text::{tokenize, RawQuery, Vocab, PAD};

fn vocab_of(n: usize) -> Vocab {
    let words: Vec<String> = (0..n - 2).map(|i| format!("w{i}")).collect();
    Vocab::build([&words])
}

fn tiny() -> ModelConfig {
    ModelConfig {
        lstm_units: 4,
        dense_units: 6,
        ..ModelConfig::subcategory()
    }
}

#[test]
fn parameter_counts_are_exact() {
    // 4229·38 + 2·4·64·103 + (128·128 + 2·128) + (128·256 + 256) + (256·9 + 9)
    assert_eq!(Network::num_params(&ModelConfig::category(), 4229), 265_415);
    // 4229·38 + 2·4·32·71 + (64·64 + 2·64) + (64·128 + 128) + (128·19 + 19)
    assert_eq!(Network::num_params(&ModelConfig::subcategory(), 4229), 193_873);
    for (cfg, v) in [(ModelConfig::category(), 57), (ModelConfig::subcategory(), 300), (tiny(), 12)] {
        let m = TrainedModel::init(cfg, vocab_of(v), 1).unwrap();
        assert_eq!(m.num_params(), Network::num_params(&cfg, v));
    }
}

#[test]
fn forward_is_a_distribution_over_classes() {
    let m = TrainedModel::init(ModelConfig::category(), vocab_of(40), 3).unwrap();
    let q = tokenize(&RawQuery::new("w1 w2 unseen w3").unwrap()).unwrap();
    let p = m.forward(&q).unwrap();
    assert_eq!(p.len(), 9);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let other = m.forward(&tokenize(&RawQuery::new("w7 w8").unwrap()).unwrap()).unwrap();
    assert_ne!(p, other);
}

#[test]
fn all_padding_input_is_rejected() {
    let m = TrainedModel::init(tiny(), vocab_of(10), 3).unwrap();
    assert!(m.forward_ids(&[PAD, PAD]).is_err());
    assert!(m.forward_ids(&[]).is_err());
    assert!(m.forward_ids(&[2, PAD]).is_ok());
}

#[test]
fn long_inputs_are_truncated() {
    let m = TrainedModel::init(tiny(), vocab_of(10), 3).unwrap();
    let long: Vec<String> = (0..50).map(|i| format!("w{}", i % 8)).collect();
    assert_eq!(m.encode(&long).len(), 30);
    assert_eq!(m.forward_tokens(&long).unwrap(), m.forward_tokens(&long[..30]).unwrap());
}

#[test]
fn topk_agrees_with_forward() {
    let m = TrainedModel::init(ModelConfig::subcategory(), vocab_of(30), 4).unwrap();
    let q = tokenize(&RawQuery::new("w3 w4 w5").unwrap()).unwrap();
    let p = m.forward(&q).unwrap();
    let top = m.predict_topk(&q, 1).unwrap()[0].0;
    let argmax = (0..p.len()).fold(0, |b, i| if p[i] > p[b] { i } else { b });
    assert_eq!(top, argmax);
    let mut all: Vec<usize> = m.predict_topk(&q, 19).unwrap().iter().map(|c| c.0).collect();
    all.sort_unstable();
    assert_eq!(all, (0..19).collect::<Vec<_>>());
}

proptest! {
    #[test]
    fn top_k_matches_sorting_oracle(probs in prop::collection::vec(0u8..5, 2..12), k in 1usize..12) {
        let probs: Vec<f64> = probs.into_iter().map(f64::from).collect();
        prop_assume!(k <= probs.len());
        // brute force: pick the best remaining, lowest id among equals
        let mut left: Vec<usize> = (0..probs.len()).collect();
        let mut expected = Vec::new();
        for _ in 0..k {
            let best = *left.iter().max_by(|&&a, &&b| probs[a].total_cmp(&probs[b]).then(b.cmp(&a))).unwrap();
            expected.push(best);
            left.retain(|&i| i != best);
        }
        let got: Vec<usize> = top_k(&probs, k).unwrap().into_iter().map(|c| c.0).collect();
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn full_models_pass_gradient_check() {
    let start = Instant::now();
    for (cfg, seed) in [(ModelConfig::category(), 10), (ModelConfig::subcategory(), 11)] {
        let mut m = TrainedModel::init(cfg, vocab_of(20), seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids: Vec<usize> = (0..5).map(|_| rng.gen_range(2..20)).collect();
        let net = *m.network();
        let masks = DropoutMasks::sample(&net, &mut rng);
        let loss = net.example_loss(&ids, 3, Some(masks));
        let report = gradient_check(&loss, m.params_mut(), FD_STEP);
        assert_eq!(report.checked, Network::num_params(&cfg, 20));
        assert!(report.max_rel_error <= 1e-4, "{report:?}");
    }
    eprintln!("full-model gradient check: {:?}", start.elapsed());
}

fn trivial_task(n: usize, seed: u64) -> (Vocab, Vec<Sample>) {
    // label 1 iff the query contains "yes"
    let vocab = Vocab::build([&["yes", "no", "a", "b", "c", "d"].map(String::from).to_vec()]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|i| {
            let label = i % 2;
            let mut ids: Vec<usize> = (0..rng.gen_range(2..6)).map(|_| rng.gen_range(4..8)).collect();
            let pos = rng.gen_range(0..=ids.len());
            ids.insert(pos, if label == 1 { 2 } else { 3 });
            Sample { ids, label }
        })
        .collect();
    (vocab, samples)
}

#[test]
fn learns_a_trivial_task() {
    let (vocab, samples) = trivial_task(50, 5);
    let (_, val) = trivial_task(20, 6);
    let cfg = ModelConfig::category().with_classes(2);
    let (model, log) = train(&cfg, &vocab, &samples, &val, 7).unwrap();
    assert!(log.epochs.len() <= 100);
    let acc = samples
        .iter()
        .filter(|s| top_k(&model.forward_ids(&s.ids).unwrap(), 1).unwrap()[0].0 == s.label)
        .count() as f64
        / 50.0;
    assert!(acc >= 0.95, "training accuracy {acc}, log:\n{}", log.to_csv());
}

#[test]
fn training_is_reproducible() {
    let (vocab, samples) = trivial_task(40, 8);
    let (_, val) = trivial_task(10, 9);
    let cfg = ModelConfig {
        epochs: 4,
        batch_size: 16,
        ..tiny().with_classes(2)
    };
    let (m1, l1) = train(&cfg, &vocab, &samples, &val, 42).unwrap();
    let (m2, l2) = train(&cfg, &vocab, &samples, &val, 42).unwrap();
    assert_eq!(l1, l2);
    assert_eq!(m1.params().values(), m2.params().values());
    let csv = l1.to_csv();
    assert!(csv.starts_with("epoch,train_loss,train_acc,val_loss,val_acc\n1,"));
    assert_eq!(csv.lines().count(), 5);
    let (_, l3) = train(&cfg, &vocab, &samples, &val, 43).unwrap();
    assert_ne!(l1, l3);
}

#[test]
fn training_preconditions() {
    let (vocab, samples) = trivial_task(10, 1);
    let cfg = tiny().with_classes(2);
    assert!(train(&cfg, &vocab, &[], &samples, 0).is_err());
    assert!(train(&cfg, &vocab, &samples, &[], 0).is_err());
    let bad = vec![Sample { ids: vec![2], label: 5 }];
    assert!(train(&cfg, &vocab, &bad, &samples, 0).is_err());
}

#[test]
fn diverging_training_is_reported() {
    let (vocab, samples) = trivial_task(20, 2);
    let cfg = ModelConfig {
        lr: 1e300,
        epochs: 3,
        batch_size: 4,
        ..tiny().with_classes(2)
    };
    assert!(matches!(
        train(&cfg, &vocab, &samples, &samples, 0),
        Err(snlu::Error::Divergence { .. })
    ));
}

fn bias_fixture(n: usize) -> (TrainedModel, Vec<Vec<String>>, Vec<usize>) {
    let m = TrainedModel::init(tiny().with_classes(9), vocab_of(12), 21).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let queries = (0..n)
        .map(|_| (0..rng.gen_range(1..5)).map(|_| format!("w{}", rng.gen_range(0..10))).collect())
        .collect();
    let gold = (0..n).map(|_| rng.gen_range(0..9)).collect();
    (m, queries, gold)
}

#[test]
fn zero_bias_keeps_gold_indicators() {
    let (m, q, gold) = bias_fixture(200);
    let a = inject_bias(&m, &q, &gold, 0.0, 1).unwrap();
    assert_eq!(a.indicators, gold);
    assert_eq!(a.num_altered(), 0);
}

#[test]
fn ten_percent_of_10980_alters_1098() {
    let (m, q, gold) = bias_fixture(10980);
    let a = inject_bias(&m, &q, &gold, 0.10, 5).unwrap();
    assert_eq!(a.num_altered(), 1098);
    for i in 0..q.len() {
        if a.altered[i] {
            assert_eq!(a.indicators[i], m.predict_tokens_topk(&q[i], 2).unwrap()[1].0);
        } else {
            assert_eq!(a.indicators[i], gold[i]);
        }
    }
    assert_eq!(a, inject_bias(&m, &q, &gold, 0.10, 5).unwrap());
    assert_ne!(a.altered, inject_bias(&m, &q, &gold, 0.10, 6).unwrap().altered);
}

#[test]
fn bias_preconditions() {
    let (m, q, gold) = bias_fixture(10);
    assert!(inject_bias(&m, &q, &gold, 1.0, 0).is_err());
    assert!(inject_bias(&m, &q, &gold[..5], 0.1, 0).is_err());
    assert_eq!(category_token(3), "<cat_3>");
}
