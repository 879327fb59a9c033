//! Finite-difference checks of the full scorer across architecture options.

use ctrn::encoder::EmbeddingTable;
use ctrn::head::Activation;
use ctrn::numkit::gradcheck::{compare, numeric_gradient, DEFAULT_STEP, DEFAULT_TOLERANCE};
use ctrn::{EncoderKind, Model, ModelConfig, PairExample};

fn check(cfg: ModelConfig, ex: PairExample, label: u8, lambda: f64, seed: u64) {
    let tag = format!("{:?}", cfg);
    let mut model = Model::new(cfg, EmbeddingTable::random(16, 5, 1.0, seed), seed).unwrap();
    model.zero_grad();
    model.accumulate(&ex, label, None).unwrap();
    model.accumulate_l2_grad(lambda);
    let names: Vec<String> = model.params().into_iter().map(|(n, _, _)| n).collect();
    for name in names {
        let analytic = model.param_mut(&name).unwrap().grad.data().to_vec();
        let mut values = model.param_mut(&name).unwrap().value.data().to_vec();
        let numeric = numeric_gradient(&mut values, DEFAULT_STEP, |v| {
            model.param_mut(&name).unwrap().value.data_mut().copy_from_slice(v);
            model.loss(&[(ex, label)], lambda).unwrap().total
        });
        model.param_mut(&name).unwrap().value.data_mut().copy_from_slice(&values);
        let r = compare(&analytic, &numeric);
        assert!(r.passes(DEFAULT_TOLERANCE), "{tag}\n{name}: {r:?}");
    }
}

fn base(kind: EncoderKind) -> ModelConfig {
    ModelConfig {
        m: 4,
        d: 3,
        h: 5,
        k: 2,
        kind,
        ..ModelConfig::default()
    }
}

const Q: [u32; 5] = [3, 7, 2, 9, 4];
const A: [u32; 3] = [5, 11, 6];

#[test]
fn both_encoders_both_labels() {
    for kind in [EncoderKind::Ctrn, EncoderKind::Qrnn] {
        for label in [0, 1] {
            check(base(kind), PairExample::new(&Q, &A), label, 0.0, 1);
        }
    }
}

#[test]
fn unshared_banks() {
    let cfg = ModelConfig {
        shared_banks: false,
        ..base(EncoderKind::Ctrn)
    };
    check(cfg, PairExample::new(&A, &Q), 1, 4e-6, 2);
}

#[test]
fn deeper_stack_and_relu() {
    for (layers, act) in [(2, Activation::Tanh), (3, Activation::Tanh), (2, Activation::Relu)] {
        let cfg = ModelConfig {
            dense_layers: layers,
            activation: act,
            ..base(EncoderKind::Ctrn)
        };
        check(cfg, PairExample::new(&Q, &A), 0, 0.0, 3);
    }
}

#[test]
fn wider_filters_without_bias() {
    let cfg = ModelConfig {
        k: 3,
        conv_bias: false,
        ..base(EncoderKind::Ctrn)
    };
    check(cfg, PairExample::new(&Q, &A), 1, 1e-3, 4);
}

#[test]
fn overlap_features_enter_the_head() {
    let cfg = ModelConfig {
        overlap_features: true,
        ..base(EncoderKind::Ctrn)
    };
    let ex = PairExample {
        question: &Q,
        answer: &A,
        extra: Some([0.3, 0.25, 0.1, 0.05]),
    };
    check(cfg, ex, 1, 0.0, 5);
}

#[test]
fn single_token_and_equal_lengths() {
    check(base(EncoderKind::Ctrn), PairExample::new(&[4], &[8, 2, 13, 1, 5, 7]), 1, 0.0, 6);
    check(base(EncoderKind::Ctrn), PairExample::new(&[4, 9, 2], &[8, 2, 13]), 0, 0.0, 7);
    check(base(EncoderKind::Ctrn), PairExample::new(&[4, 9, 2, 6, 1, 3], &[10]), 1, 0.0, 8);
}

#[test]
fn gradients_accumulate_over_pairs() {
    let mut model = Model::new(base(EncoderKind::Ctrn), EmbeddingTable::random(16, 5, 1.0, 9), 9).unwrap();
    let a = PairExample::new(&Q, &A);
    let b = PairExample::new(&A, &[1, 2, 3, 4]);
    model.zero_grad();
    model.accumulate(&a, 1, None).unwrap();
    let first: Vec<Vec<f64>> = model.params().iter().map(|(_, _, s)| s.grad.data().to_vec()).collect();
    model.zero_grad();
    model.accumulate(&b, 0, None).unwrap();
    let second: Vec<Vec<f64>> = model.params().iter().map(|(_, _, s)| s.grad.data().to_vec()).collect();
    model.zero_grad();
    model.accumulate(&a, 1, None).unwrap();
    model.accumulate(&b, 0, None).unwrap();
    for ((g, x), y) in model.params().iter().map(|(_, _, s)| s.grad.data()).zip(&first).zip(&second) {
        for i in 0..g.len() {
            assert!((g[i] - (x[i] + y[i])).abs() < 1e-15);
        }
    }
}
