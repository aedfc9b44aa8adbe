use quadlogic::datasets::{gen_xor, LabeledDataset};
use quadlogic::quadcore::{sigmoid, Activation, Layer, Network, QuadraticNeuron};
use quadlogic::trainer::{
    apply_init, evaluate, train, BatchMode, InitScheme, LossKind, LrSchedule, Optimizer, Reduction, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(seed: u64, iterations: u64, rate: f64, init: InitScheme) -> TrainConfig {
    TrainConfig {
        seed,
        schedule: LrSchedule::constant(iterations, rate).unwrap(),
        iterations,
        batch: BatchMode::FullBatch,
        init,
        loss: LossKind::Mse,
        reduction: Reduction::Mean,
        optimizer: Optimizer::Sgd,
        checkpoints: Vec::new(),
    }
}

#[test]
fn analytic_xor_neuron_classifies_by_sign() {
    let n = QuadraticNeuron::new(vec![1.0, 1.0], vec![-1.0, -1.0], vec![0.0, 0.0], -0.5, 1.5, 0.0).unwrap();
    for (x, label) in gen_xor().iter() {
        assert_eq!(usize::from(n.forward(x).unwrap() > 0.0), label, "x = {x:?}");
    }
}

#[test]
fn single_neuron_learns_xor() {
    let data = gen_xor();
    let solved = (0..20)
        .filter(|&seed| {
            let net = Network::mlp(&[2, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
            let cfg = config(seed, 2000, 2.0, InitScheme::TruncatedGaussian { sigma: 0.5 });
            let trained = train(net, &data, &cfg).unwrap().network;
            evaluate(&trained, &data).unwrap().correct == 4
        })
        .count();
    assert!(solved >= 1, "no seed solved XOR");
}

/// First-order MLP evaluated directly from the `w_r`, `b_r` weights.
fn first_order_forward(net: &Network, x: &[f64]) -> Vec<f64> {
    let mut a = x.to_vec();
    for layer in net.layers() {
        let Layer::Dense(d) = layer else { unreachable!() };
        a = d
            .neurons
            .iter()
            .map(|n| sigmoid(n.w_r.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>() + n.b_r))
            .collect();
    }
    a
}

#[test]
fn linear_collapse_equals_first_order_network() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..10 {
        let mut net = Network::mlp(&[3, 5, 4, 2], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        apply_init(&mut net, InitScheme::LinearCollapse, seed).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let got = net.forward_slice(&x).unwrap();
            let want = first_order_forward(&net, &x);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
            }
        }
    }
}

/// 20 points split by the line x + y = 0.2, kept at least 0.1 away from it.
fn separable_set() -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    while points.len() < 20 {
        let (x, y): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let margin = x + y - 0.2;
        if margin.abs() < 0.1 {
            continue;
        }
        points.push(vec![x, y]);
        labels.push(usize::from(margin > 0.0));
    }
    LabeledDataset::from_points(&points, labels, 2).unwrap()
}

#[test]
fn separable_set_is_learned_by_most_seeds() {
    let data = separable_set();
    let perfect = (0..20)
        .filter(|&seed| {
            let net = Network::mlp(&[2, 4, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
            let cfg = config(seed, 2000, 1.0, InitScheme::TruncatedGaussian { sigma: 0.5 });
            let trained = train(net, &data, &cfg).unwrap().network;
            evaluate(&trained, &data).unwrap().accuracy == 1.0
        })
        .count();
    assert!(perfect >= 18, "only {perfect}/20 seeds reached 100%");
}

#[test]
fn small_rate_full_batch_loss_is_monotone() {
    let data = separable_set();
    let net = Network::mlp(&[2, 4, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
    let mut cfg = config(7, 200, 0.05, InitScheme::TruncatedGaussian { sigma: 0.5 });
    cfg.checkpoints = (1..=200).collect();
    let report = train(net, &data, &cfg).unwrap();
    for w in report.history.windows(2) {
        assert!(w[1].loss <= w[0].loss, "loss rose at step {}: {} -> {}", w[1].step, w[0].loss, w[1].loss);
    }
    assert!(report.history.last().unwrap().loss < report.history[0].loss);
}

#[test]
fn training_is_deterministic_per_seed() {
    let data = separable_set();
    let run = |seed, batch| {
        let net = Network::mlp(&[2, 3, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        let mut cfg = config(seed, 50, 0.5, InitScheme::TruncatedGaussian { sigma: 0.5 });
        cfg.batch = batch;
        serde_json::to_string(&train(net, &data, &cfg).unwrap().network).unwrap()
    };
    for batch in [BatchMode::FullBatch, BatchMode::MiniBatch(6)] {
        assert_eq!(run(1, batch), run(1, batch));
        assert_ne!(run(1, batch), run(2, batch));
    }
}

#[test]
fn divergence_is_reported() {
    let data = separable_set();
    let net = Network::mlp(&[2, 3, 1], Activation::Identity, Activation::Identity).unwrap();
    let cfg = config(0, 200, 1e6, InitScheme::TruncatedGaussian { sigma: 1.0 });
    let err = train(net, &data, &cfg).unwrap_err();
    assert_eq!(err.code(), "non-finite-loss");
}
