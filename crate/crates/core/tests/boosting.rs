use std::collections::BTreeMap;

use cnpmi_core::estimator::{
    cross_validate, BoostParams, BoostedLinear, EstimatorModel, FeatureVector, Grid, LossKind,
    TrainingSet, FEATURE_COUNT,
};
use cnpmi_core::linalg::weighted_least_squares;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weighted least squares with intercept through nalgebra's SVD.
fn wls_oracle(x: &[Vec<f64>], y: &[f64], w: &[f64]) -> Vec<f64> {
    let p = x[0].len() + 1;
    let a = DMatrix::from_fn(x.len(), p, |i, j| {
        let v = if j == 0 { 1.0 } else { x[i][j - 1] };
        v * w[i].sqrt()
    });
    let b = DVector::from_fn(y.len(), |i, _| y[i] * w[i].sqrt());
    let sol = a.svd(true, true).solve(&b, 1e-14).unwrap();
    sol.iter().copied().collect()
}

fn random_problem(rng: &mut ChaCha8Rng, n: usize, p: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let y = x
        .iter()
        .map(|r| {
            0.3 + r
                .iter()
                .enumerate()
                .map(|(j, v)| (j as f64 - 1.0) * v)
                .sum::<f64>()
                + rng.gen_range(-0.5..0.5)
        })
        .collect();
    (x, y)
}

#[test]
fn weighted_least_squares_matches_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.gen_range(6..40);
        let p = rng.gen_range(1..5);
        let (x, y) = random_problem(&mut rng, n, p);
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        let got = weighted_least_squares(&x, &y, &w);
        let want = wls_oracle(&x, &y, &w);
        assert!((got.intercept - want[0]).abs() <= 1e-9);
        for (g, e) in got.coefficients.iter().zip(&want[1..]) {
            assert!((g - e).abs() <= 1e-9, "{g} vs {e}");
        }
    }
}

#[test]
fn single_stage_is_plain_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (x, y) = random_problem(&mut rng, 30, 3);
    let params = BoostParams {
        stages: 1,
        ..BoostParams::default()
    };
    let model = BoostedLinear::fit(&x, &y, params).unwrap();
    assert_eq!(model.stages.len(), 1);
    let want = wls_oracle(&x, &y, &[1.0 / 30.0; 30]);
    let stage = &model.stages[0].model;
    assert!((stage.intercept - want[0]).abs() <= 1e-9);
    for (g, e) in stage.coefficients.iter().zip(&want[1..]) {
        assert!((g - e).abs() <= 1e-9);
    }
    for row in &x {
        assert_eq!(model.predict(row), stage.predict(row));
    }
}

#[test]
fn realizable_target_stops_after_one_stage() {
    let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 / 12.0]).collect();
    let y: Vec<f64> = x.iter().map(|r| 3.0 * r[0]).collect();
    let model = BoostedLinear::fit(&x, &y, BoostParams::default()).unwrap();
    assert_eq!(model.stages.len(), 1);
    let err: f64 = x
        .iter()
        .zip(&y)
        .map(|(r, t)| (model.predict(r) - t).abs())
        .sum();
    assert!(err < 1e-9);
}

#[test]
fn sample_weights_stay_a_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.gen_range(0.0..1.0)]).collect();
    let y: Vec<f64> = x.iter().map(|r| (6.0 * r[0]).sin()).collect();
    for loss in LossKind::ALL {
        for learning_rate in [0.1, 0.5, 1.0] {
            let params = BoostParams {
                loss,
                learning_rate,
                stages: 30,
            };
            let (model, trace) = BoostedLinear::fit_traced(&x, &y, params).unwrap();
            assert!(!model.stages.is_empty());
            assert!(model.stages.iter().all(|s| s.weight > 0.0));
            for w in &trace {
                assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                assert!(w.iter().all(|&v| v >= 0.0));
            }
        }
    }
}

/// 20 samples of a line with a kink and a small jump at 0.75.
fn piecewise() -> (Vec<Vec<f64>>, Vec<f64>) {
    let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 19.0]).collect();
    let y = x
        .iter()
        .map(|r| {
            let x = r[0];
            if x < 0.75 {
                x
            } else {
                x - 1.35 * (x - 0.75) + 0.15
            }
        })
        .collect();
    (x, y)
}

fn mse(model: &BoostedLinear, x: &[Vec<f64>], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(r, t)| (model.predict(r) - t).powi(2))
        .sum::<f64>()
        / y.len() as f64
}

#[test]
fn boosting_beats_one_linear_fit_on_piecewise_target() {
    let (x, y) = piecewise();
    let params = BoostParams {
        loss: LossKind::Square,
        learning_rate: 0.5,
        stages: 1,
    };
    let single = BoostedLinear::fit(&x, &y, params).unwrap();
    let boosted = BoostedLinear::fit(
        &x,
        &y,
        BoostParams {
            stages: 10,
            ..params
        },
    )
    .unwrap();
    let (s, b) = (mse(&single, &x, &y), mse(&boosted, &x, &y));
    assert!(b < s, "boosted {b} vs single {s}");
    // frozen from a reference run
    assert!((s - 0.002_472_891).abs() < 1e-8);
    assert!((b - 0.002_447_992).abs() < 1e-8);
}

#[test]
fn duplicated_sample_with_halved_weight_keeps_first_stage() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (x, y) = random_problem(&mut rng, 15, 2);
    let params = BoostParams {
        stages: 1,
        ..BoostParams::default()
    };
    let (base, _) = BoostedLinear::fit_weighted(&x, &y, &[1.0; 15], params).unwrap();
    let mut x2 = x.clone();
    let mut y2 = y.clone();
    x2.push(x[4].clone());
    y2.push(y[4]);
    let mut w2 = vec![1.0; 16];
    w2[4] = 0.5;
    w2[15] = 0.5;
    let (dup, _) = BoostedLinear::fit_weighted(&x2, &y2, &w2, params).unwrap();
    let (a, b) = (&base.stages[0].model, &dup.stages[0].model);
    assert!((a.intercept - b.intercept).abs() < 1e-10);
    for (u, v) in a.coefficients.iter().zip(&b.coefficients) {
        assert!((u - v).abs() < 1e-10);
    }
}

fn feature(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> FeatureVector {
    let signal = rng.gen_range(lo..hi);
    let mut v: [f64; FEATURE_COUNT] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
    v[1] = signal;
    v[12] = 1.0;
    FeatureVector::from_values(&v)
}

#[test]
fn grid_of_one_returns_that_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pool: BTreeMap<String, TrainingSet> = ["a", "b", "c"]
        .iter()
        .map(|l| {
            let features: Vec<FeatureVector> =
                (0..10).map(|_| feature(&mut rng, 0.0, 1.0)).collect();
            let targets = features.iter().map(|f| f.cnpmi * 2.0).collect();
            (l.to_string(), TrainingSet { features, targets })
        })
        .collect();
    let grid = Grid {
        learning_rates: vec![0.5],
        losses: vec![LossKind::Exponential],
        stages: 5,
    };
    let cv = cross_validate(&pool, &grid, 1).unwrap();
    assert_eq!(cv.best.learning_rate, 0.5);
    assert_eq!(cv.best.loss, LossKind::Exponential);
    assert_eq!(cv.folds.len(), 3);
}

#[test]
fn square_loss_selected_when_it_dominates() {
    // a step in the target: square loss concentrates the reweighting on the
    // samples around the jump
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pool: BTreeMap<String, TrainingSet> = ["am", "ro", "sv", "tl"]
        .iter()
        .map(|l| {
            let features: Vec<FeatureVector> = (0..20)
                .map(|i| {
                    let mut v = [0.0; FEATURE_COUNT];
                    v[1] = i as f64 / 19.0 + rng.gen_range(-0.01..0.01);
                    v[12] = 1.0;
                    FeatureVector::from_values(&v)
                })
                .collect();
            let targets = features
                .iter()
                .map(|f| f.cnpmi + if f.cnpmi >= 0.8 { 1.0 } else { 0.0 })
                .collect();
            (l.to_string(), TrainingSet { features, targets })
        })
        .collect();
    let cv = cross_validate(&pool, &Grid::default(), 2).unwrap();
    assert_eq!(cv.best.loss, LossKind::Square);
    assert_eq!(cv.best.learning_rate, 1.0);
    let runner_up = cv
        .scores
        .iter()
        .filter(|(p, _)| p.loss != LossKind::Square)
        .map(|(_, s)| *s)
        .fold(f64::MIN, f64::max);
    assert!(cv.best_score > runner_up);
}

#[test]
fn estimator_model_round_trip_prediction() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let features: Vec<FeatureVector> = (0..30).map(|_| feature(&mut rng, 0.0, 1.0)).collect();
    let targets: Vec<f64> = features.iter().map(|f| 0.1 + 0.5 * f.cnpmi).collect();
    let model = EstimatorModel::fit(&features, &targets, BoostParams::default()).unwrap();
    for (f, t) in features.iter().zip(&targets) {
        assert!((model.predict(f) - t).abs() < 1e-9);
    }
}
