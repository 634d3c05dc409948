use cnpmi_core::downstream::{
    evaluate, evaluate_f1, select_labels, train_classifier, LabeledThetaSet,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_theta(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

fn universe() -> Vec<String> {
    vec!["x".to_string(), "y".to_string()]
}

#[test]
fn shuffled_labels_score_like_chance() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 400;
    let thetas: Vec<Vec<f64>> = (0..n).map(|_| random_theta(&mut rng, 8)).collect();
    // labels tied to the dominant topic, then shuffled to destroy the signal
    let mut labels: Vec<Vec<&str>> = thetas
        .iter()
        .map(|t| {
            if t[0] + t[1] + t[2] + t[3] > 0.5 {
                vec!["x"]
            } else {
                vec!["y"]
            }
        })
        .collect();
    labels.shuffle(&mut rng);
    let (train_t, test_t) = thetas.split_at(n / 2);
    let (train_l, test_l) = labels.split_at(n / 2);
    let train = LabeledThetaSet::new(train_t, train_l, &universe()).unwrap();
    let test = LabeledThetaSet::new(test_t, test_l, &universe()).unwrap();
    let clf = train_classifier(&train, 1e-3).unwrap();
    let c = evaluate(&clf, &test).unwrap();

    // with predictions independent of the truth, each predicted positive is
    // a hit with probability equal to the positive rate
    let decisions = (test.len() * 2) as f64;
    let rate = (c.tp + c.fn_) as f64 / decisions;
    let predicted = (c.tp + c.fp) as f64;
    let expected = predicted * rate;
    let sd = (predicted * rate * (1.0 - rate)).sqrt();
    assert!(
        (c.tp as f64 - expected).abs() <= 3.0 * sd + 1.0,
        "tp {} expected {expected} ± {sd}",
        c.tp
    );
}

#[test]
fn signal_transfers_to_held_out_documents() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let thetas: Vec<Vec<f64>> = (0..300).map(|_| random_theta(&mut rng, 5)).collect();
    let labels: Vec<Vec<&str>> = thetas
        .iter()
        .map(|t| if t[0] > t[1] { vec!["x"] } else { vec!["y"] })
        .collect();
    let train = LabeledThetaSet::new(&thetas[..200], &labels[..200], &universe()).unwrap();
    let test = LabeledThetaSet::new(&thetas[200..], &labels[200..], &universe()).unwrap();
    let clf = train_classifier(&train, 1e-4).unwrap();
    assert!(evaluate_f1(&clf, &test).unwrap() > 0.8);
}

#[test]
fn duplicated_training_set_gives_same_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let thetas: Vec<Vec<f64>> = (0..60).map(|_| random_theta(&mut rng, 4)).collect();
    let labels: Vec<Vec<&str>> = (0..60)
        .map(|i| {
            if rng.gen_bool(0.4) || i == 0 {
                vec!["x"]
            } else {
                vec!["y"]
            }
        })
        .collect();
    let once = LabeledThetaSet::new(&thetas, &labels, &universe()).unwrap();
    let t2: Vec<Vec<f64>> = thetas.iter().chain(&thetas).cloned().collect();
    let l2: Vec<Vec<&str>> = labels.iter().chain(&labels).cloned().collect();
    let twice = LabeledThetaSet::new(&t2, &l2, &universe()).unwrap();
    let a = train_classifier(&once, 1e-2).unwrap();
    let b = train_classifier(&twice, 1e-2).unwrap();
    for (ma, mb) in a.models.iter().zip(&b.models) {
        assert!((ma.bias - mb.bias).abs() < 1e-12);
        for (u, v) in ma.weights.iter().zip(&mb.weights) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}

#[test]
fn f1_ignores_document_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let thetas: Vec<Vec<f64>> = (0..80).map(|_| random_theta(&mut rng, 3)).collect();
    let labels: Vec<Vec<&str>> = thetas
        .iter()
        .map(|t| match (t[0] > 0.3, t[2] > 0.4) {
            (true, true) => vec!["x", "y"],
            (true, false) => vec!["x"],
            _ => vec!["y"],
        })
        .collect();
    let set = LabeledThetaSet::new(&thetas, &labels, &universe()).unwrap();
    let clf = train_classifier(&set, 1e-3).unwrap();
    let f1 = evaluate_f1(&clf, &set).unwrap();
    let mut order: Vec<usize> = (0..80).collect();
    order.shuffle(&mut rng);
    let t2: Vec<Vec<f64>> = order.iter().map(|&i| thetas[i].clone()).collect();
    let l2: Vec<Vec<&str>> = order.iter().map(|&i| labels[i].clone()).collect();
    let shuffled = LabeledThetaSet::new(&t2, &l2, &universe()).unwrap();
    assert_eq!(evaluate_f1(&clf, &shuffled).unwrap(), f1);
}

#[test]
fn seven_most_frequent_categories() {
    let cats = [
        "art", "bio", "chem", "design", "econ", "film", "geo", "hist", "ink",
    ];
    let raw: Vec<Vec<&str>> = (0..cats.len())
        .flat_map(|i| std::iter::repeat_n(vec![cats[i]], cats.len() - i))
        .collect();
    let sel = select_labels(&raw, 7).unwrap();
    assert_eq!(sel.labels, &cats[..7]);
    assert!(!sel.reduced);
}
