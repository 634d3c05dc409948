//! Crosslingual document classification on document-topic features.
//!
//! A one-vs-rest logistic model is trained on one language's θ rows and
//! evaluated with micro-averaged F1 on the other language's rows.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math;

/// Gradient-norm tolerance for classifier training.
pub const GRADIENT_TOLERANCE: f64 = 1e-6;
pub const MAX_EPOCHS: usize = 1000;
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DownstreamError {
    #[error("label count must be at least 1")]
    NoLabels,
    #[error("{thetas} theta rows but {labels} label sets")]
    LengthMismatch { thetas: usize, labels: usize },
    #[error("theta row {row} has dimension {found}, expected {expected}")]
    Dimension {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("theta row {0} does not sum to 1")]
    NotADistribution(usize),
    #[error("set is empty")]
    Empty,
    #[error("label universes differ between model and test set")]
    LabelMismatch,
}

/// Result of [`select_labels`]: the universe and whether fewer than the
/// requested number of categories existed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSelection {
    pub labels: Vec<String>,
    pub reduced: bool,
}

/// The `l` categories with the highest document frequency, ties broken
/// lexicographically.
pub fn select_labels<S: AsRef<str>>(
    raw: &[Vec<S>],
    l: usize,
) -> Result<LabelSelection, DownstreamError> {
    if l == 0 {
        return Err(DownstreamError::NoLabels);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in raw {
        let unique: BTreeSet<&str> = doc.iter().map(AsRef::as_ref).collect();
        for c in unique {
            *df.entry(c).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = df.into_iter().collect();
    // stable sort keeps lexicographic order among equal counts
    ranked.sort_by_key(|&(_, n)| core::cmp::Reverse(n));
    let reduced = ranked.len() < l;
    Ok(LabelSelection {
        labels: ranked.into_iter().take(l).map(|(c, _)| c.into()).collect(),
        reduced,
    })
}

/// Document-topic features with label sets restricted to a universe.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledThetaSet {
    dim: usize,
    universe: Vec<String>,
    thetas: Vec<Vec<f64>>,
    labels: Vec<BTreeSet<usize>>,
    doc_indices: Vec<usize>,
}

impl LabeledThetaSet {
    /// Keeps documents carrying at least one label from `universe`. Labels
    /// outside the universe are discarded.
    pub fn new<S: AsRef<str>>(
        thetas: &[Vec<f64>],
        raw_labels: &[Vec<S>],
        universe: &[String],
    ) -> Result<Self, DownstreamError> {
        if thetas.len() != raw_labels.len() {
            return Err(DownstreamError::LengthMismatch {
                thetas: thetas.len(),
                labels: raw_labels.len(),
            });
        }
        let dim = thetas.first().map_or(0, Vec::len);
        let position: BTreeMap<&str, usize> = universe
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut set = LabeledThetaSet {
            dim,
            universe: universe.to_vec(),
            thetas: Vec::new(),
            labels: Vec::new(),
            doc_indices: Vec::new(),
        };
        for (row, (theta, raw)) in thetas.iter().zip(raw_labels).enumerate() {
            if theta.len() != dim {
                return Err(DownstreamError::Dimension {
                    row,
                    expected: dim,
                    found: theta.len(),
                });
            }
            if math::abs(theta.iter().sum::<f64>() - 1.0) > 1e-9 {
                return Err(DownstreamError::NotADistribution(row));
            }
            let labels: BTreeSet<usize> = raw
                .iter()
                .filter_map(|c| position.get(c.as_ref()).copied())
                .collect();
            if labels.is_empty() {
                continue;
            }
            set.thetas.push(theta.clone());
            set.labels.push(labels);
            set.doc_indices.push(row);
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn thetas(&self) -> &[Vec<f64>] {
        &self.thetas
    }

    pub fn labels(&self) -> &[BTreeSet<usize>] {
        &self.labels
    }

    /// Original row of each kept document.
    pub fn doc_indices(&self) -> &[usize] {
        &self.doc_indices
    }

    fn column(&self, label: usize) -> Vec<f64> {
        self.labels
            .iter()
            .map(|s| if s.contains(&label) { 1.0 } else { 0.0 })
            .collect()
    }
}

/// Logistic model for one label: `σ(bias + w·θ)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinaryModel {
    pub bias: f64,
    pub weights: Vec<f64>,
    pub epochs: usize,
}

impl BinaryModel {
    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.score(x))
    }

    fn score(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + math::exp(-z))
    } else {
        let e = math::exp(z);
        e / (1.0 + e)
    }
}

/// One binary model per label in the universe.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Classifier {
    pub universe: Vec<String>,
    pub models: Vec<BinaryModel>,
}

impl Classifier {
    pub fn predict(&self, x: &[f64]) -> BTreeSet<usize> {
        self.models
            .iter()
            .enumerate()
            .filter(|(_, m)| m.probability(x) >= DECISION_THRESHOLD)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Minimizes mean logistic loss plus `regularization/2 · ‖w‖²` (bias not
/// penalized) by full-batch gradient descent.
pub fn train_binary(x: &[Vec<f64>], y: &[f64], regularization: f64) -> BinaryModel {
    let n = x.len();
    let dim = x.first().map_or(0, Vec::len);
    let positives = y.iter().filter(|&&v| v > 0.5).count();
    if positives == 0 || positives == n {
        // constant column: a large fixed bias saturates the prediction
        let bias = if positives == 0 { -30.0 } else { 30.0 };
        return BinaryModel {
            bias,
            weights: vec![0.0; dim],
            epochs: 0,
        };
    }
    let max_sq = x
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>())
        .fold(0.0_f64, f64::max);
    // inverse Lipschitz constant of the gradient
    let step = 1.0 / ((max_sq + 1.0) / 4.0 + regularization);
    let mut model = BinaryModel {
        bias: 0.0,
        weights: vec![0.0; dim],
        epochs: 0,
    };
    let mut grad_w = vec![0.0; dim];
    for epoch in 0..MAX_EPOCHS {
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (row, &t) in x.iter().zip(y) {
            let r = sigmoid(model.score(row)) - t;
            grad_b += r;
            for (g, v) in grad_w.iter_mut().zip(row) {
                *g += r * v;
            }
        }
        grad_b /= n as f64;
        for (g, w) in grad_w.iter_mut().zip(&model.weights) {
            *g = *g / n as f64 + regularization * w;
        }
        let norm = math::sqrt(grad_b * grad_b + grad_w.iter().map(|g| g * g).sum::<f64>());
        model.epochs = epoch;
        if norm < GRADIENT_TOLERANCE {
            return model;
        }
        model.bias -= step * grad_b;
        for (w, g) in model.weights.iter_mut().zip(&grad_w) {
            *w -= step * g;
        }
    }
    model.epochs = MAX_EPOCHS;
    model
}

pub fn train_classifier(
    train: &LabeledThetaSet,
    regularization: f64,
) -> Result<Classifier, DownstreamError> {
    if train.is_empty() {
        return Err(DownstreamError::Empty);
    }
    let models = (0..train.universe.len())
        .map(|l| train_binary(&train.thetas, &train.column(l), regularization))
        .collect();
    Ok(Classifier {
        universe: train.universe.clone(),
        models,
    })
}

/// Counts of (document, label) decisions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Micro F1; defined as 1 when there is nothing to predict and nothing
    /// was predicted.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            1.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }

    pub fn add(&mut self, truth: &BTreeSet<usize>, predicted: &BTreeSet<usize>) {
        let tp = truth.intersection(predicted).count();
        self.tp += tp;
        self.fp += predicted.len() - tp;
        self.fn_ += truth.len() - tp;
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn evaluate_f1(
    classifier: &Classifier,
    test: &LabeledThetaSet,
) -> Result<f64, DownstreamError> {
    evaluate(classifier, test).map(|c| c.f1())
}

pub fn evaluate(
    classifier: &Classifier,
    test: &LabeledThetaSet,
) -> Result<Confusion, DownstreamError> {
    if test.is_empty() {
        return Err(DownstreamError::Empty);
    }
    if classifier.universe != test.universe {
        return Err(DownstreamError::LabelMismatch);
    }
    let dim = classifier
        .models
        .first()
        .map_or(test.dim, |m| m.weights.len());
    if dim != test.dim {
        return Err(DownstreamError::Dimension {
            row: 0,
            expected: dim,
            found: test.dim,
        });
    }
    let mut c = Confusion::default();
    for (x, truth) in test.thetas.iter().zip(&test.labels) {
        c.add(truth, &classifier.predict(x));
    }
    Ok(c)
}
