//! Coherence estimator for topics scored against a small, dated reference.
//!
//! Features come in four groups: base scores on the small reference
//! (cardinality, CNPMI, INPMI, MTA, coverage), crosslingual gap ratios,
//! word-era statistics of the pivot-language words, and meaning drift of the
//! pivot words between the small reference and a large modern corpus. An
//! AdaBoost.R2 ensemble of linear regressors maps them to the coherence a
//! large reference would give.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::cooccur::{context_vectors, cosine_similarity, CooccurrenceIndex};
use crate::corpus::{BilingualDictionary, CorpusPair, EraLexicon, Side};
use crate::linalg::{weighted_least_squares, LinearModel};
use crate::math;
use crate::metrics::{self, MetricError, MtaMode};
use crate::seeded_rng;
use crate::topic::MultilingualTopic;

/// Smoothing added to monolingual coherence in the gap ratios.
pub const GAP_SMOOTHING: f64 = 0.001;
/// Context window for meaning-drift vectors.
pub const DRIFT_WINDOW: usize = 5;
/// Cross-validation folds over languages.
pub const CV_FOLDS: usize = 3;
/// Model document version written by [`EstimatorModel`].
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("{features} feature vectors but {targets} targets")]
    LengthMismatch { features: usize, targets: usize },
    #[error("at least two training samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("stage count must be at least 1")]
    NoStages,
    #[error("non-finite value in training data")]
    NonFinite,
    #[error("initial sample weights must be nonnegative with a positive sum")]
    InvalidWeights,
    #[error("cross-validation needs at least {CV_FOLDS} languages, got {0}")]
    TooFewLanguages(usize),
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("language {0:?} is not in the training pool")]
    UnknownLanguage(String),
}

pub const FEATURE_COUNT: usize = 15;

/// Column names in the order of [`FeatureVector::values`].
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "cardinality",
    "cnpmi",
    "inpmi",
    "mta",
    "twc_a",
    "twc_b",
    "mc_ab",
    "mc_ba",
    "icc_ab",
    "icc_ba",
    "era_mean",
    "era_std",
    "era_present",
    "drift_mean",
    "drift_std",
];

const ERA_MEAN: usize = 10;
const ERA_STD: usize = 11;

/// Feature values of one topic. Era statistics are zero and `era_present`
/// is false when none of the pivot words is in the lexicon; they are imputed
/// from the training population at fit time.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector {
    pub cardinality: f64,
    pub cnpmi: f64,
    pub inpmi: f64,
    pub mta: f64,
    pub twc_a: f64,
    pub twc_b: f64,
    pub mc_ab: f64,
    pub mc_ba: f64,
    pub icc_ab: f64,
    pub icc_ba: f64,
    pub era_mean: f64,
    pub era_std: f64,
    pub era_present: bool,
    pub drift_mean: f64,
    pub drift_std: f64,
}

impl FeatureVector {
    pub fn values(&self) -> [f64; FEATURE_COUNT] {
        [
            self.cardinality,
            self.cnpmi,
            self.inpmi,
            self.mta,
            self.twc_a,
            self.twc_b,
            self.mc_ab,
            self.mc_ba,
            self.icc_ab,
            self.icc_ba,
            self.era_mean,
            self.era_std,
            if self.era_present { 1.0 } else { 0.0 },
            self.drift_mean,
            self.drift_std,
        ]
    }

    pub fn from_values(v: &[f64; FEATURE_COUNT]) -> Self {
        FeatureVector {
            cardinality: v[0],
            cnpmi: v[1],
            inpmi: v[2],
            mta: v[3],
            twc_a: v[4],
            twc_b: v[5],
            mc_ab: v[6],
            mc_ba: v[7],
            icc_ab: v[8],
            icc_ba: v[9],
            era_mean: v[10],
            era_std: v[11],
            era_present: v[12] != 0.0,
            drift_mean: v[13],
            drift_std: v[14],
        }
    }
}

/// Mismatch coefficient: crosslingual over smoothed monolingual coherence.
pub fn mismatch_coefficient(cnpmi: f64, npmi_own: f64) -> f64 {
    finite_ratio(cnpmi, npmi_own + GAP_SMOOTHING)
}

/// Internal comparison coefficient between the two monolingual scores.
pub fn internal_comparison_coefficient(npmi_first: f64, npmi_second: f64) -> f64 {
    finite_ratio(npmi_first + GAP_SMOOTHING, npmi_second + GAP_SMOOTHING)
}

fn finite_ratio(num: f64, den: f64) -> f64 {
    let r = num / den;
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

/// Resources shared by every topic's feature extraction.
pub struct FeatureContext<'a> {
    /// Index over the small reference corpus.
    pub ref_index: &'a CooccurrenceIndex,
    pub dictionary: &'a BilingualDictionary,
    pub era: &'a EraLexicon,
    /// Language playing the high-resource pivot role within topics and the
    /// small reference.
    pub pivot: Side,
    pub mta_mode: MtaMode,
    similarity: BTreeMap<String, f64>,
}

impl<'a> FeatureContext<'a> {
    /// Precomputes pivot-word similarities between the small reference and
    /// the large pivot-language corpus (`aux_side` of `aux_corpus`) for all
    /// topic words.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ref_index: &'a CooccurrenceIndex,
        dictionary: &'a BilingualDictionary,
        era: &'a EraLexicon,
        ref_corpus: &CorpusPair,
        aux_corpus: &CorpusPair,
        pivot: Side,
        aux_side: Side,
        topics: &[MultilingualTopic],
    ) -> Self {
        let words: BTreeSet<&str> = topics
            .iter()
            .flat_map(|t| t.words(pivot).iter().map(String::as_str))
            .collect();
        let words: Vec<&str> = words.into_iter().collect();
        let similarity = word_similarities(
            ref_corpus,
            pivot,
            aux_corpus,
            aux_side,
            &words,
            DRIFT_WINDOW,
        );
        FeatureContext {
            ref_index,
            dictionary,
            era,
            pivot,
            mta_mode: MtaMode::Matching,
            similarity,
        }
    }

    /// Similarity of a pivot word's contexts in the two corpora, if computed.
    pub fn similarity(&self, word: &str) -> Option<f64> {
        self.similarity.get(word).copied()
    }
}

/// Cosine similarity of each word's context vectors in two corpora, over the
/// neighbor tokens both corpora know.
pub fn word_similarities(
    first: &CorpusPair,
    first_side: Side,
    second: &CorpusPair,
    second_side: Side,
    words: &[&str],
    window: usize,
) -> BTreeMap<String, f64> {
    let v1 = context_vectors(first, first_side, words, window);
    let v2 = context_vectors(second, second_side, words, window);
    let (vocab1, vocab2) = (first.vocab(first_side), second.vocab(second_side));
    words
        .iter()
        .map(|&w| {
            let sim = match (v1.get(w), v2.get(w)) {
                (Some(a), Some(b)) => {
                    let a = a.restricted(|t| vocab2.contains(t));
                    let b = b.restricted(|t| vocab1.contains(t));
                    cosine_similarity(&a, &b)
                }
                _ => 0.0,
            };
            (w.to_string(), sim)
        })
        .collect()
}

/// Computes the feature vector of one topic.
pub fn extract_features(
    topic: &MultilingualTopic,
    ctx: &FeatureContext<'_>,
) -> Result<FeatureVector, EstimatorError> {
    let c = topic.cardinality();
    let idx = ctx.ref_index;
    let npmi_a = metrics::topic_npmi(idx, topic.words(Side::A), c, Side::A)?;
    let npmi_b = metrics::topic_npmi(idx, topic.words(Side::B), c, Side::B)?;
    let cnpmi = metrics::cnpmi(idx, topic);
    let pivot_words = topic.words(ctx.pivot);

    let years: Vec<f64> = pivot_words
        .iter()
        .filter_map(|w| ctx.era.year(w))
        .map(f64::from)
        .collect();
    let drift: Vec<f64> = pivot_words
        .iter()
        .map(|w| ctx.similarity(w).unwrap_or(0.0))
        .collect();

    Ok(FeatureVector {
        cardinality: c as f64,
        cnpmi,
        inpmi: (npmi_a + npmi_b) / 2.0,
        mta: metrics::mta(ctx.dictionary, topic, ctx.mta_mode),
        twc_a: metrics::twc(idx, topic.words(Side::A), Side::A),
        twc_b: metrics::twc(idx, topic.words(Side::B), Side::B),
        mc_ab: mismatch_coefficient(cnpmi, npmi_a),
        mc_ba: mismatch_coefficient(cnpmi, npmi_b),
        icc_ab: internal_comparison_coefficient(npmi_a, npmi_b),
        icc_ba: internal_comparison_coefficient(npmi_b, npmi_a),
        era_mean: math::mean(&years),
        era_std: math::std_dev(&years),
        era_present: !years.is_empty(),
        drift_mean: math::mean(&drift),
        drift_std: math::std_dev(&drift),
    })
}

/// Per-sample loss used to reweight in AdaBoost.R2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LossKind {
    Linear,
    Square,
    Exponential,
}

impl LossKind {
    pub const ALL: [LossKind; 3] = [LossKind::Linear, LossKind::Square, LossKind::Exponential];

    /// Loss of a residual already scaled into [0, 1].
    pub fn apply(self, scaled: f64) -> f64 {
        match self {
            LossKind::Linear => scaled,
            LossKind::Square => scaled * scaled,
            LossKind::Exponential => 1.0 - math::exp(-scaled),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Linear => "linear",
            LossKind::Square => "square",
            LossKind::Exponential => "exponential",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        LossKind::ALL.into_iter().find(|l| l.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoostParams {
    pub loss: LossKind,
    pub learning_rate: f64,
    pub stages: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            loss: LossKind::Linear,
            learning_rate: 1.0,
            stages: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stage {
    pub model: LinearModel,
    /// `learning_rate · ln(1/β)`; always positive.
    pub weight: f64,
}

/// AdaBoost.R2 ensemble of weighted-least-squares linear regressors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoostedLinear {
    pub params: BoostParams,
    pub stages: Vec<Stage>,
}

/// Relative residual below which a stage counts as a perfect fit.
const PERFECT_FIT: f64 = 1e-12;

impl BoostedLinear {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: BoostParams) -> Result<Self, EstimatorError> {
        Self::fit_traced(x, y, params).map(|(m, _)| m)
    }

    /// Like [`fit`](Self::fit), also returning the sample weights after each
    /// reweighting step.
    pub fn fit_traced(
        x: &[Vec<f64>],
        y: &[f64],
        params: BoostParams,
    ) -> Result<(Self, Vec<Vec<f64>>), EstimatorError> {
        Self::fit_weighted(x, y, &vec![1.0; y.len()], params)
    }

    /// Boosting from nonuniform initial sample weights (normalized here).
    pub fn fit_weighted(
        x: &[Vec<f64>],
        y: &[f64],
        initial: &[f64],
        params: BoostParams,
    ) -> Result<(Self, Vec<Vec<f64>>), EstimatorError> {
        let n = y.len();
        if x.len() != n {
            return Err(EstimatorError::LengthMismatch {
                features: x.len(),
                targets: n,
            });
        }
        if n < 2 {
            return Err(EstimatorError::TooFewSamples(n));
        }
        if params.stages == 0 {
            return Err(EstimatorError::NoStages);
        }
        if y.iter().chain(x.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(EstimatorError::NonFinite);
        }
        let initial_total: f64 = initial.iter().sum();
        if initial.len() != n
            || initial.iter().any(|w| !(w.is_finite() && *w >= 0.0))
            || initial_total <= 0.0
        {
            return Err(EstimatorError::InvalidWeights);
        }
        let y_scale = y.iter().fold(1.0_f64, |m, v| m.max(math::abs(*v)));
        let lr = params.learning_rate;
        let mut weights: Vec<f64> = initial.iter().map(|w| w / initial_total).collect();
        let mut trace = Vec::new();
        let mut stages: Vec<Stage> = Vec::new();

        for _ in 0..params.stages {
            let model = weighted_least_squares(x, y, &weights);
            let errors: Vec<f64> = x
                .iter()
                .zip(y)
                .map(|(row, &t)| math::abs(t - model.predict(row)))
                .collect();
            let max_error = errors.iter().fold(0.0_f64, |m, &e| m.max(e));
            if max_error <= PERFECT_FIT * y_scale {
                stages.push(Stage { model, weight: 1.0 });
                break;
            }
            let losses: Vec<f64> = errors
                .iter()
                .map(|e| params.loss.apply(e / max_error))
                .collect();
            let avg_loss: f64 = losses.iter().zip(&weights).map(|(l, w)| l * w).sum();
            if avg_loss <= 0.0 {
                stages.push(Stage { model, weight: 1.0 });
                break;
            }
            if avg_loss >= 0.5 {
                if stages.is_empty() {
                    stages.push(Stage { model, weight: 1.0 });
                }
                break;
            }
            let beta = avg_loss / (1.0 - avg_loss);
            stages.push(Stage {
                model,
                weight: lr * math::ln(1.0 / beta),
            });
            for (w, l) in weights.iter_mut().zip(&losses) {
                *w *= math::powf(beta, lr * (1.0 - l));
            }
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            trace.push(weights.clone());
        }
        Ok((BoostedLinear { params, stages }, trace))
    }

    /// Weighted median of the stage predictions.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let preds: Vec<f64> = self.stages.iter().map(|s| s.model.predict(x)).collect();
        let weights: Vec<f64> = self.stages.iter().map(|s| s.weight).collect();
        weighted_median(&preds, &weights)
    }
}

/// Smallest value whose cumulative weight (values sorted ascending) reaches
/// half of the total weight.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    assert_eq!(values.len(), weights.len());
    assert!(!values.is_empty(), "weighted median of nothing");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let half = weights.iter().sum::<f64>() / 2.0;
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if cum >= half {
            return values[i];
        }
    }
    values[order[order.len() - 1]]
}

/// z-scoring statistics plus era imputation values from the training set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Normalization {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub era_fill_mean: f64,
    pub era_fill_std: f64,
}

impl Normalization {
    fn fit(features: &[FeatureVector]) -> Self {
        let present: Vec<&FeatureVector> = features.iter().filter(|f| f.era_present).collect();
        let (era_fill_mean, era_fill_std) = if present.is_empty() {
            (0.0, 0.0)
        } else {
            let k = present.len() as f64;
            (
                present.iter().map(|f| f.era_mean).sum::<f64>() / k,
                present.iter().map(|f| f.era_std).sum::<f64>() / k,
            )
        };
        let mut norm = Normalization {
            means: vec![0.0; FEATURE_COUNT],
            scales: vec![1.0; FEATURE_COUNT],
            era_fill_mean,
            era_fill_std,
        };
        let rows: Vec<[f64; FEATURE_COUNT]> = features.iter().map(|f| norm.impute(f)).collect();
        for j in 0..FEATURE_COUNT {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            norm.means[j] = math::mean(&col);
            let sd = math::std_dev(&col);
            norm.scales[j] = if sd > 1e-12 { sd } else { 1.0 };
        }
        norm
    }

    fn impute(&self, f: &FeatureVector) -> [f64; FEATURE_COUNT] {
        let mut v = f.values();
        if !f.era_present {
            v[ERA_MEAN] = self.era_fill_mean;
            v[ERA_STD] = self.era_fill_std;
        }
        v
    }

    pub fn transform(&self, f: &FeatureVector) -> Vec<f64> {
        self.impute(f)
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// A trained estimator: normalization plus boosted ensemble.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorModel {
    pub version: u32,
    pub feature_names: Vec<String>,
    pub normalization: Normalization,
    pub ensemble: BoostedLinear,
}

impl EstimatorModel {
    pub fn fit(
        features: &[FeatureVector],
        targets: &[f64],
        params: BoostParams,
    ) -> Result<Self, EstimatorError> {
        if features.len() != targets.len() {
            return Err(EstimatorError::LengthMismatch {
                features: features.len(),
                targets: targets.len(),
            });
        }
        let normalization = Normalization::fit(features);
        let x: Vec<Vec<f64>> = features
            .iter()
            .map(|f| normalization.transform(f))
            .collect();
        let ensemble = BoostedLinear::fit(&x, targets, params)?;
        Ok(EstimatorModel {
            version: MODEL_VERSION,
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            normalization,
            ensemble,
        })
    }

    pub fn predict(&self, feature: &FeatureVector) -> f64 {
        self.ensemble
            .predict(&self.normalization.transform(feature))
    }

    pub fn predict_all(&self, features: &[FeatureVector]) -> Vec<f64> {
        features.iter().map(|f| self.predict(f)).collect()
    }
}

/// Topics of one language pair with their high-resource target scores.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingSet {
    pub features: Vec<FeatureVector>,
    pub targets: Vec<f64>,
}

impl TrainingSet {
    fn extend(&mut self, other: &TrainingSet) {
        self.features.extend(other.features.iter().cloned());
        self.targets.extend(other.targets.iter().copied());
    }
}

/// Hyperparameter grid searched by cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub learning_rates: Vec<f64>,
    pub losses: Vec<LossKind>,
    pub stages: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            learning_rates: vec![0.1, 0.5, 1.0],
            losses: LossKind::ALL.to_vec(),
            stages: 50,
        }
    }
}

impl Grid {
    /// Grid points, learning rate major.
    pub fn points(&self) -> Vec<BoostParams> {
        self.learning_rates
            .iter()
            .flat_map(|&learning_rate| {
                self.losses.iter().map(move |&loss| BoostParams {
                    loss,
                    learning_rate,
                    stages: self.stages,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub best: BoostParams,
    pub best_score: f64,
    /// Mean held-out Pearson correlation of every grid point.
    pub scores: Vec<(BoostParams, f64)>,
    pub folds: Vec<Vec<String>>,
}

/// Splits languages into [`CV_FOLDS`] folds of whole languages: shuffled
/// with `seed`, then dealt round-robin.
pub fn language_folds(languages: &[String], seed: u64) -> Vec<Vec<String>> {
    let mut shuffled = languages.to_vec();
    shuffled.sort();
    shuffled.shuffle(&mut seeded_rng(seed));
    let mut folds = vec![Vec::new(); CV_FOLDS];
    for (i, lang) in shuffled.into_iter().enumerate() {
        folds[i % CV_FOLDS].push(lang);
    }
    folds
}

/// Three-fold cross-validation over whole languages. Each grid point is
/// scored by the mean Pearson correlation between held-out predictions and
/// targets; a fold whose correlation is undefined scores zero. Ties keep the
/// earlier grid point.
pub fn cross_validate(
    pool: &BTreeMap<String, TrainingSet>,
    grid: &Grid,
    seed: u64,
) -> Result<CvOutcome, EstimatorError> {
    if pool.len() < CV_FOLDS {
        return Err(EstimatorError::TooFewLanguages(pool.len()));
    }
    let points = grid.points();
    if points.is_empty() {
        return Err(EstimatorError::EmptyGrid);
    }
    let languages: Vec<String> = pool.keys().cloned().collect();
    let folds = language_folds(&languages, seed);
    let mut scores = Vec::with_capacity(points.len());
    for params in &points {
        let mut total = 0.0;
        for held in &folds {
            let mut train = TrainingSet::default();
            let mut test = TrainingSet::default();
            for (lang, set) in pool {
                if held.contains(lang) {
                    test.extend(set);
                } else {
                    train.extend(set);
                }
            }
            let model = EstimatorModel::fit(&train.features, &train.targets, *params)?;
            let preds = model.predict_all(&test.features);
            total += metrics::pearson(&preds, &test.targets).unwrap_or(0.0);
        }
        scores.push((*params, total / folds.len() as f64));
    }
    let (best, best_score) = scores
        .iter()
        .copied()
        .reduce(|b, s| if s.1 > b.1 { s } else { b })
        .expect("nonempty grid");
    Ok(CvOutcome {
        best,
        best_score,
        scores,
        folds,
    })
}

/// Trains on every language except `test_language` (hyperparameters chosen
/// by cross-validation on the training languages) and predicts the held-out
/// language.
pub fn leave_one_language_out(
    pool: &BTreeMap<String, TrainingSet>,
    test_language: &str,
    grid: &Grid,
    seed: u64,
) -> Result<(EstimatorModel, CvOutcome, Vec<f64>), EstimatorError> {
    let test = pool
        .get(test_language)
        .ok_or_else(|| EstimatorError::UnknownLanguage(test_language.to_string()))?;
    let train_pool: BTreeMap<String, TrainingSet> = pool
        .iter()
        .filter(|(l, _)| l.as_str() != test_language)
        .map(|(l, s)| (l.clone(), s.clone()))
        .collect();
    let cv = cross_validate(&train_pool, grid, seed)?;
    let mut train = TrainingSet::default();
    for set in train_pool.values() {
        train.extend(set);
    }
    let model = EstimatorModel::fit(&train.features, &train.targets, cv.best)?;
    let preds = model.predict_all(&test.features);
    Ok((model, cv, preds))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_examples() {
        assert!((mismatch_coefficient(0.2, 0.1) - 0.2 / 0.101).abs() < 1e-15);
        assert!((mismatch_coefficient(0.2, 0.1) - 1.980_198_019_801_98).abs() < 1e-12);
        assert_eq!(internal_comparison_coefficient(0.3, 0.3), 1.0);
        assert_eq!(mismatch_coefficient(0.5, -GAP_SMOOTHING), 0.0);
    }

    #[test]
    fn weighted_median_examples() {
        assert_eq!(weighted_median(&[0.1, 0.5, 0.9], &[1.0, 1.0, 1.0]), 0.5);
        assert_eq!(weighted_median(&[0.1, 0.9], &[1.0, 3.0]), 0.9);
        assert_eq!(weighted_median(&[0.9, 0.1], &[3.0, 1.0]), 0.9);
        assert_eq!(weighted_median(&[0.4], &[2.0]), 0.4);
    }

    #[test]
    fn loss_kinds() {
        assert_eq!(LossKind::Linear.apply(0.5), 0.5);
        assert_eq!(LossKind::Square.apply(0.5), 0.25);
        assert!((LossKind::Exponential.apply(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(LossKind::parse("square"), Some(LossKind::Square));
        assert_eq!(LossKind::parse("huber"), None);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let x = vec![vec![1.0], vec![2.0]];
        let p = BoostParams::default();
        assert!(matches!(
            BoostedLinear::fit(&x, &[1.0], p),
            Err(EstimatorError::LengthMismatch { .. })
        ));
        assert!(matches!(
            BoostedLinear::fit(&x[..1], &[1.0], p),
            Err(EstimatorError::TooFewSamples(1))
        ));
        assert!(matches!(
            BoostedLinear::fit(&x, &[1.0, 2.0], BoostParams { stages: 0, ..p }),
            Err(EstimatorError::NoStages)
        ));
        assert!(matches!(
            BoostedLinear::fit(&x, &[1.0, f64::NAN], p),
            Err(EstimatorError::NonFinite)
        ));
    }

    #[test]
    fn constant_targets_give_constant_model() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let m = BoostedLinear::fit(&x, &[0.7; 5], BoostParams::default()).unwrap();
        assert_eq!(m.stages.len(), 1);
        assert!((m.predict(&[100.0]) - 0.7).abs() < 1e-9);
    }

    #[test]
    fn folds_of_four_languages() {
        let langs: Vec<String> = ["am", "ro", "sv", "tl"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let folds = language_folds(&langs, 11);
        let mut sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2, 1, 1]);
        sizes.sort();
        let mut all: Vec<String> = folds.into_iter().flatten().collect();
        all.sort();
        assert_eq!(all, langs);
    }

    #[test]
    fn cross_validation_needs_three_languages() {
        let mut pool = BTreeMap::new();
        pool.insert("a".to_string(), TrainingSet::default());
        pool.insert("b".to_string(), TrainingSet::default());
        assert!(matches!(
            cross_validate(&pool, &Grid::default(), 0),
            Err(EstimatorError::TooFewLanguages(2))
        ));
    }

    #[test]
    fn feature_values_round_trip() {
        let v: [f64; FEATURE_COUNT] = core::array::from_fn(|i| i as f64 + 0.5);
        let mut v2 = v;
        v2[12] = 1.0;
        assert_eq!(FeatureVector::from_values(&v2).values(), v2);
    }
}
