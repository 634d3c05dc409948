//! Experiment recipes: the cardinality, link-fraction and reference-size
//! sweeps, the coherence estimator pipeline and crosslingual classification.

use std::collections::BTreeMap;

use cnpmi_core::downstream::{self, DownstreamError, LabeledThetaSet};
use cnpmi_core::estimator::{
    self, extract_features, CvOutcome, EstimatorError, FeatureContext, FeatureVector, Grid,
    TrainingSet,
};
use cnpmi_core::metrics::{self, cnpmi, mta, MetricError};
use cnpmi_core::plm::PlmError;
use cnpmi_core::{
    seeded_rng, BilingualDictionary, CooccurrenceIndex, CorpusError, CorpusPair, EraLexicon,
    EstimatorModel, MtaMode, MultilingualTopic, PlmConfig, Restriction, Side,
};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use thiserror::Error;

use crate::parallel;
use crate::synthetic::World;

pub const CARDINALITIES: [usize; 5] = [10, 20, 30, 40, 50];
pub const LINK_FRACTIONS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
pub const REFERENCE_FRACTIONS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
/// Sweeps score the top this many words per language.
pub const SWEEP_CARDINALITY: usize = 10;
/// Reference-size deviations above this are flagged as unstable.
pub const STABILITY_TOLERANCE: f64 = 0.02;
/// Categories kept for classification.
pub const CLASSIFY_LABELS: usize = 7;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("topic {topic} has {available} words per language, {requested} needed")]
    TooShallow {
        topic: usize,
        available: usize,
        requested: usize,
    },
    #[error("no topics to score")]
    NoTopics,
    #[error("cardinality must be at least 1")]
    ZeroCardinality,
    #[error("fraction {0} is outside (0, 1]")]
    Fraction(f64),
    #[error("language {0} has no high-resource reference to train on")]
    NoTarget(String),
    #[error(transparent)]
    Plm(#[from] PlmError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Downstream(#[from] DownstreamError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Mean crosslingual NPMI of the topics cut to `c` words.
pub fn mean_cnpmi(
    index: &CooccurrenceIndex,
    topics: &[MultilingualTopic],
    c: usize,
) -> Result<f64> {
    check_depth(topics, c)?;
    let scores: Vec<f64> = topics
        .par_iter()
        .map(|t| cnpmi(index, &t.truncated(c).expect("depth checked")))
        .collect();
    Ok(mean(&scores))
}

fn check_depth(topics: &[MultilingualTopic], c: usize) -> Result<()> {
    if c == 0 {
        return Err(ExperimentError::ZeroCardinality);
    }
    if topics.is_empty() {
        return Err(ExperimentError::NoTopics);
    }
    match topics.iter().position(|t| t.cardinality() < c) {
        Some(topic) => Err(ExperimentError::TooShallow {
            topic,
            available: topics[topic].cardinality(),
            requested: c,
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityRow {
    pub cardinality: usize,
    pub metric: &'static str,
    pub mean: f64,
}

/// Mean cnpmi, and with a dictionary normalized and raw-count mta, at every
/// cardinality.
pub fn cardinality_sweep(
    index: &CooccurrenceIndex,
    topics: &[MultilingualTopic],
    dict: Option<&BilingualDictionary>,
    cardinalities: &[usize],
) -> Result<Vec<CardinalityRow>> {
    if cardinalities.contains(&0) {
        return Err(ExperimentError::ZeroCardinality);
    }
    if let Some(&max) = cardinalities.iter().max() {
        check_depth(topics, max)?;
    }
    let mut rows = Vec::new();
    for &c in cardinalities {
        let cut: Vec<MultilingualTopic> = topics
            .iter()
            .map(|t| t.truncated(c).expect("depth checked"))
            .collect();
        let scores: Vec<f64> = cut.par_iter().map(|t| cnpmi(index, t)).collect();
        rows.push(CardinalityRow {
            cardinality: c,
            metric: "cnpmi",
            mean: mean(&scores),
        });
        if let Some(d) = dict {
            for (metric, mode) in [("mta", MtaMode::Matching), ("mta_raw", MtaMode::RawCount)] {
                let scores: Vec<f64> = cut.iter().map(|t| mta(d, t, mode)).collect();
                rows.push(CardinalityRow {
                    cardinality: c,
                    metric,
                    mean: mean(&scores),
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkRow {
    pub fraction: f64,
    pub mean_cnpmi: f64,
    pub log_likelihood: f64,
}

/// Trains one model per link fraction and scores its top-`c` topics.
pub fn link_sweep(
    train: &CorpusPair,
    reference: &CooccurrenceIndex,
    config: &PlmConfig,
    fractions: &[f64],
    c: usize,
) -> Result<Vec<LinkRow>> {
    fractions
        .par_iter()
        .map(|&fraction| {
            let cfg = PlmConfig {
                link_fraction: fraction,
                ..config.clone()
            };
            let model = parallel::train(train, &cfg)?;
            let topics = model.topics(c)?;
            Ok(LinkRow {
                fraction,
                mean_cnpmi: mean_cnpmi(reference, &topics, c)?,
                log_likelihood: model.log_likelihood,
            })
        })
        .collect()
}

/// Sorted indices of a seeded `fraction` sample of `n` documents. Samples
/// for different fractions are nested.
pub fn sample_documents(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(ExperimentError::Fraction(fraction));
    }
    let mut order: Vec<usize> = (0..n).collect();
    if fraction < 1.0 {
        order.shuffle(&mut seeded_rng(seed));
        order.truncate(((fraction * n as f64).round() as usize).max(1));
        order.sort_unstable();
    }
    Ok(order)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub fraction: f64,
    pub documents: usize,
    pub mean_cnpmi: f64,
    /// Absolute difference from the full-reference score.
    pub deviation: f64,
    pub unstable: bool,
}

/// Scores the topics against seeded subsamples of the reference.
pub fn reference_size_sweep(
    reference: &CorpusPair,
    topics: &[MultilingualTopic],
    fractions: &[f64],
    seed: u64,
    c: usize,
) -> Result<Vec<ReferenceRow>> {
    check_depth(topics, c)?;
    let cut: Vec<MultilingualTopic> = topics
        .iter()
        .map(|t| t.truncated(c).expect("depth checked"))
        .collect();
    let restrict = Restriction::from_topics(&cut);
    let score = |fraction: f64| -> Result<(usize, f64)> {
        let docs = sample_documents(reference.doc_count(), fraction, seed)?;
        let index = if docs.len() == reference.doc_count() {
            parallel::build_index(reference, Some(&restrict))
        } else {
            parallel::build_index(&reference.subset(&docs)?, Some(&restrict))
        };
        Ok((docs.len(), mean_cnpmi(&index, &cut, c)?))
    };
    let (_, full) = score(1.0)?;
    fractions
        .par_iter()
        .map(|&f| {
            let (documents, m) = score(f)?;
            let deviation = (m - full).abs();
            Ok(ReferenceRow {
                fraction: f,
                documents,
                mean_cnpmi: m,
                deviation,
                unstable: deviation > STABILITY_TOLERANCE,
            })
        })
        .collect()
}

/// Inputs for one language pair of the estimator. The pivot language is
/// side A of every corpus.
#[derive(Debug, Clone)]
pub struct LanguageData {
    pub language: String,
    /// Small reference the estimator corrects.
    pub reference: CorpusPair,
    /// Large reference whose cnpmi is the training target.
    pub target_reference: Option<CorpusPair>,
    pub dictionary: BilingualDictionary,
    pub topics: Vec<MultilingualTopic>,
}

/// Features, small-reference cnpmi and (when available) target cnpmi of one
/// language's topics.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageFeatures {
    pub language: String,
    pub features: Vec<FeatureVector>,
    pub raw: Vec<f64>,
    pub targets: Option<Vec<f64>>,
}

pub fn language_features(
    data: &LanguageData,
    era: &EraLexicon,
    aux: &CorpusPair,
    c: usize,
) -> Result<LanguageFeatures> {
    check_depth(&data.topics, c)?;
    let topics: Vec<MultilingualTopic> = data
        .topics
        .iter()
        .map(|t| t.truncated(c).expect("depth checked"))
        .collect();
    let index = parallel::build_index(&data.reference, None);
    let ctx = FeatureContext::new(
        &index,
        &data.dictionary,
        era,
        &data.reference,
        aux,
        Side::A,
        Side::A,
        &topics,
    );
    let features = topics
        .par_iter()
        .map(|t| extract_features(t, &ctx))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let raw = features.iter().map(|f| f.cnpmi).collect();
    let targets = data.target_reference.as_ref().map(|r| {
        let restrict = Restriction::from_topics(&topics);
        let target = parallel::build_index(r, Some(&restrict));
        topics.par_iter().map(|t| cnpmi(&target, t)).collect()
    });
    Ok(LanguageFeatures {
        language: data.language.clone(),
        features,
        raw,
        targets,
    })
}

pub fn training_pool(langs: &[LanguageFeatures]) -> Result<BTreeMap<String, TrainingSet>> {
    langs
        .iter()
        .map(|l| {
            let targets = l
                .targets
                .clone()
                .ok_or_else(|| ExperimentError::NoTarget(l.language.clone()))?;
            Ok((
                l.language.clone(),
                TrainingSet {
                    features: l.features.clone(),
                    targets,
                },
            ))
        })
        .collect()
}

/// Picks hyperparameters by cross-validation over languages, then fits on
/// the whole pool.
pub fn train_estimator(
    pool: &BTreeMap<String, TrainingSet>,
    grid: &Grid,
    seed: u64,
) -> Result<(EstimatorModel, CvOutcome)> {
    let cv = estimator::cross_validate(pool, grid, seed)?;
    let mut features = Vec::new();
    let mut targets = Vec::new();
    for set in pool.values() {
        features.extend(set.features.iter().cloned());
        targets.extend(set.targets.iter().copied());
    }
    let model = EstimatorModel::fit(&features, &targets, cv.best)?;
    Ok((model, cv))
}

/// Held-out comparison of estimated and raw small-reference scores.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldOut {
    pub language: String,
    pub cv: CvOutcome,
    pub estimates: Vec<f64>,
    pub raw: Vec<f64>,
    pub targets: Vec<f64>,
    pub r_estimated: f64,
    pub r_raw: f64,
}

/// Trains on every language but `test`, then correlates estimates and raw
/// scores of `test` with its targets.
pub fn held_out_language(
    langs: &[LanguageFeatures],
    test: &str,
    grid: &Grid,
    seed: u64,
) -> Result<HeldOut> {
    let pool = training_pool(langs)?;
    let (_, cv, estimates) = estimator::leave_one_language_out(&pool, test, grid, seed)?;
    let held = langs
        .iter()
        .find(|l| l.language == test)
        .expect("language present in pool");
    let targets = pool[test].targets.clone();
    Ok(HeldOut {
        language: test.to_string(),
        r_estimated: metrics::pearson(&estimates, &targets)?,
        r_raw: metrics::pearson(&held.raw, &targets)?,
        cv,
        estimates,
        raw: held.raw.clone(),
        targets,
    })
}

/// Narrow references as the small side, broad ones as targets.
pub fn world_languages(world: &World) -> Vec<LanguageData> {
    world
        .languages
        .iter()
        .map(|l| LanguageData {
            language: l.language.clone(),
            reference: l.narrow.clone(),
            target_reference: Some(l.broad.clone()),
            dictionary: l.dictionary.clone(),
            topics: l.topics.clone(),
        })
        .collect()
}

/// One direction of crosslingual classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub direction: String,
    pub f1: f64,
    /// Fewer categories than requested existed.
    pub reduced: bool,
    pub train_docs: usize,
    pub test_docs: usize,
}

fn transfer(
    direction: String,
    train: (&[Vec<f64>], &[Vec<String>]),
    test: (&[Vec<f64>], &[Vec<String>]),
    labels: usize,
    regularization: f64,
) -> Result<Transfer> {
    let selection = downstream::select_labels(train.1, labels)?;
    let train_set = LabeledThetaSet::new(train.0, train.1, &selection.labels)?;
    let test_set = LabeledThetaSet::new(test.0, test.1, &selection.labels)?;
    let classifier = downstream::train_classifier(&train_set, regularization)?;
    Ok(Transfer {
        direction,
        f1: downstream::evaluate_f1(&classifier, &test_set)?,
        reduced: selection.reduced,
        train_docs: train_set.len(),
        test_docs: test_set.len(),
    })
}

/// Trains on language A's θ and tests on language B's, and the reverse.
#[allow(clippy::too_many_arguments)]
pub fn classify_both_ways(
    lang_a: &str,
    lang_b: &str,
    theta_a: &[Vec<f64>],
    labels_a: &[Vec<String>],
    theta_b: &[Vec<f64>],
    labels_b: &[Vec<String>],
    labels: usize,
    regularization: f64,
) -> Result<[Transfer; 2]> {
    let a = (theta_a, labels_a);
    let b = (theta_b, labels_b);
    Ok([
        transfer(format!("{lang_a}->{lang_b}"), a, b, labels, regularization)?,
        transfer(format!("{lang_b}->{lang_a}"), b, a, labels, regularization)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_nested_and_sorted() {
        let small = sample_documents(100, 0.2, 3).unwrap();
        let large = sample_documents(100, 0.6, 3).unwrap();
        assert_eq!(small.len(), 20);
        assert_eq!(large.len(), 60);
        assert!(small.windows(2).all(|w| w[0] < w[1]));
        assert!(small.iter().all(|d| large.contains(d)));
        assert_eq!(
            sample_documents(7, 1.0, 3).unwrap(),
            (0..7).collect::<Vec<_>>()
        );
        assert!(sample_documents(7, 0.0, 3).is_err());
    }

    #[test]
    fn shallow_topics_are_named() {
        let text = "a b\nb c";
        let corpus = CorpusPair::from_texts("x", "y", text, text, 1.0).unwrap();
        let index = CooccurrenceIndex::build(&corpus, None);
        let topics = vec![
            MultilingualTopic::new(["a", "b", "c"], ["a", "b", "c"]).unwrap(),
            MultilingualTopic::new(["a", "b"], ["a", "b"]).unwrap(),
        ];
        let err = cardinality_sweep(&index, &topics, None, &[2, 3]).unwrap_err();
        assert!(matches!(
            err,
            ExperimentError::TooShallow {
                topic: 1,
                available: 2,
                requested: 3
            }
        ));
        let rows = cardinality_sweep(&index, &topics, None, &[2]).unwrap();
        assert_eq!(rows.len(), 1);
        let err = cardinality_sweep(&index, &topics, None, &[0, 2]).unwrap_err();
        assert!(matches!(err, ExperimentError::ZeroCardinality));
        assert!(matches!(
            mean_cnpmi(&index, &topics, 0),
            Err(ExperimentError::ZeroCardinality)
        ));
    }
}
