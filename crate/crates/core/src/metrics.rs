//! Coherence and consistency metrics.
//!
//! Pair scores are normalized PMI, `ln(p₁₂ / (p₁ p₂)) / −ln p₁₂`, so that `+1`
//! is perfect co-occurrence and every topic-level score is a plain mean.
//! A pair that never co-occurs (or involves a word absent from the reference)
//! scores exactly zero.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::cooccur::{CooccurrenceIndex, NpmiMode};
use crate::corpus::{BilingualDictionary, Side};
use crate::math;
use crate::topic::MultilingualTopic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("at least two words are needed for pairwise coherence, got cardinality {0}")]
    Degenerate(usize),
    #[error("cardinality {requested} exceeds the {available} words available")]
    InsufficientWords { requested: usize, available: usize },
    #[error("sequences differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least two observations, got {0}")]
    TooFewObservations(usize),
    #[error("correlation is undefined when one series has zero variance")]
    ZeroVariance,
}

/// Metric names, ordered as they are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Metric {
    Cnpmi,
    Inpmi,
    Mta,
    NpmiA,
    NpmiB,
    TwcA,
    TwcB,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Cnpmi,
        Metric::Inpmi,
        Metric::Mta,
        Metric::NpmiA,
        Metric::NpmiB,
        Metric::TwcA,
        Metric::TwcB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Cnpmi => "cnpmi",
            Metric::Inpmi => "inpmi",
            Metric::Mta => "mta",
            Metric::NpmiA => "npmi_a",
            Metric::NpmiB => "npmi_b",
            Metric::TwcA => "twc_a",
            Metric::TwcB => "twc_b",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TopicScore {
    pub metric: Metric,
    pub value: f64,
}

/// How matching translation accuracy counts dictionary hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MtaMode {
    /// Maximum bipartite matching between the two word lists, divided by C.
    #[default]
    Matching,
    /// Every dictionary pair among the topic words, not normalized.
    RawCount,
}

/// NPMI of two words from a reference index.
pub fn npmi_pair(index: &CooccurrenceIndex, first: &str, second: &str, mode: NpmiMode) -> f64 {
    let p = index.probabilities(mode, first, second);
    npmi_from_probabilities(p.p_first, p.p_second, p.p_joint)
}

/// NPMI from marginal and joint probabilities with the zero conventions.
pub fn npmi_from_probabilities(p_first: f64, p_second: f64, p_joint: f64) -> f64 {
    if p_joint <= 0.0 || p_first <= 0.0 || p_second <= 0.0 || p_joint >= 1.0 {
        return 0.0;
    }
    let ln_joint = math::ln(p_joint);
    let pmi = ln_joint - math::ln(p_first) - math::ln(p_second);
    (pmi / -ln_joint).clamp(-1.0, 1.0)
}

/// Mean NPMI over all unordered pairs of the top `c` words of one language.
pub fn topic_npmi<S: AsRef<str>>(
    index: &CooccurrenceIndex,
    words: &[S],
    c: usize,
    side: Side,
) -> Result<f64, MetricError> {
    if c < 2 {
        return Err(MetricError::Degenerate(c));
    }
    if c > words.len() {
        return Err(MetricError::InsufficientWords {
            requested: c,
            available: words.len(),
        });
    }
    let mode = match side {
        Side::A => NpmiMode::MonoA,
        Side::B => NpmiMode::MonoB,
    };
    let words = &words[..c];
    let mut sum = 0.0;
    for (i, wi) in words.iter().enumerate() {
        for wj in &words[i + 1..] {
            sum += npmi_pair(index, wi.as_ref(), wj.as_ref(), mode);
        }
    }
    Ok(sum / (c * (c - 1) / 2) as f64)
}

/// Mean of the two monolingual topic NPMI scores.
pub fn inpmi(index: &CooccurrenceIndex, topic: &MultilingualTopic) -> Result<f64, MetricError> {
    let c = topic.cardinality();
    let a = topic_npmi(index, topic.words(Side::A), c, Side::A)?;
    let b = topic_npmi(index, topic.words(Side::B), c, Side::B)?;
    Ok((a + b) / 2.0)
}

/// Crosslingual NPMI: mean over all C² ordered bilingual pairs.
pub fn cnpmi(index: &CooccurrenceIndex, topic: &MultilingualTopic) -> f64 {
    let c = topic.cardinality();
    let mut sum = 0.0;
    for wa in topic.words(Side::A) {
        for wb in topic.words(Side::B) {
            sum += npmi_pair(index, wa, wb, NpmiMode::Cross);
        }
    }
    sum / (c * c) as f64
}

/// CNPMI for more than two languages: the mean over every language pair,
/// each scored against its own paired reference.
pub fn cnpmi_multilingual(pairs: &[(&CooccurrenceIndex, &MultilingualTopic)]) -> f64 {
    let scores: Vec<f64> = pairs.iter().map(|(idx, t)| cnpmi(idx, t)).collect();
    math::mean(&scores)
}

/// Matching translation accuracy.
pub fn mta(dict: &BilingualDictionary, topic: &MultilingualTopic, mode: MtaMode) -> f64 {
    let wa = topic.words(Side::A);
    let wb = topic.words(Side::B);
    let adjacency: Vec<Vec<usize>> = wa
        .iter()
        .map(|a| {
            wb.iter()
                .enumerate()
                .filter(|(_, b)| dict.contains(a, b))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    match mode {
        MtaMode::RawCount => adjacency.iter().map(Vec::len).sum::<usize>() as f64,
        MtaMode::Matching => {
            maximum_matching(&adjacency, wb.len()) as f64 / topic.cardinality() as f64
        }
    }
}

/// Size of a maximum bipartite matching (augmenting paths).
fn maximum_matching(adjacency: &[Vec<usize>], right: usize) -> usize {
    fn augment(
        u: usize,
        adjacency: &[Vec<usize>],
        visited: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &v in &adjacency[u] {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            if owner[v].is_none_or(|w| augment(w, adjacency, visited, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = alloc::vec![None; right];
    let mut matched = 0;
    for u in 0..adjacency.len() {
        let mut visited = alloc::vec![false; right];
        if augment(u, adjacency, &mut visited, &mut owner) {
            matched += 1;
        }
    }
    matched
}

/// Topic word coverage: fraction of words with nonzero document frequency.
pub fn twc<S: AsRef<str>>(index: &CooccurrenceIndex, words: &[S], side: Side) -> f64 {
    if words.is_empty() {
        return 0.0;
    }
    let present = words
        .iter()
        .filter(|w| index.df(side, w.as_ref()) > 0)
        .count();
    present as f64 / words.len() as f64
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(MetricError::TooFewObservations(x.len()));
    }
    let (mx, my) = (math::mean(x), math::mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    Ok((sxy / math::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Every metric for one topic, in [`Metric::ALL`] order. The NPMI family is
/// left out for single-word topics.
pub fn score_topic(
    index: &CooccurrenceIndex,
    dict: Option<&BilingualDictionary>,
    topic: &MultilingualTopic,
    mta_mode: MtaMode,
) -> Vec<TopicScore> {
    let c = topic.cardinality();
    let mut out = Vec::with_capacity(Metric::ALL.len());
    let npmi = |side| topic_npmi(index, topic.words(side), c, side).ok();
    let (npmi_a, npmi_b) = (npmi(Side::A), npmi(Side::B));
    for metric in Metric::ALL {
        let value = match metric {
            Metric::Cnpmi => Some(cnpmi(index, topic)),
            Metric::Inpmi => npmi_a.zip(npmi_b).map(|(a, b)| (a + b) / 2.0),
            Metric::Mta => dict.map(|d| mta(d, topic, mta_mode)),
            Metric::NpmiA => npmi_a,
            Metric::NpmiB => npmi_b,
            Metric::TwcA => Some(twc(index, topic.words(Side::A), Side::A)),
            Metric::TwcB => Some(twc(index, topic.words(Side::B), Side::B)),
        };
        if let Some(value) = value {
            out.push(TopicScore { metric, value });
        }
    }
    out
}

/// Formats a metric name list, used in report headers.
pub fn metric_names() -> Vec<String> {
    Metric::ALL.iter().map(|m| String::from(m.name())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CorpusPair;
    use alloc::vec;

    fn toy_index() -> CooccurrenceIndex {
        let c = CorpusPair::from_texts(
            "en",
            "xx",
            "dog cat\ndog\ncat fish\nfish",
            "hund katt\nhund\nkatt\nfisk",
            1.0,
        )
        .unwrap();
        CooccurrenceIndex::build(&c, None)
    }

    fn topic(a: &[&str], b: &[&str]) -> MultilingualTopic {
        MultilingualTopic::new(a.iter().copied(), b.iter().copied()).unwrap()
    }

    #[test]
    fn npmi_examples() {
        let idx = toy_index();
        assert_eq!(npmi_pair(&idx, "dog", "hund", NpmiMode::Cross), 1.0);
        assert_eq!(npmi_from_probabilities(0.5, 0.5, 0.25), 0.0);
        assert_eq!(npmi_pair(&idx, "cat", "fisk", NpmiMode::Cross), 0.0);
        assert_eq!(npmi_from_probabilities(1.0, 1.0, 1.0), 0.0);
        assert_eq!(npmi_pair(&idx, "zzz", "hund", NpmiMode::Cross), 0.0);
    }

    #[test]
    fn topic_npmi_examples() {
        let idx = toy_index();
        // joint(dog, cat) = 1/4 with marginals 1/2: independence
        assert_eq!(topic_npmi(&idx, &["dog", "cat"], 2, Side::A).unwrap(), 0.0);
        assert_eq!(
            topic_npmi(&idx, &["dog"], 1, Side::A).unwrap_err(),
            MetricError::Degenerate(1)
        );
        assert!(matches!(
            topic_npmi(&idx, &["dog", "cat"], 3, Side::A),
            Err(MetricError::InsufficientWords { .. })
        ));
    }

    #[test]
    fn cnpmi_examples() {
        let idx = toy_index();
        assert_eq!(cnpmi(&idx, &topic(&["dog"], &["hund"])), 1.0);
        assert_eq!(cnpmi(&idx, &topic(&["cat"], &["fisk"])), 0.0);
    }

    #[test]
    fn mta_examples() {
        let dict: BilingualDictionary = [("dog", "hund"), ("cat", "katt")].into_iter().collect();
        assert_eq!(
            mta(
                &dict,
                &topic(&["dog", "cat"], &["hund", "katt"]),
                MtaMode::Matching
            ),
            1.0
        );
        assert_eq!(
            mta(
                &dict,
                &topic(&["dog", "cat"], &["hund", "fisk"]),
                MtaMode::Matching
            ),
            0.5
        );
        let other: BilingualDictionary = [("x", "y")].into_iter().collect();
        assert_eq!(
            mta(
                &other,
                &topic(&["dog", "cat"], &["hund", "katt"]),
                MtaMode::Matching
            ),
            0.0
        );
    }

    #[test]
    fn mta_matching_uses_each_word_once() {
        // "bank" translates to both B words, "river" to one of them
        let dict: BilingualDictionary = [("bank", "ufer"), ("bank", "bank_de"), ("river", "ufer")]
            .into_iter()
            .collect();
        let t = topic(&["bank", "river"], &["ufer", "bank_de"]);
        assert_eq!(mta(&dict, &t, MtaMode::Matching), 1.0);
        assert_eq!(mta(&dict, &t, MtaMode::RawCount), 3.0);
        let t = topic(&["bank", "cat"], &["ufer", "bank_de"]);
        assert_eq!(mta(&dict, &t, MtaMode::Matching), 0.5);
    }

    #[test]
    fn twc_examples() {
        let idx = toy_index();
        assert_eq!(twc(&idx, &["dog", "cat"], Side::A), 1.0);
        assert_eq!(twc(&idx, &["q", "r"], Side::A), 0.0);
        let words = ["dog", "cat", "fish", "a", "b", "c", "d", "e", "f", "g"];
        let idx7 = {
            let c = CorpusPair::from_texts("en", "x", "dog cat fish a b c d", "z", 1.0).unwrap();
            CooccurrenceIndex::build(&c, None)
        };
        assert_eq!(twc(&idx7, &words, Side::A), 0.7);
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]).unwrap_err(),
            MetricError::ZeroVariance
        );
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn score_topic_order_and_skips() {
        let idx = toy_index();
        let s = score_topic(&idx, None, &topic(&["dog"], &["hund"]), MtaMode::Matching);
        let names: Vec<Metric> = s.iter().map(|s| s.metric).collect();
        assert_eq!(names, vec![Metric::Cnpmi, Metric::TwcA, Metric::TwcB]);
        let s = score_topic(
            &idx,
            None,
            &topic(&["dog", "cat"], &["hund", "katt"]),
            MtaMode::Matching,
        );
        assert_eq!(s.len(), 6);
    }
}
