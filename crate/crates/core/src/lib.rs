//! Crosslingual topic coherence toolkit.
//!
//! The crate is `no_std` and only needs `alloc`. It contains everything that
//! is pure computation:
//!
//! * [`corpus`]: aligned bilingual corpora, dictionaries and era lexicons,
//!   parsed from in-memory text.
//! * [`cooccur`]: document-level co-occurrence statistics and windowed
//!   context vectors over a reference corpus.
//! * [`metrics`]: NPMI, internal NPMI, crosslingual NPMI, matching
//!   translation accuracy, topic word coverage and Pearson correlation.
//! * [`plm`]: a collapsed Gibbs sampler for the document-links polylingual
//!   topic model with partial linking.
//! * [`estimator`]: feature extraction and an AdaBoost.R2 ensemble of linear
//!   regressors that re-estimates coherence from a small reference corpus.
//! * [`downstream`]: a one-vs-rest logistic classifier over document-topic
//!   distributions with micro-averaged F1.
//!
//! File IO, caches and the command line live in the `cnpmi` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(feature = "std", test))]
extern crate std;

pub mod cooccur;
pub mod corpus;
pub mod downstream;
pub mod estimator;
pub mod linalg;
pub mod math;
pub mod metrics;
pub mod plm;
pub mod topic;
pub mod vocab;

pub use cooccur::{ContextVector, CooccurrenceIndex, IndexBuilder, NpmiMode, Restriction};
pub use corpus::{BilingualDictionary, CorpusError, CorpusPair, DocumentPair, EraLexicon, Side};
pub use estimator::{EstimatorModel, FeatureVector, LossKind};
pub use metrics::{Metric, MetricError, MtaMode, TopicScore};
pub use plm::{PlmConfig, PlmOutput};
pub use topic::{MultilingualTopic, TopicError};
pub use vocab::Vocabulary;

/// Seeded generator used everywhere randomness is needed.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Build the crate's deterministic generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
