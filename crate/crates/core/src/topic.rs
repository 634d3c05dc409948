use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::corpus::Side;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopicError {
    #[error("topic sides have different lengths: {len_a} vs {len_b}")]
    CardinalityMismatch { len_a: usize, len_b: usize },
    #[error("topic has no words")]
    Empty,
    #[error("word {0:?} appears twice in one language")]
    DuplicateWord(String),
    #[error("topic has {available} words per side, {requested} requested")]
    TooShallow { available: usize, requested: usize },
}

/// Per-language ranked word lists (most probable first) for one topic.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultilingualTopic {
    words_a: Vec<String>,
    words_b: Vec<String>,
}

impl MultilingualTopic {
    pub fn new<S: Into<String>>(
        words_a: impl IntoIterator<Item = S>,
        words_b: impl IntoIterator<Item = S>,
    ) -> Result<Self, TopicError> {
        let words_a: Vec<String> = words_a.into_iter().map(Into::into).collect();
        let words_b: Vec<String> = words_b.into_iter().map(Into::into).collect();
        if words_a.len() != words_b.len() {
            return Err(TopicError::CardinalityMismatch {
                len_a: words_a.len(),
                len_b: words_b.len(),
            });
        }
        if words_a.is_empty() {
            return Err(TopicError::Empty);
        }
        for words in [&words_a, &words_b] {
            let mut seen = BTreeSet::new();
            for w in words {
                if !seen.insert(w.as_str()) {
                    return Err(TopicError::DuplicateWord(w.clone()));
                }
            }
        }
        Ok(MultilingualTopic { words_a, words_b })
    }

    pub fn cardinality(&self) -> usize {
        self.words_a.len()
    }

    pub fn words(&self, side: Side) -> &[String] {
        match side {
            Side::A => &self.words_a,
            Side::B => &self.words_b,
        }
    }

    /// The topic cut to its top `c` words per side.
    pub fn truncated(&self, c: usize) -> Result<Self, TopicError> {
        if c == 0 {
            return Err(TopicError::Empty);
        }
        if c > self.cardinality() {
            return Err(TopicError::TooShallow {
                available: self.cardinality(),
                requested: c,
            });
        }
        Ok(MultilingualTopic {
            words_a: self.words_a[..c].to_vec(),
            words_b: self.words_b[..c].to_vec(),
        })
    }

    /// Same topic with the languages exchanged.
    pub fn swapped(&self) -> Self {
        MultilingualTopic {
            words_a: self.words_b.clone(),
            words_b: self.words_a.clone(),
        }
    }
}
