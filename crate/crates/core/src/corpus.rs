//! Aligned bilingual corpora, bilingual dictionaries and word-era lexicons.
//!
//! Everything here parses from in-memory text; reading the files is the
//! caller's job. Documents are pre-tokenized: one document per line, tokens
//! separated by whitespace.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("corpus sides are not aligned: {lines_a} documents vs {lines_b} documents")]
    Alignment { lines_a: usize, lines_b: usize },
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("prune threshold must lie in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One of the two languages of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Aligned document tuple. Token ids index the owning corpus's vocabularies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentPair {
    pub id: usize,
    pub tokens_a: Vec<u32>,
    pub tokens_b: Vec<u32>,
    /// Whether the pair may share one topic distribution during training.
    pub linked: bool,
}

impl DocumentPair {
    pub fn tokens(&self, side: Side) -> &[u32] {
        match side {
            Side::A => &self.tokens_a,
            Side::B => &self.tokens_b,
        }
    }
}

/// Token survives the digit/symbol filter iff it contains a letter.
pub fn is_word_token(token: &str) -> bool {
    token.chars().any(char::is_alphabetic)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPair {
    language_a: String,
    language_b: String,
    docs: Vec<DocumentPair>,
    vocab_a: Vocabulary,
    vocab_b: Vocabulary,
}

fn split_lines(text: &str) -> Vec<Vec<&str>> {
    text.lines()
        .map(|line| line.split_whitespace().collect())
        .collect()
}

impl CorpusPair {
    /// Builds a corpus from two aligned lists of tokenized documents.
    ///
    /// Tokens without any letter are dropped, then every token type whose
    /// document frequency is strictly greater than `prune_threshold · N` is
    /// removed from its language. Empty documents are kept.
    pub fn from_tokenized<S: AsRef<str>>(
        language_a: &str,
        language_b: &str,
        docs_a: &[Vec<S>],
        docs_b: &[Vec<S>],
        prune_threshold: f64,
    ) -> Result<Self, CorpusError> {
        if !(prune_threshold > 0.0 && prune_threshold <= 1.0) {
            return Err(CorpusError::InvalidThreshold(prune_threshold));
        }
        if docs_a.len() != docs_b.len() {
            return Err(CorpusError::Alignment {
                lines_a: docs_a.len(),
                lines_b: docs_b.len(),
            });
        }
        if docs_a.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let n = docs_a.len();
        let limit = prune_threshold * n as f64;
        let (vocab_a, ids_a) = prune_side(docs_a, limit);
        let (vocab_b, ids_b) = prune_side(docs_b, limit);
        let docs = ids_a
            .into_iter()
            .zip(ids_b)
            .enumerate()
            .map(|(id, (tokens_a, tokens_b))| DocumentPair {
                id,
                tokens_a,
                tokens_b,
                linked: true,
            })
            .collect();
        Ok(CorpusPair {
            language_a: language_a.to_string(),
            language_b: language_b.to_string(),
            docs,
            vocab_a,
            vocab_b,
        })
    }

    /// Parses two aligned texts with one whitespace-tokenized document per line.
    pub fn from_texts(
        language_a: &str,
        language_b: &str,
        text_a: &str,
        text_b: &str,
        prune_threshold: f64,
    ) -> Result<Self, CorpusError> {
        Self::from_tokenized(
            language_a,
            language_b,
            &split_lines(text_a),
            &split_lines(text_b),
            prune_threshold,
        )
    }

    pub fn language(&self, side: Side) -> &str {
        match side {
            Side::A => &self.language_a,
            Side::B => &self.language_b,
        }
    }

    pub fn docs(&self) -> &[DocumentPair] {
        &self.docs
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn vocab(&self, side: Side) -> &Vocabulary {
        match side {
            Side::A => &self.vocab_a,
            Side::B => &self.vocab_b,
        }
    }

    /// Decodes one side of a document back to token strings.
    pub fn decode(&self, doc: usize, side: Side) -> Vec<&str> {
        let vocab = self.vocab(side);
        self.docs[doc]
            .tokens(side)
            .iter()
            .map(|&id| vocab.token(id).expect("token id outside vocabulary"))
            .collect()
    }

    /// Re-applies frequency pruning. On an already pruned corpus with the
    /// same threshold this returns an identical corpus.
    pub fn pruned(&self, prune_threshold: f64) -> Result<Self, CorpusError> {
        let a: Vec<Vec<&str>> = (0..self.docs.len())
            .map(|d| self.decode(d, Side::A))
            .collect();
        let b: Vec<Vec<&str>> = (0..self.docs.len())
            .map(|d| self.decode(d, Side::B))
            .collect();
        let mut out =
            Self::from_tokenized(&self.language_a, &self.language_b, &a, &b, prune_threshold)?;
        for (new, old) in out.docs.iter_mut().zip(&self.docs) {
            new.linked = old.linked;
        }
        Ok(out)
    }

    /// Corpus restricted to the given documents (renumbered densely, in the
    /// order given). Vocabularies are kept as they are.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, CorpusError> {
        if indices.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let docs = indices
            .iter()
            .enumerate()
            .map(|(id, &i)| DocumentPair {
                id,
                ..self.docs[i].clone()
            })
            .collect();
        Ok(CorpusPair {
            docs,
            ..self.clone_header()
        })
    }

    /// Sets the `linked` flag of every document.
    pub fn set_all_linked(&mut self, linked: bool) {
        for doc in &mut self.docs {
            doc.linked = linked;
        }
    }

    pub fn set_linked(&mut self, doc: usize, linked: bool) {
        self.docs[doc].linked = linked;
    }

    fn clone_header(&self) -> Self {
        CorpusPair {
            language_a: self.language_a.clone(),
            language_b: self.language_b.clone(),
            docs: Vec::new(),
            vocab_a: self.vocab_a.clone(),
            vocab_b: self.vocab_b.clone(),
        }
    }
}

fn prune_side<S: AsRef<str>>(docs: &[Vec<S>], limit: f64) -> (Vocabulary, Vec<Vec<u32>>) {
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for token in doc {
            let token = token.as_ref();
            if is_word_token(token) && seen.insert(token) {
                *df.entry(token).or_insert(0) += 1;
            }
        }
    }
    let mut vocab = Vocabulary::new();
    let ids = docs
        .iter()
        .map(|doc| {
            doc.iter()
                .map(AsRef::as_ref)
                .filter(|t| df.get(t).is_some_and(|&c| (c as f64) <= limit))
                .map(|t| vocab.get_or_insert(t))
                .collect()
        })
        .collect();
    (vocab, ids)
}

fn tsv_columns(line: &str) -> impl Iterator<Item = &str> {
    line.split('\t').map(str::trim)
}

/// Translation pairs between language A and language B.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BilingualDictionary {
    entries: BTreeSet<(String, String)>,
    by_a: BTreeMap<String, BTreeSet<String>>,
    by_b: BTreeMap<String, BTreeSet<String>>,
}

impl BilingualDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a two-column TSV (`tokenA<TAB>tokenB`). Blank lines are skipped,
    /// duplicate rows collapse.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut dict = Self::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = tsv_columns(line).collect();
            if cols.len() != 2 || cols.iter().any(|c| c.is_empty()) {
                return Err(CorpusError::Parse {
                    line: i + 1,
                    message: alloc::format!("expected 2 columns, found {}", cols.len()),
                });
            }
            dict.insert(cols[0], cols[1]);
        }
        Ok(dict)
    }

    /// Returns `true` if the pair was not present before.
    pub fn insert(&mut self, token_a: &str, token_b: &str) -> bool {
        let fresh = self
            .entries
            .insert((token_a.to_string(), token_b.to_string()));
        if fresh {
            self.by_a
                .entry(token_a.to_string())
                .or_default()
                .insert(token_b.to_string());
            self.by_b
                .entry(token_b.to_string())
                .or_default()
                .insert(token_a.to_string());
        }
        fresh
    }

    pub fn contains(&self, token_a: &str, token_b: &str) -> bool {
        self.by_a.get(token_a).is_some_and(|s| s.contains(token_b))
    }

    /// Translations of a token, looked up from the given side.
    pub fn translations(&self, side: Side, token: &str) -> impl Iterator<Item = &str> {
        let map = match side {
            Side::A => &self.by_a,
            Side::B => &self.by_b,
        };
        map.get(token).into_iter().flatten().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<'a> FromIterator<(&'a str, &'a str)> for BilingualDictionary {
    fn from_iter<I: IntoIterator<Item = (&'a str, &'a str)>>(iter: I) -> Self {
        let mut dict = Self::new();
        for (a, b) in iter {
            dict.insert(a, b);
        }
        dict
    }
}

pub const MIN_ERA_YEAR: i32 = 800;
pub const MAX_ERA_YEAR: i32 = 2100;

/// Earliest attested usage year per token.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EraLexicon {
    years: BTreeMap<String, i32>,
}

impl EraLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a two-column TSV (`token<TAB>year`). When a token repeats, the
    /// last row wins.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut lexicon = Self::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| CorpusError::Parse {
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = tsv_columns(line).collect();
            if cols.len() != 2 || cols[0].is_empty() {
                return Err(parse_err(alloc::format!(
                    "expected 2 columns, found {}",
                    cols.len()
                )));
            }
            let year: i32 = cols[1]
                .parse()
                .map_err(|_| parse_err(alloc::format!("year {:?} is not an integer", cols[1])))?;
            lexicon
                .insert(cols[0], year)
                .map_err(|_| parse_err(alloc::format!("year {year} outside [800, 2100]")))?;
        }
        Ok(lexicon)
    }

    /// Inserts or overwrites a year; rejects years outside [800, 2100].
    pub fn insert(&mut self, token: &str, year: i32) -> Result<(), i32> {
        if !(MIN_ERA_YEAR..=MAX_ERA_YEAR).contains(&year) {
            return Err(year);
        }
        self.years.insert(token.to_string(), year);
        Ok(())
    }

    pub fn year(&self, token: &str) -> Option<i32> {
        self.years.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i32)> {
        self.years.iter().map(|(t, &y)| (t.as_str(), y))
    }
}
