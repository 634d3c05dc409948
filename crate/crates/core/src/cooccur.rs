//! Document-level occurrence statistics over a paired reference corpus.
//!
//! A token counts once per document regardless of how often it occurs. The
//! crosslingual joint count of `(w, v)` is the number of document pairs whose
//! language-A side contains `w` and whose language-B side contains `v`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use crate::corpus::{CorpusPair, DocumentPair, Side};
use crate::math;
use crate::topic::MultilingualTopic;
use crate::vocab::Vocabulary;

/// Which pair statistics a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NpmiMode {
    MonoA,
    MonoB,
    /// First word from language A, second from language B.
    Cross,
}

/// Token sets to which counting is limited.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Restriction {
    pub a: BTreeSet<String>,
    pub b: BTreeSet<String>,
}

impl Restriction {
    /// All words of the given topics.
    pub fn from_topics<'a>(topics: impl IntoIterator<Item = &'a MultilingualTopic>) -> Self {
        let mut r = Restriction::default();
        for t in topics {
            r.a.extend(t.words(Side::A).iter().cloned());
            r.b.extend(t.words(Side::B).iter().cloned());
        }
        r
    }

    fn side(&self, side: Side) -> &BTreeSet<String> {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("inconsistent index data: {0}")]
    Inconsistent(String),
}

/// Marginal and joint probabilities of a word pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairProbability {
    pub p_first: f64,
    pub p_second: f64,
    pub p_joint: f64,
}

type PairCounts = HashMap<(u32, u32), u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceIndex {
    doc_count: usize,
    vocab_a: Vocabulary,
    vocab_b: Vocabulary,
    df_a: Vec<u32>,
    df_b: Vec<u32>,
    joint_aa: PairCounts,
    joint_bb: PairCounts,
    joint_ab: PairCounts,
}

fn mono_key(x: u32, y: u32) -> (u32, u32) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

impl CooccurrenceIndex {
    /// Counts the whole corpus, optionally limited to `restrict`.
    pub fn build(corpus: &CorpusPair, restrict: Option<&Restriction>) -> Self {
        let mut builder = IndexBuilder::new(corpus, restrict);
        for doc in corpus.docs() {
            builder.add(doc);
        }
        builder.finish()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn vocab(&self, side: Side) -> &Vocabulary {
        match side {
            Side::A => &self.vocab_a,
            Side::B => &self.vocab_b,
        }
    }

    fn df_table(&self, side: Side) -> &[u32] {
        match side {
            Side::A => &self.df_a,
            Side::B => &self.df_b,
        }
    }

    /// Document frequency; zero for unknown tokens.
    pub fn df(&self, side: Side, token: &str) -> u32 {
        self.vocab(side)
            .id(token)
            .map_or(0, |id| self.df_table(side)[id as usize])
    }

    /// Joint document count. For `Cross`, `first` is a language-A token and
    /// `second` a language-B token.
    pub fn joint(&self, mode: NpmiMode, first: &str, second: &str) -> u32 {
        let (s1, s2) = mode_sides(mode);
        let (Some(x), Some(y)) = (self.vocab(s1).id(first), self.vocab(s2).id(second)) else {
            return 0;
        };
        match mode {
            NpmiMode::MonoA | NpmiMode::MonoB if x == y => self.df_table(s1)[x as usize],
            NpmiMode::MonoA => self.joint_aa.get(&mono_key(x, y)).copied().unwrap_or(0),
            NpmiMode::MonoB => self.joint_bb.get(&mono_key(x, y)).copied().unwrap_or(0),
            NpmiMode::Cross => self.joint_ab.get(&(x, y)).copied().unwrap_or(0),
        }
    }

    /// Probabilities `(df₁/N, df₂/N, joint/N)` for a pair of tokens.
    pub fn probabilities(&self, mode: NpmiMode, first: &str, second: &str) -> PairProbability {
        let (s1, s2) = mode_sides(mode);
        let n = self.doc_count as f64;
        PairProbability {
            p_first: self.df(s1, first) as f64 / n,
            p_second: self.df(s2, second) as f64 / n,
            p_joint: self.joint(mode, first, second) as f64 / n,
        }
    }

    /// Crosslingual pair probability `(p_A, p_B, p_joint)`.
    pub fn pair_probability(&self, token_a: &str, token_b: &str) -> PairProbability {
        self.probabilities(NpmiMode::Cross, token_a, token_b)
    }

    /// Number of stored nonzero pair entries.
    pub fn pair_entries(&self, mode: NpmiMode) -> usize {
        match mode {
            NpmiMode::MonoA => self.joint_aa.len(),
            NpmiMode::MonoB => self.joint_bb.len(),
            NpmiMode::Cross => self.joint_ab.len(),
        }
    }

    /// Flattens the index into sorted arrays.
    pub fn to_parts(&self) -> IndexParts {
        fn sorted(map: &PairCounts) -> Vec<(u32, u32, u32)> {
            let mut v: Vec<_> = map.iter().map(|(&(x, y), &c)| (x, y, c)).collect();
            v.sort_unstable();
            v
        }
        IndexParts {
            doc_count: self.doc_count,
            tokens_a: self.vocab_a.tokens().to_vec(),
            tokens_b: self.vocab_b.tokens().to_vec(),
            df_a: self.df_a.clone(),
            df_b: self.df_b.clone(),
            joint_aa: sorted(&self.joint_aa),
            joint_bb: sorted(&self.joint_bb),
            joint_ab: sorted(&self.joint_ab),
        }
    }

    /// Rebuilds an index from parts, checking every count bound.
    pub fn from_parts(parts: IndexParts) -> Result<Self, IndexError> {
        let bad = |m: &str| Err(IndexError::Inconsistent(m.to_string()));
        if parts.tokens_a.len() != parts.df_a.len() || parts.tokens_b.len() != parts.df_b.len() {
            return bad("vocabulary and df lengths differ");
        }
        let n = parts.doc_count as u32;
        if parts.df_a.iter().chain(&parts.df_b).any(|&d| d > n) {
            return bad("document frequency exceeds document count");
        }
        let vocab_a: Vocabulary = parts.tokens_a.iter().collect();
        let vocab_b: Vocabulary = parts.tokens_b.iter().collect();
        if vocab_a.len() != parts.tokens_a.len() || vocab_b.len() != parts.tokens_b.len() {
            return bad("duplicate vocabulary entry");
        }
        let load = |triples: &[(u32, u32, u32)], df1: &[u32], df2: &[u32]| {
            let mut map = PairCounts::with_capacity(triples.len());
            for &(x, y, c) in triples {
                let (Some(&d1), Some(&d2)) = (df1.get(x as usize), df2.get(y as usize)) else {
                    return Err(IndexError::Inconsistent("pair id out of range".to_string()));
                };
                if c == 0 || c > d1.min(d2) {
                    return Err(IndexError::Inconsistent(
                        "joint count exceeds a marginal".to_string(),
                    ));
                }
                map.insert((x, y), c);
            }
            Ok(map)
        };
        Ok(CooccurrenceIndex {
            joint_aa: load(&parts.joint_aa, &parts.df_a, &parts.df_a)?,
            joint_bb: load(&parts.joint_bb, &parts.df_b, &parts.df_b)?,
            joint_ab: load(&parts.joint_ab, &parts.df_a, &parts.df_b)?,
            doc_count: parts.doc_count,
            vocab_a,
            vocab_b,
            df_a: parts.df_a,
            df_b: parts.df_b,
        })
    }
}

fn mode_sides(mode: NpmiMode) -> (Side, Side) {
    match mode {
        NpmiMode::MonoA => (Side::A, Side::A),
        NpmiMode::MonoB => (Side::B, Side::B),
        NpmiMode::Cross => (Side::A, Side::B),
    }
}

/// Flat, sorted representation of an index (for caching on disk).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexParts {
    pub doc_count: usize,
    pub tokens_a: Vec<String>,
    pub tokens_b: Vec<String>,
    pub df_a: Vec<u32>,
    pub df_b: Vec<u32>,
    pub joint_aa: Vec<(u32, u32, u32)>,
    pub joint_bb: Vec<(u32, u32, u32)>,
    pub joint_ab: Vec<(u32, u32, u32)>,
}

/// Incremental index construction. Builders forked from one another can
/// count disjoint document ranges and be merged.
#[derive(Debug, Clone)]
pub struct IndexBuilder {
    map_a: Vec<Option<u32>>,
    map_b: Vec<Option<u32>>,
    index: CooccurrenceIndex,
}

impl IndexBuilder {
    pub fn new(corpus: &CorpusPair, restrict: Option<&Restriction>) -> Self {
        let local = |side: Side| -> (Vocabulary, Vec<Option<u32>>) {
            let full = corpus.vocab(side);
            match restrict {
                None => (full.clone(), (0..full.len() as u32).map(Some).collect()),
                Some(r) => {
                    let mut vocab = Vocabulary::new();
                    let mut map = alloc::vec![None; full.len()];
                    for token in r.side(side) {
                        if let Some(id) = full.id(token) {
                            map[id as usize] = Some(vocab.get_or_insert(token));
                        }
                    }
                    (vocab, map)
                }
            }
        };
        let (vocab_a, map_a) = local(Side::A);
        let (vocab_b, map_b) = local(Side::B);
        IndexBuilder {
            map_a,
            map_b,
            index: CooccurrenceIndex {
                doc_count: 0,
                df_a: alloc::vec![0; vocab_a.len()],
                df_b: alloc::vec![0; vocab_b.len()],
                vocab_a,
                vocab_b,
                joint_aa: PairCounts::new(),
                joint_bb: PairCounts::new(),
                joint_ab: PairCounts::new(),
            },
        }
    }

    /// An empty builder with the same token mapping.
    pub fn fork(&self) -> Self {
        let idx = &self.index;
        IndexBuilder {
            map_a: self.map_a.clone(),
            map_b: self.map_b.clone(),
            index: CooccurrenceIndex {
                doc_count: 0,
                vocab_a: idx.vocab_a.clone(),
                vocab_b: idx.vocab_b.clone(),
                df_a: alloc::vec![0; idx.df_a.len()],
                df_b: alloc::vec![0; idx.df_b.len()],
                joint_aa: PairCounts::new(),
                joint_bb: PairCounts::new(),
                joint_ab: PairCounts::new(),
            },
        }
    }

    pub fn add(&mut self, doc: &DocumentPair) {
        let present = |tokens: &[u32], map: &[Option<u32>]| -> Vec<u32> {
            let mut ids: Vec<u32> = tokens.iter().filter_map(|&t| map[t as usize]).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        };
        let a = present(&doc.tokens_a, &self.map_a);
        let b = present(&doc.tokens_b, &self.map_b);
        let idx = &mut self.index;
        idx.doc_count += 1;
        for &x in &a {
            idx.df_a[x as usize] += 1;
        }
        for &y in &b {
            idx.df_b[y as usize] += 1;
        }
        count_mono(&mut idx.joint_aa, &a);
        count_mono(&mut idx.joint_bb, &b);
        for &x in &a {
            for &y in &b {
                *idx.joint_ab.entry((x, y)).or_insert(0) += 1;
            }
        }
    }

    /// Adds the counts of a builder forked from the same origin.
    pub fn merge(&mut self, other: IndexBuilder) {
        let (idx, o) = (&mut self.index, other.index);
        debug_assert_eq!(idx.df_a.len(), o.df_a.len());
        idx.doc_count += o.doc_count;
        for (d, x) in idx.df_a.iter_mut().zip(&o.df_a) {
            *d += x;
        }
        for (d, x) in idx.df_b.iter_mut().zip(&o.df_b) {
            *d += x;
        }
        for (mine, theirs) in [
            (&mut idx.joint_aa, o.joint_aa),
            (&mut idx.joint_bb, o.joint_bb),
            (&mut idx.joint_ab, o.joint_ab),
        ] {
            for (k, c) in theirs {
                *mine.entry(k).or_insert(0) += c;
            }
        }
    }

    pub fn finish(self) -> CooccurrenceIndex {
        self.index
    }
}

fn count_mono(map: &mut PairCounts, ids: &[u32]) {
    for (i, &x) in ids.iter().enumerate() {
        for &y in &ids[i + 1..] {
            *map.entry((x, y)).or_insert(0) += 1;
        }
    }
}

/// Windowed neighbor counts of one token.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextVector {
    pub token: String,
    pub counts: BTreeMap<String, u32>,
}

impl ContextVector {
    /// Keeps only neighbors for which `keep` holds.
    pub fn restricted(&self, keep: impl Fn(&str) -> bool) -> Self {
        ContextVector {
            token: self.token.clone(),
            counts: self
                .counts
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, &v)| (k.clone(), v))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    fn norm(&self) -> f64 {
        math::sqrt(self.counts.values().map(|&c| (c as f64) * (c as f64)).sum())
    }
}

/// Counts tokens within `±window` positions of every occurrence of `token`
/// on one side of the corpus. Windows never cross document boundaries.
pub fn context_vector(
    corpus: &CorpusPair,
    side: Side,
    token: &str,
    window: usize,
) -> ContextVector {
    context_vectors(corpus, side, &[token], window)
        .remove(token)
        .unwrap_or_else(|| ContextVector {
            token: token.to_string(),
            counts: BTreeMap::new(),
        })
}

/// [`context_vector`] for several tokens in one pass over the corpus.
pub fn context_vectors<S: AsRef<str>>(
    corpus: &CorpusPair,
    side: Side,
    tokens: &[S],
    window: usize,
) -> BTreeMap<String, ContextVector> {
    let window = window.max(1);
    let vocab = corpus.vocab(side);
    let mut slots: HashMap<u32, usize> = HashMap::new();
    for t in tokens {
        if let Some(id) = vocab.id(t.as_ref()) {
            let next = slots.len();
            slots.entry(id).or_insert(next);
        }
    }
    let mut counts: Vec<HashMap<u32, u32>> = alloc::vec![HashMap::new(); slots.len()];
    for doc in corpus.docs() {
        let ids = doc.tokens(side);
        for (pos, t) in ids.iter().enumerate() {
            let Some(&slot) = slots.get(t) else {
                continue;
            };
            let lo = pos.saturating_sub(window);
            let hi = (pos + window).min(ids.len() - 1);
            for (other, &n) in ids.iter().enumerate().take(hi + 1).skip(lo) {
                if other != pos {
                    *counts[slot].entry(n).or_insert(0) += 1;
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for t in tokens {
        let t = t.as_ref();
        let mut cv = ContextVector {
            token: t.to_string(),
            counts: BTreeMap::new(),
        };
        if let Some(slot) = vocab.id(t).and_then(|id| slots.get(&id)) {
            for (&id, &c) in &counts[*slot] {
                cv.counts
                    .insert(vocab.token(id).unwrap_or_default().to_string(), c);
            }
        }
        out.insert(t.to_string(), cv);
    }
    out
}

/// Cosine of two sparse count vectors; `0.0` if either has zero norm.
pub fn cosine_similarity(u: &ContextVector, v: &ContextVector) -> f64 {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let (small, large) = if u.counts.len() <= v.counts.len() {
        (u, v)
    } else {
        (v, u)
    };
    let dot: f64 = small
        .counts
        .iter()
        .filter_map(|(k, &a)| large.counts.get(k).map(|&b| a as f64 * b as f64))
        .sum();
    (dot / (nu * nv)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> CorpusPair {
        CorpusPair::from_texts(
            "en",
            "xx",
            "dog cat\ndog\ncat fish\nfish",
            "hund katt\nhund\nkatt\nfisk",
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn toy_counts() {
        let idx = CooccurrenceIndex::build(&toy(), None);
        assert_eq!(idx.doc_count(), 4);
        assert_eq!(idx.df(Side::A, "dog"), 2);
        assert_eq!(idx.df(Side::B, "hund"), 2);
        assert_eq!(idx.joint(NpmiMode::Cross, "dog", "hund"), 2);
        assert_eq!(idx.joint(NpmiMode::Cross, "cat", "fisk"), 0);
        assert_eq!(idx.joint(NpmiMode::MonoA, "cat", "dog"), 1);
        assert_eq!(idx.joint(NpmiMode::MonoA, "dog", "cat"), 1);
    }

    #[test]
    fn toy_probabilities() {
        let idx = CooccurrenceIndex::build(&toy(), None);
        let p = idx.pair_probability("dog", "hund");
        assert_eq!((p.p_first, p.p_second, p.p_joint), (0.5, 0.5, 0.5));
        let p = idx.pair_probability("dog", "fisk");
        assert_eq!((p.p_first, p.p_second, p.p_joint), (0.5, 0.25, 0.0));
        let p = idx.pair_probability("zzz", "hund");
        assert_eq!((p.p_first, p.p_second, p.p_joint), (0.0, 0.5, 0.0));
    }

    #[test]
    fn empty_restriction() {
        let idx = CooccurrenceIndex::build(&toy(), Some(&Restriction::default()));
        assert_eq!(idx.doc_count(), 4);
        assert_eq!(idx.vocab(Side::A).len(), 0);
        for mode in [NpmiMode::MonoA, NpmiMode::MonoB, NpmiMode::Cross] {
            assert_eq!(idx.pair_entries(mode), 0);
        }
        assert_eq!(idx.df(Side::A, "dog"), 0);
    }

    #[test]
    fn fork_and_merge_equals_sequential() {
        let corpus = toy();
        let full = CooccurrenceIndex::build(&corpus, None);
        let mut left = IndexBuilder::new(&corpus, None);
        let mut right = left.fork();
        for (i, d) in corpus.docs().iter().enumerate() {
            if i % 2 == 0 {
                left.add(d)
            } else {
                right.add(d)
            }
        }
        left.merge(right);
        assert_eq!(left.finish(), full);
    }

    #[test]
    fn parts_round_trip_and_validation() {
        let idx = CooccurrenceIndex::build(&toy(), None);
        let parts = idx.to_parts();
        assert_eq!(CooccurrenceIndex::from_parts(parts.clone()).unwrap(), idx);
        let mut broken = parts;
        broken.joint_ab[0].2 = 99;
        assert!(CooccurrenceIndex::from_parts(broken).is_err());
    }

    fn cv(pairs: &[(&str, u32)]) -> ContextVector {
        ContextVector {
            token: String::new(),
            counts: pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }

    #[test]
    fn context_window_examples() {
        let c = CorpusPair::from_texts("a", "b", "a b c", "x", 1.0).unwrap();
        let v = context_vector(&c, Side::A, "b", 5);
        assert_eq!(v.counts, cv(&[("a", 1), ("c", 1)]).counts);

        let c = CorpusPair::from_texts("a", "b", "b a b", "x", 1.0).unwrap();
        let v = context_vector(&c, Side::A, "b", 1);
        assert_eq!(v.counts, cv(&[("a", 2)]).counts);

        assert!(context_vector(&c, Side::A, "zzz", 5).is_empty());
    }

    #[test]
    fn window_does_not_cross_documents() {
        let c = CorpusPair::from_texts("a", "b", "x b\ny z", "q\nq", 1.0).unwrap();
        let v = context_vector(&c, Side::A, "b", 5);
        assert_eq!(v.counts, cv(&[("x", 1)]).counts);
    }

    #[test]
    fn cosine_examples() {
        let u = cv(&[("a", 2), ("b", 1)]);
        assert!((cosine_similarity(&u, &u) - 1.0).abs() < 1e-15);
        assert_eq!(cosine_similarity(&cv(&[("a", 1)]), &cv(&[("b", 1)])), 0.0);
        let got = cosine_similarity(&cv(&[("a", 1), ("b", 1)]), &cv(&[("a", 1)]));
        assert!((got - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(cosine_similarity(&cv(&[]), &u), 0.0);
    }
}
