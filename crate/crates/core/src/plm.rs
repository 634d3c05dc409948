//! Collapsed Gibbs sampler for the document-links polylingual topic model.
//!
//! Each linked document pair is one sampling unit whose two language views
//! share a single row of document-topic counts. Unlinked pairs contribute
//! two independent single-language documents. Topic-word counts are kept per
//! language.
//!
//! Random draws follow a fixed protocol so runs are reproducible: link
//! selection uses a generator seeded with `config.seed`; chain `c` uses a
//! generator derived from `(seed, c)`. Every token is initialized with
//! `gen_range(0..K)` in document order, and each resampling step draws one
//! uniform `gen::<f64>()` scaled by the total weight and scans the cumulative
//! weights.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::corpus::{CorpusPair, Side};
use crate::math;
use crate::topic::MultilingualTopic;
use crate::vocab::Vocabulary;
use crate::{seeded_rng, SeededRng};

/// Bounds on optimized document-topic priors.
pub const ALPHA_MIN: f64 = 1e-6;
pub const ALPHA_MAX: f64 = 1e3;
const ALPHA_FIXED_POINT_ITERATIONS: usize = 200;
const ALPHA_FIXED_POINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlmError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("model needs {cells} count cells, limit is {limit}")]
    Capacity { cells: usize, limit: usize },
    #[error("topic export needs {requested} words but a vocabulary has only {available}")]
    VocabularyTooSmall { requested: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlmConfig {
    pub num_topics: usize,
    /// Symmetric document-topic prior (initial value when optimized).
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    pub iterations: usize,
    pub chains: usize,
    /// Optimize the document-topic prior every this many sweeps; 0 disables.
    pub optimize_interval: usize,
    /// Fraction of linkable document pairs that share topic counts.
    pub link_fraction: f64,
    pub seed: u64,
    /// Average estimates over the last this many sweeps; 0 uses the final state only.
    pub sample_sweeps: usize,
    /// Upper bound on `K · (V_A + V_B + documents)` count cells.
    pub max_cells: usize,
}

impl Default for PlmConfig {
    fn default() -> Self {
        PlmConfig {
            num_topics: 20,
            alpha: 0.1,
            beta: 0.01,
            iterations: 1000,
            chains: 5,
            optimize_interval: 50,
            link_fraction: 1.0,
            seed: 0,
            sample_sweeps: 0,
            max_cells: 1 << 28,
        }
    }
}

impl PlmConfig {
    pub fn validate(&self) -> Result<(), PlmError> {
        let bad = |m: &str| Err(PlmError::InvalidConfig(m.to_string()));
        if self.num_topics == 0 || self.num_topics > u32::MAX as usize {
            return bad("topic count must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if !(0.0..=1.0).contains(&self.link_fraction) {
            return bad("link fraction must lie in [0, 1]");
        }
        if self.chains == 0 {
            return bad("at least one chain is required");
        }
        if self.sample_sweeps > self.iterations {
            return bad("sample sweeps exceed iterations");
        }
        Ok(())
    }
}

/// One language view of a document pair inside a sampling unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub pair: usize,
    pub side: Side,
    pub words: Vec<u32>,
    pub topics: Vec<u32>,
}

/// A sampling unit: one row of document-topic counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub segments: Vec<Segment>,
}

impl Unit {
    fn len(&self) -> usize {
        self.segments.iter().map(|s| s.words.len()).sum()
    }
}

/// Sampler state: assignments plus the count tables derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct PlmState {
    num_topics: usize,
    vocab_sizes: [usize; 2],
    units: Vec<Unit>,
    /// units × K, row-major.
    doc_topic: Vec<u32>,
    /// Per language, V × K (word-major).
    topic_word: [Vec<u32>; 2],
    topic_total: [Vec<u32>; 2],
    alpha: Vec<f64>,
    beta: f64,
}

fn lang(side: Side) -> usize {
    match side {
        Side::A => 0,
        Side::B => 1,
    }
}

impl PlmState {
    fn empty(
        num_topics: usize,
        vocab_sizes: [usize; 2],
        units: Vec<Unit>,
        alpha: f64,
        beta: f64,
    ) -> Self {
        PlmState {
            num_topics,
            vocab_sizes,
            doc_topic: vec![0; units.len() * num_topics],
            topic_word: [
                vec![0; vocab_sizes[0] * num_topics],
                vec![0; vocab_sizes[1] * num_topics],
            ],
            topic_total: [vec![0; num_topics], vec![0; num_topics]],
            units,
            alpha: vec![alpha; num_topics],
            beta,
        }
    }

    pub fn num_topics(&self) -> usize {
        self.num_topics
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Document-topic counts of one unit.
    pub fn doc_topic(&self, unit: usize) -> &[u32] {
        let k = self.num_topics;
        &self.doc_topic[unit * k..(unit + 1) * k]
    }

    /// Per-topic counts of one word.
    pub fn word_topic(&self, side: Side, word: u32) -> &[u32] {
        let k = self.num_topics;
        let w = word as usize;
        &self.topic_word[lang(side)][w * k..(w + 1) * k]
    }

    pub fn topic_totals(&self, side: Side) -> &[u32] {
        &self.topic_total[lang(side)]
    }

    pub fn vocab_size(&self, side: Side) -> usize {
        self.vocab_sizes[lang(side)]
    }

    fn add(&mut self, unit: usize, side: Side, word: u32, topic: u32, delta: i64) {
        let k = self.num_topics;
        let l = lang(side);
        let t = topic as usize;
        let bump = |c: &mut u32| *c = (*c as i64 + delta) as u32;
        bump(&mut self.doc_topic[unit * k + t]);
        bump(&mut self.topic_word[l][word as usize * k + t]);
        bump(&mut self.topic_total[l][t]);
    }

    /// Same assignments with every count table rebuilt from scratch.
    pub fn recount(&self) -> PlmState {
        let mut fresh = PlmState::empty(
            self.num_topics,
            self.vocab_sizes,
            self.units.clone(),
            0.0,
            self.beta,
        );
        fresh.alpha = self.alpha.clone();
        for u in 0..fresh.units.len() {
            for s in 0..fresh.units[u].segments.len() {
                let seg = &fresh.units[u].segments[s];
                let (side, pairs): (Side, Vec<(u32, u32)>) = (
                    seg.side,
                    seg.words
                        .iter()
                        .copied()
                        .zip(seg.topics.iter().copied())
                        .collect(),
                );
                for (w, z) in pairs {
                    fresh.add(u, side, w, z, 1);
                }
            }
        }
        fresh
    }

    /// Units reordered by `order` (a permutation of unit indices), recounted.
    pub fn permuted(&self, order: &[usize]) -> PlmState {
        let mut out = self.clone();
        out.units = order.iter().map(|&i| self.units[i].clone()).collect();
        out.recount()
    }

    /// Verifies that every count table agrees with the assignments.
    pub fn check_consistency(&self) -> Result<(), String> {
        let k = self.num_topics;
        for (u, unit) in self.units.iter().enumerate() {
            let row_sum: u32 = self.doc_topic(u).iter().sum();
            if row_sum as usize != unit.len() {
                return Err(alloc::format!(
                    "unit {u}: topic counts sum to {row_sum}, length is {}",
                    unit.len()
                ));
            }
            for seg in &unit.segments {
                if seg.words.len() != seg.topics.len() {
                    return Err(alloc::format!("unit {u}: assignment length mismatch"));
                }
                if seg.topics.iter().any(|&z| z as usize >= k) {
                    return Err(alloc::format!("unit {u}: topic label out of range"));
                }
            }
        }
        for l in 0..2 {
            for t in 0..k {
                let col: u32 = (0..self.vocab_sizes[l])
                    .map(|w| self.topic_word[l][w * k + t])
                    .sum();
                if col != self.topic_total[l][t] {
                    return Err(alloc::format!(
                        "language {l} topic {t}: word counts sum to {col}, total is {}",
                        self.topic_total[l][t]
                    ));
                }
            }
        }
        if self.recount() != *self {
            return Err("count tables differ from a recount of the assignments".to_string());
        }
        Ok(())
    }

    /// Collapsed joint log-likelihood `ln p(w, z | α, β)`.
    pub fn log_likelihood(&self) -> f64 {
        let k = self.num_topics;
        let mut ll = 0.0;
        for l in 0..2 {
            let v = self.vocab_sizes[l] as f64;
            let lg_beta = math::ln_gamma(self.beta);
            for t in 0..k {
                ll += math::ln_gamma(v * self.beta)
                    - math::ln_gamma(self.topic_total[l][t] as f64 + v * self.beta);
            }
            for &c in &self.topic_word[l] {
                if c > 0 {
                    ll += math::ln_gamma(c as f64 + self.beta) - lg_beta;
                }
            }
        }
        let alpha_sum: f64 = self.alpha.iter().sum();
        let lg_alpha: Vec<f64> = self.alpha.iter().map(|&a| math::ln_gamma(a)).collect();
        for (u, unit) in self.units.iter().enumerate() {
            ll += math::ln_gamma(alpha_sum) - math::ln_gamma(unit.len() as f64 + alpha_sum);
            for (t, &c) in self.doc_topic(u).iter().enumerate() {
                if c > 0 {
                    ll += math::ln_gamma(c as f64 + self.alpha[t]) - lg_alpha[t];
                }
            }
        }
        ll
    }

    /// Runs the Dirichlet fixed-point update on the current document-topic
    /// counts and stores the result.
    pub fn optimize_alpha(&mut self) -> &[f64] {
        let rows: Vec<&[u32]> = (0..self.units.len()).map(|u| self.doc_topic(u)).collect();
        self.alpha = optimize_alpha(&self.alpha, &rows);
        &self.alpha
    }
}

/// Dirichlet–multinomial fixed-point update of an asymmetric prior from
/// document-topic count rows, iterated to convergence and clamped to
/// `[ALPHA_MIN, ALPHA_MAX]`. Uses count histograms so each step costs
/// O(K · max document length).
pub fn optimize_alpha(alpha: &[f64], rows: &[&[u32]]) -> Vec<f64> {
    let k = alpha.len();
    let max_len = rows
        .iter()
        .map(|r| r.iter().sum::<u32>())
        .max()
        .unwrap_or(0) as usize;
    if max_len == 0 {
        return alpha.to_vec();
    }
    let mut length_hist = vec![0u64; max_len + 1];
    let mut count_hist = vec![vec![0u64; max_len + 1]; k];
    for row in rows {
        let n: u32 = row.iter().sum();
        length_hist[n as usize] += 1;
        for (t, &c) in row.iter().enumerate() {
            count_hist[t][c as usize] += 1;
        }
    }
    let mut current: Vec<f64> = alpha
        .iter()
        .map(|a| a.clamp(ALPHA_MIN, ALPHA_MAX))
        .collect();
    for _ in 0..ALPHA_FIXED_POINT_ITERATIONS {
        let alpha_sum: f64 = current.iter().sum();
        // Σ_d [ψ(n_d + α₀) − ψ(α₀)] as a running harmonic-style sum
        let mut denom = 0.0;
        let mut partial = 0.0;
        for (n, &docs) in length_hist.iter().enumerate().skip(1) {
            partial += 1.0 / (n as f64 - 1.0 + alpha_sum);
            denom += docs as f64 * partial;
        }
        if denom <= 0.0 {
            break;
        }
        let mut max_change: f64 = 0.0;
        let next: Vec<f64> = current
            .iter()
            .zip(&count_hist)
            .map(|(&a, hist)| {
                let mut num = 0.0;
                let mut partial = 0.0;
                for (n, &docs) in hist.iter().enumerate().skip(1) {
                    partial += 1.0 / (n as f64 - 1.0 + a);
                    num += docs as f64 * partial;
                }
                let updated = (a * num / denom).clamp(ALPHA_MIN, ALPHA_MAX);
                max_change = max_change.max(math::abs(updated - a) / a);
                updated
            })
            .collect();
        current = next;
        if max_change < ALPHA_FIXED_POINT_TOLERANCE {
            break;
        }
    }
    current
}

/// Unnormalized full conditional of each topic for one token, given counts
/// that already exclude the token.
pub fn conditional_weights(
    doc_topic: &[u32],
    word_topic: &[u32],
    topic_total: &[u32],
    alpha: &[f64],
    beta: f64,
    vocab_size: usize,
) -> Vec<f64> {
    let vb = vocab_size as f64 * beta;
    (0..doc_topic.len())
        .map(|t| {
            (doc_topic[t] as f64 + alpha[t]) * (word_topic[t] as f64 + beta)
                / (topic_total[t] as f64 + vb)
        })
        .collect()
}

/// Chooses which document pairs share topic counts.
pub fn select_links(corpus: &CorpusPair, fraction: f64, seed: u64) -> Vec<bool> {
    let mut candidates: Vec<usize> = corpus
        .docs()
        .iter()
        .filter(|d| d.linked)
        .map(|d| d.id)
        .collect();
    let take = math::round(fraction * candidates.len() as f64) as usize;
    let mut rng = seeded_rng(seed);
    candidates.shuffle(&mut rng);
    let mut linked = vec![false; corpus.doc_count()];
    for &d in candidates.iter().take(take) {
        linked[d] = true;
    }
    linked
}

/// Seed of chain `chain` derived from the configured seed.
pub fn chain_seed(seed: u64, chain: usize) -> u64 {
    seed ^ (chain as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One Gibbs chain.
pub struct Sampler {
    state: PlmState,
    rng: SeededRng,
    config: PlmConfig,
    iteration: usize,
    chain: usize,
    weights: Vec<f64>,
    theta_acc: Vec<f64>,
    phi_acc: [Vec<f64>; 2],
    accumulated: usize,
}

impl Sampler {
    pub fn new(corpus: &CorpusPair, config: &PlmConfig, chain: usize) -> Result<Self, PlmError> {
        config.validate()?;
        let k = config.num_topics;
        let va = corpus.vocab(Side::A).len();
        let vb = corpus.vocab(Side::B).len();
        let linked = select_links(corpus, config.link_fraction, config.seed);
        let mut units = Vec::new();
        for doc in corpus.docs() {
            let seg = |side: Side| Segment {
                pair: doc.id,
                side,
                words: doc.tokens(side).to_vec(),
                topics: vec![0; doc.tokens(side).len()],
            };
            if linked[doc.id] {
                units.push(Unit {
                    segments: vec![seg(Side::A), seg(Side::B)],
                });
            } else {
                units.push(Unit {
                    segments: vec![seg(Side::A)],
                });
                units.push(Unit {
                    segments: vec![seg(Side::B)],
                });
            }
        }
        let cells = k.saturating_mul(va + vb + units.len());
        if cells > config.max_cells {
            return Err(PlmError::Capacity {
                cells,
                limit: config.max_cells,
            });
        }
        let mut state = PlmState::empty(k, [va, vb], units, config.alpha, config.beta);
        let mut rng = seeded_rng(chain_seed(config.seed, chain));
        for u in 0..state.units.len() {
            for s in 0..state.units[u].segments.len() {
                let n = state.units[u].segments[s].words.len();
                for i in 0..n {
                    let z = rng.gen_range(0..k) as u32;
                    let seg = &mut state.units[u].segments[s];
                    seg.topics[i] = z;
                    let (side, w) = (seg.side, seg.words[i]);
                    state.add(u, side, w, z, 1);
                }
            }
        }
        Ok(Sampler {
            weights: vec![0.0; k],
            theta_acc: Vec::new(),
            phi_acc: [Vec::new(), Vec::new()],
            accumulated: 0,
            state,
            rng,
            config: config.clone(),
            iteration: 0,
            chain,
        })
    }

    pub fn state(&self) -> &PlmState {
        &self.state
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Resamples every token once, then optimizes the prior when scheduled.
    pub fn sweep(&mut self) {
        let k = self.state.num_topics;
        let beta = self.state.beta;
        for u in 0..self.state.units.len() {
            for s in 0..self.state.units[u].segments.len() {
                let side = self.state.units[u].segments[s].side;
                let l = lang(side);
                let vbeta = self.state.vocab_sizes[l] as f64 * beta;
                for i in 0..self.state.units[u].segments[s].words.len() {
                    let seg = &self.state.units[u].segments[s];
                    let (w, old) = (seg.words[i], seg.topics[i]);
                    self.state.add(u, side, w, old, -1);
                    let st = &self.state;
                    let dt = &st.doc_topic[u * k..(u + 1) * k];
                    let wt = &st.topic_word[l][w as usize * k..(w as usize + 1) * k];
                    let tt = &st.topic_total[l];
                    let mut total = 0.0;
                    for t in 0..k {
                        total += (dt[t] as f64 + st.alpha[t]) * (wt[t] as f64 + beta)
                            / (tt[t] as f64 + vbeta);
                        self.weights[t] = total;
                    }
                    let target = self.rng.gen::<f64>() * total;
                    let new = self
                        .weights
                        .iter()
                        .position(|&c| c > target)
                        .unwrap_or(k - 1) as u32;
                    self.state.units[u].segments[s].topics[i] = new;
                    self.state.add(u, side, w, new, 1);
                }
            }
        }
        self.iteration += 1;
        let interval = self.config.optimize_interval;
        if interval > 0 && self.iteration % interval == 0 {
            self.state.optimize_alpha();
        }
        if self.config.sample_sweeps > 0
            && self.iteration + self.config.sample_sweeps > self.config.iterations
        {
            self.accumulate();
        }
    }

    fn accumulate(&mut self) {
        let (theta, phi) = estimates(&self.state);
        if self.accumulated == 0 {
            self.theta_acc = theta;
            self.phi_acc = phi;
        } else {
            for (a, v) in self.theta_acc.iter_mut().zip(theta) {
                *a += v;
            }
            for l in 0..2 {
                for (a, v) in self.phi_acc[l].iter_mut().zip(&phi[l]) {
                    *a += v;
                }
            }
        }
        self.accumulated += 1;
    }

    /// Runs the remaining sweeps and returns the finished chain.
    pub fn run(mut self) -> ChainResult {
        while self.iteration < self.config.iterations {
            self.sweep();
        }
        self.finish()
    }

    pub fn finish(self) -> ChainResult {
        let log_likelihood = self.state.log_likelihood();
        let (theta, phi) = if self.accumulated > 0 {
            let n = self.accumulated as f64;
            let scale = |v: Vec<f64>| v.into_iter().map(|x| x / n).collect::<Vec<_>>();
            let [pa, pb] = self.phi_acc;
            (scale(self.theta_acc), [scale(pa), scale(pb)])
        } else {
            estimates(&self.state)
        };
        ChainResult {
            chain: self.chain,
            log_likelihood,
            theta,
            phi,
            state: self.state,
        }
    }
}

/// Posterior-mean θ (units × K) and φ (per language, K × V) from counts.
fn estimates(state: &PlmState) -> (Vec<f64>, [Vec<f64>; 2]) {
    let k = state.num_topics;
    let alpha_sum: f64 = state.alpha.iter().sum();
    let mut theta = Vec::with_capacity(state.units.len() * k);
    for (u, unit) in state.units.iter().enumerate() {
        let denom = unit.len() as f64 + alpha_sum;
        theta.extend(
            state
                .doc_topic(u)
                .iter()
                .zip(&state.alpha)
                .map(|(&c, &a)| (c as f64 + a) / denom),
        );
    }
    let phi = [0, 1].map(|l| {
        let v = state.vocab_sizes[l];
        let mut out = vec![0.0; k * v];
        for t in 0..k {
            let denom = state.topic_total[l][t] as f64 + v as f64 * state.beta;
            for w in 0..v {
                out[t * v + w] = (state.topic_word[l][w * k + t] as f64 + state.beta) / denom;
            }
        }
        out
    });
    (theta, phi)
}

/// A finished chain with its estimates.
#[derive(Debug, Clone)]
pub struct ChainResult {
    pub chain: usize,
    pub log_likelihood: f64,
    pub state: PlmState,
    theta: Vec<f64>,
    phi: [Vec<f64>; 2],
}

/// Trained model: θ per document and language, φ per language.
#[derive(Debug, Clone, PartialEq)]
pub struct PlmOutput {
    pub num_topics: usize,
    /// Per document pair, θ of its language-A view.
    pub theta_a: Vec<Vec<f64>>,
    /// Per document pair, θ of its language-B view (equal to `theta_a` when linked).
    pub theta_b: Vec<Vec<f64>>,
    /// K rows over the language-A vocabulary.
    pub phi_a: Vec<Vec<f64>>,
    pub phi_b: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub linked: Vec<bool>,
    pub log_likelihood: f64,
    pub chain: usize,
    pub vocab_a: Vocabulary,
    pub vocab_b: Vocabulary,
}

impl PlmOutput {
    /// Picks the chain with the highest final joint log-likelihood (ties go
    /// to the lower chain index).
    pub fn from_chains(corpus: &CorpusPair, chains: Vec<ChainResult>) -> PlmOutput {
        let best = chains
            .into_iter()
            .reduce(|best, c| {
                if c.log_likelihood > best.log_likelihood {
                    c
                } else {
                    best
                }
            })
            .expect("at least one chain");
        let k = best.state.num_topics;
        let n = corpus.doc_count();
        let mut theta_a = vec![Vec::new(); n];
        let mut theta_b = vec![Vec::new(); n];
        let mut linked = vec![false; n];
        for (u, unit) in best.state.units.iter().enumerate() {
            let row = best.theta[u * k..(u + 1) * k].to_vec();
            linked_flag(unit, &mut linked);
            for seg in &unit.segments {
                match seg.side {
                    Side::A => theta_a[seg.pair] = row.clone(),
                    Side::B => theta_b[seg.pair] = row.clone(),
                }
            }
        }
        let rows = |flat: &[f64], v: usize| -> Vec<Vec<f64>> {
            (0..k).map(|t| flat[t * v..(t + 1) * v].to_vec()).collect()
        };
        PlmOutput {
            num_topics: k,
            theta_a,
            theta_b,
            phi_a: rows(&best.phi[0], best.state.vocab_sizes[0]),
            phi_b: rows(&best.phi[1], best.state.vocab_sizes[1]),
            alpha: best.state.alpha.clone(),
            linked,
            log_likelihood: best.log_likelihood,
            chain: best.chain,
            vocab_a: corpus.vocab(Side::A).clone(),
            vocab_b: corpus.vocab(Side::B).clone(),
        }
    }

    pub fn theta(&self, side: Side) -> &[Vec<f64>] {
        match side {
            Side::A => &self.theta_a,
            Side::B => &self.theta_b,
        }
    }

    pub fn phi(&self, side: Side) -> &[Vec<f64>] {
        match side {
            Side::A => &self.phi_a,
            Side::B => &self.phi_b,
        }
    }

    pub fn vocab(&self, side: Side) -> &Vocabulary {
        match side {
            Side::A => &self.vocab_a,
            Side::B => &self.vocab_b,
        }
    }

    /// Ids of the `c` most probable words of a topic, ties by lower id.
    pub fn top_word_ids(&self, side: Side, topic: usize, c: usize) -> Vec<u32> {
        let row = &self.phi(side)[topic];
        let mut ids: Vec<u32> = (0..row.len() as u32).collect();
        ids.sort_by(|&x, &y| row[y as usize].total_cmp(&row[x as usize]).then(x.cmp(&y)));
        ids.truncate(c);
        ids
    }

    /// Top-`c` words per language for every topic.
    pub fn topics(&self, c: usize) -> Result<Vec<MultilingualTopic>, PlmError> {
        let available = self.vocab_a.len().min(self.vocab_b.len());
        if c == 0 || c > available {
            return Err(PlmError::VocabularyTooSmall {
                requested: c,
                available,
            });
        }
        (0..self.num_topics)
            .map(|t| {
                let words = |side: Side| -> Vec<String> {
                    self.top_word_ids(side, t, c)
                        .into_iter()
                        .map(|id| self.vocab(side).token(id).unwrap_or_default().to_string())
                        .collect()
                };
                MultilingualTopic::new(words(Side::A), words(Side::B))
                    .map_err(|e| PlmError::InvalidConfig(e.to_string()))
            })
            .collect()
    }
}

fn linked_flag(unit: &Unit, linked: &mut [bool]) {
    if unit.segments.len() == 2 {
        linked[unit.segments[0].pair] = true;
    }
}

/// Runs a single chain to completion.
pub fn run_chain(
    corpus: &CorpusPair,
    config: &PlmConfig,
    chain: usize,
) -> Result<ChainResult, PlmError> {
    Ok(Sampler::new(corpus, config, chain)?.run())
}

/// Trains `config.chains` chains sequentially and keeps the best one.
pub fn train(corpus: &CorpusPair, config: &PlmConfig) -> Result<PlmOutput, PlmError> {
    config.validate()?;
    let chains = (0..config.chains)
        .map(|c| run_chain(corpus, config, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PlmOutput::from_chains(corpus, chains))
}
