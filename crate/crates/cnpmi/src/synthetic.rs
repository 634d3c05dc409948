//! Synthetic corpora with planted structure, for experiments and tests.

use cnpmi_core::corpus::CorpusError;
use cnpmi_core::{
    seeded_rng, BilingualDictionary, CorpusPair, EraLexicon, MultilingualTopic, SeededRng,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// Token for word `i` of topic `t` in the language with prefix `lang`.
pub fn topic_word(lang: &str, t: usize, i: usize) -> String {
    format!("{lang}t{t}w{i}")
}

pub fn background_word(lang: &str, i: usize) -> String {
    format!("{lang}bg{i}")
}

/// Parameters of a parallel corpus drawn from planted shared topics.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpec {
    pub lang_a: String,
    pub lang_b: String,
    pub docs: usize,
    pub topics: usize,
    pub words_per_topic: usize,
    /// Zipf exponent of word probabilities inside a topic.
    pub zipf: f64,
    pub background_words: usize,
    /// Probability that a token is drawn from the background.
    pub background_rate: f64,
    pub min_len: usize,
    pub max_len: usize,
    /// Each document mixes this many distinct topics.
    pub topics_per_doc: usize,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec {
            lang_a: "en".into(),
            lang_b: "xx".into(),
            docs: 500,
            topics: 5,
            words_per_topic: 20,
            zipf: 1.0,
            background_words: 50,
            background_rate: 0.1,
            min_len: 20,
            max_len: 40,
            topics_per_doc: 2,
        }
    }
}

/// A generated parallel corpus and, per planted topic, its words in rank
/// order.
#[derive(Debug, Clone)]
pub struct Planted {
    pub corpus: CorpusPair,
    pub topic_words_a: Vec<Vec<String>>,
    pub topic_words_b: Vec<Vec<String>>,
}

impl Planted {
    /// The planted topics truncated to `c` words per side.
    pub fn topics(&self, c: usize) -> Vec<MultilingualTopic> {
        self.topic_words_a
            .iter()
            .zip(&self.topic_words_b)
            .map(|(a, b)| {
                MultilingualTopic::new(a[..c].to_vec(), b[..c].to_vec())
                    .expect("planted words are distinct")
            })
            .collect()
    }
}

/// Cumulative Zipf weights over `n` ranks.
fn zipf_cdf(n: usize, s: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = (1..=n)
        .map(|r| {
            acc += 1.0 / (r as f64).powf(s);
            acc
        })
        .collect();
    for v in &mut cdf {
        *v /= acc;
    }
    cdf
}

fn draw(cdf: &[f64], rng: &mut SeededRng) -> usize {
    let u: f64 = rng.gen();
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

pub fn planted_corpus(spec: &PlantedSpec, seed: u64) -> Result<Planted, CorpusError> {
    let mut rng = seeded_rng(seed);
    let cdf = zipf_cdf(spec.words_per_topic, spec.zipf);
    let topic_ids: Vec<usize> = (0..spec.topics).collect();
    let mut docs_a = Vec::with_capacity(spec.docs);
    let mut docs_b = Vec::with_capacity(spec.docs);
    for _ in 0..spec.docs {
        let mix: Vec<usize> = topic_ids
            .choose_multiple(&mut rng, spec.topics_per_doc.min(spec.topics))
            .copied()
            .collect();
        for (lang, out) in [(&spec.lang_a, &mut docs_a), (&spec.lang_b, &mut docs_b)] {
            let len = rng.gen_range(spec.min_len..=spec.max_len);
            let doc: Vec<String> = (0..len)
                .map(|_| {
                    if spec.background_words > 0 && rng.gen_bool(spec.background_rate) {
                        background_word(lang, rng.gen_range(0..spec.background_words))
                    } else {
                        let t = *mix.choose(&mut rng).expect("nonempty mix");
                        topic_word(lang, t, draw(&cdf, &mut rng))
                    }
                })
                .collect();
            out.push(doc);
        }
    }
    let corpus = CorpusPair::from_tokenized(&spec.lang_a, &spec.lang_b, &docs_a, &docs_b, 1.0)?;
    let words = |lang: &str| -> Vec<Vec<String>> {
        (0..spec.topics)
            .map(|t| {
                (0..spec.words_per_topic)
                    .map(|i| topic_word(lang, t, i))
                    .collect()
            })
            .collect()
    };
    Ok(Planted {
        topic_words_a: words(&spec.lang_a),
        topic_words_b: words(&spec.lang_b),
        corpus,
    })
}

/// Parameters of a multi-language world for estimator experiments.
///
/// Every language is paired with a shared pivot. Themes are either old (seen
/// by the narrow reference) or modern (only in the broad one). Some old
/// words drift: the broad corpus uses them inside a modern theme.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldSpec {
    pub pivot: String,
    pub languages: Vec<String>,
    pub old_themes: usize,
    pub modern_themes: usize,
    pub words_per_theme: usize,
    /// Every this-many-th word of an old theme drifts; 0 disables drift.
    pub drift_every: usize,
    pub background_words: usize,
    pub background_rate: f64,
    pub narrow_docs: usize,
    pub broad_docs: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub topics_per_language: usize,
    pub cardinality: usize,
    /// Probability that a topic's theme word is paired with its translation.
    pub translation_rate: f64,
    /// Fraction of theme word translations listed in the dictionary.
    pub dictionary_coverage: f64,
}

impl Default for WorldSpec {
    fn default() -> Self {
        WorldSpec {
            pivot: "en".into(),
            languages: vec!["am".into(), "ro".into(), "sv".into(), "tl".into()],
            old_themes: 4,
            modern_themes: 8,
            words_per_theme: 30,
            drift_every: 4,
            background_words: 300,
            background_rate: 0.2,
            narrow_docs: 300,
            broad_docs: 2000,
            min_len: 10,
            max_len: 30,
            topics_per_language: 40,
            cardinality: 10,
            translation_rate: 0.8,
            dictionary_coverage: 0.8,
        }
    }
}

/// One language pair of a [`World`]; the pivot is side A everywhere.
#[derive(Debug, Clone)]
pub struct LanguageWorld {
    pub language: String,
    pub narrow: CorpusPair,
    pub broad: CorpusPair,
    pub dictionary: BilingualDictionary,
    pub topics: Vec<MultilingualTopic>,
}

#[derive(Debug, Clone)]
pub struct World {
    pub era: EraLexicon,
    /// Modern pivot-language corpus (both sides in the pivot language).
    pub aux: CorpusPair,
    pub languages: Vec<LanguageWorld>,
}

impl WorldSpec {
    fn themes(&self) -> usize {
        self.old_themes + self.modern_themes
    }

    fn drifts(&self, theme: usize, word: usize) -> bool {
        theme < self.old_themes
            && self.drift_every > 0
            && word % self.drift_every == self.drift_every - 1
    }

    /// Theme under which the broad corpus uses an old theme's drifting word.
    fn drift_target(&self, theme: usize) -> usize {
        self.old_themes + theme % self.modern_themes.max(1)
    }
}

/// Draws a reference corpus over `themes`, one theme per document.
fn themed_corpus(
    spec: &WorldSpec,
    lang: &str,
    themes: &[usize],
    docs: usize,
    broad: bool,
    rng: &mut SeededRng,
) -> Result<CorpusPair, CorpusError> {
    let cdf = zipf_cdf(spec.words_per_theme, 1.0);
    // words each theme emits in this corpus
    let mut emitted: Vec<Vec<(usize, usize)>> = vec![Vec::new(); spec.themes()];
    for t in 0..spec.themes() {
        for i in 0..spec.words_per_theme {
            let owner = if broad && spec.drifts(t, i) {
                spec.drift_target(t)
            } else {
                t
            };
            emitted[owner].push((t, i));
        }
    }
    let mut docs_a = Vec::with_capacity(docs);
    let mut docs_b = Vec::with_capacity(docs);
    for _ in 0..docs {
        let theme = *themes.choose(rng).expect("at least one theme");
        let words = &emitted[theme];
        for (l, out) in [(spec.pivot.as_str(), &mut docs_a), (lang, &mut docs_b)] {
            let len = rng.gen_range(spec.min_len..=spec.max_len);
            let doc: Vec<String> = (0..len)
                .map(|_| {
                    if rng.gen_bool(spec.background_rate) {
                        background_word(l, rng.gen_range(0..spec.background_words))
                    } else {
                        let (t, i) = words[draw(&cdf, rng) % words.len()];
                        topic_word(l, t, i)
                    }
                })
                .collect();
            out.push(doc);
        }
    }
    CorpusPair::from_tokenized(&spec.pivot, lang, &docs_a, &docs_b, 1.0)
}

/// A topic drawn from one theme with a random share of theme words; the
/// rest is background noise.
fn world_topic(spec: &WorldSpec, lang: &str, rng: &mut SeededRng) -> MultilingualTopic {
    let c = spec.cardinality;
    let theme = rng.gen_range(0..spec.themes());
    let quality: f64 = rng.gen();
    let m = ((quality * c as f64).round() as usize).min(spec.words_per_theme);
    let mut ranks: Vec<usize> = (0..spec.words_per_theme).collect();
    ranks.shuffle(rng);
    let chosen = &ranks[..m];
    let spare = &ranks[m..];
    let mut words_a: Vec<String> = chosen
        .iter()
        .map(|&i| topic_word(&spec.pivot, theme, i))
        .collect();
    let mut words_b: Vec<String> = Vec::with_capacity(c);
    let mut next_spare = 0;
    for &i in chosen {
        let j = if rng.gen_bool(spec.translation_rate) || next_spare == spare.len() {
            i
        } else {
            next_spare += 1;
            spare[next_spare - 1]
        };
        words_b.push(topic_word(lang, theme, j));
    }
    let mut noise: Vec<usize> = (0..spec.background_words).collect();
    noise.shuffle(rng);
    words_a.extend(
        noise[..c - m]
            .iter()
            .map(|&i| background_word(&spec.pivot, i)),
    );
    noise.shuffle(rng);
    words_b.extend(noise[..c - m].iter().map(|&i| background_word(lang, i)));
    MultilingualTopic::new(words_a, words_b).expect("distinct by construction")
}

pub fn estimator_world(spec: &WorldSpec, seed: u64) -> Result<World, CorpusError> {
    let mut rng = seeded_rng(seed);
    let mut era = EraLexicon::new();
    for t in 0..spec.themes() {
        for i in 0..spec.words_per_theme {
            let year = if t < spec.old_themes {
                rng.gen_range(1200..=1600)
            } else {
                rng.gen_range(1850..=1990)
            };
            era.insert(&topic_word(&spec.pivot, t, i), year)
                .expect("years inside the lexicon range");
        }
    }
    let old: Vec<usize> = (0..spec.old_themes).collect();
    let all: Vec<usize> = (0..spec.themes()).collect();
    let aux = themed_corpus(spec, &spec.pivot, &all, spec.broad_docs, true, &mut rng)?;
    let mut languages = Vec::with_capacity(spec.languages.len());
    for lang in &spec.languages {
        let narrow = themed_corpus(spec, lang, &old, spec.narrow_docs, false, &mut rng)?;
        let broad = themed_corpus(spec, lang, &all, spec.broad_docs, true, &mut rng)?;
        let mut dictionary = BilingualDictionary::new();
        for t in 0..spec.themes() {
            for i in 0..spec.words_per_theme {
                if rng.gen_bool(spec.dictionary_coverage) {
                    dictionary.insert(&topic_word(&spec.pivot, t, i), &topic_word(lang, t, i));
                }
            }
        }
        let topics = (0..spec.topics_per_language)
            .map(|_| world_topic(spec, lang, &mut rng))
            .collect();
        languages.push(LanguageWorld {
            language: lang.clone(),
            narrow,
            broad,
            dictionary,
            topics,
        });
    }
    Ok(World {
        era,
        aux,
        languages,
    })
}
