//! Reading and writing the on-disk formats: aligned corpora, TSV
//! dictionaries and lexicons, topic JSON, score tables, θ and φ exports,
//! label files, estimator models and feature matrices.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use cnpmi_core::corpus::CorpusError;
use cnpmi_core::estimator::{FeatureVector, FEATURE_NAMES, MODEL_VERSION};
use cnpmi_core::{
    BilingualDictionary, CorpusPair, EraLexicon, EstimatorModel, MultilingualTopic, PlmOutput,
    Side, TopicScore,
};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Corpus {
        path: PathBuf,
        #[source]
        source: CorpusError,
    },
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> FormatError + '_ {
    move |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn invalid(path: &Path, message: impl Into<String>) -> FormatError {
    FormatError::Invalid {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Writes through a sibling temporary file so readers never see a
/// truncated file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = partial_path(path);
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// `path` with `.partial` appended.
pub fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".partial");
    PathBuf::from(name)
}

/// Loads an aligned corpus from two files, one document per line.
pub fn read_corpus(
    path_a: &Path,
    path_b: &Path,
    lang_a: &str,
    lang_b: &str,
    prune_threshold: f64,
) -> Result<CorpusPair> {
    let text_a = read_text(path_a)?;
    let text_b = read_text(path_b)?;
    CorpusPair::from_texts(lang_a, lang_b, &text_a, &text_b, prune_threshold).map_err(|source| {
        FormatError::Corpus {
            path: path_a.to_path_buf(),
            source,
        }
    })
}

/// A monolingual corpus file viewed as a pair with itself, for context
/// statistics.
pub fn read_monolingual(path: &Path, lang: &str) -> Result<CorpusPair> {
    let text = read_text(path)?;
    CorpusPair::from_texts(lang, lang, &text, &text, 1.0).map_err(|source| FormatError::Corpus {
        path: path.to_path_buf(),
        source,
    })
}

pub fn corpus_side_text(corpus: &CorpusPair, side: Side) -> String {
    let mut out = String::new();
    for d in 0..corpus.doc_count() {
        out.push_str(&corpus.decode(d, side).join(" "));
        out.push('\n');
    }
    out
}

pub fn write_corpus(corpus: &CorpusPair, path_a: &Path, path_b: &Path) -> Result<()> {
    write_atomic(path_a, corpus_side_text(corpus, Side::A).as_bytes())?;
    write_atomic(path_b, corpus_side_text(corpus, Side::B).as_bytes())
}

fn corpus_parse(path: &Path, e: CorpusError) -> FormatError {
    match e {
        CorpusError::Parse { line, message } => parse_err(path, line, message),
        source => FormatError::Corpus {
            path: path.to_path_buf(),
            source,
        },
    }
}

pub fn read_dictionary(path: &Path) -> Result<BilingualDictionary> {
    BilingualDictionary::parse(&read_text(path)?).map_err(|e| corpus_parse(path, e))
}

pub fn write_dictionary(dict: &BilingualDictionary, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (a, b) in dict.entries() {
        let _ = writeln!(out, "{a}\t{b}");
    }
    write_atomic(path, out.as_bytes())
}

pub fn read_era_lexicon(path: &Path) -> Result<EraLexicon> {
    EraLexicon::parse(&read_text(path)?).map_err(|e| corpus_parse(path, e))
}

pub fn write_era_lexicon(era: &EraLexicon, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (w, y) in era.iter() {
        let _ = writeln!(out, "{w}\t{y}");
    }
    write_atomic(path, out.as_bytes())
}

/// A word entry: either `"word"`, `["word", p]` or `{"word": .., "prob": ..}`.
fn topic_word(v: &Value) -> Option<&str> {
    match v {
        Value::String(s) => Some(s),
        Value::Array(items) => items.first().and_then(Value::as_str),
        Value::Object(map) => map.get("word").and_then(Value::as_str),
        _ => None,
    }
}

/// The two languages of a topic file: the keys of its first topic, sorted.
pub fn topic_languages(path: &Path) -> Result<(String, String)> {
    let value = read_topic_json(path)?;
    let first = value
        .first()
        .and_then(Value::as_object)
        .ok_or_else(|| invalid(path, "topic file holds no topics"))?;
    let mut keys: Vec<&String> = first.keys().collect();
    keys.sort();
    match keys.as_slice() {
        [a, b] => Ok(((*a).clone(), (*b).clone())),
        _ => Err(invalid(
            path,
            format!(
                "cannot infer the language pair from {} keys; name them explicitly",
                keys.len()
            ),
        )),
    }
}

fn read_topic_json(path: &Path) -> Result<Vec<Value>> {
    let text = read_text(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))?;
    match value {
        Value::Array(items) => Ok(items),
        _ => Err(invalid(path, "expected a JSON list of topics")),
    }
}

/// Reads topics for languages `lang_a` and `lang_b`; extra languages are
/// ignored, a missing one is an error.
pub fn read_topics(path: &Path, lang_a: &str, lang_b: &str) -> Result<Vec<MultilingualTopic>> {
    read_topic_json(path)?
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let map = item
                .as_object()
                .ok_or_else(|| invalid(path, format!("topic {i} is not an object")))?;
            let words = |lang: &str| -> Result<Vec<String>> {
                let list = map.get(lang).and_then(Value::as_array).ok_or_else(|| {
                    invalid(
                        path,
                        format!("topic {i} has no word list for language {lang:?}"),
                    )
                })?;
                list.iter()
                    .map(|w| {
                        topic_word(w).map(str::to_string).ok_or_else(|| {
                            invalid(path, format!("topic {i}: malformed word entry {w}"))
                        })
                    })
                    .collect()
            };
            MultilingualTopic::new(words(lang_a)?, words(lang_b)?)
                .map_err(|e| invalid(path, format!("topic {i}: {e}")))
        })
        .collect()
}

pub fn topics_json(topics: &[MultilingualTopic], lang_a: &str, lang_b: &str) -> String {
    let list: Vec<Value> = topics
        .iter()
        .map(|t| {
            let mut m = serde_json::Map::new();
            m.insert(lang_a.into(), json!(t.words(Side::A)));
            m.insert(lang_b.into(), json!(t.words(Side::B)));
            Value::Object(m)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&list).expect("plain JSON values");
    s.push('\n');
    s
}

pub fn write_topics(
    topics: &[MultilingualTopic],
    lang_a: &str,
    lang_b: &str,
    path: &Path,
) -> Result<()> {
    write_atomic(path, topics_json(topics, lang_a, lang_b).as_bytes())
}

/// Writes a float so that it reads back exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Scores as `topic<TAB>metric<TAB>value`, ordered by topic then metric.
pub fn scores_tsv(scores: &[Vec<TopicScore>]) -> String {
    let mut out = String::from("topic\tmetric\tvalue\n");
    for (t, row) in scores.iter().enumerate() {
        let mut row = row.clone();
        row.sort_by_key(|s| s.metric.name());
        for s in row {
            let _ = writeln!(out, "{t}\t{}\t{}", s.metric, fmt_f64(s.value));
        }
    }
    out
}

/// Scores as a JSON object keyed by topic id.
pub fn scores_json(scores: &[Vec<TopicScore>]) -> String {
    let mut report = serde_json::Map::new();
    for (t, row) in scores.iter().enumerate() {
        let metrics: serde_json::Map<String, Value> = row
            .iter()
            .map(|s| (s.metric.name().to_string(), json!(s.value)))
            .collect();
        report.insert(t.to_string(), Value::Object(metrics));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(report)).expect("plain JSON values");
    s.push('\n');
    s
}

/// One row per document: `doc<TAB>p_0 ... p_{K-1}`.
pub fn theta_tsv(theta: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (d, row) in theta.iter().enumerate() {
        out.push_str(&d.to_string());
        for p in row {
            out.push('\t');
            out.push_str(&fmt_f64(*p));
        }
        out.push('\n');
    }
    out
}

/// Reads θ rows; document ids must run 0, 1, 2, ...
pub fn read_theta(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = read_text(path)?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let id: usize = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| parse_err(path, n + 1, "missing document id"))?;
        if id != rows.len() {
            return Err(parse_err(
                path,
                n + 1,
                format!("expected document {}, found {id}", rows.len()),
            ));
        }
        let row = fields
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(path, n + 1, e.to_string()))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

const PHI_MAGIC: &[u8; 8] = b"CNPMIPHI";
const PHI_VERSION: u32 = 1;

pub(crate) fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

/// φ of one language: header, vocabulary, then `K·V` little-endian f64.
pub fn phi_bytes(output: &PlmOutput, side: Side) -> Vec<u8> {
    let phi = output.phi(side);
    let vocab = output.vocab(side);
    let mut out = Vec::new();
    out.extend_from_slice(PHI_MAGIC);
    put_u32(&mut out, PHI_VERSION);
    put_u32(&mut out, phi.len() as u32);
    put_u32(&mut out, vocab.len() as u32);
    for t in vocab.tokens() {
        put_str(&mut out, t);
    }
    for row in phi {
        for p in row {
            out.extend_from_slice(&p.to_le_bytes());
        }
    }
    out
}

/// Little-endian reader over a byte buffer.
pub(crate) struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let s = self.bytes.get(self.pos..end)?;
        self.pos = end;
        Some(s)
    }

    pub(crate) fn u32(&mut self) -> Option<u32> {
        self.take(4)
            .map(|b| u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }

    pub(crate) fn u64(&mut self) -> Option<u64> {
        self.take(8)
            .map(|b| u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    pub(crate) fn f64(&mut self) -> Option<f64> {
        self.u64().map(f64::from_bits)
    }

    pub(crate) fn string(&mut self) -> Option<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).ok()
    }

    pub(crate) fn is_done(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

pub(crate) fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Vocabulary and K rows of φ.
pub type PhiTable = (Vec<String>, Vec<Vec<f64>>);

pub fn parse_phi(bytes: &[u8]) -> Option<PhiTable> {
    let mut c = Cursor::new(bytes);
    if c.take(8)? != PHI_MAGIC || c.u32()? != PHI_VERSION {
        return None;
    }
    let k = c.u32()? as usize;
    let v = c.u32()? as usize;
    let vocab = (0..v).map(|_| c.string()).collect::<Option<Vec<_>>>()?;
    let phi = (0..k)
        .map(|_| (0..v).map(|_| c.f64()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    c.is_done().then_some((vocab, phi))
}

pub fn read_phi(path: &Path) -> Result<PhiTable> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(io_err(path))?;
    parse_phi(&bytes).ok_or_else(|| invalid(path, "not a phi file of a supported version"))
}

/// Label file: `doc<TAB>cat1,cat2,...`. Documents missing from the file get
/// no labels; `docs` is the number of documents expected.
pub fn read_labels(path: &Path, docs: usize) -> Result<Vec<Vec<String>>> {
    let text = read_text(path)?;
    let mut labels = vec![Vec::new(); docs];
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, cats) = line.split_once('\t').unwrap_or((line, ""));
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| parse_err(path, n + 1, format!("bad document id {id:?}")))?;
        let slot = labels.get_mut(id).ok_or_else(|| {
            parse_err(
                path,
                n + 1,
                format!("document {id} out of range ({docs} documents)"),
            )
        })?;
        slot.extend(
            cats.split(',')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(String::from),
        );
    }
    Ok(labels)
}

pub fn labels_tsv(labels: &[Vec<String>]) -> String {
    let mut out = String::new();
    for (d, cats) in labels.iter().enumerate() {
        let _ = writeln!(out, "{d}\t{}", cats.join(","));
    }
    out
}

/// `model<TAB>f1` rows.
pub fn results_tsv(rows: &[(String, f64)]) -> String {
    let mut out = String::from("model\tf1\n");
    for (id, f1) in rows {
        let _ = writeln!(out, "{id}\t{}", fmt_f64(*f1));
    }
    out
}

pub fn model_json(model: &EstimatorModel) -> String {
    let mut s = serde_json::to_string_pretty(model).expect("model serializes");
    s.push('\n');
    s
}

pub fn read_model(path: &Path) -> Result<EstimatorModel> {
    let text = read_text(path)?;
    let model: EstimatorModel =
        serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))?;
    if model.version != MODEL_VERSION {
        return Err(invalid(
            path,
            format!(
                "model version {} is not supported (expected {MODEL_VERSION})",
                model.version
            ),
        ));
    }
    if model.feature_names != FEATURE_NAMES {
        return Err(invalid(
            path,
            "model was trained on a different feature set",
        ));
    }
    Ok(model)
}

/// Feature matrix with a header row; `targets` adds a final column.
pub fn features_tsv(features: &[FeatureVector], targets: Option<&[f64]>) -> String {
    let mut out = String::from("topic");
    for name in FEATURE_NAMES {
        out.push('\t');
        out.push_str(name);
    }
    if targets.is_some() {
        out.push_str("\ttarget");
    }
    out.push('\n');
    for (i, f) in features.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in f.values() {
            out.push('\t');
            out.push_str(&fmt_f64(v));
        }
        if let Some(t) = targets {
            out.push('\t');
            out.push_str(&fmt_f64(t[i]));
        }
        out.push('\n');
    }
    out
}

/// Parses [`features_tsv`] output back into vectors and optional targets.
pub fn parse_features(path: &Path, text: &str) -> Result<(Vec<FeatureVector>, Option<Vec<f64>>)> {
    let mut lines = text.lines().enumerate();
    let header: Vec<&str> = lines
        .next()
        .map(|(_, l)| l.split('\t').collect())
        .ok_or_else(|| invalid(path, "empty feature file"))?;
    let has_target = header.last() == Some(&"target");
    let names = &header[1..header.len() - usize::from(has_target)];
    if names != FEATURE_NAMES {
        return Err(parse_err(
            path,
            1,
            "header does not name the expected features",
        ));
    }
    let mut features = Vec::new();
    let mut targets = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let vals = line
            .split('\t')
            .skip(1)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| parse_err(path, n + 1, e.to_string()))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != names.len() + usize::from(has_target) {
            return Err(parse_err(path, n + 1, "wrong number of columns"));
        }
        let arr: [f64; cnpmi_core::estimator::FEATURE_COUNT] =
            vals[..names.len()].try_into().expect("length checked");
        features.push(FeatureVector::from_values(&arr));
        if has_target {
            targets.push(vals[names.len()]);
        }
    }
    Ok((features, has_target.then_some(targets)))
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}
