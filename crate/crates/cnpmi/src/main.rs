use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cnpmi::config::{self, ConfigError, Params};
use cnpmi::experiments::{self, LanguageFeatures};
use cnpmi::formats::{self, fmt_f64};
use cnpmi::report::Report;
use cnpmi::{cache, layout, parallel};
use cnpmi_core::estimator::{Grid, LossKind};
use cnpmi_core::metrics::score_topic;
use cnpmi_core::{CooccurrenceIndex, CorpusPair, MtaMode, MultilingualTopic, Side};

#[derive(Parser, Debug)]
#[command(
    name = "cnpmi",
    version,
    about = "Crosslingual topic coherence evaluation"
)]
struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// key=value parameter file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Parameter override, applied after --config (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = "CNPMI_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a co-occurrence index of a reference corpus and cache it.
    Index(IndexArgs),
    /// Score every topic of a topic file against a reference.
    Score(ScoreArgs),
    /// Train a polylingual topic model; model parameters come from --config/--set.
    TrainPlm(TrainPlmArgs),
    /// Train the coherence estimator on a data directory.
    TrainEstimator(TrainEstimatorArgs),
    /// Estimate coherence for one language of a data directory.
    Estimate(EstimateArgs),
    /// Crosslingual classification from document-topic distributions.
    Classify(ClassifyArgs),
    /// Mean cnpmi and mta as the number of topic words grows.
    SweepCardinality(SweepCardinalityArgs),
    /// Mean cnpmi of models trained with a growing share of linked documents.
    SweepLinks(SweepLinksArgs),
    /// Mean cnpmi against growing samples of the reference corpus.
    SweepRefsize(SweepRefsizeArgs),
}

#[derive(Args, Debug)]
struct Languages {
    /// Language of the first side (inferred from the topic file when omitted).
    #[arg(long)]
    lang_a: Option<String>,
    #[arg(long)]
    lang_b: Option<String>,
}

#[derive(Args, Debug)]
struct ReferenceArgs {
    /// Reference corpus, first language, one document per line.
    #[arg(long)]
    reference_a: Option<PathBuf>,
    #[arg(long)]
    reference_b: Option<PathBuf>,
    /// Cached index; rebuilt from the reference when stale or missing.
    #[arg(long)]
    index: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IndexArgs {
    #[arg(long)]
    reference_a: PathBuf,
    #[arg(long)]
    reference_b: PathBuf,
    #[arg(long, default_value = "a")]
    lang_a: String,
    #[arg(long, default_value = "b")]
    lang_b: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScoreFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MtaArg {
    Matching,
    Raw,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(long)]
    topics: PathBuf,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[command(flatten)]
    langs: Languages,
    #[arg(long)]
    dictionary: Option<PathBuf>,
    /// Score only the top words of each topic.
    #[arg(long)]
    cardinality: Option<usize>,
    #[arg(long, value_enum, default_value_t = MtaArg::Matching)]
    mta_mode: MtaArg,
    #[arg(long, value_enum, default_value_t = ScoreFormat::Tsv)]
    format: ScoreFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainPlmArgs {
    #[arg(long)]
    corpus_a: PathBuf,
    #[arg(long)]
    corpus_b: PathBuf,
    #[arg(long)]
    lang_a: String,
    #[arg(long)]
    lang_b: String,
    /// Drop words in more than this share of documents.
    #[arg(long, default_value_t = 0.3)]
    prune: f64,
    /// Words per language written for each topic.
    #[arg(long, default_value_t = 50)]
    top_words: usize,
    /// Directory for topics.json, theta.<lang>.tsv, phi.<lang>.bin and report.tsv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct EstimatorCommon {
    /// Data directory (see the README for its layout).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "en")]
    pivot: String,
    #[arg(long, default_value_t = experiments::SWEEP_CARDINALITY)]
    cardinality: usize,
}

#[derive(Args, Debug)]
struct TrainEstimatorArgs {
    #[command(flatten)]
    common: EstimatorCommon,
    /// Training languages; defaults to every language with a target reference.
    #[arg(long, value_delimiter = ',')]
    languages: Vec<String>,
    /// Model output (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Cross-validation report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Feature matrix of the training topics, with targets.
    #[arg(long)]
    features_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    common: EstimatorCommon,
    #[arg(long)]
    language: String,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    theta_a: PathBuf,
    #[arg(long)]
    theta_b: PathBuf,
    #[arg(long)]
    labels_a: PathBuf,
    /// Labels of the second language's documents; defaults to --labels-a.
    #[arg(long)]
    labels_b: Option<PathBuf>,
    #[arg(long, default_value = "a")]
    lang_a: String,
    #[arg(long, default_value = "b")]
    lang_b: String,
    #[arg(long, default_value = "model")]
    model_id: String,
    /// Number of most frequent categories kept.
    #[arg(long, default_value_t = experiments::CLASSIFY_LABELS)]
    labels: usize,
    #[arg(long, default_value_t = 1e-3)]
    regularization: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepCardinalityArgs {
    #[arg(long)]
    topics: PathBuf,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[command(flatten)]
    langs: Languages,
    #[arg(long)]
    dictionary: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = experiments::CARDINALITIES)]
    cardinalities: Vec<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepLinksArgs {
    #[arg(long)]
    corpus_a: PathBuf,
    #[arg(long)]
    corpus_b: PathBuf,
    #[arg(long)]
    lang_a: String,
    #[arg(long)]
    lang_b: String,
    #[arg(long, default_value_t = 0.3)]
    prune: f64,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[arg(long, value_delimiter = ',', default_values_t = experiments::LINK_FRACTIONS)]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = experiments::SWEEP_CARDINALITY)]
    cardinality: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepRefsizeArgs {
    #[arg(long)]
    topics: PathBuf,
    #[arg(long)]
    reference_a: PathBuf,
    #[arg(long)]
    reference_b: PathBuf,
    #[command(flatten)]
    langs: Languages,
    #[arg(long, value_delimiter = ',', default_values_t = experiments::REFERENCE_FRACTIONS)]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = experiments::SWEEP_CARDINALITY)]
    cardinality: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Bad invocation: reported with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn config_usage(e: ConfigError) -> anyhow::Error {
    usage(e.to_string())
}

fn require_files<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(usage(format!("{}: no such file or directory", p.display())));
        }
    }
    Ok(())
}

fn load_params(cli: &Cli) -> Result<Params> {
    let mut params = match &cli.config {
        Some(path) => {
            require_files([path.as_path()])?;
            Params::parse(&formats::read_text(path)?).map_err(config_usage)?
        }
        None => Params::new(),
    };
    for s in &cli.set {
        params.set(s).map_err(config_usage)?;
    }
    Ok(params)
}

/// Languages from flags, or from the topic file.
fn resolve_languages(langs: &Languages, topics: &Path) -> Result<(String, String)> {
    match (&langs.lang_a, &langs.lang_b) {
        (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        (None, None) => Ok(formats::topic_languages(topics)?),
        _ => Err(usage("give both --lang-a and --lang-b, or neither")),
    }
}

fn reference_corpus(r: &ReferenceArgs, lang_a: &str, lang_b: &str) -> Result<Option<CorpusPair>> {
    match (&r.reference_a, &r.reference_b) {
        (Some(a), Some(b)) => Ok(Some(formats::read_corpus(a, b, lang_a, lang_b, 1.0)?)),
        (None, None) => Ok(None),
        _ => Err(usage("give both --reference-a and --reference-b")),
    }
}

fn load_index(r: &ReferenceArgs, lang_a: &str, lang_b: &str) -> Result<CooccurrenceIndex> {
    require_files(
        r.reference_a
            .iter()
            .chain(&r.reference_b)
            .map(PathBuf::as_path),
    )?;
    let corpus = reference_corpus(r, lang_a, lang_b)?;
    if let Some(path) = &r.index {
        if let Some(index) = cache::load(path, corpus.as_ref()) {
            return Ok(index);
        }
    }
    let Some(corpus) = corpus else {
        return Err(usage("need --reference-a/--reference-b or a valid --index"));
    };
    let index = parallel::build_index(&corpus, None);
    if let Some(path) = &r.index {
        cache::write(path, &index, &corpus)?;
        log::info!("cached index at {}", path.display());
    }
    Ok(index)
}

fn cmd_index(a: &IndexArgs) -> Result<()> {
    require_files([a.reference_a.as_path(), a.reference_b.as_path()])?;
    let corpus = formats::read_corpus(&a.reference_a, &a.reference_b, &a.lang_a, &a.lang_b, 1.0)?;
    let index = parallel::build_index(&corpus, None);
    cache::write(&a.out, &index, &corpus)?;
    eprintln!(
        "indexed {} documents, {} + {} word types",
        index.doc_count(),
        index.vocab(Side::A).len(),
        index.vocab(Side::B).len()
    );
    Ok(())
}

fn cmd_score(a: &ScoreArgs) -> Result<()> {
    require_files([a.topics.as_path()])?;
    require_files(a.dictionary.as_deref())?;
    let (la, lb) = resolve_languages(&a.langs, &a.topics)?;
    let mut topics = formats::read_topics(&a.topics, &la, &lb)?;
    if let Some(c) = a.cardinality {
        topics = topics
            .iter()
            .enumerate()
            .map(|(i, t)| t.truncated(c).with_context(|| format!("topic {i}")))
            .collect::<Result<_>>()?;
    }
    let dict = a
        .dictionary
        .as_deref()
        .map(formats::read_dictionary)
        .transpose()?;
    let index = load_index(&a.reference, &la, &lb)?;
    let mode = match a.mta_mode {
        MtaArg::Matching => MtaMode::Matching,
        MtaArg::Raw => MtaMode::RawCount,
    };
    use rayon::prelude::*;
    let scores: Vec<_> = topics
        .par_iter()
        .map(|t| score_topic(&index, dict.as_ref(), t, mode))
        .collect();
    let text = match a.format {
        ScoreFormat::Tsv => formats::scores_tsv(&scores),
        ScoreFormat::Json => formats::scores_json(&scores),
    };
    formats::emit(a.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_train_plm(cli: &Cli, a: &TrainPlmArgs, params: &Params) -> Result<()> {
    require_files([a.corpus_a.as_path(), a.corpus_b.as_path()])?;
    params
        .check_known(&config::PLM_KEYS)
        .map_err(config_usage)?;
    let cfg = config::plm_config(params, cli.seed).map_err(config_usage)?;
    let corpus = formats::read_corpus(&a.corpus_a, &a.corpus_b, &a.lang_a, &a.lang_b, a.prune)?;
    let model = parallel::train(&corpus, &cfg)?;
    let c = a
        .top_words
        .min(model.vocab_a.len())
        .min(model.vocab_b.len());
    let topics = model.topics(c)?;
    std::fs::create_dir_all(&a.out_dir).with_context(|| a.out_dir.display().to_string())?;
    let dir = &a.out_dir;
    formats::write_topics(&topics, &a.lang_a, &a.lang_b, &dir.join("topics.json"))?;
    for (side, lang) in [(Side::A, &a.lang_a), (Side::B, &a.lang_b)] {
        formats::write_atomic(
            &dir.join(format!("theta.{lang}.tsv")),
            formats::theta_tsv(model.theta(side)).as_bytes(),
        )?;
        formats::write_atomic(
            &dir.join(format!("phi.{lang}.bin")),
            &formats::phi_bytes(&model, side),
        )?;
    }
    let mut report = Report::new("train-plm", cli.seed, &["key", "value"]);
    for (k, v) in config::plm_settings(&cfg) {
        report.setting(&k, v);
    }
    report.setting("prune", a.prune).setting("top_words", c);
    if c < a.top_words {
        report.note(format!("vocabulary allows only {c} words per topic"));
    }
    let linked = model.linked.iter().filter(|&&l| l).count();
    for (k, v) in [
        ("documents", corpus.doc_count().to_string()),
        ("linked", linked.to_string()),
        ("chain", model.chain.to_string()),
        ("log_likelihood", fmt_f64(model.log_likelihood)),
        (
            "alpha",
            model
                .alpha
                .iter()
                .map(|x| fmt_f64(*x))
                .collect::<Vec<_>>()
                .join(","),
        ),
    ] {
        report.row(vec![k.into(), v]);
    }
    report.write(&dir.join("report.tsv"))?;
    Ok(())
}

fn grid(params: &Params) -> Result<Grid> {
    params
        .check_known(&["learning_rates", "losses", "stages"])
        .map_err(config_usage)?;
    let d = Grid::default();
    let losses = match params.list::<String>("losses").map_err(config_usage)? {
        Some(names) => names
            .iter()
            .map(|n| LossKind::parse(n).ok_or_else(|| usage(format!("unknown loss {n:?}"))))
            .collect::<Result<Vec<_>>>()?,
        None => d.losses,
    };
    Ok(Grid {
        learning_rates: params
            .list("learning_rates")
            .map_err(config_usage)?
            .unwrap_or(d.learning_rates),
        losses,
        stages: params.get_or("stages", d.stages).map_err(config_usage)?,
    })
}

fn estimator_inputs(
    common: &EstimatorCommon,
    languages: &[String],
) -> Result<Vec<LanguageFeatures>> {
    require_files([
        common.data.as_path(),
        layout::era_path(&common.data).as_path(),
        layout::aux_path(&common.data).as_path(),
    ])?;
    let era = layout::read_era(&common.data)?;
    let aux = layout::read_aux(&common.data, &common.pivot)?;
    languages
        .iter()
        .map(|lang| {
            let data = layout::read_language(&common.data, lang, &common.pivot)?;
            Ok(experiments::language_features(
                &data,
                &era,
                &aux,
                common.cardinality,
            )?)
        })
        .collect()
}

fn cmd_train_estimator(cli: &Cli, a: &TrainEstimatorArgs, params: &Params) -> Result<()> {
    let grid = grid(params)?;
    let languages = if a.languages.is_empty() {
        layout::languages(&a.common.data)?
            .into_iter()
            .filter(|l| {
                a.common
                    .data
                    .join(l)
                    .join(format!("target.{}", a.common.pivot))
                    .exists()
            })
            .collect()
    } else {
        a.languages.clone()
    };
    let langs = estimator_inputs(&a.common, &languages)?;
    let pool = experiments::training_pool(&langs)?;
    let (model, cv) = experiments::train_estimator(&pool, &grid, cli.seed)?;
    formats::write_atomic(&a.out, formats::model_json(&model).as_bytes())?;
    if let Some(path) = &a.features_out {
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for set in pool.values() {
            features.extend(set.features.iter().cloned());
            targets.extend(set.targets.iter().copied());
        }
        formats::write_atomic(
            path,
            formats::features_tsv(&features, Some(&targets)).as_bytes(),
        )?;
    }
    let mut report = Report::new(
        "train-estimator",
        cli.seed,
        &["loss", "learning_rate", "stages", "cv_pearson"],
    );
    report
        .setting("languages", languages.join(","))
        .setting("pivot", &a.common.pivot)
        .setting("cardinality", a.common.cardinality)
        .setting("stages", grid.stages);
    report.note(format!(
        "selected loss={} learning_rate={} (folds: {})",
        cv.best.loss.name(),
        cv.best.learning_rate,
        cv.folds
            .iter()
            .map(|f| f.join("+"))
            .collect::<Vec<_>>()
            .join(" | ")
    ));
    for (p, s) in &cv.scores {
        report.row(vec![
            p.loss.name().into(),
            fmt_f64(p.learning_rate),
            p.stages.to_string(),
            fmt_f64(*s),
        ]);
    }
    let path = a.report.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".cv.tsv");
        PathBuf::from(p)
    });
    report.write(&path)?;
    Ok(())
}

fn cmd_estimate(cli: &Cli, a: &EstimateArgs) -> Result<()> {
    require_files([a.model.as_path()])?;
    let model = formats::read_model(&a.model)?;
    let langs = estimator_inputs(&a.common, std::slice::from_ref(&a.language))?;
    let lang = &langs[0];
    let estimates = model.predict_all(&lang.features);
    let mut columns = vec!["topic", "estimate", "raw_cnpmi"];
    if lang.targets.is_some() {
        columns.push("target_cnpmi");
    }
    let mut report = Report::new("estimate", cli.seed, &columns);
    report
        .setting("language", &a.language)
        .setting("pivot", &a.common.pivot)
        .setting("cardinality", a.common.cardinality)
        .setting("model", a.model.display());
    for (i, (e, r)) in estimates.iter().zip(&lang.raw).enumerate() {
        let mut row = vec![i.to_string(), fmt_f64(*e), fmt_f64(*r)];
        if let Some(t) = &lang.targets {
            row.push(fmt_f64(t[i]));
        }
        report.row(row);
    }
    if let Some(t) = &lang.targets {
        let r =
            |x: &[f64]| cnpmi_core::metrics::pearson(x, t).map_or("undefined".to_string(), fmt_f64);
        report.note(format!("pearson(estimate, target) = {}", r(&estimates)));
        report.note(format!("pearson(raw, target) = {}", r(&lang.raw)));
    }
    report.write(&a.out)?;
    Ok(())
}

fn cmd_classify(cli: &Cli, a: &ClassifyArgs) -> Result<()> {
    let labels_b_path = a.labels_b.as_ref().unwrap_or(&a.labels_a);
    require_files([
        a.theta_a.as_path(),
        a.theta_b.as_path(),
        a.labels_a.as_path(),
        labels_b_path.as_path(),
    ])?;
    let theta_a = formats::read_theta(&a.theta_a)?;
    let theta_b = formats::read_theta(&a.theta_b)?;
    let labels_a = formats::read_labels(&a.labels_a, theta_a.len())?;
    let labels_b = formats::read_labels(labels_b_path, theta_b.len())?;
    let results = experiments::classify_both_ways(
        &a.lang_a,
        &a.lang_b,
        &theta_a,
        &labels_a,
        &theta_b,
        &labels_b,
        a.labels,
        a.regularization,
    )?;
    let mut report = Report::new("classify", cli.seed, &["model", "f1"]);
    report
        .setting("labels", a.labels)
        .setting("regularization", fmt_f64(a.regularization));
    for t in &results {
        report.note(format!(
            "{}: trained on {} documents, tested on {}",
            t.direction, t.train_docs, t.test_docs
        ));
        if t.reduced {
            report.note(format!(
                "{}: fewer than {} categories available",
                t.direction, a.labels
            ));
        }
        report.row(vec![
            format!("{}:{}", a.model_id, t.direction),
            fmt_f64(t.f1),
        ]);
    }
    report.write(&a.out)?;
    Ok(())
}

fn cmd_sweep_cardinality(cli: &Cli, a: &SweepCardinalityArgs) -> Result<()> {
    require_files([a.topics.as_path()])?;
    require_files(a.dictionary.as_deref())?;
    let (la, lb) = resolve_languages(&a.langs, &a.topics)?;
    let topics = formats::read_topics(&a.topics, &la, &lb)?;
    let dict = a
        .dictionary
        .as_deref()
        .map(formats::read_dictionary)
        .transpose()?;
    let index = load_index(&a.reference, &la, &lb)?;
    let rows = experiments::cardinality_sweep(&index, &topics, dict.as_ref(), &a.cardinalities)?;
    let mut report = Report::new(
        "sweep-cardinality",
        cli.seed,
        &["cardinality", "metric", "mean"],
    );
    report.setting(
        "cardinalities",
        a.cardinalities
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    report.setting("topics", topics.len());
    for r in rows {
        report.row(vec![
            r.cardinality.to_string(),
            r.metric.into(),
            fmt_f64(r.mean),
        ]);
    }
    report.write(&a.out)?;
    Ok(())
}

fn cmd_sweep_links(cli: &Cli, a: &SweepLinksArgs, params: &Params) -> Result<()> {
    require_files([a.corpus_a.as_path(), a.corpus_b.as_path()])?;
    params
        .check_known(&config::PLM_KEYS)
        .map_err(config_usage)?;
    if params.contains("link_fraction") {
        return Err(usage("link_fraction is set by --fractions in a link sweep"));
    }
    let cfg = config::plm_config(params, cli.seed).map_err(config_usage)?;
    let corpus = formats::read_corpus(&a.corpus_a, &a.corpus_b, &a.lang_a, &a.lang_b, a.prune)?;
    let index = load_index(&a.reference, &a.lang_a, &a.lang_b)?;
    let rows = experiments::link_sweep(&corpus, &index, &cfg, &a.fractions, a.cardinality)?;
    let mut report = Report::new(
        "sweep-links",
        cli.seed,
        &["fraction", "mean_cnpmi", "log_likelihood"],
    );
    for (k, v) in config::plm_settings(&cfg) {
        if k != "link_fraction" {
            report.setting(&k, v);
        }
    }
    report
        .setting(
            "fractions",
            a.fractions
                .iter()
                .map(|f| fmt_f64(*f))
                .collect::<Vec<_>>()
                .join(","),
        )
        .setting("cardinality", a.cardinality)
        .setting("prune", a.prune);
    for r in rows {
        report.row(vec![
            fmt_f64(r.fraction),
            fmt_f64(r.mean_cnpmi),
            fmt_f64(r.log_likelihood),
        ]);
    }
    report.write(&a.out)?;
    Ok(())
}

fn cmd_sweep_refsize(cli: &Cli, a: &SweepRefsizeArgs) -> Result<()> {
    require_files([
        a.topics.as_path(),
        a.reference_a.as_path(),
        a.reference_b.as_path(),
    ])?;
    let (la, lb) = resolve_languages(&a.langs, &a.topics)?;
    let topics: Vec<MultilingualTopic> = formats::read_topics(&a.topics, &la, &lb)?;
    let reference = formats::read_corpus(&a.reference_a, &a.reference_b, &la, &lb, 1.0)?;
    let rows = experiments::reference_size_sweep(
        &reference,
        &topics,
        &a.fractions,
        cli.seed,
        a.cardinality,
    )?;
    let mut report = Report::new(
        "sweep-refsize",
        cli.seed,
        &["fraction", "documents", "mean_cnpmi", "deviation", "stable"],
    );
    report
        .setting(
            "fractions",
            a.fractions
                .iter()
                .map(|f| fmt_f64(*f))
                .collect::<Vec<_>>()
                .join(","),
        )
        .setting("cardinality", a.cardinality)
        .setting("documents", reference.doc_count());
    report.note(format!(
        "deviation is measured from the full reference; rows above {} are marked unstable",
        experiments::STABILITY_TOLERANCE
    ));
    for r in rows {
        report.row(vec![
            fmt_f64(r.fraction),
            r.documents.to_string(),
            fmt_f64(r.mean_cnpmi),
            fmt_f64(r.deviation),
            if r.unstable { "no" } else { "yes" }.into(),
        ]);
    }
    report.write(&a.out)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let params = load_params(cli)?;
    let no_params = || -> Result<()> { params.check_known(&[]).map_err(config_usage) };
    match &cli.command {
        Command::Index(a) => {
            no_params()?;
            cmd_index(a)
        }
        Command::Score(a) => {
            no_params()?;
            cmd_score(a)
        }
        Command::TrainPlm(a) => cmd_train_plm(cli, a, &params),
        Command::TrainEstimator(a) => cmd_train_estimator(cli, a, &params),
        Command::Estimate(a) => {
            no_params()?;
            cmd_estimate(cli, a)
        }
        Command::Classify(a) => {
            no_params()?;
            cmd_classify(cli, a)
        }
        Command::SweepCardinality(a) => {
            no_params()?;
            cmd_sweep_cardinality(cli, a)
        }
        Command::SweepLinks(a) => cmd_sweep_links(cli, a, &params),
        Command::SweepRefsize(a) => {
            no_params()?;
            cmd_sweep_refsize(cli, a)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match parallel::with_workers(cli.workers, || run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
