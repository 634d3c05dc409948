use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cnpmi::formats;
use cnpmi::layout;
use cnpmi::synthetic::{estimator_world, planted_corpus, PlantedSpec, WorldSpec};
use tempfile::{tempdir, TempDir};

fn cnpmi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnpmi"))
        .args(args)
        .env_remove("CNPMI_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = cnpmi(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempdir().unwrap();
        let spec = PlantedSpec {
            docs: 60,
            topics: 3,
            words_per_topic: 12,
            ..PlantedSpec::default()
        };
        let train = planted_corpus(&spec, 1).unwrap();
        let reference = planted_corpus(
            &PlantedSpec {
                docs: 200,
                ..spec.clone()
            },
            2,
        )
        .unwrap();
        formats::write_corpus(
            &train.corpus,
            &dir.path().join("train.en"),
            &dir.path().join("train.xx"),
        )
        .unwrap();
        formats::write_corpus(
            &reference.corpus,
            &dir.path().join("ref.en"),
            &dir.path().join("ref.xx"),
        )
        .unwrap();
        formats::write_topics(
            &train.topics(12),
            "en",
            "xx",
            &dir.path().join("planted.json"),
        )
        .unwrap();
        let dict: cnpmi_core::BilingualDictionary = train
            .topic_words_a
            .iter()
            .flatten()
            .zip(train.topic_words_b.iter().flatten())
            .take(20)
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        formats::write_dictionary(&dict, &dir.path().join("dict.tsv")).unwrap();
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn train_score_and_index_cache() {
    let f = Fixture::new();
    let out_dir = f.path("model");
    ok(&[
        "train-plm",
        "--corpus-a",
        p(&f.path("train.en")),
        "--corpus-b",
        p(&f.path("train.xx")),
        "--lang-a",
        "en",
        "--lang-b",
        "xx",
        "--prune",
        "1.0",
        "--top-words",
        "10",
        "--out-dir",
        p(&out_dir),
        "--seed",
        "3",
        "--set",
        "topics=3",
        "--set",
        "iterations=40",
        "--set",
        "chains=2",
    ]);
    for name in [
        "topics.json",
        "theta.en.tsv",
        "theta.xx.tsv",
        "phi.en.bin",
        "phi.xx.bin",
        "report.tsv",
    ] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let theta = formats::read_theta(&out_dir.join("theta.en.tsv")).unwrap();
    assert_eq!(theta.len(), 60);
    assert!(theta.iter().all(|r| r.len() == 3));
    let report = fs::read_to_string(out_dir.join("report.tsv")).unwrap();
    assert!(report.contains("# seed: 3\n") && report.contains("# config: "));
    assert!(report.contains("# deviation: "));

    let topics = out_dir.join("topics.json");
    let (ref_en, ref_xx, dict) = (f.path("ref.en"), f.path("ref.xx"), f.path("dict.tsv"));
    let base = [
        "score",
        "--topics",
        p(&topics),
        "--reference-a",
        p(&ref_en),
        "--reference-b",
        p(&ref_xx),
        "--dictionary",
        p(&dict),
    ];
    let tsv = ok(&base);
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "topic\tmetric\tvalue");
    assert_eq!(lines.len(), 1 + 3 * 7);

    // same scores through a cached index, also without the reference
    let cache = f.path("ref.idx");
    ok(&[
        "index",
        "--reference-a",
        p(&f.path("ref.en")),
        "--reference-b",
        p(&f.path("ref.xx")),
        "--lang-a",
        "en",
        "--lang-b",
        "xx",
        "--out",
        p(&cache),
    ]);
    let mut with_cache = base.to_vec();
    with_cache.extend(["--index", p(&cache)]);
    assert_eq!(ok(&with_cache), tsv);
    assert_eq!(
        ok(&[
            "score",
            "--topics",
            p(&topics),
            "--index",
            p(&cache),
            "--dictionary",
            p(&f.path("dict.tsv"))
        ]),
        tsv
    );

    // a cache built from another corpus is ignored and rebuilt
    ok(&[
        "index",
        "--reference-a",
        p(&f.path("train.en")),
        "--reference-b",
        p(&f.path("train.xx")),
        "--lang-a",
        "en",
        "--lang-b",
        "xx",
        "--out",
        p(&cache),
    ]);
    assert_eq!(ok(&with_cache), tsv);

    let json = ok(&[&base[..], &["--format", "json", "--cardinality", "5"]].concat());
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_object().unwrap().len(), 3);
}

#[test]
fn sweeps_are_reproducible() {
    let f = Fixture::new();
    let links = |out: &Path| {
        ok(&[
            "sweep-links",
            "--corpus-a",
            p(&f.path("train.en")),
            "--corpus-b",
            p(&f.path("train.xx")),
            "--lang-a",
            "en",
            "--lang-b",
            "xx",
            "--prune",
            "1.0",
            "--reference-a",
            p(&f.path("ref.en")),
            "--reference-b",
            p(&f.path("ref.xx")),
            "--fractions",
            "0,1",
            "--seed",
            "5",
            "--workers",
            "2",
            "--set",
            "topics=3",
            "--set",
            "iterations=30",
            "--set",
            "chains=1",
            "--out",
            p(out),
        ]);
        fs::read_to_string(out).unwrap()
    };
    let first = links(&f.path("links1.tsv"));
    assert_eq!(first, links(&f.path("links2.tsv")));
    assert!(!f.path("links1.tsv.partial").exists());
    let rows: Vec<&str> = first.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "fraction\tmean_cnpmi\tlog_likelihood");
    assert_eq!(rows.len(), 3);

    let refsize = |out: &Path| {
        ok(&[
            "sweep-refsize",
            "--topics",
            p(&f.path("planted.json")),
            "--reference-a",
            p(&f.path("ref.en")),
            "--reference-b",
            p(&f.path("ref.xx")),
            "--fractions",
            "0.5,1",
            "--seed",
            "9",
            "--out",
            p(out),
        ]);
        fs::read_to_string(out).unwrap()
    };
    let r = refsize(&f.path("rs.tsv"));
    assert_eq!(r, refsize(&f.path("rs2.tsv")));
    let last = r.lines().last().unwrap();
    assert!(last.starts_with("1.0\t200\t"), "{last}");
    assert!(last.contains("\t0.0\tyes"));

    ok(&[
        "sweep-cardinality",
        "--topics",
        p(&f.path("planted.json")),
        "--reference-a",
        p(&f.path("ref.en")),
        "--reference-b",
        p(&f.path("ref.xx")),
        "--dictionary",
        p(&f.path("dict.tsv")),
        "--cardinalities",
        "4",
        "--out",
        p(&f.path("card.tsv")),
    ]);
    let card = fs::read_to_string(f.path("card.tsv")).unwrap();
    let rows: Vec<&str> = card.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("4\tcnpmi\t"));

    let out = cnpmi(&[
        "sweep-cardinality",
        "--topics",
        p(&f.path("planted.json")),
        "--reference-a",
        p(&f.path("ref.en")),
        "--reference-b",
        p(&f.path("ref.xx")),
        "--cardinalities",
        "10,20",
        "--out",
        p(&f.path("deep.tsv")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("topic 0 has 12 words"));
    assert!(!f.path("deep.tsv").exists());
}

#[test]
fn estimator_train_then_estimate() {
    let dir = tempdir().unwrap();
    let spec = WorldSpec {
        narrow_docs: 120,
        broad_docs: 400,
        topics_per_language: 15,
        ..WorldSpec::default()
    };
    let world = estimator_world(&spec, 2).unwrap();
    let data = dir.path().join("data");
    layout::write_world(&data, &world, "en", &["tl"]).unwrap();
    let model = dir.path().join("model.json");
    ok(&[
        "train-estimator",
        "--data",
        p(&data),
        "--out",
        p(&model),
        "--seed",
        "1",
        "--set",
        "stages=5",
        "--features-out",
        p(&dir.path().join("features.tsv")),
    ]);
    let cv = fs::read_to_string(dir.path().join("model.json.cv.tsv")).unwrap();
    assert!(cv.contains("# set languages=am,ro,sv\n"));
    assert_eq!(cv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 9);
    formats::read_model(&model).unwrap();

    let est = dir.path().join("tl.tsv");
    ok(&[
        "estimate",
        "--data",
        p(&data),
        "--language",
        "tl",
        "--model",
        p(&model),
        "--out",
        p(&est),
    ]);
    let text = fs::read_to_string(&est).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "topic\testimate\traw_cnpmi");
    assert_eq!(rows.len(), 16);
}

#[test]
fn classify_reports_both_directions() {
    let dir = tempdir().unwrap();
    let mut theta_a = String::new();
    let mut theta_b = String::new();
    let mut labels = String::new();
    for d in 0..40 {
        let x = (d % 10) as f64 / 10.0 * 0.8 + 0.1;
        theta_a.push_str(&format!("{d}\t{x}\t{}\n", 1.0 - x));
        let y = (x + 0.05).min(0.95);
        theta_b.push_str(&format!("{d}\t{y}\t{}\n", 1.0 - y));
        labels.push_str(&format!("{d}\t{}\n", if x > 0.5 { "high" } else { "low" }));
    }
    for (n, t) in [
        ("ta.tsv", &theta_a),
        ("tb.tsv", &theta_b),
        ("labels.tsv", &labels),
    ] {
        fs::write(dir.path().join(n), t).unwrap();
    }
    let out = dir.path().join("f1.tsv");
    ok(&[
        "classify",
        "--theta-a",
        p(&dir.path().join("ta.tsv")),
        "--theta-b",
        p(&dir.path().join("tb.tsv")),
        "--labels-a",
        p(&dir.path().join("labels.tsv")),
        "--lang-a",
        "en",
        "--lang-b",
        "de",
        "--model-id",
        "k2",
        "--out",
        p(&out),
    ]);
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "model\tf1");
    assert!(rows[1].starts_with("k2:en->de\t"));
    assert!(rows[2].starts_with("k2:de->en\t"));
    assert!(text.contains("fewer than 7 categories"));
}

#[test]
fn usage_errors_exit_with_status_two() {
    let f = Fixture::new();
    let (planted, ref_en, ref_xx) = (f.path("planted.json"), f.path("ref.en"), f.path("ref.xx"));
    let score = |extra: &[&str]| {
        let mut args = vec![
            "score",
            "--topics",
            p(&planted),
            "--reference-a",
            p(&ref_en),
            "--reference-b",
            p(&ref_xx),
        ];
        args.extend_from_slice(extra);
        cnpmi(&args)
    };
    assert_eq!(score(&["--set", "topics=3"]).status.code(), Some(2));
    assert_eq!(score(&["--bogus"]).status.code(), Some(2));
    assert_eq!(cnpmi(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        cnpmi(&[
            "score",
            "--topics",
            p(&f.path("missing.json")),
            "--index",
            "x"
        ])
        .status
        .code(),
        Some(2)
    );
    let train = |set: &str| {
        cnpmi(&[
            "train-plm",
            "--corpus-a",
            p(&f.path("train.en")),
            "--corpus-b",
            p(&f.path("train.xx")),
            "--lang-a",
            "en",
            "--lang-b",
            "xx",
            "--out-dir",
            p(&f.path("m")),
            "--set",
            set,
        ])
    };
    assert_eq!(train("topics=many").status.code(), Some(2));
    assert_eq!(train("link_fraction=2").status.code(), Some(2));
    assert_eq!(train("colour=blue").status.code(), Some(2));
    let cfg = f.path("bad.cfg");
    fs::write(&cfg, "topics 3\n").unwrap();
    assert_eq!(
        cnpmi(&[
            "train-plm",
            "--corpus-a",
            p(&f.path("train.en")),
            "--corpus-b",
            p(&f.path("train.xx")),
            "--lang-a",
            "en",
            "--lang-b",
            "xx",
            "--out-dir",
            p(&f.path("m")),
            "--config",
            p(&cfg)
        ])
        .status
        .code(),
        Some(2)
    );
    assert!(!f.path("m").exists());
}
