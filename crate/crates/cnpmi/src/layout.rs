//! Directory layout for estimator data.
//!
//! ```text
//! DIR/era.tsv                 era lexicon of the pivot language
//! DIR/aux.txt                 modern pivot-language corpus
//! DIR/<lang>/ref.<pivot>      small reference, pivot side
//! DIR/<lang>/ref.<lang>       small reference, other side
//! DIR/<lang>/target.<pivot>   large reference (training languages only)
//! DIR/<lang>/target.<lang>
//! DIR/<lang>/dict.tsv         pivot -> lang dictionary
//! DIR/<lang>/topics.json
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use cnpmi_core::{CorpusPair, EraLexicon, Side};

use crate::experiments::LanguageData;
use crate::formats::{self, FormatError};
use crate::synthetic::World;

pub fn era_path(dir: &Path) -> PathBuf {
    dir.join("era.tsv")
}

pub fn aux_path(dir: &Path) -> PathBuf {
    dir.join("aux.txt")
}

fn corpus_paths(dir: &Path, lang: &str, pivot: &str, stem: &str) -> (PathBuf, PathBuf) {
    let d = dir.join(lang);
    (
        d.join(format!("{stem}.{pivot}")),
        d.join(format!("{stem}.{lang}")),
    )
}

/// Language subdirectories, sorted.
pub fn languages(dir: &Path) -> Result<Vec<String>, FormatError> {
    let entries = fs::read_dir(dir).map_err(|source| FormatError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut langs: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .filter_map(|e| e.file_name().into_string().ok())
        .collect();
    langs.sort();
    Ok(langs)
}

pub fn read_era(dir: &Path) -> Result<EraLexicon, FormatError> {
    formats::read_era_lexicon(&era_path(dir))
}

pub fn read_aux(dir: &Path, pivot: &str) -> Result<CorpusPair, FormatError> {
    formats::read_monolingual(&aux_path(dir), pivot)
}

/// Loads one language; the large reference is optional.
pub fn read_language(dir: &Path, lang: &str, pivot: &str) -> Result<LanguageData, FormatError> {
    let (ra, rb) = corpus_paths(dir, lang, pivot, "ref");
    let reference = formats::read_corpus(&ra, &rb, pivot, lang, 1.0)?;
    let (ta, tb) = corpus_paths(dir, lang, pivot, "target");
    let target_reference = if ta.exists() {
        Some(formats::read_corpus(&ta, &tb, pivot, lang, 1.0)?)
    } else {
        None
    };
    let sub = dir.join(lang);
    Ok(LanguageData {
        language: lang.to_string(),
        reference,
        target_reference,
        dictionary: formats::read_dictionary(&sub.join("dict.tsv"))?,
        topics: formats::read_topics(&sub.join("topics.json"), pivot, lang)?,
    })
}

/// Writes a synthetic world; languages listed in `without_target` get no
/// large reference.
pub fn write_world(
    dir: &Path,
    world: &World,
    pivot: &str,
    without_target: &[&str],
) -> Result<(), FormatError> {
    let mkdir = |p: &Path| {
        fs::create_dir_all(p).map_err(|source| FormatError::Io {
            path: p.to_path_buf(),
            source,
        })
    };
    mkdir(dir)?;
    formats::write_era_lexicon(&world.era, &era_path(dir))?;
    formats::write_atomic(
        &aux_path(dir),
        formats::corpus_side_text(&world.aux, Side::A).as_bytes(),
    )?;
    for l in &world.languages {
        let lang = l.language.as_str();
        let sub = dir.join(lang);
        mkdir(&sub)?;
        let (ra, rb) = corpus_paths(dir, lang, pivot, "ref");
        formats::write_corpus(&l.narrow, &ra, &rb)?;
        if !without_target.contains(&lang) {
            let (ta, tb) = corpus_paths(dir, lang, pivot, "target");
            formats::write_corpus(&l.broad, &ta, &tb)?;
        }
        formats::write_dictionary(&l.dictionary, &sub.join("dict.tsv"))?;
        formats::write_topics(&l.topics, pivot, lang, &sub.join("topics.json"))?;
    }
    Ok(())
}
