//! Multi-threaded index construction and chain training.

use cnpmi_core::plm::{run_chain, PlmError};
use cnpmi_core::{CooccurrenceIndex, CorpusPair, IndexBuilder, PlmConfig, PlmOutput, Restriction};
use rayon::prelude::*;

/// Documents per builder when counting in parallel.
const CHUNK: usize = 2048;

/// Builds the index by counting document chunks on the current rayon pool
/// and merging the partial counts.
pub fn build_index(corpus: &CorpusPair, restrict: Option<&Restriction>) -> CooccurrenceIndex {
    let root = IndexBuilder::new(corpus, restrict);
    let partials: Vec<IndexBuilder> = corpus
        .docs()
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut b = root.fork();
            for doc in chunk {
                b.add(doc);
            }
            b
        })
        .collect();
    let mut merged = root;
    for p in partials {
        merged.merge(p);
    }
    merged.finish()
}

/// Runs all chains concurrently; the result equals sequential training.
pub fn train(corpus: &CorpusPair, config: &PlmConfig) -> Result<PlmOutput, PlmError> {
    config.validate()?;
    let chains = (0..config.chains)
        .into_par_iter()
        .map(|c| run_chain(corpus, config, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PlmOutput::from_chains(corpus, chains))
}

/// Runs `f` on a pool with `workers` threads (0 = rayon's default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not start a {workers}-thread pool ({e}); using the global pool");
            f()
        }
    }
}
