//! Binary cache of a built co-occurrence index.
//!
//! Layout (little endian): magic, format version, SHA-256 of the corpus the
//! index was built from, document count, both token tables, both document
//! frequency arrays and the three sparse joint count lists.

use std::fs;
use std::path::Path;

use cnpmi_core::cooccur::IndexParts;
use cnpmi_core::{CooccurrenceIndex, CorpusPair, Side};
use sha2::{Digest, Sha256};

use crate::formats::{self, put_str, put_u32, put_u64, Cursor, FormatError};

const MAGIC: &[u8; 8] = b"CNPMIIDX";
pub const CACHE_VERSION: u32 = 1;

pub type Checksum = [u8; 32];

/// Digest of the languages and every document's tokens.
pub fn corpus_checksum(corpus: &CorpusPair) -> Checksum {
    let mut h = Sha256::new();
    for side in [Side::A, Side::B] {
        h.update(corpus.language(side).as_bytes());
        h.update([0]);
    }
    h.update((corpus.doc_count() as u64).to_le_bytes());
    for d in 0..corpus.doc_count() {
        for side in [Side::A, Side::B] {
            for t in corpus.decode(d, side) {
                h.update(t.as_bytes());
                h.update(b" ");
            }
            h.update(b"\n");
        }
    }
    h.finalize().into()
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn put_triples(out: &mut Vec<u8>, v: &[(u32, u32, u32)]) {
    put_u64(out, v.len() as u64);
    for &(i, j, c) in v {
        put_u32(out, i);
        put_u32(out, j);
        put_u32(out, c);
    }
}

pub fn encode(index: &CooccurrenceIndex, checksum: &Checksum) -> Vec<u8> {
    let p = index.to_parts();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, CACHE_VERSION);
    out.extend_from_slice(checksum);
    put_u64(&mut out, p.doc_count as u64);
    for tokens in [&p.tokens_a, &p.tokens_b] {
        put_u64(&mut out, tokens.len() as u64);
        for t in tokens {
            put_str(&mut out, t);
        }
    }
    for df in [&p.df_a, &p.df_b] {
        put_u64(&mut out, df.len() as u64);
        for &v in df {
            put_u32(&mut out, v);
        }
    }
    for joint in [&p.joint_aa, &p.joint_bb, &p.joint_ab] {
        put_triples(&mut out, joint);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeError {
    NotACache,
    Version(u32),
    Truncated,
    Inconsistent,
}

impl std::fmt::Display for DecodeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecodeError::NotACache => f.write_str("not an index cache"),
            DecodeError::Version(v) => write!(f, "cache version {v}, expected {CACHE_VERSION}"),
            DecodeError::Truncated => f.write_str("cache is truncated or has trailing bytes"),
            DecodeError::Inconsistent => f.write_str("cache contents are inconsistent"),
        }
    }
}

fn triples(c: &mut Cursor<'_>) -> Option<Vec<(u32, u32, u32)>> {
    let n = c.u64()? as usize;
    let mut v = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        v.push((c.u32()?, c.u32()?, c.u32()?));
    }
    Some(v)
}

fn body(c: &mut Cursor<'_>) -> Option<IndexParts> {
    let doc_count = c.u64()? as usize;
    let mut tables = Vec::with_capacity(2);
    for _ in 0..2 {
        let n = c.u64()? as usize;
        tables.push((0..n).map(|_| c.string()).collect::<Option<Vec<_>>>()?);
    }
    let mut dfs = Vec::with_capacity(2);
    for _ in 0..2 {
        let n = c.u64()? as usize;
        dfs.push((0..n).map(|_| c.u32()).collect::<Option<Vec<_>>>()?);
    }
    let joint_aa = triples(c)?;
    let joint_bb = triples(c)?;
    let joint_ab = triples(c)?;
    let tokens_b = tables.pop()?;
    let tokens_a = tables.pop()?;
    let df_b = dfs.pop()?;
    let df_a = dfs.pop()?;
    Some(IndexParts {
        doc_count,
        tokens_a,
        tokens_b,
        df_a,
        df_b,
        joint_aa,
        joint_bb,
        joint_ab,
    })
}

/// Decodes a cache, returning the index and the checksum it was built for.
pub fn decode(bytes: &[u8]) -> Result<(CooccurrenceIndex, Checksum), DecodeError> {
    let mut c = Cursor::new(bytes);
    if c.take(8) != Some(MAGIC.as_slice()) {
        return Err(DecodeError::NotACache);
    }
    let version = c.u32().ok_or(DecodeError::Truncated)?;
    if version != CACHE_VERSION {
        return Err(DecodeError::Version(version));
    }
    let checksum: Checksum = c
        .take(32)
        .ok_or(DecodeError::Truncated)?
        .try_into()
        .expect("32 bytes");
    let parts = body(&mut c).ok_or(DecodeError::Truncated)?;
    if !c.is_done() {
        return Err(DecodeError::Truncated);
    }
    let index = CooccurrenceIndex::from_parts(parts).map_err(|_| DecodeError::Inconsistent)?;
    Ok((index, checksum))
}

pub fn write(
    path: &Path,
    index: &CooccurrenceIndex,
    corpus: &CorpusPair,
) -> Result<(), FormatError> {
    formats::write_atomic(path, &encode(index, &corpus_checksum(corpus)))
}

/// Loads a cached index. Returns `None` when the cache is missing, unreadable
/// or was built from a different corpus than `corpus`.
pub fn load(path: &Path, corpus: Option<&CorpusPair>) -> Option<CooccurrenceIndex> {
    let bytes = fs::read(path).ok()?;
    match decode(&bytes) {
        Ok((index, checksum)) => match corpus {
            Some(c) if corpus_checksum(c) != checksum => {
                log::info!(
                    "{}: built from a different corpus, ignoring",
                    path.display()
                );
                None
            }
            _ => Some(index),
        },
        Err(e) => {
            log::warn!("{}: {e}", path.display());
            None
        }
    }
}
