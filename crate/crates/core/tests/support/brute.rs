//! Brute-force metric reference computed straight from token lists.
//! Shared by the core oracle test and the acceptance target.

use std::collections::BTreeSet;

use cnpmi_core::metrics::{cnpmi, inpmi, mta, topic_npmi, twc};
use cnpmi_core::{
    BilingualDictionary, CooccurrenceIndex, CorpusPair, MtaMode, MultilingualTopic, Restriction,
    Side,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

pub struct World {
    docs_a: Vec<Vec<String>>,
    docs_b: Vec<Vec<String>>,
    words_a: Vec<String>,
    words_b: Vec<String>,
}

pub fn random_world(rng: &mut ChaCha8Rng) -> World {
    let n_docs = rng.gen_range(1..=20);
    let va = rng.gen_range(2..=30);
    let vb = rng.gen_range(2..=30);
    let words_a: Vec<String> = (0..va).map(|i| format!("a{}x", to_letters(i))).collect();
    let words_b: Vec<String> = (0..vb).map(|i| format!("b{}y", to_letters(i))).collect();
    let doc = |words: &[String], rng: &mut ChaCha8Rng| -> Vec<String> {
        let len = rng.gen_range(0..=12);
        // skewed draws so some words co-occur often
        (0..len)
            .map(|_| {
                let r: f64 = rng.gen();
                words[((r * r) * words.len() as f64) as usize].clone()
            })
            .collect()
    };
    let docs_a = (0..n_docs).map(|_| doc(&words_a, rng)).collect();
    let docs_b = (0..n_docs).map(|_| doc(&words_b, rng)).collect();
    World {
        docs_a,
        docs_b,
        words_a,
        words_b,
    }
}

fn to_letters(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            return s;
        }
    }
}

fn contains(doc: &[String], w: &str) -> bool {
    doc.iter().any(|t| t == w)
}

fn brute_npmi(n: usize, df_i: usize, df_j: usize, joint: usize) -> f64 {
    if joint == 0 || df_i == 0 || df_j == 0 || joint == n {
        return 0.0;
    }
    let n = n as f64;
    let (pi, pj, pij) = (df_i as f64 / n, df_j as f64 / n, joint as f64 / n);
    ((pij / (pi * pj)).ln() / -pij.ln()).clamp(-1.0, 1.0)
}

fn brute_mono(docs: &[Vec<String>], words: &[String]) -> f64 {
    let n = docs.len();
    let df = |w: &str| docs.iter().filter(|d| contains(d, w)).count();
    let mut sum = 0.0;
    let mut pairs = 0;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let joint = docs
                .iter()
                .filter(|d| contains(d, &words[i]) && contains(d, &words[j]))
                .count();
            sum += brute_npmi(n, df(&words[i]), df(&words[j]), joint);
            pairs += 1;
        }
    }
    sum / pairs as f64
}

fn brute_cross(w: &World, ta: &[String], tb: &[String]) -> f64 {
    let n = w.docs_a.len();
    let mut sum = 0.0;
    for a in ta {
        for b in tb {
            let df_a = w.docs_a.iter().filter(|d| contains(d, a)).count();
            let df_b = w.docs_b.iter().filter(|d| contains(d, b)).count();
            let joint = (0..n)
                .filter(|&d| contains(&w.docs_a[d], a) && contains(&w.docs_b[d], b))
                .count();
            sum += brute_npmi(n, df_a, df_b, joint);
        }
    }
    sum / (ta.len() * tb.len()) as f64
}

/// Largest number of dictionary pairs usable with each word at most once,
/// by exhaustive search.
fn brute_matching(dict: &BTreeSet<(String, String)>, ta: &[String], tb: &[String]) -> usize {
    fn go(
        i: usize,
        used: &mut Vec<bool>,
        dict: &BTreeSet<(String, String)>,
        ta: &[String],
        tb: &[String],
    ) -> usize {
        if i == ta.len() {
            return 0;
        }
        let mut best = go(i + 1, used, dict, ta, tb);
        for j in 0..tb.len() {
            if !used[j] && dict.contains(&(ta[i].clone(), tb[j].clone())) {
                used[j] = true;
                best = best.max(1 + go(i + 1, used, dict, ta, tb));
                used[j] = false;
            }
        }
        best
    }
    go(0, &mut vec![false; tb.len()], dict, ta, tb)
}

fn pick(rng: &mut ChaCha8Rng, pool: &[String], c: usize) -> Vec<String> {
    pool.choose_multiple(rng, c).cloned().collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Draws one random world and topic and compares every metric on a full and
/// a restricted index against the brute-force values.
pub fn check_world(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let w = random_world(rng);
    let c = rng.gen_range(2..=w.words_a.len().min(w.words_b.len()).min(8));
    let ta = pick(rng, &w.words_a, c);
    let tb = pick(rng, &w.words_b, c);
    let topic = MultilingualTopic::new(ta.clone(), tb.clone()).map_err(|e| e.to_string())?;

    let corpus = CorpusPair::from_tokenized("xa", "xb", &w.docs_a, &w.docs_b, 1.0)
        .map_err(|e| e.to_string())?;
    let full = CooccurrenceIndex::build(&corpus, None);
    let restricted = CooccurrenceIndex::build(&corpus, Some(&Restriction::from_topics([&topic])));

    let mono_a = brute_mono(&w.docs_a, &ta);
    let mono_b = brute_mono(&w.docs_b, &tb);
    let cross = brute_cross(&w, &ta, &tb);

    for index in [&full, &restricted] {
        let got_a = topic_npmi(index, &ta, c, Side::A).map_err(|e| e.to_string())?;
        let got_b = topic_npmi(index, &tb, c, Side::B).map_err(|e| e.to_string())?;
        ensure((got_a - mono_a).abs() <= TOL, || {
            format!("npmi A {got_a} vs {mono_a}")
        })?;
        ensure((got_b - mono_b).abs() <= TOL, || {
            format!("npmi B {got_b} vs {mono_b}")
        })?;
        let got_i = inpmi(index, &topic).map_err(|e| e.to_string())?;
        let want_i = (mono_a + mono_b) / 2.0;
        ensure((got_i - want_i).abs() <= TOL, || {
            format!("inpmi {got_i} vs {want_i}")
        })?;
        let got_c = cnpmi(index, &topic);
        ensure((got_c - cross).abs() <= TOL, || {
            format!("cnpmi {got_c} vs {cross}")
        })?;

        let cov_a = ta
            .iter()
            .filter(|t| w.docs_a.iter().any(|d| contains(d, t)))
            .count();
        let cov_b = tb
            .iter()
            .filter(|t| w.docs_b.iter().any(|d| contains(d, t)))
            .count();
        for (got, cov) in [
            (twc(index, &ta, Side::A), cov_a),
            (twc(index, &tb, Side::B), cov_b),
        ] {
            let want = cov as f64 / c as f64;
            ensure((got - want).abs() <= TOL, || format!("twc {got} vs {want}"))?;
        }
    }

    // random dictionary over the topic words plus noise entries
    let mut entries = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=2 * c) {
        let a = w.words_a.choose(rng).unwrap().clone();
        let b = w.words_b.choose(rng).unwrap().clone();
        entries.insert((a, b));
    }
    for _ in 0..rng.gen_range(0..=c) {
        entries.insert((
            ta.choose(rng).unwrap().clone(),
            tb.choose(rng).unwrap().clone(),
        ));
    }
    let dict: BilingualDictionary = entries
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let matched = brute_matching(&entries, &ta, &tb);
    let got_m = mta(&dict, &topic, MtaMode::Matching);
    let want_m = matched as f64 / c as f64;
    ensure((got_m - want_m).abs() <= TOL, || {
        format!("mta {got_m} vs {want_m}")
    })?;
    let raw = ta
        .iter()
        .flat_map(|a| tb.iter().map(move |b| (a.clone(), b.clone())))
        .filter(|p| entries.contains(p))
        .count();
    ensure(mta(&dict, &topic, MtaMode::RawCount) == raw as f64, || {
        format!("mta raw vs {raw}")
    })?;
    Ok(())
}
