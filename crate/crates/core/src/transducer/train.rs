//! Maximum-likelihood parameter estimates from a corpus of alignment words.
//! Counts only; no smoothing.

use std::str::FromStr;

use super::models::{self, CodonTable};
use super::tables::{dt1_to_text, dt2_to_text};
use super::ProbabilityTransducer;
use crate::alphabet::{AlignmentAlphabet, AlignmentWord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainKind {
    Bernoulli,
    Dt1,
    Dt2,
}

impl FromStr for TrainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(TrainKind::Bernoulli),
            "dt1" => Ok(TrainKind::Dt1),
            "dt2" => Ok(TrainKind::Dt2),
            _ => Err(Error::InvalidArgument(format!("unknown model kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedParams {
    Bernoulli(Vec<f64>),
    /// Rows by codon position, columns by letter.
    Dt1(Vec<Vec<f64>>),
    Dt2(CodonTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub params: TrainedParams,
    pub warnings: Vec<String>,
}

impl Trained {
    pub fn build(&self, alphabet: &AlignmentAlphabet) -> Result<ProbabilityTransducer> {
        match &self.params {
            TrainedParams::Bernoulli(p) => models::bernoulli(alphabet, p),
            TrainedParams::Dt1(rows) => models::dt1(alphabet, rows),
            TrainedParams::Dt2(t) => models::dt2(alphabet, t),
        }
    }

    /// Bernoulli estimates print as a `glyph=p,...` spec, the others as
    /// loadable model files.
    pub fn to_text(&self, alphabet: &AlignmentAlphabet) -> String {
        match &self.params {
            TrainedParams::Bernoulli(p) => {
                let parts: Vec<String> = alphabet
                    .letters()
                    .map(|a| format!("{}={}", alphabet.glyph(a), p[a]))
                    .collect();
                parts.join(",") + "\n"
            }
            TrainedParams::Dt1(rows) => dt1_to_text(alphabet, rows),
            TrainedParams::Dt2(t) => dt2_to_text(alphabet, t),
        }
    }
}

pub fn train_counts(
    kind: TrainKind,
    words: &[AlignmentWord],
    alphabet: &AlignmentAlphabet,
) -> Result<Trained> {
    if words.iter().all(|w| w.is_empty()) {
        return Err(Error::InvalidArgument("empty training corpus".into()));
    }
    let k = alphabet.len();
    if let Some(&bad) = words.iter().flat_map(|w| w.letters()).find(|&&a| a >= k) {
        return Err(Error::AlphabetMismatch(format!("letter {bad} not in {alphabet}")));
    }
    let mut warnings = Vec::new();
    let params = match kind {
        TrainKind::Bernoulli => {
            let mut counts = vec![0u64; k];
            for &a in words.iter().flat_map(|w| w.letters()) {
                counts[a] += 1;
            }
            TrainedParams::Bernoulli(normalize(&counts))
        }
        TrainKind::Dt1 => {
            let mut counts = vec![vec![0u64; k]; 3];
            for w in words {
                for (i, &a) in w.letters().iter().enumerate() {
                    counts[i % 3][a] += 1;
                }
            }
            if let Some(phase) = counts.iter().position(|r| r.iter().all(|&c| c == 0)) {
                return Err(Error::Model(format!(
                    "no observations at codon position {}",
                    phase + 1
                )));
            }
            TrainedParams::Dt1(counts.iter().map(|r| normalize(r)).collect())
        }
        TrainKind::Dt2 => {
            let mut counts = vec![0u64; k * k * k];
            for w in words {
                for c in w.letters().chunks_exact(3) {
                    counts[(c[0] * k + c[1]) * k + c[2]] += 1;
                }
            }
            if counts.iter().all(|&c| c == 0) {
                return Err(Error::Model("no complete codon in the corpus".into()));
            }
            for a1 in 0..k {
                for a2 in 0..k {
                    let i = (a1 * k + a2) * k;
                    if counts[i..i + k].iter().all(|&c| c == 0) {
                        warnings.push(format!(
                            "codon context '{}{}' never observed",
                            alphabet.glyph(a1),
                            alphabet.glyph(a2)
                        ));
                    }
                }
            }
            TrainedParams::Dt2(CodonTable::new(k, normalize(&counts))?)
        }
    };
    Ok(Trained { params, warnings })
}

fn normalize(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}
