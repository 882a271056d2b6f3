//! Probability transducers: finite automata without final states whose
//! transitions carry probabilities, outgoing mass summing to one per state.
//!
//! The probability of a word is the total probability of all paths from the
//! initial state spelling it, computed by the forward recursion.

mod models;
mod tables;
mod train;

use std::fmt::Write as _;

use crate::alphabet::{AlignmentAlphabet, Letter};
use crate::error::{Error, Result};

pub use models::{bernoulli, dt1, dt2, markov, nt, parse_bernoulli_spec, CodonTable, NtInit};
pub use tables::{builtin, load_model, ModelFile, BUILTIN_DT1, BUILTIN_DT2, BUILTIN_NT};
pub use train::{train_counts, TrainKind, Trained, TrainedParams};

/// Accepted deviation of a state's outgoing mass from 1 before rescaling.
pub const ROW_SUM_TOLERANCE: f64 = 5e-3;
/// Default cap on `|A|^n` for brute-force enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

pub type TState = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: TState,
    pub letter: Letter,
    pub to: TState,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTransducer {
    alphabet: AlignmentAlphabet,
    initial: TState,
    /// Outgoing `(target, probability)` pairs, indexed `state * |A| + letter`.
    edges: Vec<Vec<(TState, f64)>>,
}

impl ProbabilityTransducer {
    /// Validates every state's outgoing mass against [`ROW_SUM_TOLERANCE`] and
    /// rescales it to exactly 1. Zero-probability transitions are dropped;
    /// repeated `(from, letter, to)` triples are summed.
    pub fn new(
        alphabet: AlignmentAlphabet,
        num_states: usize,
        initial: TState,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self> {
        if num_states == 0 || initial >= num_states {
            return Err(Error::Model(format!(
                "initial state {initial} out of range ({num_states} states)"
            )));
        }
        let k = alphabet.len();
        let mut edges: Vec<Vec<(TState, f64)>> = vec![Vec::new(); num_states * k];
        for t in transitions {
            if t.from >= num_states || t.to >= num_states || t.letter >= k {
                return Err(Error::Model(format!(
                    "transition {} -{}-> {} out of range",
                    t.from, t.letter, t.to
                )));
            }
            if !(0.0..=1.0 + ROW_SUM_TOLERANCE).contains(&t.prob) || t.prob.is_nan() {
                return Err(Error::Model(format!(
                    "transition {} -{}-> {} has probability {}",
                    t.from,
                    alphabet.glyph(t.letter),
                    t.to,
                    t.prob
                )));
            }
            if t.prob == 0.0 {
                continue;
            }
            let cell = &mut edges[t.from * k + t.letter];
            match cell.iter_mut().find(|(to, _)| *to == t.to) {
                Some((_, p)) => *p += t.prob,
                None => cell.push((t.to, t.prob)),
            }
        }
        for q in 0..num_states {
            let row = &mut edges[q * k..(q + 1) * k];
            let sum: f64 = row.iter().flatten().map(|&(_, p)| p).sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Model(format!(
                    "outgoing probabilities of state {q} sum to {sum}"
                )));
            }
            for (_, p) in row.iter_mut().flatten() {
                *p /= sum;
            }
        }
        Ok(ProbabilityTransducer {
            alphabet,
            initial,
            edges,
        })
    }

    pub fn alphabet(&self) -> &AlignmentAlphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.edges.len() / self.alphabet.len()
    }

    pub fn initial(&self) -> TState {
        self.initial
    }

    /// Transitions leaving `q` on letter `a`.
    #[inline]
    pub fn next(&self, q: TState, a: Letter) -> &[(TState, f64)] {
        &self.edges[q * self.alphabet.len() + a]
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        let k = self.alphabet.len();
        self.edges.iter().enumerate().flat_map(move |(i, cell)| {
            cell.iter().map(move |&(to, prob)| Transition {
                from: i / k,
                letter: i % k,
                to,
                prob,
            })
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// At most one transition per state and letter.
    pub fn is_deterministic(&self) -> bool {
        self.edges.iter().all(|c| c.len() <= 1)
    }

    /// Outgoing mass of `q` (1 up to rounding after construction).
    pub fn row_sum(&self, q: TState) -> f64 {
        let k = self.alphabet.len();
        self.edges[q * k..(q + 1) * k]
            .iter()
            .flatten()
            .map(|&(_, p)| p)
            .sum()
    }

    /// Sum over all initial paths labeled `word` of their probabilities.
    pub fn word_probability(&self, word: &[Letter]) -> f64 {
        let n = self.num_states();
        let mut cur = vec![0.0; n];
        cur[self.initial] = 1.0;
        let mut next = vec![0.0; n];
        for &a in word {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (q, &mass) in cur.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for &(to, p) in self.next(q, a) {
                    next[to] += mass * p;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur.iter().sum()
    }

    /// `P(A^n)` by explicit enumeration of every word.
    pub fn language_probability_bruteforce(&self, n: usize, budget: u128) -> Result<f64> {
        let k = self.alphabet.len();
        let count = (k as u128)
            .checked_pow(n as u32)
            .filter(|&c| c <= budget)
            .ok_or_else(|| {
                Error::resource(
                    "word enumeration",
                    (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX),
                    budget,
                )
            })?;
        let mut word = vec![0; n];
        let mut total = 0.0;
        for _ in 0..count {
            total += self.word_probability(&word);
            for d in word.iter_mut().rev() {
                *d += 1;
                if *d < k {
                    break;
                }
                *d = 0;
            }
        }
        Ok(total)
    }

    /// Line-oriented text form (`pt` header, see [`Self::from_text`]).
    pub fn to_text(&self) -> String {
        let a = &self.alphabet;
        let mut out = String::from("pt\nalphabet");
        for &c in a.symbols() {
            out.push(' ');
            out.push(c);
        }
        let _ = writeln!(out, "\nmatch {}", a.glyph(a.match_letter()));
        let _ = writeln!(out, "states {}", self.num_states());
        let _ = writeln!(out, "initial {}", self.initial);
        for t in self.transitions() {
            let _ = writeln!(
                out,
                "trans {} {} {} {}",
                t.from,
                a.glyph(t.letter),
                t.to,
                t.prob
            );
        }
        out
    }

    /// Parses
    ///
    /// ```text
    /// pt
    /// alphabet 1 h 0
    /// match 1
    /// states 1
    /// initial 0
    /// trans 0 1 0 0.7
    /// ```
    ///
    /// When `target` is given, letters are remapped onto it by glyph.
    pub fn from_text(text: &str, target: Option<&AlignmentAlphabet>) -> Result<Self> {
        let mut lines = tables::content_lines(text);
        match lines.next() {
            Some((_, "pt")) => {}
            Some((n, _)) => return Err(Error::parse(n, "expected 'pt' header")),
            None => return Err(Error::parse(0, "empty input")),
        }
        let mut symbols = None;
        let mut match_symbol = '1';
        let mut states = None;
        let mut initial = None;
        let mut raw = Vec::new();
        for (n, line) in lines {
            let mut tok = line.split_whitespace();
            match tok.next().unwrap() {
                "alphabet" => symbols = Some(tables::glyphs(tok, n)?),
                "match" => match_symbol = tables::glyph(tok.next(), n)?,
                "states" => states = Some(tables::number(tok.next(), n)?),
                "initial" => initial = Some(tables::number(tok.next(), n)?),
                "trans" => {
                    let from = tables::number(tok.next(), n)?;
                    let g = tables::glyph(tok.next(), n)?;
                    let to = tables::number(tok.next(), n)?;
                    let p = tables::real(tok.next(), n)?;
                    raw.push((n, from, g, to, p));
                }
                other => return Err(Error::parse(n, format!("unknown directive '{other}'"))),
            }
        }
        let alphabet = tables::resolve_alphabet(symbols, match_symbol, target)?;
        let states = states.ok_or_else(|| Error::parse(0, "missing 'states'"))?;
        let initial = initial.ok_or_else(|| Error::parse(0, "missing 'initial'"))?;
        let transitions = raw
            .into_iter()
            .map(|(n, from, g, to, prob)| {
                let letter = alphabet
                    .index_of(g)
                    .ok_or_else(|| Error::parse(n, format!("'{g}' is not in the alphabet")))?;
                Ok(Transition {
                    from,
                    letter,
                    to,
                    prob,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ProbabilityTransducer::new(alphabet, states, initial, transitions)
    }
}
