//! Builders for the standard alignment models.

use std::collections::HashMap;

use super::{ProbabilityTransducer, TState, Transition, ROW_SUM_TOLERANCE};
use crate::alphabet::{AlignmentAlphabet, Letter};
use crate::error::{Error, Result};

fn check_row(row: &[f64], what: &str) -> Result<f64> {
    if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Model(format!("{what}: negative or non-finite entry")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::Model(format!("{what}: probabilities sum to {sum}")));
    }
    Ok(sum)
}

/// One-state model with independent letters.
pub fn bernoulli(alphabet: &AlignmentAlphabet, probs: &[f64]) -> Result<ProbabilityTransducer> {
    if probs.len() != alphabet.len() {
        return Err(Error::Model(format!(
            "expected {} letter probabilities, got {}",
            alphabet.len(),
            probs.len()
        )));
    }
    check_row(probs, "Bernoulli distribution")?;
    let transitions = probs.iter().enumerate().map(|(a, &prob)| Transition {
        from: 0,
        letter: a,
        to: 0,
        prob,
    });
    ProbabilityTransducer::new(alphabet.clone(), 1, 0, transitions)
}

/// Parses `1=0.7,h=0.2,0=0.1`; unspecified letters get probability 0.
pub fn parse_bernoulli_spec(spec: &str, alphabet: &AlignmentAlphabet) -> Result<Vec<f64>> {
    let mut probs = vec![0.0; alphabet.len()];
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (g, p) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("expected glyph=prob, got '{part}'")))?;
        let mut chars = g.trim().chars();
        let glyph = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(Error::InvalidArgument(format!("bad glyph '{g}'"))),
        };
        let a = alphabet
            .index_of(glyph)
            .ok_or_else(|| Error::InvalidArgument(format!("'{glyph}' is not in the alphabet")))?;
        probs[a] = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad probability '{p}'")))?;
    }
    Ok(probs)
}

/// Order-`k` Markov model. `rows` maps a context (most recent letter last) to
/// the next-letter distribution; rows are required for every context of
/// length `0..=k`, the shorter ones describing the start of the sequence.
pub fn markov(
    alphabet: &AlignmentAlphabet,
    k: usize,
    rows: &HashMap<Vec<Letter>, Vec<f64>>,
) -> Result<ProbabilityTransducer> {
    let size = alphabet.len();
    // contexts by length, shortest first; ids in that order
    let mut contexts: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for c in &layer {
            for a in 0..size {
                let mut v = c.clone();
                v.push(a);
                next.push(v);
            }
        }
        contexts.extend(next.iter().cloned());
        layer = next;
    }
    let ids: HashMap<&[Letter], TState> = contexts
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();

    let mut transitions = Vec::new();
    for (from, ctx) in contexts.iter().enumerate() {
        let row = rows.get(ctx).ok_or_else(|| {
            Error::Model(format!(
                "missing distribution for context '{}'",
                alphabet.render(ctx)
            ))
        })?;
        if row.len() != size {
            return Err(Error::Model(format!(
                "context '{}' has {} entries, expected {size}",
                alphabet.render(ctx),
                row.len()
            )));
        }
        check_row(row, &format!("context '{}'", alphabet.render(ctx)))?;
        for (a, &prob) in row.iter().enumerate() {
            let mut next = ctx.clone();
            next.push(a);
            if next.len() > k {
                next.remove(0);
            }
            transitions.push(Transition {
                from,
                letter: a,
                to: ids[next.as_slice()],
                prob,
            });
        }
    }
    ProbabilityTransducer::new(alphabet.clone(), contexts.len(), 0, transitions)
}

/// Three-state cycle, one letter distribution per codon position. The first
/// alignment column is codon position 1.
pub fn dt1(alphabet: &AlignmentAlphabet, rows: &[Vec<f64>]) -> Result<ProbabilityTransducer> {
    if rows.len() != 3 {
        return Err(Error::Model(format!("expected 3 rows, got {}", rows.len())));
    }
    let mut transitions = Vec::new();
    for (q, row) in rows.iter().enumerate() {
        if row.len() != alphabet.len() {
            return Err(Error::Model(format!(
                "row {q} has {} entries, expected {}",
                row.len(),
                alphabet.len()
            )));
        }
        check_row(row, &format!("codon position {}", q + 1))?;
        for (a, &prob) in row.iter().enumerate() {
            transitions.push(Transition {
                from: q,
                letter: a,
                to: (q + 1) % 3,
                prob,
            });
        }
    }
    ProbabilityTransducer::new(alphabet.clone(), 3, 0, transitions)
}

/// Probabilities of the `|A|^3` codon instances, indexed
/// `a1 * |A|^2 + a2 * |A| + a3`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodonTable {
    letters: usize,
    probs: Vec<f64>,
}

impl CodonTable {
    /// Validates entries and the total (within tolerance) and rescales the
    /// table to sum to exactly 1.
    pub fn new(letters: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != letters * letters * letters {
            return Err(Error::Model(format!(
                "codon table has {} entries, expected {}",
                probs.len(),
                letters * letters * letters
            )));
        }
        let sum = check_row(&probs, "codon table")?;
        Ok(CodonTable {
            letters,
            probs: probs.into_iter().map(|p| p / sum).collect(),
        })
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn get(&self, a1: Letter, a2: Letter, a3: Letter) -> f64 {
        let k = self.letters;
        self.probs[(a1 * k + a2) * k + a3]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn first(&self, a1: Letter) -> f64 {
        let k = self.letters;
        self.probs[a1 * k * k..(a1 + 1) * k * k].iter().sum()
    }

    fn pair(&self, a1: Letter, a2: Letter) -> f64 {
        let k = self.letters;
        let i = (a1 * k + a2) * k;
        self.probs[i..i + k].iter().sum()
    }
}

/// State layout of one codon block: start, `|A|` after-one-letter states,
/// `|A|^2` after-two-letter states.
fn codon_block_size(k: usize) -> usize {
    1 + k + k * k
}

/// Transitions of one codon block at `offset`. The third letter leaves the
/// block: `exits` lists `(target, weight)` pairs that split its mass.
fn codon_block(
    alphabet: &AlignmentAlphabet,
    table: &CodonTable,
    offset: TState,
    exits: &[(TState, f64)],
    out: &mut Vec<Transition>,
) -> Result<()> {
    let k = alphabet.len();
    let after1 = |a1: Letter| offset + 1 + a1;
    let after2 = |a1: Letter, a2: Letter| offset + 1 + k + a1 * k + a2;
    let zero = |ctx: String| {
        Error::Model(format!(
            "zero marginal for codon context '{ctx}': conditional probabilities undefined"
        ))
    };
    for a1 in 0..k {
        let m1 = table.first(a1);
        if m1 == 0.0 {
            return Err(zero(alphabet.glyph(a1).to_string()));
        }
        out.push(Transition {
            from: offset,
            letter: a1,
            to: after1(a1),
            prob: m1,
        });
        for a2 in 0..k {
            let m12 = table.pair(a1, a2);
            if m12 == 0.0 {
                return Err(zero(format!("{}{}", alphabet.glyph(a1), alphabet.glyph(a2))));
            }
            out.push(Transition {
                from: after1(a1),
                letter: a2,
                to: after2(a1, a2),
                prob: m12 / m1,
            });
            for a3 in 0..k {
                let prob = table.get(a1, a2, a3) / m12;
                for &(to, w) in exits {
                    out.push(Transition {
                        from: after2(a1, a2),
                        letter: a3,
                        to,
                        prob: prob * w,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Deterministic codon-instance model with `1 + |A| + |A|^2` states.
pub fn dt2(alphabet: &AlignmentAlphabet, table: &CodonTable) -> Result<ProbabilityTransducer> {
    let k = alphabet.len();
    if table.letters() != k {
        return Err(Error::AlphabetMismatch("codon table size".into()));
    }
    let mut transitions = Vec::new();
    codon_block(alphabet, table, 0, &[(0, 1.0)], &mut transitions)?;
    ProbabilityTransducer::new(alphabet.clone(), codon_block_size(k), 0, transitions)
}

/// Choice of the initial state for [`nt`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NtInit {
    /// Start in block 0.
    StartQ0,
    /// Start in a block drawn from the stationary distribution of the
    /// block-switch matrix.
    Stationary,
}

impl std::str::FromStr for NtInit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "start" | "start_q0" | "q0" => Ok(NtInit::StartQ0),
            "stationary" => Ok(NtInit::Stationary),
            _ => Err(Error::InvalidArgument(format!("unknown NT initial mode '{s}'"))),
        }
    }
}

/// Nondeterministic mixture of codon blocks: at each codon boundary the
/// process moves from block `i` to block `j` with probability `switch[i][j]`.
pub fn nt(
    alphabet: &AlignmentAlphabet,
    blocks: &[CodonTable],
    switch: &[Vec<f64>],
    init: NtInit,
) -> Result<ProbabilityTransducer> {
    let k = alphabet.len();
    let nb = blocks.len();
    if nb == 0 || switch.len() != nb || switch.iter().any(|r| r.len() != nb) {
        return Err(Error::Model(format!(
            "switch matrix must be {nb}x{nb} for {nb} blocks"
        )));
    }
    if blocks.iter().any(|b| b.letters() != k) {
        return Err(Error::AlphabetMismatch("codon table size".into()));
    }
    let mut switch: Vec<Vec<f64>> = switch.to_vec();
    for (i, row) in switch.iter_mut().enumerate() {
        let sum = check_row(row, &format!("switch row {i}"))?;
        row.iter_mut().for_each(|p| *p /= sum);
    }

    let size = codon_block_size(k);
    let mut transitions = Vec::new();
    for (i, table) in blocks.iter().enumerate() {
        let exits: Vec<(TState, f64)> = switch[i]
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, &w)| (j * size, w))
            .collect();
        codon_block(alphabet, table, i * size, &exits, &mut transitions)?;
    }

    match init {
        NtInit::StartQ0 => ProbabilityTransducer::new(alphabet.clone(), nb * size, 0, transitions),
        NtInit::Stationary => {
            let pi = stationary_distribution(&switch)?;
            let start = nb * size;
            for (i, table) in blocks.iter().enumerate() {
                if pi[i] == 0.0 {
                    continue;
                }
                for a1 in 0..k {
                    transitions.push(Transition {
                        from: start,
                        letter: a1,
                        to: i * size + 1 + a1,
                        prob: pi[i] * table.first(a1),
                    });
                }
            }
            ProbabilityTransducer::new(alphabet.clone(), nb * size + 1, start, transitions)
        }
    }
}

/// Stationary distribution of an irreducible row-stochastic matrix.
pub(crate) fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    // irreducibility: every state reaches every other through positive entries
    for s in 0..n {
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if p[i][j] > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if seen.iter().any(|&x| !x) {
            return Err(Error::Model(
                "switch matrix is reducible; stationary distribution is not unique".into(),
            ));
        }
    }
    // Solve pi (P - I) = 0 with sum(pi) = 1 by Gaussian elimination on the
    // transposed system, replacing the last equation by the normalization.
    let mut m = vec![vec![0.0; n + 1]; n];
    for (i, row) in m.iter_mut().enumerate() {
        for j in 0..n {
            row[j] = p[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        m[n - 1][j] = 1.0;
    }
    m[n - 1][n] = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-14 {
            return Err(Error::Model("singular stationary system".into()));
        }
        m.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Ok((0..n).map(|i| m[i][n] / m[i][i]).collect())
}
