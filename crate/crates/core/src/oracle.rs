//! Exhaustive reference computations over all words of a given length.
//! They use only direct seed matching and the transducer forward sum, never
//! the automaton constructions, so they can check those independently.

use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::seed::SubsetSeed;
use crate::transducer::ProbabilityTransducer;

pub use crate::transducer::DEFAULT_ENUMERATION_BUDGET;

/// Sensitivity by enumeration of `A^n`.
pub fn brute_sensitivity(
    seed: &SubsetSeed,
    g: &ProbabilityTransducer,
    n: usize,
    budget: u128,
) -> Result<f64> {
    if seed.alignment() != g.alphabet() {
        return Err(Error::AlphabetMismatch("seed and model alphabets differ".into()));
    }
    let (words, probs) = word_probabilities(g, n, budget)?;
    let hit: Vec<f64> = words
        .chunks(n.max(1))
        .zip(&probs)
        .map(|(w, &p)| if n > 0 && !seed.hit_positions(w).is_empty() { p } else { 0.0 })
        .collect();
    let den = pairwise_sum(&probs);
    if den <= 0.0 {
        return Err(Error::Model("target language has probability 0 under the model".into()));
    }
    Ok(pairwise_sum(&hit) / den)
}

/// Every word of `A^n` (concatenated, lexicographic) with its probability.
/// The forward vector is extended one letter at a time along the
/// enumeration, so each prefix is processed once.
pub fn word_probabilities(
    g: &ProbabilityTransducer,
    n: usize,
    budget: u128,
) -> Result<(Vec<Letter>, Vec<f64>)> {
    let k = g.alphabet().len();
    let count = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > budget {
        return Err(Error::resource("word enumeration", count, budget));
    }
    let states = g.num_states();
    let mut alpha = vec![vec![0.0; states]; n + 1];
    alpha[0][g.initial()] = 1.0;
    let mut word = vec![0; n];
    let mut words = Vec::with_capacity(count as usize * n);
    let mut probs = Vec::with_capacity(count as usize);
    let extend = |alpha: &mut [Vec<f64>], depth: usize, a: Letter| {
        let (done, rest) = alpha.split_at_mut(depth + 1);
        let next = &mut rest[0];
        next.iter_mut().for_each(|x| *x = 0.0);
        for (q, &m) in done[depth].iter().enumerate() {
            if m != 0.0 {
                for &(q2, p) in g.next(q, a) {
                    next[q2] += m * p;
                }
            }
        }
    };
    // Odometer: after bumping position `d`, recompute forward vectors from d.
    let mut from = 0;
    for _ in 0..count {
        for d in from..n {
            extend(&mut alpha, d, word[d]);
        }
        words.extend_from_slice(&word);
        probs.push(alpha[n].iter().sum());
        from = n;
        for d in (0..n).rev() {
            word[d] += 1;
            if word[d] < k {
                from = d;
                break;
            }
            word[d] = 0;
        }
    }
    Ok((words, probs))
}

/// All words of length `n` with at least one hit, in lexicographic letter
/// order.
pub fn brute_language_membership(seed: &SubsetSeed, n: usize, budget: u128) -> Result<Vec<Vec<Letter>>> {
    let mut out = Vec::new();
    for_each_word(seed.alignment().len(), n, budget, |w| {
        if !seed.hit_positions(w).is_empty() {
            out.push(w.to_vec());
        }
    })?;
    Ok(out)
}

fn for_each_word(k: usize, n: usize, budget: u128, mut f: impl FnMut(&[Letter])) -> Result<()> {
    let count = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > budget {
        return Err(Error::resource("word enumeration", count, budget));
    }
    let mut word = vec![0; n];
    for _ in 0..count {
        f(&word);
        for d in word.iter_mut().rev() {
            *d += 1;
            if *d < k {
                break;
            }
            *d = 0;
        }
    }
    Ok(())
}

/// Summation order fixed by the input order alone.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}
