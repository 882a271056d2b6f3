//! Aho-Corasick automaton over the set of alignment fragments matched by a
//! seed, used as the reference construction for automaton-size comparisons.

use std::collections::VecDeque;

use super::{Dfa, StateId};
use crate::alphabet::{AlignmentAlphabet, Letter};
use crate::error::{Error, Result};
use crate::seed::SubsetSeed;

pub const DEFAULT_FRAGMENT_BUDGET: u128 = 10_000_000;

const NONE: usize = usize::MAX;

/// Aho-Corasick DFA accepting every word that contains a fragment matched by
/// `seed`. All pattern-end states are merged into one absorbing final state.
pub fn aho_corasick(seed: &SubsetSeed, budget: u128) -> Result<Dfa> {
    let alphabet = seed.alignment();
    let count: u128 = seed
        .masks()
        .iter()
        .map(|m| m.count_ones() as u128)
        .try_fold(1u128, |acc, c| acc.checked_mul(c))
        .unwrap_or(u128::MAX);
    if count > budget {
        return Err(Error::resource("Aho-Corasick fragment set", count, budget));
    }

    // Odometer over the per-position subset members.
    let options: Vec<Vec<Letter>> = seed
        .masks()
        .iter()
        .map(|&m| alphabet.letters().filter(|&a| m >> a & 1 == 1).collect())
        .collect();
    let mut digits = vec![0usize; options.len()];
    let mut fragments = Vec::with_capacity(count as usize);
    loop {
        fragments.push(
            digits
                .iter()
                .zip(&options)
                .map(|(&d, o)| o[d])
                .collect::<Vec<_>>(),
        );
        let mut i = options.len();
        loop {
            if i == 0 {
                return aho_corasick_patterns(alphabet, &fragments);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < options[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Aho-Corasick DFA for "contains one of `patterns`".
pub fn aho_corasick_patterns(alphabet: &AlignmentAlphabet, patterns: &[Vec<Letter>]) -> Result<Dfa> {
    let k = alphabet.len();
    let mut goto = vec![NONE; k];
    let mut output = vec![false];
    for p in patterns {
        let mut node = 0;
        for &a in p {
            if a >= k {
                return Err(Error::InvalidArgument(format!("letter {a} out of range")));
            }
            if goto[node * k + a] == NONE {
                let id = output.len();
                output.push(false);
                goto.extend(std::iter::repeat_n(NONE, k));
                goto[node * k + a] = id;
            }
            node = goto[node * k + a];
        }
        output[node] = true;
    }

    // BFS: failure links and goto completion in one pass.
    let n = output.len();
    let mut fail = vec![0usize; n];
    let mut queue = VecDeque::new();
    for a in 0..k {
        match goto[a] {
            NONE => goto[a] = 0,
            child => {
                fail[child] = 0;
                queue.push_back(child);
            }
        }
    }
    while let Some(node) = queue.pop_front() {
        output[node] |= output[fail[node]];
        for a in 0..k {
            let child = goto[node * k + a];
            let via_fail = goto[fail[node] * k + a];
            if child == NONE {
                goto[node * k + a] = via_fail;
            } else {
                fail[child] = via_fail;
                queue.push_back(child);
            }
        }
    }

    // Merge pattern-end nodes into one absorbing final state.
    let mut map = vec![NONE; n];
    let mut next_id = 0;
    for q in 0..n {
        if !output[q] {
            map[q] = next_id;
            next_id += 1;
        }
    }
    let has_final = output.iter().any(|&o| o);
    let final_id = next_id;
    let total = next_id + usize::from(has_final);
    let mut delta = vec![0; total * k];
    let mut finals = vec![false; total];
    for q in 0..n {
        if output[q] {
            continue;
        }
        for a in 0..k {
            let t = goto[q * k + a];
            delta[map[q] * k + a] = if output[t] { final_id } else { map[t] };
        }
    }
    if has_final {
        finals[final_id] = true;
        for a in 0..k {
            delta[final_id * k + a] = final_id;
        }
    }
    let initial: StateId = if output[0] { final_id } else { map[0] };
    Dfa::new(alphabet.clone(), initial, finals, delta)
}
