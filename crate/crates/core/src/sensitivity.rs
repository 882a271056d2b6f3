//! Seed sensitivity: the probability, under a transducer `G`, that a target
//! alignment contains a hit, conditioned on the target set.
//!
//! The fixed-length case runs a level-synchronous forward pass over pairs
//! (seed-automaton state, transducer state), two buffers wide. Arbitrary
//! finite targets go through the intersection with the target DFA and a
//! forward pass restricted to its useful states. [`PwAutomaton`] is the
//! explicit weighted product, kept for inspection and cross-checking.

use std::collections::HashMap;

use crate::alphabet::Letter;
use crate::automata::{Dfa, StateId};
use crate::error::{Error, Result};
use crate::seed::SubsetSeed;
use crate::seed_automaton::build_seed_dfa;
use crate::transducer::{ProbabilityTransducer, TState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityResult {
    pub numerator: f64,
    pub denominator: f64,
    pub sensitivity: f64,
}

impl SensitivityResult {
    fn from_parts(numerator: f64, denominator: f64) -> Result<Self> {
        if denominator <= 0.0 {
            return Err(Error::Model(
                "target language has probability 0 under the model".into(),
            ));
        }
        Ok(SensitivityResult {
            numerator,
            denominator,
            sensitivity: (numerator / denominator).clamp(0.0, 1.0),
        })
    }
}

/// Which inner loop the fixed-length pass uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DpPath {
    /// Single-successor table when the transducer is deterministic.
    #[default]
    Auto,
    General,
}

/// Sensitivity over all alignments of length `n`.
pub fn sensitivity(seed: &SubsetSeed, g: &ProbabilityTransducer, n: usize) -> Result<SensitivityResult> {
    sensitivity_with_path(seed, g, n, DpPath::Auto)
}

pub fn sensitivity_with_path(
    seed: &SubsetSeed,
    g: &ProbabilityTransducer,
    n: usize,
    path: DpPath,
) -> Result<SensitivityResult> {
    check_alphabet(seed.alignment() == g.alphabet())?;
    let s = build_seed_dfa(seed)?;
    let (num, den) = fixed_length_masses(s.dfa(), g, n, path)?;
    SensitivityResult::from_parts(num, den)
}

/// `(P_G(L(k) ∩ A^n), P_G(A^n))` by a forward pass of `n` levels.
pub fn fixed_length_masses(
    k: &Dfa,
    g: &ProbabilityTransducer,
    n: usize,
    path: DpPath,
) -> Result<(f64, f64)> {
    check_alphabet(k.alphabet() == g.alphabet())?;
    let letters = g.alphabet().len();
    let gs = g.num_states();
    let mut cur = vec![0.0; k.num_states() * gs];
    let mut next = vec![0.0; cur.len()];
    cur[k.initial() * gs + g.initial()] = 1.0;
    let det = (path == DpPath::Auto && g.is_deterministic()).then(|| deterministic_table(g));
    for _ in 0..n {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, &mass) in cur.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (s, q) = (i / gs, i % gs);
            let row = k.row(s);
            match &det {
                Some(table) => {
                    for (a, &s2) in row.iter().enumerate() {
                        let (q2, p) = table[q * letters + a];
                        if p != 0.0 {
                            next[s2 * gs + q2] += mass * p;
                        }
                    }
                }
                None => {
                    for (a, &s2) in row.iter().enumerate() {
                        for &(q2, p) in g.next(q, a) {
                            next[s2 * gs + q2] += mass * p;
                        }
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &mass) in cur.iter().enumerate() {
        den += mass;
        if k.is_final(i / gs) {
            num += mass;
        }
    }
    Ok((num, den))
}

fn deterministic_table(g: &ProbabilityTransducer) -> Vec<(TState, f64)> {
    let k = g.alphabet().len();
    (0..g.num_states() * k)
        .map(|i| g.next(i / k, i % k).first().copied().unwrap_or((0, 0.0)))
        .collect()
}

/// Sensitivity with respect to an arbitrary finite target language.
pub fn sensitivity_with_target(
    seed: &SubsetSeed,
    g: &ProbabilityTransducer,
    target: &Dfa,
) -> Result<SensitivityResult> {
    check_alphabet(seed.alignment() == target.alphabet())?;
    if !target.has_finite_language() {
        return Err(Error::Structure(
            "target automaton accepts an infinite language".into(),
        ));
    }
    let s = build_seed_dfa(seed)?;
    let both = target.intersect(s.dfa())?;
    let num = language_probability(&both, g)?;
    let den = language_probability(target, g)?;
    SensitivityResult::from_parts(num, den)
}

/// `P_G(L(k))` for a DFA with a finite language: the sum over all full
/// paths of the product with `G`.
pub fn language_probability(k: &Dfa, g: &ProbabilityTransducer) -> Result<f64> {
    check_alphabet(k.alphabet() == g.alphabet())?;
    if !k.has_finite_language() {
        return Err(Error::Structure("automaton accepts an infinite language".into()));
    }
    let useful = k.coaccessible();
    if !useful[k.initial()] {
        return Ok(0.0);
    }
    let gs = g.num_states();
    let mut cur: HashMap<(StateId, TState), f64> = HashMap::new();
    cur.insert((k.initial(), g.initial()), 1.0);
    let mut total = 0.0;
    // Useful part is acyclic, so every path has fewer than |Q| edges.
    for _ in 0..=k.num_states() {
        if cur.is_empty() {
            break;
        }
        let mut entries: Vec<_> = cur.into_iter().collect();
        entries.sort_unstable_by_key(|&(key, _)| key);
        let mut next: HashMap<(StateId, TState), f64> = HashMap::with_capacity(entries.len());
        for ((s, q), mass) in entries {
            if k.is_final(s) {
                total += mass;
            }
            for (a, &s2) in k.row(s).iter().enumerate() {
                if !useful[s2] {
                    continue;
                }
                for &(q2, p) in g.next(q, a) {
                    debug_assert!(q2 < gs);
                    *next.entry((s2, q2)).or_insert(0.0) += mass * p;
                }
            }
        }
        cur = next;
    }
    Ok(total)
}

fn check_alphabet(same: bool) -> Result<()> {
    if same {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(
            "seed, target and model must share one alignment alphabet".into(),
        ))
    }
}

/// Explicit product of a DFA `K` with a transducer `G`: state `(q_K, q_G)`
/// steps on `a` to `(ψ_K(q_K, a), q_G')` with probability `ρ_G(q_G, a, q_G')`.
/// State 0 is the initial pair; only reachable pairs are built.
#[derive(Debug, Clone)]
pub struct PwAutomaton {
    pairs: Vec<(StateId, TState)>,
    finals: Vec<bool>,
    edges: Vec<Vec<(Letter, usize, f64)>>,
}

pub fn pw_product(k: &Dfa, g: &ProbabilityTransducer) -> Result<PwAutomaton> {
    check_alphabet(k.alphabet() == g.alphabet())?;
    let mut index: HashMap<(StateId, TState), usize> = HashMap::new();
    let mut pairs = vec![(k.initial(), g.initial())];
    index.insert(pairs[0], 0);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (s, q) = pairs[i];
        let mut out = Vec::new();
        for (a, &s2) in k.row(s).iter().enumerate() {
            for &(q2, p) in g.next(q, a) {
                let j = *index.entry((s2, q2)).or_insert_with(|| {
                    pairs.push((s2, q2));
                    pairs.len() - 1
                });
                out.push((a, j, p));
            }
        }
        edges.push(out);
        i += 1;
    }
    let finals = pairs.iter().map(|&(s, _)| k.is_final(s)).collect();
    Ok(PwAutomaton {
        pairs,
        finals,
        edges,
    })
}

impl PwAutomaton {
    pub fn num_states(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair(&self, i: usize) -> (StateId, TState) {
        self.pairs[i]
    }

    pub fn is_final(&self, i: usize) -> bool {
        self.finals[i]
    }

    pub fn outgoing(&self, i: usize) -> &[(Letter, usize, f64)] {
        &self.edges[i]
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Distance of each state from the initial one, for states within
    /// `horizon` steps. Fails if some state is reachable at two different
    /// distances within the horizon.
    pub fn levels(&self, horizon: usize) -> Result<Vec<Option<usize>>> {
        let mut level = vec![None; self.pairs.len()];
        level[0] = Some(0);
        let mut frontier = vec![0];
        for l in 0..horizon {
            let mut next = Vec::new();
            for &i in &frontier {
                for &(_, j, _) in &self.edges[i] {
                    match level[j] {
                        None => {
                            level[j] = Some(l + 1);
                            next.push(j);
                        }
                        Some(lj) if lj == l + 1 => {}
                        Some(lj) => {
                            return Err(Error::Structure(format!(
                                "product state {j} is reachable at levels {lj} and {}",
                                l + 1
                            )))
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(level)
    }

    /// Sum of the probabilities of all paths of exactly `horizon` steps
    /// ending in a final state.
    pub fn total_full_path_probability(&self, horizon: usize) -> Result<f64> {
        let level = self.levels(horizon)?;
        let mut alpha = vec![0.0; self.pairs.len()];
        alpha[0] = 1.0;
        let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); horizon + 1];
        for (i, l) in level.iter().enumerate() {
            if let Some(l) = *l {
                by_level[l].push(i);
            }
        }
        for states in by_level.iter().take(horizon) {
            for &i in states {
                let m = alpha[i];
                for &(_, j, p) in &self.edges[i] {
                    alpha[j] += m * p;
                }
            }
        }
        Ok(by_level[horizon]
            .iter()
            .filter(|&&i| self.finals[i])
            .map(|&i| alpha[i])
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{AlignmentAlphabet, SeedAlphabet};
    use crate::transducer::{bernoulli, builtin, NtInit};

    fn uniform_binary() -> ProbabilityTransducer {
        bernoulli(&AlignmentAlphabet::binary(), &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn single_hash_three_letters() {
        let seed = SubsetSeed::parse("#", &SeedAlphabet::binary()).unwrap();
        let r = sensitivity(&seed, &uniform_binary(), 3).unwrap();
        assert!((r.sensitivity - 0.875).abs() < 1e-15);
        assert!((r.denominator - 1.0).abs() < 1e-15);
    }

    #[test]
    fn span_longer_than_target() {
        let seed = SubsetSeed::parse("##_#", &SeedAlphabet::dna3()).unwrap();
        let g = builtin("dt1", &AlignmentAlphabet::dna3(), NtInit::Stationary).unwrap();
        assert_eq!(sensitivity(&seed, &g, 3).unwrap().sensitivity, 0.0);
        assert_eq!(sensitivity(&seed, &g, 0).unwrap().sensitivity, 0.0);
    }

    #[test]
    fn pw_product_of_trivial_automata() {
        let a = AlignmentAlphabet::binary();
        let t = Dfa::length_target(3, &a);
        let all = t.intersect(&Dfa::all_words(&a)).unwrap();
        let pw = pw_product(&all, &uniform_binary()).unwrap();
        assert!((pw.total_full_path_probability(3).unwrap() - 1.0).abs() < 1e-15);
        let none = t.intersect(&Dfa::empty_language(&a)).unwrap();
        let pw = pw_product(&none, &uniform_binary()).unwrap();
        assert_eq!(pw.total_full_path_probability(3).unwrap(), 0.0);
    }

    #[test]
    fn pw_product_matches_fast_path() {
        let sa = SeedAlphabet::dna3();
        let seed = SubsetSeed::parse("#@_#", &sa).unwrap();
        let g = builtin("dt2", sa.alignment(), NtInit::Stationary).unwrap();
        let s = build_seed_dfa(&seed).unwrap();
        let k = Dfa::length_target(10, sa.alignment()).intersect(s.dfa()).unwrap();
        let pw = pw_product(&k, &g).unwrap();
        assert!(pw.num_states() <= k.num_states() * g.num_states());
        for i in 0..pw.num_states() {
            assert!(pw.outgoing(i).len() <= 3 * g.num_states());
        }
        let explicit = pw.total_full_path_probability(10).unwrap();
        let fast = sensitivity(&seed, &g, 10).unwrap().numerator;
        assert!((explicit - fast).abs() < 1e-14);
    }

    #[test]
    fn cyclic_product_rejected() {
        let a = AlignmentAlphabet::binary();
        // q0 loops on '1', so it is reachable at levels 0 and 1
        let k = Dfa::new(a, 0, vec![false, true], vec![0, 1, 1, 0]).unwrap();
        let pw = pw_product(&k, &uniform_binary()).unwrap();
        assert!(matches!(
            pw.total_full_path_probability(3),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn target_single_word() {
        let sa = SeedAlphabet::dna3();
        let a = sa.alignment();
        let g = builtin("dt1", a, NtInit::Stationary).unwrap();
        let seed = SubsetSeed::parse("#@_#", &sa).unwrap();
        let hit = a.parse_word("10h1h1101").unwrap();
        let miss = a.parse_word("000000000").unwrap();
        let t = Dfa::from_words(a, &[hit.0.clone()]).unwrap();
        let r = sensitivity_with_target(&seed, &g, &t).unwrap();
        assert!((r.sensitivity - 1.0).abs() < 1e-15);
        assert!((r.denominator - g.word_probability(&hit.0)).abs() < 1e-15);
        let t = Dfa::from_words(a, &[miss.0.clone()]).unwrap();
        assert_eq!(sensitivity_with_target(&seed, &g, &t).unwrap().numerator, 0.0);
        let t = Dfa::from_words(a, &[hit.0.clone(), miss.0.clone()]).unwrap();
        let r = sensitivity_with_target(&seed, &g, &t).unwrap();
        assert!((r.numerator - g.word_probability(&hit.0)).abs() < 1e-15);
    }

    #[test]
    fn infinite_target_rejected() {
        let sa = SeedAlphabet::dna3();
        let g = builtin("dt1", sa.alignment(), NtInit::Stationary).unwrap();
        let seed = SubsetSeed::parse("#", &sa).unwrap();
        assert!(matches!(
            sensitivity_with_target(&seed, &g, &Dfa::all_words(sa.alignment())),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn empty_target_is_model_error() {
        let sa = SeedAlphabet::dna3();
        let g = builtin("dt1", sa.alignment(), NtInit::Stationary).unwrap();
        let seed = SubsetSeed::parse("#", &sa).unwrap();
        assert!(matches!(
            sensitivity_with_target(&seed, &g, &Dfa::empty_language(sa.alignment())),
            Err(Error::Model(_))
        ));
    }
}
