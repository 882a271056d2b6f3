//! Complete deterministic automata over an alignment alphabet.
//!
//! Every [`Dfa`] is complete: `delta` has an entry for every state and letter.
//! Constructions that could leave a transition undefined route it to an
//! explicit dead state instead.

mod aho_corasick;
mod io;
mod minimize;

use std::collections::{HashMap, VecDeque};

use crate::alphabet::{AlignmentAlphabet, Letter};
use crate::error::{Error, Result};

pub use aho_corasick::{aho_corasick, aho_corasick_patterns, DEFAULT_FRAGMENT_BUDGET};
pub use minimize::minimize;

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: AlignmentAlphabet,
    initial: StateId,
    finals: Vec<bool>,
    /// Row-major `state * |A| + letter`.
    delta: Vec<StateId>,
}

impl Dfa {
    pub fn new(
        alphabet: AlignmentAlphabet,
        initial: StateId,
        finals: Vec<bool>,
        delta: Vec<StateId>,
    ) -> Result<Self> {
        let n = finals.len();
        if n == 0 {
            return Err(Error::InvalidArgument("automaton without states".into()));
        }
        if initial >= n {
            return Err(Error::InvalidArgument(format!(
                "initial state {initial} out of range ({n} states)"
            )));
        }
        if delta.len() != n * alphabet.len() {
            return Err(Error::InvalidArgument(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                n * alphabet.len()
            )));
        }
        if let Some(bad) = delta.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidArgument(format!(
                "transition to unknown state {bad}"
            )));
        }
        Ok(Dfa {
            alphabet,
            initial,
            finals,
            delta,
        })
    }

    /// Automaton for `A^n`: counters `0..=n` (state `n` final) and a dead
    /// state for longer words.
    pub fn length_target(n: usize, alphabet: &AlignmentAlphabet) -> Dfa {
        let k = alphabet.len();
        let dead = n + 1;
        let mut delta = Vec::with_capacity((n + 2) * k);
        for q in 0..=n + 1 {
            let next = if q < n { q + 1 } else { dead };
            delta.extend(std::iter::repeat_n(next, k));
        }
        let mut finals = vec![false; n + 2];
        finals[n] = true;
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            finals,
            delta,
        }
    }

    /// One accepting state looping on every letter.
    pub fn all_words(alphabet: &AlignmentAlphabet) -> Dfa {
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            finals: vec![true],
            delta: vec![0; alphabet.len()],
        }
    }

    /// One rejecting state looping on every letter.
    pub fn empty_language(alphabet: &AlignmentAlphabet) -> Dfa {
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            finals: vec![false],
            delta: vec![0; alphabet.len()],
        }
    }

    /// Accepts exactly the given words (a trie plus a dead state).
    pub fn from_words(alphabet: &AlignmentAlphabet, words: &[Vec<Letter>]) -> Result<Dfa> {
        let k = alphabet.len();
        const NONE: usize = usize::MAX;
        let mut delta = vec![NONE; k];
        let mut finals = vec![false];
        for w in words {
            let mut q = 0;
            for &a in w {
                if a >= k {
                    return Err(Error::InvalidArgument(format!("letter {a} out of range")));
                }
                if delta[q * k + a] == NONE {
                    let id = finals.len();
                    finals.push(false);
                    delta.extend(std::iter::repeat_n(NONE, k));
                    delta[q * k + a] = id;
                }
                q = delta[q * k + a];
            }
            finals[q] = true;
        }
        let dead = finals.len();
        finals.push(false);
        delta.extend(std::iter::repeat_n(dead, k));
        for d in delta.iter_mut() {
            if *d == NONE {
                *d = dead;
            }
        }
        Dfa::new(alphabet.clone(), 0, finals, delta)
    }

    pub fn alphabet(&self) -> &AlignmentAlphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    pub fn num_finals(&self) -> usize {
        self.finals.iter().filter(|&&f| f).count()
    }

    #[inline]
    pub fn next(&self, q: StateId, a: Letter) -> StateId {
        self.delta[q * self.alphabet.len() + a]
    }

    pub fn row(&self, q: StateId) -> &[StateId] {
        let k = self.alphabet.len();
        &self.delta[q * k..(q + 1) * k]
    }

    pub fn run(&self, word: &[Letter]) -> StateId {
        word.iter().fold(self.initial, |q, &a| self.next(q, a))
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.finals[self.run(word)]
    }

    /// Whether every final state loops to itself on every letter.
    pub fn is_final_absorbing(&self) -> bool {
        (0..self.num_states())
            .filter(|&q| self.finals[q])
            .all(|q| self.row(q).iter().all(|&p| p == q))
    }

    fn check_alphabet(&self, other: &Dfa) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{} vs {}",
                self.alphabet, other.alphabet
            )));
        }
        Ok(())
    }

    /// Product automaton for `L(self) ∩ L(other)`, reachable pairs only.
    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.check_alphabet(other)?;
        let k = self.alphabet.len();
        let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        ids.insert(pairs[0], 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            for a in 0..k {
                let next = (self.next(p, a), other.next(q, a));
                let id = *ids.entry(next).or_insert_with(|| {
                    pairs.push(next);
                    pairs.len() - 1
                });
                delta.push(id);
            }
            i += 1;
        }
        let finals = pairs
            .iter()
            .map(|&(p, q)| self.finals[p] && other.finals[q])
            .collect();
        Ok(Dfa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            finals,
            delta,
        })
    }

    /// States reachable from the initial state, in BFS order.
    pub fn reachable_order(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            for &p in self.row(order[i]) {
                if !seen[p] {
                    seen[p] = true;
                    order.push(p);
                }
            }
            i += 1;
        }
        order
    }

    /// Removes unreachable states, renumbering the rest in BFS order.
    pub fn trim(&self) -> Dfa {
        let order = self.reachable_order();
        self.renumber(&order)
    }

    /// Keeps the states of `order` (which must be closed under transitions)
    /// and numbers them by their position in it.
    pub(crate) fn renumber(&self, order: &[StateId]) -> Dfa {
        let mut map = vec![usize::MAX; self.num_states()];
        for (new, &old) in order.iter().enumerate() {
            map[old] = new;
        }
        let mut delta = Vec::with_capacity(order.len() * self.alphabet.len());
        for &old in order {
            delta.extend(self.row(old).iter().map(|&p| map[p]));
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            initial: map[self.initial],
            finals: order.iter().map(|&q| self.finals[q]).collect(),
            delta,
        }
    }

    /// `L(self) = L(other)`, decided by exploring the reachable product.
    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        self.check_alphabet(other)?;
        let mut seen = std::collections::HashSet::new();
        let mut queue = VecDeque::from([(self.initial, other.initial)]);
        seen.insert((self.initial, other.initial));
        while let Some((p, q)) = queue.pop_front() {
            if self.finals[p] != other.finals[q] {
                return Ok(false);
            }
            for a in self.alphabet.letters() {
                let next = (self.next(p, a), other.next(q, a));
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        Ok(true)
    }

    /// States from which some final state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n {
            for &p in self.row(q) {
                preds[p].push(q);
            }
        }
        let mut live = self.finals.clone();
        let mut stack: Vec<StateId> = (0..n).filter(|&q| live[q]).collect();
        while let Some(p) = stack.pop() {
            for &q in &preds[p] {
                if !live[q] {
                    live[q] = true;
                    stack.push(q);
                }
            }
        }
        live
    }

    /// Whether the accepted language is finite, i.e. no cycle passes through
    /// a state that is both reachable and co-accessible.
    pub fn has_finite_language(&self) -> bool {
        let live = self.coaccessible();
        let reach = self.reachable_order();
        let mut useful = vec![false; self.num_states()];
        for &q in &reach {
            useful[q] = live[q];
        }
        // Kahn's algorithm on the useful subgraph.
        let mut indeg = vec![0usize; self.num_states()];
        for &q in &reach {
            if !useful[q] {
                continue;
            }
            for &p in self.row(q) {
                if useful[p] {
                    indeg[p] += 1;
                }
            }
        }
        let mut stack: Vec<StateId> = reach
            .iter()
            .copied()
            .filter(|&q| useful[q] && indeg[q] == 0)
            .collect();
        let mut removed = 0;
        let total = useful.iter().filter(|&&u| u).count();
        while let Some(q) = stack.pop() {
            removed += 1;
            for &p in self.row(q) {
                if useful[p] {
                    indeg[p] -= 1;
                    if indeg[p] == 0 {
                        stack.push(p);
                    }
                }
            }
        }
        removed == total
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_words_upto(k: usize, max_len: usize) -> Vec<Vec<Letter>> {
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for a in 0..k {
                    let mut v: Vec<Letter> = w.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn length_target_sizes() {
        let a = AlignmentAlphabet::dna3();
        let t0 = Dfa::length_target(0, &a);
        assert!(t0.accepts(&[]));
        assert!(!t0.accepts(&[0]));
        let t2 = Dfa::length_target(2, &a);
        let count = all_words_upto(3, 4).iter().filter(|w| t2.accepts(w)).count();
        assert_eq!(count, 9);
        assert_eq!(Dfa::length_target(64, &a).num_states(), 66);
    }

    #[test]
    fn intersect_membership_is_conjunction() {
        let a = AlignmentAlphabet::dna3();
        let t2 = Dfa::length_target(2, &a);
        let all = Dfa::all_words(&a);
        let p = t2.intersect(&all).unwrap();
        let words = all_words_upto(3, 6);
        assert_eq!(words.iter().filter(|w| p.accepts(w)).count(), 9);
        let e = t2.intersect(&Dfa::empty_language(&a)).unwrap();
        assert!(words.iter().all(|w| !e.accepts(w)));
        assert!(p.num_states() <= t2.num_states() * all.num_states());

        let words_set = Dfa::from_words(&a, &[vec![0, 1], vec![2], vec![0, 1, 1]]).unwrap();
        let t3 = Dfa::length_target(3, &a);
        let x = words_set.intersect(&t3).unwrap();
        for w in &words {
            assert_eq!(x.accepts(w), words_set.accepts(w) && t3.accepts(w));
        }
    }

    #[test]
    fn intersect_alphabet_mismatch() {
        let t = Dfa::length_target(2, &AlignmentAlphabet::dna3());
        let u = Dfa::length_target(2, &AlignmentAlphabet::binary());
        assert!(matches!(t.intersect(&u), Err(Error::AlphabetMismatch(_))));
        assert!(t.equivalent(&u).is_err());
    }

    #[test]
    fn trim_properties() {
        let a = AlignmentAlphabet::binary();
        // state 2 is unreachable
        let d = Dfa::new(a.clone(), 0, vec![false, true, false], vec![1, 0, 1, 1, 0, 0]).unwrap();
        let t = d.trim();
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.trim().num_states(), 2);
        assert!(t.equivalent(&d).unwrap());

        // disjoint languages: only the dead sink survives alongside the pair states
        let x = Dfa::from_words(&a, &[vec![0]]).unwrap();
        let y = Dfa::from_words(&a, &[vec![1]]).unwrap();
        let p = x.intersect(&y).unwrap().trim();
        assert_eq!(p.num_finals(), 0);
        assert!(p.num_states() >= 1);
        assert_eq!(p.num_transitions(), p.num_states() * 2);
    }

    #[test]
    fn equivalence() {
        let a = AlignmentAlphabet::dna3();
        let t2 = Dfa::length_target(2, &a);
        let t3 = Dfa::length_target(3, &a);
        assert!(!t2.equivalent(&t3).unwrap());
        assert!(t2.equivalent(&minimize(&t2)).unwrap());
    }

    #[test]
    fn finiteness() {
        let a = AlignmentAlphabet::dna3();
        assert!(Dfa::length_target(5, &a).has_finite_language());
        assert!(Dfa::empty_language(&a).has_finite_language());
        assert!(!Dfa::all_words(&a).has_finite_language());
    }

    #[test]
    fn rejects_malformed() {
        let a = AlignmentAlphabet::binary();
        assert!(Dfa::new(a.clone(), 2, vec![false, true], vec![0; 4]).is_err());
        assert!(Dfa::new(a.clone(), 0, vec![false, true], vec![0; 3]).is_err());
        assert!(Dfa::new(a, 0, vec![false, true], vec![0, 0, 5, 0]).is_err());
    }
}
