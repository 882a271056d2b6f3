use std::collections::BTreeSet;

use proptest::prelude::*;
use subseed::automata::{aho_corasick, minimize, DEFAULT_FRAGMENT_BUDGET};
use subseed::oracle::brute_language_membership;
use subseed::seed_automaton::{build_seed_dfa, state_count_bound};
use subseed::{Dfa, Letter, SeedAlphabet, SubsetSeed};

fn seed_text(glyphs: &'static str, max_span: usize) -> impl Strategy<Value = String> {
    let chars: Vec<char> = glyphs.chars().collect();
    prop::collection::vec(prop::sample::select(chars), 1..=max_span)
        .prop_map(|v| v.into_iter().collect())
}

fn dna3_seed(max_span: usize) -> impl Strategy<Value = SubsetSeed> {
    seed_text("#@_", max_span).prop_map(|t| SubsetSeed::parse(&t, &SeedAlphabet::dna3()).unwrap())
}

/// Partition refinement by repeated signature splitting, for comparing
/// state counts with the library minimizer.
fn moore_class_count(d: &Dfa) -> usize {
    let order = d.reachable_order();
    let mut class: Vec<usize> = vec![0; d.num_states()];
    for &q in &order {
        class[q] = usize::from(d.is_final(q));
    }
    let mut count = 0;
    loop {
        let mut sigs: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut next = class.clone();
        for &q in &order {
            let sig = (class[q], d.row(q).iter().map(|&p| class[p]).collect::<Vec<_>>());
            let id = match sigs.iter().position(|s| *s == sig) {
                Some(i) => i,
                None => {
                    sigs.push(sig);
                    sigs.len() - 1
                }
            };
            next[q] = id;
        }
        if sigs.len() == count {
            return count;
        }
        count = sigs.len();
        class = next;
    }
}

fn all_words(k: usize, n: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn subset_automaton_accepts_exactly_hit_words(seed in dna3_seed(6), n in 0usize..=7) {
        let s = build_seed_dfa(&seed).unwrap();
        let hits: BTreeSet<Vec<Letter>> =
            brute_language_membership(&seed, n, 1 << 20).unwrap().into_iter().collect();
        for w in all_words(3, n) {
            prop_assert_eq!(s.dfa().accepts(&w), hits.contains(&w), "word {:?}", w);
        }
    }

    #[test]
    fn random_long_words(seed in dna3_seed(8), w in prop::collection::vec(0usize..3, 0..40)) {
        let s = build_seed_dfa(&seed).unwrap();
        prop_assert_eq!(s.dfa().accepts(&w), !seed.hit_positions(&w).is_empty());
    }

    #[test]
    fn aho_corasick_same_language_and_larger(seed in dna3_seed(7)) {
        let s = build_seed_dfa(&seed).unwrap();
        let ac = aho_corasick(&seed, DEFAULT_FRAGMENT_BUDGET).unwrap();
        prop_assert!(ac.equivalent(s.dfa()).unwrap());
        prop_assert!(s.num_states() <= ac.num_states());
    }

    #[test]
    fn minimization_sound_and_idempotent(seed in dna3_seed(7)) {
        let s = build_seed_dfa(&seed).unwrap();
        let m = minimize(s.dfa());
        prop_assert!(m.equivalent(s.dfa()).unwrap());
        prop_assert!(m.num_states() <= s.num_states());
        prop_assert_eq!(m.num_states(), moore_class_count(s.dfa()));
        prop_assert_eq!(minimize(&m), m);
    }

    #[test]
    fn state_count_bounds(seed in dna3_seed(10)) {
        let s = build_seed_dfa(&seed).unwrap();
        let n = s.num_states() as u128;
        prop_assert!(n <= state_count_bound(&seed).unwrap());
        if seed.starts_with_hash() {
            let w = seed.hash_weight() as u128;
            let r = (seed.span() - seed.hash_weight()) as u32;
            prop_assert!(n <= w * (1u128 << r) + 1);
        }
    }

    #[test]
    fn spaced_seeds_over_binary(t in seed_text("#_", 9)) {
        let sa = SeedAlphabet::binary();
        let seed = SubsetSeed::parse(&t, &sa).unwrap();
        let s = build_seed_dfa(&seed).unwrap();
        let ac = aho_corasick(&seed, DEFAULT_FRAGMENT_BUDGET).unwrap();
        prop_assert!(ac.equivalent(s.dfa()).unwrap());
        prop_assert!(s.num_states() <= ac.num_states());
    }

    #[test]
    fn intersection_is_conjunction(a in dna3_seed(4), b in dna3_seed(4),
                                   w in prop::collection::vec(0usize..3, 0..12)) {
        let da = build_seed_dfa(&a).unwrap().into_dfa();
        let db = build_seed_dfa(&b).unwrap().into_dfa();
        let both = da.intersect(&db).unwrap();
        prop_assert_eq!(both.accepts(&w), da.accepts(&w) && db.accepts(&w));
    }
}

#[test]
fn two_hashes_around_jokers_are_reduced() {
    let sa = SeedAlphabet::binary();
    for r in 1..=8 {
        let text = format!("#{}#", "_".repeat(r));
        let seed = SubsetSeed::parse(&text, &sa).unwrap();
        let s = build_seed_dfa(&seed).unwrap();
        assert_eq!(minimize(s.dfa()).num_states(), s.num_states(), "{text}");
    }
}

#[test]
fn dot_and_text_exports() {
    let seed = SubsetSeed::parse("#@_#", &SeedAlphabet::dna3()).unwrap();
    let s = build_seed_dfa(&seed).unwrap();
    let dot = s.to_dot("x");
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    let back = Dfa::from_text(&s.dfa().to_text(), None).unwrap();
    assert_eq!(&back, s.dfa());
}
