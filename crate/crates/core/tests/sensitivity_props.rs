use proptest::prelude::*;
use subseed::oracle::brute_sensitivity;
use subseed::seed_automaton::build_seed_dfa;
use subseed::sensitivity::{
    fixed_length_masses, pw_product, sensitivity, sensitivity_with_path, sensitivity_with_target,
    DpPath,
};
use subseed::transducer::{bernoulli, builtin, NtInit};
use subseed::{AlignmentAlphabet, Dfa, ProbabilityTransducer, SeedAlphabet, SubsetSeed};

fn dna3_seed(max_span: usize) -> impl Strategy<Value = SubsetSeed> {
    prop::collection::vec(prop::sample::select(vec!['#', '@', '_']), 1..=max_span).prop_map(|v| {
        SubsetSeed::parse(&v.into_iter().collect::<String>(), &SeedAlphabet::dna3()).unwrap()
    })
}

fn random_bernoulli() -> impl Strategy<Value = ProbabilityTransducer> {
    (0.05f64..1.0, 0.05f64..1.0, 0.05f64..1.0).prop_map(|(a, b, c)| {
        let s = a + b + c;
        bernoulli(&AlignmentAlphabet::dna3(), &[a / s, b / s, c / s]).unwrap()
    })
}

fn models() -> Vec<(&'static str, ProbabilityTransducer)> {
    let a = AlignmentAlphabet::dna3();
    vec![
        ("dt1", builtin("dt1", &a, NtInit::Stationary).unwrap()),
        ("dt2", builtin("dt2", &a, NtInit::Stationary).unwrap()),
        ("nt-q0", builtin("nt", &a, NtInit::StartQ0).unwrap()),
        ("nt-stat", builtin("nt", &a, NtInit::Stationary).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_equals_enumeration_bernoulli(seed in dna3_seed(5), g in random_bernoulli(), extra in 0usize..3) {
        let n = seed.span() + extra;
        let dp = sensitivity(&seed, &g, n).unwrap().sensitivity;
        let brute = brute_sensitivity(&seed, &g, n, 1 << 20).unwrap();
        prop_assert!((dp - brute).abs() < 1e-12, "{} vs {}", dp, brute);
    }

    #[test]
    fn dp_equals_enumeration_codon_models(seed in dna3_seed(4), extra in 0usize..3) {
        let n = seed.span() + extra;
        for (name, g) in models() {
            let dp = sensitivity(&seed, &g, n).unwrap().sensitivity;
            let brute = brute_sensitivity(&seed, &g, n, 1 << 20).unwrap();
            prop_assert!((dp - brute).abs() < 1e-12, "{}: {} vs {}", name, dp, brute);
        }
    }

    #[test]
    fn fast_and_general_paths_agree(seed in dna3_seed(10), n in 0usize..40) {
        let g = builtin("dt2", &AlignmentAlphabet::dna3(), NtInit::Stationary).unwrap();
        let fast = sensitivity_with_path(&seed, &g, n, DpPath::Auto).unwrap();
        let general = sensitivity_with_path(&seed, &g, n, DpPath::General).unwrap();
        prop_assert_eq!(fast, general);
    }

    #[test]
    fn monotone_in_length(seed in dna3_seed(8)) {
        for (_, g) in models() {
            let mut last = 0.0;
            for n in seed.span()..=16 {
                let r = sensitivity(&seed, &g, n).unwrap();
                prop_assert!((0.0..=1.0).contains(&r.sensitivity));
                prop_assert!((r.denominator - 1.0).abs() < 1e-10);
                prop_assert!(r.sensitivity >= last - 1e-15);
                last = r.sensitivity;
            }
        }
    }

    #[test]
    fn length_target_dfa_agrees(seed in dna3_seed(6), n in 1usize..12) {
        let a = AlignmentAlphabet::dna3();
        let g = builtin("nt", &a, NtInit::Stationary).unwrap();
        let direct = sensitivity(&seed, &g, n).unwrap();
        let via = sensitivity_with_target(&seed, &g, &Dfa::length_target(n, &a)).unwrap();
        prop_assert!((direct.numerator - via.numerator).abs() < 1e-13);
        prop_assert!((direct.denominator - via.denominator).abs() < 1e-13);
    }

    #[test]
    fn disjoint_words_add(seed in dna3_seed(4),
                          w1 in prop::collection::vec(0usize..3, 6),
                          w2 in prop::collection::vec(0usize..3, 6)) {
        prop_assume!(w1 != w2);
        let a = AlignmentAlphabet::dna3();
        let g = builtin("dt1", &a, NtInit::Stationary).unwrap();
        let one = |w: &Vec<usize>| {
            sensitivity_with_target(&seed, &g, &Dfa::from_words(&a, &[w.clone()]).unwrap()).unwrap()
        };
        let both = sensitivity_with_target(&seed, &g, &Dfa::from_words(&a, &[w1.clone(), w2.clone()]).unwrap()).unwrap();
        prop_assert!((both.numerator - one(&w1).numerator - one(&w2).numerator).abs() < 1e-15);
    }
}

#[test]
fn single_hash_example() {
    let sa = SeedAlphabet::binary();
    let seed = SubsetSeed::parse("#", &sa).unwrap();
    let g = bernoulli(sa.alignment(), &[0.5, 0.5]).unwrap();
    let k = Dfa::length_target(3, sa.alignment())
        .intersect(build_seed_dfa(&seed).unwrap().dfa())
        .unwrap();
    let pw = pw_product(&k, &g).unwrap();
    assert!((pw.total_full_path_probability(3).unwrap() - 0.875).abs() < 1e-15);
    assert!((sensitivity(&seed, &g, 3).unwrap().sensitivity - 0.875).abs() < 1e-15);
}

#[test]
fn all_accepting_automaton_normalizes_at_64() {
    let a = AlignmentAlphabet::dna3();
    for (name, g) in models() {
        let (num, den) = fixed_length_masses(&Dfa::all_words(&a), &g, 64, DpPath::Auto).unwrap();
        assert!((num - 1.0).abs() < 1e-10, "{name}: {num}");
        assert!((den - 1.0).abs() < 1e-10, "{name}: {den}");
        let (num, _) = fixed_length_masses(&Dfa::empty_language(&a), &g, 64, DpPath::Auto).unwrap();
        assert_eq!(num, 0.0);
    }
}

#[test]
fn bernoulli_pw_product_mirrors_dfa() {
    let sa = SeedAlphabet::dna3();
    let seed = SubsetSeed::parse("#@#", &sa).unwrap();
    let g = bernoulli(sa.alignment(), &[0.7, 0.2, 0.1]).unwrap();
    let k = Dfa::length_target(5, sa.alignment())
        .intersect(build_seed_dfa(&seed).unwrap().dfa())
        .unwrap();
    let pw = pw_product(&k, &g).unwrap();
    assert_eq!(pw.num_states(), k.num_states());
    assert_eq!(pw.num_transitions(), k.num_transitions());
}

#[test]
fn alphabet_mismatch_rejected() {
    let seed = SubsetSeed::parse("#", &SeedAlphabet::binary()).unwrap();
    let g = builtin("dt1", &AlignmentAlphabet::dna3(), NtInit::Stationary).unwrap();
    assert!(matches!(
        sensitivity(&seed, &g, 4),
        Err(subseed::Error::AlphabetMismatch(_))
    ));
}
