use proptest::prelude::*;
use subseed::design::{
    automaton_stats, best_seeds, count_seeds, enumerate_seeds, BoundaryRule, Counting,
    GlyphCount, SeedSearchSpec, Weighting, DEFAULT_SEED_BUDGET,
};
use subseed::sensitivity::sensitivity;
use subseed::transducer::{bernoulli, builtin, NtInit};
use subseed::{SeedAlphabet, SubsetSeed};

fn strings(glyphs: &[char], len: usize) -> Vec<String> {
    (0..len).fold(vec![String::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|s| glyphs.iter().map(move |&g| format!("{s}{g}")))
            .collect()
    })
}

fn naive_family(w: usize, at: Option<usize>, lo: usize, hi: usize, boundary: BoundaryRule) -> Vec<String> {
    let mut out: Vec<String> = (lo..=hi)
        .flat_map(|span| strings(&['#', '@', '_'], span))
        .filter(|s| {
            let count = |c| s.chars().filter(|&x| x == c).count();
            let ends = [s.chars().next().unwrap(), s.chars().last().unwrap()];
            count('#') == w
                && count('@') == at.unwrap_or(0)
                && match boundary {
                    BoundaryRule::HashEnds => ends.iter().all(|&c| c == '#'),
                    BoundaryRule::SolidEnds => ends.iter().all(|&c| c != '_'),
                    BoundaryRule::Free => true,
                }
        })
        .collect();
    out.sort();
    out
}

fn rule() -> impl Strategy<Value = BoundaryRule> {
    prop::sample::select(vec![BoundaryRule::HashEnds, BoundaryRule::SolidEnds, BoundaryRule::Free])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn enumeration_is_complete(w in 1usize..4, at in prop::option::of(0usize..3),
                               extra in 0usize..4, boundary in rule()) {
        let mut spec = SeedSearchSpec::new(SeedAlphabet::dna3(), w, 0);
        if let Some(a) = at {
            spec = spec.with_count('@', GlyphCount::Exact(a));
        }
        spec.span_max = spec.span_min + extra;
        spec.boundary = boundary;
        let expected = naive_family(w, at, spec.span_min, spec.span_max, boundary);
        let got: Vec<String> = enumerate_seeds(&spec, DEFAULT_SEED_BUDGET)
            .unwrap()
            .iter()
            .map(|s| s.text())
            .collect();
        prop_assert_eq!(count_seeds(&spec).unwrap(), expected.len() as u128);
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn best_seeds_independent_of_threads() {
    let sa = SeedAlphabet::dna3();
    let mut spec = SeedSearchSpec::new(sa.clone(), 4, 8).with_count('@', GlyphCount::Exact(1));
    spec.top_k = 5;
    let g = builtin("dt2", sa.alignment(), NtInit::Stationary).unwrap();
    let one = best_seeds(&spec, &g, 24, Some(1)).unwrap();
    let two = best_seeds(&spec, &g, 24, Some(2)).unwrap();
    assert_eq!(one, two);
    assert_eq!(one.len(), 5);

    // direct evaluation in reverse enumeration order gives the same leaders
    let mut all: Vec<(String, f64)> = enumerate_seeds(&spec, DEFAULT_SEED_BUDGET)
        .unwrap()
        .iter()
        .rev()
        .map(|s| (s.text(), sensitivity(s, &g, 24).unwrap().sensitivity))
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let leaders: Vec<&str> = all.iter().take(5).map(|(s, _)| s.as_str()).collect();
    let ranked: Vec<&str> = one.iter().map(|r| r.seed.as_str()).collect();
    assert_eq!(ranked, leaders);
}

#[test]
fn single_seed_family() {
    let sa = SeedAlphabet::binary();
    let spec = SeedSearchSpec::new(sa.clone(), 2, 2);
    let g = bernoulli(sa.alignment(), &[0.5, 0.5]).unwrap();
    let best = best_seeds(&spec, &g, 3, None).unwrap();
    assert_eq!(best.len(), 1);
    assert_eq!(best[0].seed, "##");
    let seed = SubsetSeed::parse("##", &sa).unwrap();
    assert_eq!(best[0].result, sensitivity(&seed, &g, 3).unwrap());
    assert!((best[0].result.sensitivity - 0.375).abs() < 1e-15);
}

#[test]
fn stats_ordering_holds_for_every_seed() {
    let mut spec = SeedSearchSpec::new(SeedAlphabet::dna3(), 4, 9).with_count('@', GlyphCount::Exact(1));
    spec.boundary = BoundaryRule::SolidEnds;
    let stats = automaton_stats(&spec, Some(1)).unwrap();
    assert!(stats.skipped.is_empty());
    assert_eq!(stats.per_seed.len() as u128, count_seeds(&spec).unwrap());
    for s in &stats.per_seed {
        assert!(s.minimized <= s.subset && s.subset <= s.aho_corasick, "{s:?}");
    }
    let all = stats.average(Counting::AllStates, Weighting::PerSeed).unwrap();
    let non = stats.average(Counting::NonFinal, Weighting::PerSeed).unwrap();
    assert!((all.subset - non.subset - 1.0).abs() < 1e-12);
    let (d_ac, d_s) = all.ratios();
    assert!(d_ac >= d_s && d_s >= 1.0);
    assert!(stats.average(Counting::AllStates, Weighting::PerSpan).is_some());
}
