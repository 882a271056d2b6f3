//! Exhaustive seed families: enumeration, ranking by sensitivity, and
//! automaton size statistics.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::alphabet::SeedAlphabet;
use crate::automata::{aho_corasick, minimize, DEFAULT_FRAGMENT_BUDGET};
use crate::error::{Error, Result};
use crate::seed::SubsetSeed;
use crate::seed_automaton::build_seed_dfa;
use crate::sensitivity::{sensitivity, SensitivityResult};
use crate::transducer::ProbabilityTransducer;

/// Default cap on the number of seeds a family may contain.
pub const DEFAULT_SEED_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlyphCount {
    Exact(usize),
    /// Fills whatever positions the other glyphs leave.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryRule {
    /// First and last glyph are '#'.
    #[default]
    HashEnds,
    /// First and last glyph are not the all-letters joker.
    SolidEnds,
    Free,
}

impl std::str::FromStr for BoundaryRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hash_ends" | "hash-ends" => Ok(BoundaryRule::HashEnds),
            "solid_ends" | "solid-ends" => Ok(BoundaryRule::SolidEnds),
            "free" => Ok(BoundaryRule::Free),
            _ => Err(Error::InvalidArgument(format!("unknown boundary rule '{s}'"))),
        }
    }
}

/// A seed family. Non-'#' glyphs missing from `glyph_counts` are absent
/// from the family, except the all-letters joker, which defaults to
/// [`GlyphCount::Free`].
#[derive(Debug, Clone)]
pub struct SeedSearchSpec {
    pub alphabet: SeedAlphabet,
    pub hash_weight: usize,
    pub glyph_counts: Vec<(char, GlyphCount)>,
    pub span_min: usize,
    pub span_max: usize,
    pub boundary: BoundaryRule,
    pub top_k: usize,
}

impl SeedSearchSpec {
    /// Family with the smallest feasible span and spans up to `span_max`.
    pub fn new(alphabet: SeedAlphabet, hash_weight: usize, span_max: usize) -> Self {
        SeedSearchSpec {
            alphabet,
            hash_weight,
            glyph_counts: Vec::new(),
            span_min: hash_weight,
            span_max,
            boundary: BoundaryRule::HashEnds,
            top_k: 1,
        }
    }

    /// Sets an exact count for a glyph and raises `span_min` to keep it
    /// feasible.
    pub fn with_count(mut self, glyph: char, count: GlyphCount) -> Self {
        self.glyph_counts.retain(|&(g, _)| g != glyph);
        self.glyph_counts.push((glyph, count));
        self.span_min = self.span_min.max(self.fixed_total());
        self
    }

    fn fixed_total(&self) -> usize {
        self.hash_weight
            + self
                .glyph_counts
                .iter()
                .map(|&(_, c)| match c {
                    GlyphCount::Exact(n) => n,
                    GlyphCount::Free => 0,
                })
                .sum::<usize>()
    }

    /// Glyphs in ascending character order with their counts.
    fn resolved(&self) -> Result<Vec<(char, GlyphCount)>> {
        let full = self.alphabet.alignment().full_mask();
        let mut out = vec![('#', GlyphCount::Exact(self.hash_weight))];
        for &(g, c) in &self.glyph_counts {
            if g == '#' {
                return Err(Error::InvalidArgument(
                    "'#' is counted by the weight, not by glyph counts".into(),
                ));
            }
            if self.alphabet.letter(g).is_none() {
                return Err(Error::InvalidArgument(format!("glyph '{g}' is not in the seed alphabet")));
            }
            out.push((g, c));
        }
        for l in self.alphabet.letters() {
            if l.members == full && !out.iter().any(|&(g, _)| g == l.glyph) {
                out.push((l.glyph, GlyphCount::Free));
            }
        }
        out.sort_by_key(|&(g, _)| g);
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_k == 0 {
            return Err(Error::InvalidArgument("top_k must be at least 1".into()));
        }
        if self.hash_weight == 0 {
            return Err(Error::InvalidArgument("weight must be at least 1".into()));
        }
        if self.span_min < self.fixed_total() {
            return Err(Error::InvalidArgument(format!(
                "minimum span {} is below the {} positions the glyph counts require",
                self.span_min,
                self.fixed_total()
            )));
        }
        if self.span_max < self.span_min {
            return Err(Error::InvalidArgument(format!(
                "span range {}..{} is empty",
                self.span_min, self.span_max
            )));
        }
        self.resolved().map(|_| ())
    }

    fn is_joker(&self, glyph: char) -> bool {
        self.alphabet
            .letter(glyph)
            .is_some_and(|l| l.members == self.alphabet.alignment().full_mask())
    }

    fn end_allowed(&self, glyph: char) -> bool {
        match self.boundary {
            BoundaryRule::HashEnds => glyph == '#',
            BoundaryRule::SolidEnds => !self.is_joker(glyph),
            BoundaryRule::Free => true,
        }
    }
}

/// Number of seeds in the family, without enumerating them.
pub fn count_seeds(spec: &SeedSearchSpec) -> Result<u128> {
    spec.validate()?;
    let glyphs = spec.resolved()?;
    let mut total: u128 = 0;
    for span in spec.span_min..=spec.span_max {
        let mut counter = Counter::new(spec, &glyphs, span);
        total = total
            .checked_add(counter.count(0))
            .ok_or_else(|| Error::resource("seed family", u128::MAX, DEFAULT_SEED_BUDGET))?;
    }
    Ok(total)
}

/// All seeds of the family in lexicographic order of their glyph strings.
pub fn enumerate_seeds(spec: &SeedSearchSpec, budget: u128) -> Result<Vec<SubsetSeed>> {
    let count = count_seeds(spec)?;
    if count > budget {
        return Err(Error::resource("seed family", count, budget));
    }
    let glyphs = spec.resolved()?;
    let mut texts: Vec<String> = Vec::with_capacity(count as usize);
    for span in spec.span_min..=spec.span_max {
        let mut counter = Counter::new(spec, &glyphs, span);
        let mut buf = String::with_capacity(span);
        counter.emit(0, &mut buf, &mut texts);
    }
    texts.sort_unstable();
    texts
        .iter()
        .map(|t| SubsetSeed::parse(t, &spec.alphabet))
        .collect()
}

/// Depth-first walk over positions with the glyphs' remaining counts.
struct Counter<'a> {
    spec: &'a SeedSearchSpec,
    glyphs: &'a [(char, GlyphCount)],
    remaining: Vec<usize>,
    free: Vec<bool>,
    span: usize,
    memo: std::collections::HashMap<(usize, Vec<usize>), u128>,
}

impl<'a> Counter<'a> {
    fn new(spec: &'a SeedSearchSpec, glyphs: &'a [(char, GlyphCount)], span: usize) -> Self {
        let remaining = glyphs
            .iter()
            .map(|&(_, c)| match c {
                GlyphCount::Exact(n) => n,
                GlyphCount::Free => usize::MAX,
            })
            .collect();
        let free = glyphs.iter().map(|&(_, c)| c == GlyphCount::Free).collect();
        Counter {
            spec,
            glyphs,
            remaining,
            free,
            span,
            memo: Default::default(),
        }
    }

    fn fixed_left(&self) -> usize {
        self.remaining
            .iter()
            .zip(&self.free)
            .filter(|(_, &f)| !f)
            .map(|(&r, _)| r)
            .sum()
    }

    /// Whether glyph `i` may go at `pos` leaving a completable suffix.
    fn can_place(&self, i: usize, pos: usize) -> bool {
        let left = self.span - pos - 1;
        let at_end = pos == 0 || pos + 1 == self.span;
        if at_end && !self.spec.end_allowed(self.glyphs[i].0) {
            return false;
        }
        if self.remaining[i] == 0 {
            return false;
        }
        let fixed_after = self.fixed_left() - usize::from(!self.free[i]);
        if fixed_after > left {
            return false;
        }
        let any_free = self.free.iter().any(|&f| f);
        any_free || fixed_after == left
    }

    fn take(&mut self, i: usize) {
        if !self.free[i] {
            self.remaining[i] -= 1;
        }
    }

    fn give(&mut self, i: usize) {
        if !self.free[i] {
            self.remaining[i] += 1;
        }
    }

    fn count(&mut self, pos: usize) -> u128 {
        if pos == self.span {
            return u128::from(self.fixed_left() == 0);
        }
        let key = (pos, self.remaining.clone());
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let mut total: u128 = 0;
        for i in 0..self.glyphs.len() {
            if self.can_place(i, pos) {
                self.take(i);
                total = total.saturating_add(self.count(pos + 1));
                self.give(i);
            }
        }
        self.memo.insert(key, total);
        total
    }

    fn emit(&mut self, pos: usize, buf: &mut String, out: &mut Vec<String>) {
        if pos == self.span {
            if self.fixed_left() == 0 {
                out.push(buf.clone());
            }
            return;
        }
        for i in 0..self.glyphs.len() {
            if self.can_place(i, pos) {
                self.take(i);
                buf.push(self.glyphs[i].0);
                self.emit(pos + 1, buf, out);
                buf.pop();
                self.give(i);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedSeed {
    pub seed: String,
    pub result: SensitivityResult,
}

/// Order used for ranking: sensitivity descending, then seed text.
pub fn rank_order(a: &RankedSeed, b: &RankedSeed) -> Ordering {
    b.result
        .sensitivity
        .total_cmp(&a.result.sensitivity)
        .then_with(|| a.seed.cmp(&b.seed))
}

/// The `top_k` most sensitive seeds of the family. `threads` sizes a
/// dedicated pool; `None` uses the global one.
pub fn best_seeds(
    spec: &SeedSearchSpec,
    g: &ProbabilityTransducer,
    n: usize,
    threads: Option<usize>,
) -> Result<Vec<RankedSeed>> {
    let seeds = enumerate_seeds(spec, DEFAULT_SEED_BUDGET)?;
    let evaluate = || -> Result<Vec<RankedSeed>> {
        seeds
            .par_iter()
            .map(|s| {
                Ok(RankedSeed {
                    seed: s.text(),
                    result: sensitivity(s, g, n)?,
                })
            })
            .collect()
    };
    let mut ranked = with_threads(threads, evaluate)?;
    ranked.sort_by(rank_order);
    ranked.truncate(spec.top_k);
    Ok(ranked)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// State counts of the three automata built for one seed. Counts include
/// the single absorbing final state each construction has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedStats {
    pub seed: String,
    pub span: usize,
    pub aho_corasick: usize,
    pub subset: usize,
    pub minimized: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedSeed {
    pub seed: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counting {
    AllStates,
    /// Leaves out the absorbing final state.
    NonFinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    PerSeed,
    /// Averages per span first, then over spans.
    PerSpan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Averages {
    pub aho_corasick: f64,
    pub subset: f64,
    pub minimized: f64,
}

impl Averages {
    /// `(δ Aho-Corasick, δ subset automaton)` relative to the minimized size.
    pub fn ratios(&self) -> (f64, f64) {
        (self.aho_corasick / self.minimized, self.subset / self.minimized)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutomatonStats {
    pub per_seed: Vec<SeedStats>,
    pub skipped: Vec<SkippedSeed>,
}

impl AutomatonStats {
    pub fn average(&self, counting: Counting, weighting: Weighting) -> Option<Averages> {
        let adj = match counting {
            Counting::AllStates => 0.0,
            Counting::NonFinal => 1.0,
        };
        let mean = |xs: &[&SeedStats]| -> Averages {
            let n = xs.len() as f64;
            let avg = |f: fn(&SeedStats) -> usize| xs.iter().map(|s| f(s) as f64 - adj).sum::<f64>() / n;
            Averages {
                aho_corasick: avg(|s| s.aho_corasick),
                subset: avg(|s| s.subset),
                minimized: avg(|s| s.minimized),
            }
        };
        if self.per_seed.is_empty() {
            return None;
        }
        match weighting {
            Weighting::PerSeed => Some(mean(&self.per_seed.iter().collect::<Vec<_>>())),
            Weighting::PerSpan => {
                let mut spans: Vec<usize> = self.per_seed.iter().map(|s| s.span).collect();
                spans.sort_unstable();
                spans.dedup();
                let groups: Vec<Averages> = spans
                    .iter()
                    .map(|&sp| mean(&self.per_seed.iter().filter(|s| s.span == sp).collect::<Vec<_>>()))
                    .collect();
                let k = groups.len() as f64;
                Some(Averages {
                    aho_corasick: groups.iter().map(|g| g.aho_corasick).sum::<f64>() / k,
                    subset: groups.iter().map(|g| g.subset).sum::<f64>() / k,
                    minimized: groups.iter().map(|g| g.minimized).sum::<f64>() / k,
                })
            }
        }
    }
}

pub fn seed_stats(seed: &SubsetSeed, fragment_budget: u128) -> Result<SeedStats> {
    let ac = aho_corasick(seed, fragment_budget)?;
    let s = build_seed_dfa(seed)?;
    let min = minimize(s.dfa());
    Ok(SeedStats {
        seed: seed.text(),
        span: seed.span(),
        aho_corasick: ac.num_states(),
        subset: s.num_states(),
        minimized: min.num_states(),
    })
}

/// Sizes for every seed of the family. Seeds whose fragment set exceeds the
/// budget are listed in `skipped`; other errors abort.
pub fn automaton_stats(spec: &SeedSearchSpec, threads: Option<usize>) -> Result<AutomatonStats> {
    let seeds = enumerate_seeds(spec, DEFAULT_SEED_BUDGET)?;
    let results: Vec<(String, Result<SeedStats>)> = with_threads(threads, || {
        seeds
            .par_iter()
            .map(|s| (s.text(), seed_stats(s, DEFAULT_FRAGMENT_BUDGET)))
            .collect()
    });
    let mut stats = AutomatonStats {
        per_seed: Vec::new(),
        skipped: Vec::new(),
    };
    for (seed, r) in results {
        match r {
            Ok(s) => stats.per_seed.push(s),
            Err(e @ Error::Resource { .. }) => stats.skipped.push(SkippedSeed {
                seed,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(stats)
}
