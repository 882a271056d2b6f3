//! Compact DFA recognizing all alignments hit by a subset seed.
//!
//! A non-final state is a pair `<X, t>`: `t` is the length of the current
//! trailing run of match symbols (capped by the span) and `X` is the set of
//! non-`#` seed positions `l` whose prefix `π_1..π_l` matches a suffix of the
//! input read before that run. All states with `max(X) + t = m` are merged
//! into a single absorbing final state.
//!
//! `X` is held as an `r`-bit mask where bit `j - 1` stands for `l_j`. States
//! are laid out in a dense table split into one block per run length `t`;
//! block `t` has `2^p(t)` slots where `p(t) = #{ j : l_j < m - t }`, so the
//! slot of `<X, t>` is `base(t) + n(X)`. Removing the highest element `l_k`
//! of `X` therefore moves the slot down by exactly `2^(k-1)`, which is what
//! lets a transition on a mismatch letter be derived in constant time from
//! the already computed transition of `<X \ {l_k}, t>`.
//!
//! Construction is breadth-first; every reachable state's predecessor
//! `<X \ {l_k}, t>` is reached by a strictly shorter word and has therefore
//! been expanded before it.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::alphabet::Letter;
use crate::automata::{Dfa, StateId};
use crate::error::{Error, Result};
use crate::seed::SubsetSeed;

/// Largest number of non-`#` positions the bit encoding supports.
pub const DEFAULT_MAX_JOKERS: usize = 62;
/// Largest dense table (in state slots) the builder will allocate.
pub const DEFAULT_MAX_SLOTS: u128 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedState {
    /// Bit `j - 1` set iff `l_j ∈ X`.
    pub set: u64,
    /// Largest `j` with `l_j ∈ X`, 0 when `X` is empty.
    pub top: usize,
    /// Trailing run length `t`.
    pub run: usize,
}

impl SeedState {
    pub const INITIAL: SeedState = SeedState {
        set: 0,
        top: 0,
        run: 0,
    };

    pub fn from_set(set: u64, run: usize) -> Self {
        SeedState {
            set,
            top: (64 - set.leading_zeros()) as usize,
            run,
        }
    }
}

/// Result of one transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Final,
    State(SeedState),
}

/// Precomputed `U` and `V` tables plus the block layout of the dense index.
#[derive(Debug, Clone)]
pub struct TransitionTables {
    span: usize,
    letters: usize,
    match_letter: Letter,
    /// `positions[j] = l_j` for `j ≥ 1`; `positions[0] = 0`.
    positions: Vec<usize>,
    /// `[t * letters + a]` for `t < m`.
    u_set: Vec<u64>,
    u_top: Vec<usize>,
    /// `[(k * span + t) * letters + a]` for `1 ≤ k ≤ r`, `t < m`.
    v_set: Vec<u64>,
    v_top: Vec<usize>,
    /// `p(t)` for `t < m`.
    prefix_count: Vec<usize>,
    /// First slot of block `t`; `base[m]` is the table size.
    base: Vec<u128>,
}

impl TransitionTables {
    pub fn new(seed: &SubsetSeed) -> Self {
        let m = seed.span();
        let k = seed.alignment().len();
        let r = seed.joker_count();
        let mut positions = vec![0];
        positions.extend_from_slice(seed.non_hash_positions());
        let mut rank = vec![0; m + 1];
        for (j, &l) in positions.iter().enumerate().skip(1) {
            rank[l] = j;
        }
        let masks = seed.masks().to_vec();
        let matches = |x: usize, a: Letter| masks[x - 1] >> a & 1 == 1;

        let mut u_set = vec![0u64; m * k];
        let mut u_top = vec![0usize; m * k];
        for t in 0..m {
            for a in 0..k {
                let mut set = 0u64;
                let mut top = 0;
                for j in 1..=r {
                    let x = positions[j];
                    if x <= t + 1 && matches(x, a) {
                        set |= 1 << (j - 1);
                        top = j;
                    }
                }
                u_set[t * k + a] = set;
                u_top[t * k + a] = top;
            }
        }

        let mut v_set = vec![0u64; (r + 1) * m * k];
        let mut v_top = vec![0usize; (r + 1) * m * k];
        for kk in 1..=r {
            for t in 0..m {
                let x = positions[kk] + t + 1;
                if x > m || rank[x] == 0 {
                    continue;
                }
                for a in 0..k {
                    if matches(x, a) {
                        let i = (kk * m + t) * k + a;
                        v_set[i] = 1 << (rank[x] - 1);
                        v_top[i] = rank[x];
                    }
                }
            }
        }

        let prefix_count: Vec<usize> = (0..m)
            .map(|t| positions[1..].iter().filter(|&&l| l < m - t).count())
            .collect();
        let mut base = Vec::with_capacity(m + 1);
        let mut acc: u128 = 0;
        for t in 0..m {
            base.push(acc);
            acc = acc.saturating_add(1u128 << prefix_count[t].min(127));
        }
        base.push(acc);

        TransitionTables {
            span: m,
            letters: k,
            match_letter: seed.alignment().match_letter(),
            positions,
            u_set,
            u_top,
            v_set,
            v_top,
            prefix_count,
            base,
        }
    }

    pub fn span(&self) -> usize {
        self.span
    }

    /// Number of dense slots, `Σ_t 2^p(t)`.
    pub fn table_slots(&self) -> u128 {
        self.base[self.span]
    }

    /// `p(t) = #{ j : l_j < m - t }`.
    pub fn prefix_count(&self, run: usize) -> usize {
        self.prefix_count[run]
    }

    /// Seed position `l_j` (0 for `j = 0`).
    pub fn position(&self, j: usize) -> usize {
        self.positions[j]
    }

    pub fn u(&self, run: usize, a: Letter) -> (u64, usize) {
        let i = run * self.letters + a;
        (self.u_set[i], self.u_top[i])
    }

    pub fn v(&self, top: usize, run: usize, a: Letter) -> (u64, usize) {
        let i = (top * self.span + run) * self.letters + a;
        (self.v_set[i], self.v_top[i])
    }

    /// `n(X) + 2^p(t)`: the set value with a marker bit above every
    /// admissible position, unique among states of the same run length.
    pub fn marked_index(&self, q: &SeedState) -> Result<u128> {
        self.check(q)?;
        Ok(q.set as u128 + (1u128 << self.prefix_count[q.run]))
    }

    /// Dense slot `base(t) + n(X)`, injective over non-final states.
    pub fn state_index(&self, q: &SeedState) -> Result<u128> {
        self.check(q)?;
        Ok(self.base[q.run] + q.set as u128)
    }

    fn check(&self, q: &SeedState) -> Result<()> {
        if q.run >= self.span {
            return Err(Error::InvalidArgument(format!(
                "run length {} is not below the span {}",
                q.run, self.span
            )));
        }
        let p = self.prefix_count[q.run];
        if p < 64 && q.set >> p != 0 {
            return Err(Error::InvalidArgument(format!(
                "state contains a position l_j ≥ m - t (t = {})",
                q.run
            )));
        }
        Ok(())
    }

    fn is_final(&self, top: usize, run: usize) -> bool {
        self.positions[top] + run >= self.span
    }

    /// One transition of a non-final state. `predecessor` must return the
    /// already computed transition of `<X \ {l_k}, t>` on the same letter.
    pub fn step(
        &self,
        q: &SeedState,
        a: Letter,
        predecessor: impl FnOnce(&SeedState) -> Option<Step>,
    ) -> Result<Step> {
        let (set, top, run) = if a == self.match_letter {
            (q.set, q.top, q.run + 1)
        } else if q.set == 0 {
            let (s, k) = self.u(q.run, a);
            (s, k, 0)
        } else {
            let prev = SeedState::from_set(q.set & !(1u64 << (q.top - 1)), q.run);
            let prev_step = predecessor(&prev).ok_or_else(|| {
                Error::Internal(format!(
                    "predecessor of state {:?} not yet computed",
                    q
                ))
            })?;
            let (ys, yk) = match prev_step {
                Step::Final => return Ok(Step::Final),
                Step::State(y) => (y.set, y.top),
            };
            let (vs, vk) = self.v(q.top, q.run, a);
            (ys | vs, yk.max(vk), 0)
        };
        Ok(if self.is_final(top, run) {
            Step::Final
        } else {
            Step::State(SeedState { set, top, run })
        })
    }

    /// Human-readable dump of the U and V tables.
    pub fn dump(&self, glyphs: &[char]) -> String {
        let mut out = String::new();
        let fmt_set = |s: u64| -> String {
            let items: Vec<String> = (1..self.positions.len())
                .filter(|&j| s >> (j - 1) & 1 == 1)
                .map(|j| self.positions[j].to_string())
                .collect();
            format!("{{{}}}", items.join(","))
        };
        let _ = writeln!(out, "# U(t,a): positions x <= t+1 matching a; k = max index");
        for t in 0..self.span {
            for a in 0..self.letters {
                if a == self.match_letter {
                    continue;
                }
                let (s, k) = self.u(t, a);
                let _ = writeln!(out, "U t={t} a={} X={} k={k}", glyphs[a], fmt_set(s));
            }
        }
        let _ = writeln!(out, "# V(k,t,a): position l_k+t+1 when it is a matching joker");
        for kk in 1..self.positions.len() {
            for t in 0..self.span {
                for a in 0..self.letters {
                    if a == self.match_letter {
                        continue;
                    }
                    let (s, k) = self.v(kk, t, a);
                    if s != 0 {
                        let _ = writeln!(
                            out,
                            "V k={kk} t={t} a={} X={} k={k}",
                            glyphs[a],
                            fmt_set(s)
                        );
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub max_jokers: usize,
    pub max_slots: u128,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_jokers: DEFAULT_MAX_JOKERS,
            max_slots: DEFAULT_MAX_SLOTS,
        }
    }
}

/// The constructed automaton together with its state labels.
#[derive(Debug, Clone)]
pub struct SeedAutomaton {
    dfa: Dfa,
    /// Label of every non-final DFA state, indexed by DFA state id.
    states: Vec<SeedState>,
    final_state: StateId,
    positions: Vec<usize>,
    slots: u128,
    transitions_computed: usize,
}

impl SeedAutomaton {
    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn into_dfa(self) -> Dfa {
        self.dfa
    }

    pub fn num_states(&self) -> usize {
        self.dfa.num_states()
    }

    pub fn final_state(&self) -> StateId {
        self.final_state
    }

    /// `<X, t>` of a non-final state, `None` for the final state.
    pub fn state(&self, q: StateId) -> Option<SeedState> {
        self.states.get(q).copied()
    }

    pub fn non_final_states(&self) -> &[SeedState] {
        &self.states
    }

    /// Dense table size used during construction.
    pub fn table_slots(&self) -> u128 {
        self.slots
    }

    /// Number of transitions evaluated by the builder.
    pub fn transitions_computed(&self) -> usize {
        self.transitions_computed
    }

    pub fn label(&self, q: StateId) -> String {
        match self.state(q) {
            None => "final".to_string(),
            Some(s) => {
                let items: Vec<String> = (1..self.positions.len())
                    .filter(|&j| s.set >> (j - 1) & 1 == 1)
                    .map(|j| self.positions[j].to_string())
                    .collect();
                format!("<{{{}}},{}>", items.join(","), s.run)
            }
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.dfa.to_dot_labeled(name, |q| self.label(q))
    }
}

/// Builds the seed automaton with default limits.
pub fn build_seed_dfa(seed: &SubsetSeed) -> Result<SeedAutomaton> {
    build_seed_dfa_with(seed, BuildOptions::default())
}

pub fn build_seed_dfa_with(seed: &SubsetSeed, opts: BuildOptions) -> Result<SeedAutomaton> {
    let r = seed.joker_count();
    if r > opts.max_jokers.min(DEFAULT_MAX_JOKERS) {
        return Err(Error::resource(
            "seed joker positions (bit width)",
            r as u128,
            opts.max_jokers.min(DEFAULT_MAX_JOKERS) as u128,
        ));
    }
    let tables = TransitionTables::new(seed);
    let slots = tables.table_slots();
    if slots > opts.max_slots {
        return Err(Error::resource("seed automaton state table", slots, opts.max_slots));
    }
    let slots = slots as usize;
    let k = seed.alignment().len();

    const UNSET: u32 = u32::MAX;
    const FINAL: u32 = u32::MAX - 1;
    // dense transition table: target slot, FINAL, or UNSET
    let mut trans = vec![UNSET; slots * k];
    // dense slot -> discovery order (DFA id), UNSET if unseen
    let mut order_of = vec![UNSET; slots];
    let mut states: Vec<SeedState> = Vec::new();
    let mut queue = VecDeque::new();
    let mut computed = 0usize;

    let init = SeedState::INITIAL;
    let init_slot = tables.state_index(&init)? as usize;
    order_of[init_slot] = 0;
    states.push(init);
    queue.push_back((init, init_slot));

    while let Some((q, slot)) = queue.pop_front() {
        for a in 0..k {
            let step = tables.step(&q, a, |prev| {
                let prev_slot = tables.state_index(prev).ok()? as usize;
                debug_assert_eq!(prev_slot + (1usize << (q.top - 1)), slot);
                match trans[prev_slot * k + a] {
                    UNSET => None,
                    FINAL => Some(Step::Final),
                    target => Some(Step::State(SeedState::from_set(target as u64, 0))),
                }
            })?;
            computed += 1;
            trans[slot * k + a] = match step {
                Step::Final => FINAL,
                Step::State(next) => {
                    let next_slot = tables.state_index(&next)? as usize;
                    if order_of[next_slot] == UNSET {
                        order_of[next_slot] = states.len() as u32;
                        states.push(next);
                        queue.push_back((next, next_slot));
                    }
                    // Mismatch targets have t = 0 and live in block 0, where the
                    // slot equals n(X); storing the slot keeps Y' recoverable.
                    next_slot as u32
                }
            };
        }
    }

    // Compact into a contiguous DFA; the final state comes last.
    let final_state = states.len();
    let n = final_state + 1;
    let mut delta = vec![0; n * k];
    for (id, st) in states.iter().enumerate() {
        let slot = tables.state_index(st)? as usize;
        for a in 0..k {
            delta[id * k + a] = match trans[slot * k + a] {
                FINAL => final_state,
                UNSET => return Err(Error::Internal("transition left unset".into())),
                target => order_of[target as usize] as usize,
            };
        }
    }
    for a in 0..k {
        delta[final_state * k + a] = final_state;
    }
    let mut finals = vec![false; n];
    finals[final_state] = true;
    let dfa = Dfa::new(seed.alignment().clone(), 0, finals, delta)?;

    Ok(SeedAutomaton {
        dfa,
        states,
        final_state,
        positions: tables.positions.clone(),
        slots: slots as u128,
        transitions_computed: computed,
    })
}

/// `(w + 1) · 2^r`, the worst-case state count.
pub fn state_count_bound(seed: &SubsetSeed) -> Result<u128> {
    let w = seed.hash_weight() as u128;
    let r = seed.joker_count() as u32;
    1u128
        .checked_shl(r)
        .filter(|_| r < 127)
        .and_then(|p| p.checked_mul(w + 1))
        .ok_or_else(|| Error::resource("state count bound", u128::MAX, u128::MAX))
}
