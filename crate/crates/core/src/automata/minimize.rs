//! Hopcroft partition refinement.

use super::{Dfa, StateId};

struct Partition {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
    pos: Vec<usize>,
}

impl Partition {
    fn new(n: usize, finals: &[bool], states: &[StateId]) -> Self {
        let mut p = Partition {
            blocks: Vec::new(),
            block_of: vec![usize::MAX; n],
            pos: vec![0; n],
        };
        let (acc, rej): (Vec<StateId>, Vec<StateId>) =
            states.iter().copied().partition(|&q| finals[q]);
        for block in [acc, rej] {
            if !block.is_empty() {
                p.push_block(block);
            }
        }
        p
    }

    fn push_block(&mut self, states: Vec<StateId>) -> usize {
        let id = self.blocks.len();
        for (i, &q) in states.iter().enumerate() {
            self.block_of[q] = id;
            self.pos[q] = i;
        }
        self.blocks.push(states);
        id
    }

    /// Moves `q` out of its current block into `target`.
    fn move_state(&mut self, q: StateId, target: usize) {
        let b = self.block_of[q];
        let i = self.pos[q];
        let block = &mut self.blocks[b];
        block.swap_remove(i);
        if i < block.len() {
            let moved = block[i];
            self.pos[moved] = i;
        }
        self.pos[q] = self.blocks[target].len();
        self.blocks[target].push(q);
        self.block_of[q] = target;
    }
}

/// Minimal complete DFA for `L(dfa)`. States are numbered in BFS order from
/// the initial state, so isomorphic inputs give identical outputs.
pub fn minimize(dfa: &Dfa) -> Dfa {
    let reach = dfa.reachable_order();
    let n = dfa.num_states();
    let k = dfa.alphabet().len();

    // inverse transitions restricted to reachable states: pred[a][q]
    let mut pred: Vec<Vec<Vec<StateId>>> = vec![vec![Vec::new(); n]; k];
    for &q in &reach {
        for a in 0..k {
            pred[a][dfa.next(q, a)].push(q);
        }
    }

    let mut part = Partition::new(n, dfa.finals(), &reach);
    let mut in_work: Vec<Vec<bool>> = Vec::new();
    let mut work: Vec<(usize, usize)> = Vec::new();
    for _ in 0..part.blocks.len() {
        in_work.push(vec![false; k]);
    }
    // Seeding with the smaller of the two initial blocks suffices.
    if part.blocks.len() == 2 {
        let smaller = if part.blocks[0].len() <= part.blocks[1].len() { 0 } else { 1 };
        for a in 0..k {
            work.push((smaller, a));
            in_work[smaller][a] = true;
        }
    }

    let mut marked_count: Vec<usize> = Vec::new();
    let mut touched: Vec<usize> = Vec::new();
    let mut marked: Vec<StateId> = Vec::new();
    let mut is_marked = vec![false; n];

    while let Some((splitter, a)) = work.pop() {
        in_work[splitter][a] = false;
        marked.clear();
        for &q in &part.blocks[splitter] {
            for &p in &pred[a][q] {
                if !is_marked[p] {
                    is_marked[p] = true;
                    marked.push(p);
                }
            }
        }
        marked_count.resize(part.blocks.len(), 0);
        touched.clear();
        for &p in &marked {
            let b = part.block_of[p];
            if marked_count[b] == 0 {
                touched.push(b);
            }
            marked_count[b] += 1;
        }
        for &b in &touched {
            let hit = marked_count[b];
            marked_count[b] = 0;
            if hit == part.blocks[b].len() {
                continue;
            }
            let new_block = part.push_block(Vec::new());
            in_work.push(vec![false; k]);
            marked_count.push(0);
            let movers: Vec<StateId> = marked
                .iter()
                .copied()
                .filter(|&p| part.block_of[p] == b)
                .collect();
            for p in movers {
                part.move_state(p, new_block);
            }
            for c in 0..k {
                if in_work[b][c] {
                    work.push((new_block, c));
                    in_work[new_block][c] = true;
                } else {
                    let pick = if part.blocks[new_block].len() <= part.blocks[b].len() {
                        new_block
                    } else {
                        b
                    };
                    work.push((pick, c));
                    in_work[pick][c] = true;
                }
            }
        }
        for &p in &marked {
            is_marked[p] = false;
        }
    }

    // Quotient automaton, then canonical BFS numbering.
    let nb = part.blocks.len();
    let mut finals = vec![false; nb];
    let mut delta = vec![0; nb * k];
    for (b, states) in part.blocks.iter().enumerate() {
        let rep = states[0];
        finals[b] = dfa.is_final(rep);
        for a in 0..k {
            delta[b * k + a] = part.block_of[dfa.next(rep, a)];
        }
    }
    let quotient = Dfa::new(
        dfa.alphabet().clone(),
        part.block_of[dfa.initial()],
        finals,
        delta,
    )
    .expect("quotient automaton is well formed");
    quotient.trim()
}
