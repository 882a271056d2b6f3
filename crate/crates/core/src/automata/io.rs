//! DOT export and the line-oriented DFA text format:
//!
//! ```text
//! dfa
//! alphabet 1 h 0
//! match 1
//! states 3
//! initial 0
//! final 2
//! trans 0 1 1
//! ...
//! ```
//!
//! `alphabet`/`match` may be omitted when the caller supplies the alphabet.

use std::fmt::Write as _;

use super::{Dfa, StateId};
use crate::alphabet::AlignmentAlphabet;
use crate::error::{Error, Result};

impl Dfa {
    pub fn to_dot(&self, name: &str) -> String {
        self.to_dot_labeled(name, |q| q.to_string())
    }

    /// DOT graph; parallel edges to the same target are merged into one edge
    /// labeled with all their letters.
    pub fn to_dot_labeled(&self, name: &str, label: impl Fn(StateId) -> String) -> String {
        let a = self.alphabet();
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  __start [shape=point];");
        for q in 0..self.num_states() {
            let shape = if self.is_final(q) { "doublecircle" } else { "circle" };
            let _ = writeln!(
                out,
                "  q{q} [shape={shape}, label=\"{}\"];",
                escape(&label(q))
            );
        }
        let _ = writeln!(out, "  __start -> q{};", self.initial());
        for q in 0..self.num_states() {
            let mut targets: Vec<(StateId, String)> = Vec::new();
            for x in a.letters() {
                let p = self.next(q, x);
                match targets.iter_mut().find(|(t, _)| *t == p) {
                    Some((_, l)) => {
                        l.push(',');
                        l.push(a.glyph(x));
                    }
                    None => targets.push((p, a.glyph(x).to_string())),
                }
            }
            for (p, l) in targets {
                let _ = writeln!(out, "  q{q} -> q{p} [label=\"{}\"];", escape(&l));
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_text(&self) -> String {
        let a = self.alphabet();
        let mut out = String::from("dfa\nalphabet");
        for &c in a.symbols() {
            out.push(' ');
            out.push(c);
        }
        let _ = writeln!(out, "\nmatch {}", a.glyph(a.match_letter()));
        let _ = writeln!(out, "states {}", self.num_states());
        let _ = writeln!(out, "initial {}", self.initial());
        out.push_str("final");
        for q in (0..self.num_states()).filter(|&q| self.is_final(q)) {
            let _ = write!(out, " {q}");
        }
        out.push('\n');
        for q in 0..self.num_states() {
            for x in a.letters() {
                let _ = writeln!(out, "trans {q} {} {}", a.glyph(x), self.next(q, x));
            }
        }
        out
    }

    pub fn from_text(text: &str, alphabet: Option<&AlignmentAlphabet>) -> Result<Dfa> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with(';'));
        match lines.next() {
            Some((_, "dfa")) => {}
            Some((n, _)) => return Err(Error::parse(n, "expected 'dfa' header")),
            None => return Err(Error::parse(0, "empty input")),
        }
        let mut symbols: Option<Vec<char>> = None;
        let mut match_symbol = '1';
        let mut states: Option<usize> = None;
        let mut initial: Option<usize> = None;
        let mut final_list: Vec<usize> = Vec::new();
        let mut trans: Vec<(usize, usize, char, usize)> = Vec::new();
        for (n, line) in lines {
            let mut tok = line.split_whitespace();
            match tok.next().unwrap() {
                "alphabet" => {
                    symbols = Some(tok.map(|t| glyph(t, n)).collect::<Result<_>>()?);
                }
                "match" => {
                    match_symbol = glyph(tok.next().unwrap_or(""), n)?;
                }
                "states" => states = Some(number(tok.next(), n)?),
                "initial" => initial = Some(number(tok.next(), n)?),
                "final" => {
                    for t in tok {
                        final_list.push(number(Some(t), n)?);
                    }
                }
                "trans" => {
                    let from = number(tok.next(), n)?;
                    let g = glyph(tok.next().unwrap_or(""), n)?;
                    let to = number(tok.next(), n)?;
                    trans.push((n, from, g, to));
                }
                other => return Err(Error::parse(n, format!("unknown directive '{other}'"))),
            }
        }
        let alphabet = match (symbols, alphabet) {
            (Some(s), _) => AlignmentAlphabet::new(s, match_symbol)?,
            (None, Some(a)) => a.clone(),
            (None, None) => return Err(Error::parse(0, "no alphabet given")),
        };
        let n = states.ok_or_else(|| Error::parse(0, "missing 'states'"))?;
        let initial = initial.ok_or_else(|| Error::parse(0, "missing 'initial'"))?;
        let k = alphabet.len();
        let mut finals = vec![false; n];
        for q in final_list {
            if q >= n {
                return Err(Error::parse(0, format!("final state {q} out of range")));
            }
            finals[q] = true;
        }
        let mut delta = vec![usize::MAX; n * k];
        for (line, from, g, to) in trans {
            let x = alphabet
                .index_of(g)
                .ok_or_else(|| Error::parse(line, format!("'{g}' is not in the alphabet")))?;
            if from >= n || to >= n {
                return Err(Error::parse(line, "state out of range"));
            }
            delta[from * k + x] = to;
        }
        if let Some(i) = delta.iter().position(|&d| d == usize::MAX) {
            return Err(Error::parse(
                0,
                format!(
                    "incomplete automaton: state {} has no transition on '{}'",
                    i / k,
                    alphabet.glyph(i % k)
                ),
            ));
        }
        Dfa::new(alphabet, initial, finals, delta)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn glyph(t: &str, line: usize) -> Result<char> {
    let mut it = t.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::parse(line, format!("expected a glyph, got '{t}'"))),
    }
}

fn number(t: Option<&str>, line: usize) -> Result<usize> {
    t.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, "expected a non-negative integer"))
}
