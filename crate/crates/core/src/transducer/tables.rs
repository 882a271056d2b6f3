//! Model files: the general `pt` transducer format and the shaped `dt1`,
//! `dt2` and `nt` parameter tables. Shaped files declare their own column
//! order on an `alphabet` line and are remapped onto the caller's alphabet by
//! glyph.
//!
//! ```text
//! dt1                      dt2                  nt
//! alphabet 0 h 1           alphabet 0 h 1       alphabet 0 h 1
//! 0.2398 0.2945 0.4657     000 0.01089          switch
//! (3 rows)                 (27 codon lines)     (4 rows of 4)
//!                                               block 0
//!                                               (27 codon lines) ...
//! ```

use std::fmt::Write as _;

use super::models::{self, CodonTable, NtInit};
use super::ProbabilityTransducer;
use crate::alphabet::{AlignmentAlphabet, Letter};
use crate::error::{Error, Result};

pub const BUILTIN_DT1: &str = include_str!("../../data/dt1.txt");
pub const BUILTIN_DT2: &str = include_str!("../../data/dt2.txt");
pub const BUILTIN_NT: &str = include_str!("../../data/nt.txt");

/// A parsed model file, letters already mapped onto the target alphabet.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    Transducer(ProbabilityTransducer),
    Dt1(Vec<Vec<f64>>),
    Dt2(CodonTable),
    Nt {
        switch: Vec<Vec<f64>>,
        blocks: Vec<CodonTable>,
    },
}

impl ModelFile {
    pub fn parse(text: &str, target: &AlignmentAlphabet) -> Result<Self> {
        let header = content_lines(text)
            .next()
            .map(|(_, l)| l)
            .ok_or_else(|| Error::parse(0, "empty model file"))?;
        match header {
            "pt" => ProbabilityTransducer::from_text(text, Some(target)).map(ModelFile::Transducer),
            "dt1" => parse_dt1(text, target).map(ModelFile::Dt1),
            "dt2" => parse_dt2(text, target).map(ModelFile::Dt2),
            "nt" => parse_nt(text, target),
            other => Err(Error::parse(1, format!("unknown model kind '{other}'"))),
        }
    }

    pub fn build(&self, alphabet: &AlignmentAlphabet, init: NtInit) -> Result<ProbabilityTransducer> {
        match self {
            ModelFile::Transducer(g) => Ok(g.clone()),
            ModelFile::Dt1(rows) => models::dt1(alphabet, rows),
            ModelFile::Dt2(t) => models::dt2(alphabet, t),
            ModelFile::Nt { switch, blocks } => models::nt(alphabet, blocks, switch, init),
        }
    }
}

/// Parses and builds any model file.
pub fn load_model(text: &str, alphabet: &AlignmentAlphabet, init: NtInit) -> Result<ProbabilityTransducer> {
    ModelFile::parse(text, alphabet)?.build(alphabet, init)
}

/// Bundled models: `dt1`, `dt2`, `nt`.
pub fn builtin(name: &str, alphabet: &AlignmentAlphabet, init: NtInit) -> Result<ProbabilityTransducer> {
    let text = match name {
        "dt1" => BUILTIN_DT1,
        "dt2" => BUILTIN_DT2,
        "nt" => BUILTIN_NT,
        _ => return Err(Error::InvalidArgument(format!("unknown builtin model '{name}'"))),
    };
    load_model(text, alphabet, init)
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with(';'))
}

pub(crate) fn glyph(t: Option<&str>, line: usize) -> Result<char> {
    let t = t.unwrap_or("");
    let mut it = t.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::parse(line, format!("expected a glyph, got '{t}'"))),
    }
}

pub(crate) fn glyphs<'a>(tokens: impl Iterator<Item = &'a str>, line: usize) -> Result<Vec<char>> {
    tokens.map(|t| glyph(Some(t), line)).collect()
}

pub(crate) fn number(t: Option<&str>, line: usize) -> Result<usize> {
    t.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, "expected a non-negative integer"))
}

pub(crate) fn real(t: Option<&str>, line: usize) -> Result<f64> {
    t.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, "expected a number"))
}

pub(crate) fn resolve_alphabet(
    symbols: Option<Vec<char>>,
    match_symbol: char,
    target: Option<&AlignmentAlphabet>,
) -> Result<AlignmentAlphabet> {
    match (symbols, target) {
        (Some(s), Some(t)) => {
            let own = AlignmentAlphabet::new(s, match_symbol)?;
            check_same_set(&own, t)?;
            Ok(t.clone())
        }
        (Some(s), None) => AlignmentAlphabet::new(s, match_symbol),
        (None, Some(t)) => Ok(t.clone()),
        (None, None) => Err(Error::parse(0, "no alphabet given")),
    }
}

fn check_same_set(file: &AlignmentAlphabet, target: &AlignmentAlphabet) -> Result<()> {
    let same = file.len() == target.len()
        && file.symbols().iter().all(|&c| target.index_of(c).is_some())
        && file.glyph(file.match_letter()) == target.glyph(target.match_letter());
    if same {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(format!(
            "model alphabet {file} does not match {target}"
        )))
    }
}

/// Header lines shared by shaped files; returns the file's column order as
/// letters of `target`, plus the remaining content lines.
fn shaped_header<'a>(
    text: &'a str,
    kind: &str,
    target: &AlignmentAlphabet,
) -> Result<(Vec<Letter>, Vec<(usize, &'a str)>)> {
    let mut lines = content_lines(text).peekable();
    match lines.next() {
        Some((_, h)) if h == kind => {}
        Some((n, _)) => return Err(Error::parse(n, format!("expected '{kind}' header"))),
        None => return Err(Error::parse(0, "empty input")),
    }
    let mut symbols = None;
    let mut match_symbol = '1';
    while let Some(&(n, line)) = lines.peek() {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("alphabet") => symbols = Some(glyphs(tok, n)?),
            Some("match") => match_symbol = glyph(tok.next(), n)?,
            _ => break,
        }
        lines.next();
    }
    let order: Vec<Letter> = match symbols {
        Some(s) => {
            let own = AlignmentAlphabet::new(s, match_symbol)?;
            check_same_set(&own, target)?;
            own.symbols()
                .iter()
                .map(|&c| target.index_of(c).unwrap())
                .collect()
        }
        None => target.letters().collect(),
    };
    Ok((order, lines.collect()))
}

fn parse_dt1(text: &str, target: &AlignmentAlphabet) -> Result<Vec<Vec<f64>>> {
    let (order, lines) = shaped_header(text, "dt1", target)?;
    if lines.len() != 3 {
        return Err(Error::parse(
            lines.first().map_or(0, |l| l.0),
            format!("expected 3 rows, found {}", lines.len()),
        ));
    }
    lines
        .iter()
        .map(|&(n, line)| {
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| real(Some(t), n))
                .collect::<Result<_>>()?;
            if vals.len() != order.len() {
                return Err(Error::parse(n, format!("expected {} values", order.len())));
            }
            let mut row = vec![0.0; order.len()];
            for (i, v) in vals.into_iter().enumerate() {
                row[order[i]] = v;
            }
            Ok(row)
        })
        .collect()
}

fn parse_codon_lines(
    lines: &[(usize, &str)],
    target: &AlignmentAlphabet,
) -> Result<CodonTable> {
    let k = target.len();
    let mut probs = vec![f64::NAN; k * k * k];
    for &(n, line) in lines {
        let mut tok = line.split_whitespace();
        let codon: Vec<char> = tok.next().unwrap_or("").chars().collect();
        if codon.len() != 3 {
            return Err(Error::parse(n, "expected a three-letter codon"));
        }
        let mut idx = 0;
        for c in codon {
            let a = target
                .index_of(c)
                .ok_or_else(|| Error::parse(n, format!("'{c}' is not in the alphabet")))?;
            idx = idx * k + a;
        }
        if !probs[idx].is_nan() {
            return Err(Error::parse(n, "duplicate codon"));
        }
        probs[idx] = real(tok.next(), n)?;
    }
    if probs.iter().any(|p| p.is_nan()) {
        return Err(Error::parse(
            lines.last().map_or(0, |l| l.0),
            format!("codon table needs all {} codons", k * k * k),
        ));
    }
    CodonTable::new(k, probs)
}

fn parse_dt2(text: &str, target: &AlignmentAlphabet) -> Result<CodonTable> {
    let (_, lines) = shaped_header(text, "dt2", target)?;
    parse_codon_lines(&lines, target)
}

fn parse_nt(text: &str, target: &AlignmentAlphabet) -> Result<ModelFile> {
    let (_, lines) = shaped_header(text, "nt", target)?;
    let mut switch: Vec<Vec<f64>> = Vec::new();
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    let mut in_switch = false;
    for &(n, line) in &lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("switch") => in_switch = true,
            Some("block") => {
                in_switch = false;
                let id = number(tok.next(), n)?;
                if id != blocks.len() {
                    return Err(Error::parse(n, format!("expected block {}", blocks.len())));
                }
                blocks.push(Vec::new());
            }
            _ if in_switch => {
                let row = line
                    .split_whitespace()
                    .map(|t| real(Some(t), n))
                    .collect::<Result<Vec<_>>>()?;
                switch.push(row);
            }
            _ => match blocks.last_mut() {
                Some(b) => b.push((n, line)),
                None => return Err(Error::parse(n, "codon line outside a block")),
            },
        }
    }
    let blocks = blocks
        .iter()
        .map(|b| parse_codon_lines(b, target))
        .collect::<Result<Vec<_>>>()?;
    if switch.len() != blocks.len() || switch.iter().any(|r| r.len() != blocks.len()) {
        return Err(Error::parse(
            0,
            format!("switch matrix must be {0}x{0}", blocks.len()),
        ));
    }
    Ok(ModelFile::Nt { switch, blocks })
}

fn header(kind: &str, alphabet: &AlignmentAlphabet) -> String {
    let mut out = format!("{kind}\nalphabet");
    for &c in alphabet.symbols() {
        out.push(' ');
        out.push(c);
    }
    let _ = writeln!(out, "\nmatch {}", alphabet.glyph(alphabet.match_letter()));
    out
}

pub(crate) fn dt1_to_text(alphabet: &AlignmentAlphabet, rows: &[Vec<f64>]) -> String {
    let mut out = header("dt1", alphabet);
    for row in rows {
        let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", vals.join(" "));
    }
    out
}

pub(crate) fn dt2_to_text(alphabet: &AlignmentAlphabet, table: &CodonTable) -> String {
    let mut out = header("dt2", alphabet);
    let k = alphabet.len();
    for a1 in 0..k {
        for a2 in 0..k {
            for a3 in 0..k {
                let _ = writeln!(
                    out,
                    "{}{}{} {}",
                    alphabet.glyph(a1),
                    alphabet.glyph(a2),
                    alphabet.glyph(a3),
                    table.get(a1, a2, a3)
                );
            }
        }
    }
    out
}
