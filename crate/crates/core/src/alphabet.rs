//! Alignment alphabets, seed alphabets and their line-oriented config format.
//!
//! An alignment alphabet is a small ordered set of glyphs, one of which is the
//! match symbol `1`. Letters are referred to by their index in that order. A
//! seed alphabet maps each seed glyph to a subset of the alignment alphabet
//! (stored as a bit mask over letter indices) together with a selectivity
//! weight.
//!
//! Config format, one directive per line (blank lines and lines starting with
//! `;` are ignored):
//!
//! ```text
//! alphabet 1 h 0
//! match 1
//! seedletter # 1.0 1
//! seedletter @ 0.5 1 h
//! seedletter _ 0 1 h 0
//! ```

use std::fmt;

use crate::error::{Error, Result};

/// Index of a letter inside an [`AlignmentAlphabet`].
pub type Letter = usize;

/// Glyph of the seed letter denoting `{1}`.
pub const HASH: char = '#';

/// Largest supported alignment alphabet (letters are held in a `u64` mask).
pub const MAX_ALPHABET: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlignmentAlphabet {
    symbols: Vec<char>,
    match_index: Letter,
}

impl AlignmentAlphabet {
    pub fn new(symbols: Vec<char>, match_symbol: char) -> Result<Self> {
        if symbols.len() < 2 {
            return Err(Error::InvalidArgument(
                "alignment alphabet needs at least two symbols".into(),
            ));
        }
        if symbols.len() > MAX_ALPHABET {
            return Err(Error::InvalidArgument(format!(
                "alignment alphabet has {} symbols, at most {MAX_ALPHABET} supported",
                symbols.len()
            )));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::InvalidArgument(format!("duplicate symbol '{c}'")));
            }
            if c.is_whitespace() {
                return Err(Error::InvalidArgument("whitespace symbol".into()));
            }
        }
        let match_index = symbols
            .iter()
            .position(|&c| c == match_symbol)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("match symbol '{match_symbol}' not in alphabet"))
            })?;
        Ok(AlignmentAlphabet {
            symbols,
            match_index,
        })
    }

    /// `{1, h, 0}`: match, transition, transversion.
    pub fn dna3() -> Self {
        AlignmentAlphabet::new(vec!['1', 'h', '0'], '1').unwrap()
    }

    /// `{1, 0}`: match, mismatch.
    pub fn binary() -> Self {
        AlignmentAlphabet::new(vec!['1', '0'], '1').unwrap()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn match_letter(&self) -> Letter {
        self.match_index
    }

    pub fn glyph(&self, letter: Letter) -> char {
        self.symbols[letter]
    }

    pub fn index_of(&self, glyph: char) -> Option<Letter> {
        self.symbols.iter().position(|&c| c == glyph)
    }

    pub fn letters(&self) -> std::ops::Range<Letter> {
        0..self.symbols.len()
    }

    /// Mask with every letter set.
    pub fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<AlignmentWord> {
        text.chars()
            .enumerate()
            .map(|(i, c)| {
                self.index_of(c).ok_or(Error::UnknownGlyph {
                    glyph: c,
                    position: i + 1,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(AlignmentWord)
    }

    pub fn render(&self, word: &[Letter]) -> String {
        word.iter().map(|&a| self.symbols[a]).collect()
    }
}

/// A word over an alignment alphabet, stored as letter indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AlignmentWord(pub Vec<Letter>);

impl AlignmentWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for AlignmentWord {
    fn from(v: Vec<Letter>) -> Self {
        AlignmentWord(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedLetter {
    pub glyph: char,
    pub weight: f64,
    /// Bit `a` set iff alignment letter `a` belongs to the subset.
    pub members: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedAlphabet {
    alignment: AlignmentAlphabet,
    letters: Vec<SeedLetter>,
}

impl SeedAlphabet {
    pub fn new(alignment: AlignmentAlphabet, letters: Vec<SeedLetter>) -> Result<Self> {
        let match_bit = 1u64 << alignment.match_letter();
        let full = alignment.full_mask();
        let mut has_hash = false;
        for (i, l) in letters.iter().enumerate() {
            if letters[..i].iter().any(|o| o.glyph == l.glyph) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate seed letter '{}'",
                    l.glyph
                )));
            }
            if l.members & match_bit == 0 {
                return Err(Error::InvalidArgument(format!(
                    "seed letter '{}' does not contain the match symbol",
                    l.glyph
                )));
            }
            if l.members & !full != 0 {
                return Err(Error::InvalidArgument(format!(
                    "seed letter '{}' refers to letters outside the alphabet",
                    l.glyph
                )));
            }
            if !(l.weight.is_finite() && l.weight >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "seed letter '{}' has invalid weight {}",
                    l.glyph, l.weight
                )));
            }
            if l.glyph == HASH {
                if l.members != match_bit {
                    return Err(Error::InvalidArgument(
                        "seed letter '#' must denote exactly the match symbol".into(),
                    ));
                }
                has_hash = true;
            }
        }
        if !has_hash {
            return Err(Error::InvalidArgument(
                "seed alphabet must contain '#'".into(),
            ));
        }
        Ok(SeedAlphabet { alignment, letters })
    }

    /// Ternary alignment alphabet with seed letters `#` = {1}, `@` = {1,h},
    /// `_` = {1,h,0}, weighted 1, 0.5 and 0.
    pub fn dna3() -> Self {
        let a = AlignmentAlphabet::dna3();
        let bit = |c| 1u64 << a.index_of(c).unwrap();
        let letters = vec![
            SeedLetter {
                glyph: '#',
                weight: 1.0,
                members: bit('1'),
            },
            SeedLetter {
                glyph: '@',
                weight: 0.5,
                members: bit('1') | bit('h'),
            },
            SeedLetter {
                glyph: '_',
                weight: 0.0,
                members: a.full_mask(),
            },
        ];
        SeedAlphabet::new(a, letters).unwrap()
    }

    /// Binary alignment alphabet with `#` = {1} and `_` = {1,0}.
    pub fn binary() -> Self {
        let a = AlignmentAlphabet::binary();
        let letters = vec![
            SeedLetter {
                glyph: '#',
                weight: 1.0,
                members: 1 << a.match_letter(),
            },
            SeedLetter {
                glyph: '_',
                weight: 0.0,
                members: a.full_mask(),
            },
        ];
        SeedAlphabet::new(a, letters).unwrap()
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "dna3" => Some(Self::dna3()),
            "binary" => Some(Self::binary()),
            _ => None,
        }
    }

    pub fn alignment(&self) -> &AlignmentAlphabet {
        &self.alignment
    }

    pub fn letters(&self) -> &[SeedLetter] {
        &self.letters
    }

    pub fn letter(&self, glyph: char) -> Option<&SeedLetter> {
        self.letters.iter().find(|l| l.glyph == glyph)
    }

    /// Parses the line-oriented config format described in the module docs.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut symbols: Option<Vec<char>> = None;
        let mut match_symbol: Option<char> = None;
        let mut raw_letters: Vec<(usize, char, f64, Vec<char>)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let keyword = tokens.next().unwrap();
            match keyword {
                "alphabet" => {
                    let syms = tokens
                        .map(|t| single_char(t, line_no))
                        .collect::<Result<Vec<_>>>()?;
                    symbols = Some(syms);
                }
                "match" => {
                    let t = tokens
                        .next()
                        .ok_or_else(|| Error::parse(line_no, "missing match glyph"))?;
                    match_symbol = Some(single_char(t, line_no)?);
                }
                "seedletter" => {
                    let glyph = single_char(
                        tokens
                            .next()
                            .ok_or_else(|| Error::parse(line_no, "missing seed glyph"))?,
                        line_no,
                    )?;
                    let weight: f64 = tokens
                        .next()
                        .ok_or_else(|| Error::parse(line_no, "missing weight"))?
                        .parse()
                        .map_err(|_| Error::parse(line_no, "bad weight"))?;
                    let members = tokens
                        .map(|t| single_char(t, line_no))
                        .collect::<Result<Vec<_>>>()?;
                    raw_letters.push((line_no, glyph, weight, members));
                }
                other => {
                    return Err(Error::parse(line_no, format!("unknown directive '{other}'")))
                }
            }
        }

        let symbols = symbols.ok_or_else(|| Error::parse(0, "missing 'alphabet' line"))?;
        let match_symbol = match_symbol.unwrap_or('1');
        let alignment = AlignmentAlphabet::new(symbols, match_symbol)?;
        let mut letters = Vec::with_capacity(raw_letters.len());
        for (line_no, glyph, weight, members) in raw_letters {
            let mut mask = 0u64;
            for c in members {
                let a = alignment.index_of(c).ok_or_else(|| {
                    Error::parse(line_no, format!("'{c}' is not an alignment symbol"))
                })?;
                mask |= 1 << a;
            }
            letters.push(SeedLetter {
                glyph,
                weight,
                members: mask,
            });
        }
        SeedAlphabet::new(alignment, letters)
    }

    pub fn to_config(&self) -> String {
        let a = &self.alignment;
        let mut out = String::new();
        out.push_str("alphabet");
        for &c in a.symbols() {
            out.push(' ');
            out.push(c);
        }
        out.push('\n');
        out.push_str(&format!("match {}\n", a.glyph(a.match_letter())));
        for l in &self.letters {
            out.push_str(&format!("seedletter {} {}", l.glyph, l.weight));
            for x in a.letters() {
                if l.members >> x & 1 == 1 {
                    out.push(' ');
                    out.push(a.glyph(x));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn single_char(token: &str, line: usize) -> Result<char> {
    let mut it = token.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::parse(line, format!("expected a single glyph, got '{token}'"))),
    }
}

impl fmt::Display for AlignmentAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let d = SeedAlphabet::dna3();
        assert_eq!(d.alignment().len(), 3);
        assert_eq!(d.letter('#').unwrap().weight, 1.0);
        assert_eq!(d.letter('@').unwrap().weight, 0.5);
        assert_eq!(d.letter('_').unwrap().weight, 0.0);
        let b = SeedAlphabet::binary();
        assert_eq!(b.alignment().len(), 2);
        assert!(b.letter('@').is_none());
    }

    #[test]
    fn config_round_trip() {
        let d = SeedAlphabet::dna3();
        let parsed = SeedAlphabet::parse_config(&d.to_config()).unwrap();
        assert_eq!(parsed, d);
    }

    #[test]
    fn config_rejects_letter_without_match() {
        let cfg = "alphabet 1 h 0\nmatch 1\nseedletter # 1 1\nseedletter x 0.5 h 0\n";
        assert!(matches!(
            SeedAlphabet::parse_config(cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn config_requires_hash() {
        let cfg = "alphabet 1 0\nseedletter _ 0 1 0\n";
        assert!(SeedAlphabet::parse_config(cfg).is_err());
    }

    #[test]
    fn config_rejects_bad_hash_subset() {
        let cfg = "alphabet 1 0\nseedletter # 1 1 0\n";
        assert!(SeedAlphabet::parse_config(cfg).is_err());
    }

    #[test]
    fn alphabet_invariants() {
        assert!(AlignmentAlphabet::new(vec!['1'], '1').is_err());
        assert!(AlignmentAlphabet::new(vec!['1', '1'], '1').is_err());
        assert!(AlignmentAlphabet::new(vec!['0', 'h'], '1').is_err());
    }

    #[test]
    fn word_parse_reports_position() {
        let a = AlignmentAlphabet::dna3();
        assert_eq!(
            a.parse_word("1h2"),
            Err(Error::UnknownGlyph {
                glyph: '2',
                position: 3
            })
        );
        let w = a.parse_word("10h").unwrap();
        assert_eq!(a.render(w.letters()), "10h");
    }
}
