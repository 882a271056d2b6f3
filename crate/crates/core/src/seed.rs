//! Subset seeds and direct (automaton-free) matching.
//!
//! Positions are 1-based. A hit is reported at the *start* position of the
//! matched window: seed `#@_#` hits `10h1h1101` at 4 and 6.

use std::fmt;

use crate::alphabet::{AlignmentAlphabet, AlignmentWord, Letter, SeedAlphabet, HASH};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSeed {
    glyphs: Vec<char>,
    masks: Vec<u64>,
    weights: Vec<f64>,
    non_hash: Vec<usize>,
    alignment: AlignmentAlphabet,
}

impl SubsetSeed {
    pub fn parse(text: &str, alphabet: &SeedAlphabet) -> Result<Self> {
        let mut glyphs = Vec::new();
        let mut masks = Vec::new();
        let mut weights = Vec::new();
        let mut non_hash = Vec::new();
        for (i, c) in text.chars().enumerate() {
            let letter = alphabet.letter(c).ok_or(Error::UnknownGlyph {
                glyph: c,
                position: i + 1,
            })?;
            glyphs.push(c);
            masks.push(letter.members);
            weights.push(letter.weight);
            if c != HASH {
                non_hash.push(i + 1);
            }
        }
        if glyphs.is_empty() {
            return Err(Error::InvalidArgument("empty seed".into()));
        }
        Ok(SubsetSeed {
            glyphs,
            masks,
            weights,
            non_hash,
            alignment: alphabet.alignment().clone(),
        })
    }

    /// Seed length `m`.
    pub fn span(&self) -> usize {
        self.glyphs.len()
    }

    /// Number of `#` glyphs.
    pub fn hash_weight(&self) -> usize {
        self.span() - self.non_hash.len()
    }

    /// Number of non-`#` positions, `r = m - w`.
    pub fn joker_count(&self) -> usize {
        self.non_hash.len()
    }

    /// Non-`#` positions `l_1 < ... < l_r`, 1-based.
    pub fn non_hash_positions(&self) -> &[usize] {
        &self.non_hash
    }

    pub fn glyphs(&self) -> &[char] {
        &self.glyphs
    }

    pub fn text(&self) -> String {
        self.glyphs.iter().collect()
    }

    pub fn alignment(&self) -> &AlignmentAlphabet {
        &self.alignment
    }

    /// Subset mask of the glyph at 1-based `pos`.
    pub fn mask(&self, pos: usize) -> u64 {
        self.masks[pos - 1]
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Whether alignment letter `a` belongs to the subset at 1-based `pos`.
    #[inline]
    pub fn accepts_letter(&self, pos: usize, a: Letter) -> bool {
        self.masks[pos - 1] >> a & 1 == 1
    }

    /// Sum of per-glyph selectivity weights.
    pub fn selectivity_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn starts_with_hash(&self) -> bool {
        self.glyphs[0] == HASH
    }

    /// Whether the window of `word` starting at 1-based `start` is matched.
    pub fn matches_at(&self, word: &[Letter], start: usize) -> Result<bool> {
        let m = self.span();
        if start == 0 || start + m - 1 > word.len() {
            return Err(Error::InvalidArgument(format!(
                "window start {start} out of range for span {m} and word length {}",
                word.len()
            )));
        }
        Ok(self.window_matches(&word[start - 1..start - 1 + m]))
    }

    fn window_matches(&self, window: &[Letter]) -> bool {
        window
            .iter()
            .zip(&self.masks)
            .all(|(&a, &mask)| mask >> a & 1 == 1)
    }

    /// All 1-based window starts where the seed matches.
    pub fn hit_positions(&self, word: &[Letter]) -> Vec<usize> {
        let m = self.span();
        if m > word.len() {
            return Vec::new();
        }
        (1..=word.len() - m + 1)
            .filter(|&p| self.window_matches(&word[p - 1..p - 1 + m]))
            .collect()
    }

    pub fn hits(&self, word: &AlignmentWord) -> bool {
        let m = self.span();
        m <= word.len() && word.0.windows(m).any(|w| self.window_matches(w))
    }
}

impl fmt::Display for SubsetSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.glyphs {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dna(text: &str) -> SubsetSeed {
        SubsetSeed::parse(text, &SeedAlphabet::dna3()).unwrap()
    }

    fn word(text: &str) -> Vec<Letter> {
        AlignmentAlphabet::dna3().parse_word(text).unwrap().0
    }

    #[test]
    fn parse_counts() {
        let s = dna("#@_#");
        assert_eq!(s.span(), 4);
        assert_eq!(s.hash_weight(), 2);
        assert_eq!(s.non_hash_positions(), &[2, 3]);

        let s = dna("#");
        assert_eq!((s.span(), s.hash_weight(), s.joker_count()), (1, 1, 0));
    }

    #[test]
    fn parse_unknown_glyph() {
        let err = SubsetSeed::parse("#$#", &SeedAlphabet::dna3()).unwrap_err();
        assert_eq!(
            err,
            Error::UnknownGlyph {
                glyph: '$',
                position: 2
            }
        );
        assert!(SubsetSeed::parse("#@#", &SeedAlphabet::binary()).is_err());
        assert!(SubsetSeed::parse("", &SeedAlphabet::dna3()).is_err());
    }

    #[test]
    fn selectivity() {
        assert_eq!(dna("#@_#").selectivity_weight(), 2.5);
        assert_eq!(dna("####").selectivity_weight(), 4.0);
        assert_eq!(dna("____").selectivity_weight(), 0.0);
    }

    #[test]
    fn example_hits() {
        let s = dna("#@_#");
        let w = word("10h1h1101");
        assert!(s.matches_at(&w, 4).unwrap());
        assert!(!s.matches_at(&w, 5).unwrap());
        assert_eq!(s.hit_positions(&w), vec![4, 6]);
        // both hits as window ends would be 7 and 9
        assert!(!s.matches_at(&w, 1).unwrap());

        assert!(!dna("#").matches_at(&word("0"), 1).unwrap());
        assert_eq!(dna("#").hit_positions(&word("111")), vec![1, 2, 3]);
        assert!(dna("##").hit_positions(&word("0h0")).is_empty());
    }

    #[test]
    fn matches_at_range() {
        let s = dna("#@_#");
        let w = word("10h1h1101");
        assert!(s.matches_at(&w, 0).is_err());
        assert!(s.matches_at(&w, 7).is_err());
        assert!(s.matches_at(&w, 6).is_ok());
    }

    #[test]
    fn jokers_match_everywhere() {
        let s = dna("___");
        assert_eq!(s.hit_positions(&word("0h0h0")), vec![1, 2, 3]);
        assert!(s.hit_positions(&word("00")).is_empty());
    }
}
