//! Sensitivity of subset seeds and spaced seeds against probabilistic
//! alignment models.
//!
//! The sensitivity of a seed is the probability that a random target
//! alignment contains at least one hit. Three automata describe the problem:
//! a DFA for the target alignments, a DFA for the alignments hit by the seed
//! ([`seed_automaton`]), and a probability transducer generating the
//! alignments ([`transducer`]). [`sensitivity`] runs dynamic programming over
//! their product. [`design`] enumerates seeds, ranks them and gathers
//! automaton size statistics; [`oracle`] holds brute-force references.

pub mod alphabet;
pub mod automata;
pub mod design;
pub mod error;
pub mod oracle;
pub mod seed;
pub mod seed_automaton;
pub mod sensitivity;
pub mod transducer;

pub use alphabet::{AlignmentAlphabet, AlignmentWord, Letter, SeedAlphabet, SeedLetter};
pub use automata::Dfa;
pub use error::{Error, ErrorClass, Result};
pub use seed::SubsetSeed;
pub use transducer::ProbabilityTransducer;
