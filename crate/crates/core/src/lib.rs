//! Weighted automata and rational series over finite, infinite and
//! biinfinite words, with exact arithmetic over several semirings.
//!
//! Diverging automata read infinite words `u·v^ω` and produce a weight for
//! every prefix length; bidiverging automata read biinfinite words and
//! produce a weight for every window. A Büchi-like activation condition
//! masks the initial/final pairs whose path sums vanish eventually.

pub mod activation;
pub mod automaton;
pub mod error;
pub mod format;
pub mod kleene;
pub mod matrix;
pub mod semiring;
pub mod series;
pub mod words;

pub use error::{Error, Result};
pub mod quantum;
