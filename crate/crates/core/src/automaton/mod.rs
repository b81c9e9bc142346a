//! Weighted automata `(Q, I, F, M)` and the constructions on them.

mod behavior;
mod construct;
mod decompose;
mod reduce;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{dot, vec_mul, Matrix};
use crate::semiring::Semiring;
use crate::words::{Alphabet, FiniteWord, Symbol};

pub use behavior::{BiDivergingBehavior, DivergingBehavior};
pub use construct::{conjoin2, conjoin3, disjoin2, disjoin3, normalize, roll, unroll};
pub use decompose::{decompose_bidiverging, decompose_diverging, Decomposition, Part};
pub use reduce::{reduce, trim};

/// Opaque state identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u64);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Structural class, most specific first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutomatonClass {
    Normalized,
    Loopback,
    LoopbackWithPrelude,
    Bridge,
    General,
}

impl AutomatonClass {
    pub fn name(self) -> &'static str {
        match self {
            AutomatonClass::Normalized => "normalized",
            AutomatonClass::Loopback => "loopback",
            AutomatonClass::LoopbackWithPrelude => "loopback-with-prelude",
            AutomatonClass::Bridge => "bridge",
            AutomatonClass::General => "general",
        }
    }
}

impl fmt::Display for AutomatonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A weighted automaton. States are kept in insertion order; the matrix of
/// each letter is indexed by state position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton<S> {
    alphabet: Alphabet,
    states: Vec<StateId>,
    initial: Vec<S>,
    final_weights: Vec<S>,
    transitions: Vec<Matrix<S>>,
}

impl<S: Semiring> Automaton<S> {
    /// An automaton with the given states and no weights.
    pub fn new(alphabet: Alphabet, states: Vec<StateId>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(*s) {
                return Err(Error::DuplicateState(s.0));
            }
        }
        let n = states.len();
        Ok(Automaton {
            transitions: vec![Matrix::zero(n); alphabet.len()],
            alphabet,
            states,
            initial: vec![S::zero(); n],
            final_weights: vec![S::zero(); n],
        })
    }

    /// An automaton with states `0..n`.
    pub fn with_states(alphabet: Alphabet, n: usize) -> Self {
        Self::new(alphabet, (0..n as u64).map(StateId).collect()).expect("distinct ids")
    }

    pub(crate) fn from_raw(
        alphabet: Alphabet,
        states: Vec<StateId>,
        initial: Vec<S>,
        final_weights: Vec<S>,
        transitions: Vec<Matrix<S>>,
    ) -> Self {
        debug_assert_eq!(transitions.len(), alphabet.len());
        debug_assert!(transitions.iter().all(|m| m.dim() == states.len()));
        Automaton { alphabet, states, initial, final_weights, transitions }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &[S] {
        &self.initial
    }

    pub fn final_weights(&self) -> &[S] {
        &self.final_weights
    }

    pub fn matrices(&self) -> &[Matrix<S>] {
        &self.transitions
    }

    pub fn index_of(&self, id: StateId) -> Result<usize> {
        self.states.iter().position(|s| *s == id).ok_or(Error::UnknownState(id.0))
    }

    pub fn letter(&self, s: &Symbol) -> Result<usize> {
        self.alphabet.index_of(s).ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    }

    pub fn letters(&self, word: &[Symbol]) -> Result<Vec<usize>> {
        word.iter().map(|s| self.letter(s)).collect()
    }

    pub fn matrix(&self, s: &Symbol) -> Result<&Matrix<S>> {
        Ok(&self.transitions[self.letter(s)?])
    }

    pub fn set_initial(&mut self, id: StateId, w: S) -> Result<()> {
        let i = self.index_of(id)?;
        self.initial[i] = w;
        Ok(())
    }

    pub fn set_final(&mut self, id: StateId, w: S) -> Result<()> {
        let i = self.index_of(id)?;
        self.final_weights[i] = w;
        Ok(())
    }

    /// Adds `w` to the weight of `from --sym--> to`.
    pub fn add_transition(&mut self, from: StateId, to: StateId, sym: &Symbol, w: S) -> Result<()> {
        let (i, j, a) = (self.index_of(from)?, self.index_of(to)?, self.letter(sym)?);
        self.transitions[a].add_at(i, j, &w);
        Ok(())
    }

    pub fn transition(&self, from: StateId, to: StateId, sym: &Symbol) -> Result<&S> {
        let (i, j, a) = (self.index_of(from)?, self.index_of(to)?, self.letter(sym)?);
        Ok(self.transitions[a].get(i, j))
    }

    /// Non-zero transitions as `(from, to, symbol, weight)`, sorted.
    pub fn transition_list(&self) -> Vec<(StateId, StateId, Symbol, S)> {
        let mut out = Vec::new();
        for (a, m) in self.transitions.iter().enumerate() {
            for i in 0..self.num_states() {
                for j in 0..self.num_states() {
                    let w = m.get(i, j);
                    if !w.is_zero() {
                        out.push((self.states[i], self.states[j], self.alphabet.symbols()[a].clone(), w.clone()));
                    }
                }
            }
        }
        out.sort_by(|x, y| (x.0, x.1, &x.2).cmp(&(y.0, y.1, &y.2)));
        out
    }

    /// Smallest id not in use.
    pub fn fresh_id(&self) -> StateId {
        StateId(self.states.iter().map(|s| s.0 + 1).max().unwrap_or(0))
    }

    /// Product of the letter matrices along `letters` (alphabet indices).
    pub fn product(&self, letters: &[usize]) -> Matrix<S> {
        letters.iter().fold(Matrix::identity(self.num_states()), |acc, &a| acc.mul(&self.transitions[a]))
    }

    /// `I · M(w_0) ⋯ M(w_{n-1}) · F`.
    pub fn weight(&self, word: &FiniteWord) -> Result<S> {
        let mut v = self.initial.clone();
        for a in self.letters(word.letters())? {
            v = vec_mul(&v, &self.transitions[a]);
        }
        Ok(dot(&v, &self.final_weights))
    }

    /// `I' = l·I`, `F' = F·r`.
    pub fn scale(&self, l: &S, r: &S) -> Self {
        let mut out = self.clone();
        out.initial = self.initial.iter().map(|x| l.mul(x)).collect();
        out.final_weights = self.final_weights.iter().map(|x| x.mul(r)).collect();
        out
    }

    /// Disjoint union; states of `other` are renamed past the ids of `self`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let n = self.num_states();
        let offset = self.fresh_id().0;
        let mut states = self.states.clone();
        states.extend(other.states.iter().enumerate().map(|(k, _)| StateId(offset + k as u64)));
        let total = states.len();
        let transitions = self
            .transitions
            .iter()
            .zip(&other.transitions)
            .map(|(a, b)| {
                let mut m = Matrix::zero(total);
                copy_block(&mut m, a, 0);
                copy_block(&mut m, b, n);
                m
            })
            .collect();
        Ok(Automaton {
            alphabet: self.alphabet.clone(),
            states,
            initial: self.initial.iter().chain(&other.initial).cloned().collect(),
            final_weights: self.final_weights.iter().chain(&other.final_weights).cloned().collect(),
            transitions,
        })
    }

    pub(crate) fn check_alphabet(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet.symbols(),
                other.alphabet.symbols()
            )));
        }
        Ok(())
    }

    /// The automaton over a larger alphabet, new letters having no transitions.
    pub fn widen_alphabet(&self, alphabet: &Alphabet) -> Result<Self> {
        let n = self.num_states();
        let mut transitions = Vec::with_capacity(alphabet.len());
        for s in alphabet.symbols() {
            transitions.push(match self.alphabet.index_of(s) {
                Some(a) => self.transitions[a].clone(),
                None => Matrix::zero(n),
            });
        }
        if let Some(s) = self.alphabet.symbols().iter().find(|s| !alphabet.contains(s)) {
            return Err(Error::AlphabetMismatch(format!("symbol `{s}` not in target alphabet")));
        }
        Ok(Automaton { alphabet: alphabet.clone(), transitions, ..self.clone() })
    }

    /// Same automaton with the initial and final vectors replaced.
    pub fn with_weights(&self, initial: Vec<S>, final_weights: Vec<S>) -> Self {
        Automaton { initial, final_weights, ..self.clone() }
    }

    pub(crate) fn unit_vector(&self, i: usize) -> Vec<S> {
        crate::matrix::unit(self.num_states(), i)
    }

    /// Index of the only state with non-zero weight in `v`, if that weight is one.
    fn single_unit(v: &[S]) -> Option<usize> {
        let mut nz = v.iter().enumerate().filter(|(_, x)| !x.is_zero());
        match (nz.next(), nz.next()) {
            (Some((i, x)), None) if x.is_one() => Some(i),
            _ => None,
        }
    }

    pub fn initial_state(&self) -> Option<usize> {
        Self::single_unit(&self.initial)
    }

    pub fn final_state(&self) -> Option<usize> {
        Self::single_unit(&self.final_weights)
    }

    fn has_incoming(&self, j: usize) -> bool {
        let n = self.num_states();
        self.transitions.iter().any(|m| (0..n).any(|i| !m.get(i, j).is_zero()))
    }

    fn has_outgoing(&self, i: usize) -> bool {
        self.transitions.iter().any(|m| m.row(i).iter().any(|x| !x.is_zero()))
    }

    /// Initial and final state positions of a bridge automaton.
    pub fn bridge_states(&self) -> Option<(usize, usize)> {
        match (self.initial_state(), self.final_state()) {
            (Some(i), Some(f)) if i != f => Some((i, f)),
            _ => None,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.bridge_states().is_some_and(|(i, f)| !self.has_incoming(i) && !self.has_outgoing(f))
    }

    pub fn is_loopback(&self) -> bool {
        matches!((self.initial_state(), self.final_state()), (Some(i), Some(f)) if i == f)
    }

    pub fn is_loopback_with_prelude(&self) -> bool {
        self.bridge_states().is_some_and(|(i, _)| !self.has_incoming(i))
    }

    pub fn is_bridge(&self) -> bool {
        self.bridge_states().is_some()
    }

    pub fn classify(&self) -> AutomatonClass {
        if self.is_normalized() {
            AutomatonClass::Normalized
        } else if self.is_loopback() {
            AutomatonClass::Loopback
        } else if self.is_loopback_with_prelude() {
            AutomatonClass::LoopbackWithPrelude
        } else if self.is_bridge() {
            AutomatonClass::Bridge
        } else {
            AutomatonClass::General
        }
    }

    /// Checks whether `other` equals `self` after renaming states, and
    /// returns the renaming (positions in `self` to positions in `other`).
    pub fn isomorphism(&self, other: &Self) -> Option<Vec<usize>> {
        if self.alphabet != other.alphabet || self.num_states() != other.num_states() {
            return None;
        }
        let n = self.num_states();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend_iso(other, 0, &mut map, &mut used).then_some(map)
    }

    fn extend_iso(&self, other: &Self, k: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        if k == self.num_states() {
            return true;
        }
        for c in 0..other.num_states() {
            if used[c] || self.initial[k] != other.initial[c] || self.final_weights[k] != other.final_weights[c] {
                continue;
            }
            map[k] = c;
            let consistent = self
                .transitions
                .iter()
                .zip(&other.transitions)
                .all(|(a, b)| (0..=k).all(|j| a.get(k, j) == b.get(c, map[j]) && a.get(j, k) == b.get(map[j], c)));
            if consistent {
                used[c] = true;
                if self.extend_iso(other, k + 1, map, used) {
                    return true;
                }
                used[c] = false;
            }
        }
        false
    }
}

pub(crate) fn copy_block<S: Semiring>(dst: &mut Matrix<S>, src: &Matrix<S>, at: usize) {
    for i in 0..src.dim() {
        for j in 0..src.dim() {
            let w = src.get(i, j);
            if !w.is_zero() {
                dst.set(at + i, at + j, w.clone());
            }
        }
    }
}
