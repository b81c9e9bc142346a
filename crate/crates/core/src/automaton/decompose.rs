//! Splitting an automaton into a weighted sum of single-pair automata.

use super::{Automaton, AutomatonClass, StateId};
use crate::error::Result;
use crate::matrix::{unit, Matrix};
use crate::semiring::Semiring;
use crate::words::Alphabet;

/// One summand `l · A_pq · r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part<S> {
    pub left: S,
    pub automaton: Automaton<S>,
    pub right: S,
    /// The initial and final state of the original automaton.
    pub pair: (StateId, StateId),
}

impl<S: Semiring> Part<S> {
    pub fn class(&self) -> AutomatonClass {
        self.automaton.classify()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition<S> {
    pub alphabet: Alphabet,
    pub parts: Vec<Part<S>>,
}

impl<S: Semiring> Decomposition<S> {
    /// `Σ_k l_k · A_k · r_k` as one automaton.
    pub fn recombine(&self) -> Result<Automaton<S>> {
        let mut acc = Automaton::with_states(self.alphabet.clone(), 0);
        for p in &self.parts {
            acc = acc.sum(&p.automaton.scale(&p.left, &p.right))?;
        }
        Ok(acc)
    }
}

fn pairs<S: Semiring>(a: &Automaton<S>) -> Vec<(usize, usize)> {
    let n = a.num_states();
    let mut out = Vec::new();
    for p in (0..n).filter(|&p| !a.initial()[p].is_zero()) {
        for q in (0..n).filter(|&q| !a.final_weights()[q].is_zero()) {
            out.push((p, q));
        }
    }
    out
}

fn loopback_part<S: Semiring>(a: &Automaton<S>, q: usize) -> Automaton<S> {
    let e = a.unit_vector(q);
    a.with_weights(e.clone(), e)
}

fn part<S: Semiring>(a: &Automaton<S>, p: usize, q: usize, automaton: Automaton<S>) -> Part<S> {
    Part {
        left: a.initial()[p].clone(),
        automaton,
        right: a.final_weights()[q].clone(),
        pair: (a.states()[p], a.states()[q]),
    }
}

/// Parts are loopback automata (`p = q`) or loopback automata with a fresh
/// prelude state copying the outgoing transitions of `p`.
pub fn decompose_diverging<S: Semiring>(a: &Automaton<S>) -> Decomposition<S> {
    let n = a.num_states();
    let parts = pairs(a)
        .into_iter()
        .map(|(p, q)| {
            let automaton = if p == q {
                loopback_part(a, q)
            } else {
                let mut states = a.states().to_vec();
                states.push(a.fresh_id());
                let transitions = a
                    .matrices()
                    .iter()
                    .map(|m| {
                        let mut out = Matrix::zero(n + 1);
                        super::copy_block(&mut out, m, 0);
                        for j in 0..n {
                            out.set(n, j, m.get(p, j).clone());
                        }
                        out
                    })
                    .collect();
                Automaton::from_raw(a.alphabet().clone(), states, unit(n + 1, n), unit(n + 1, q), transitions)
            };
            part(a, p, q, automaton)
        })
        .collect();
    Decomposition { alphabet: a.alphabet().clone(), parts }
}

/// Parts are loopback automata (`p = q`) or bridge automata.
pub fn decompose_bidiverging<S: Semiring>(a: &Automaton<S>) -> Decomposition<S> {
    let parts = pairs(a)
        .into_iter()
        .map(|(p, q)| {
            let automaton =
                if p == q { loopback_part(a, q) } else { a.with_weights(a.unit_vector(p), a.unit_vector(q)) };
            part(a, p, q, automaton)
        })
        .collect();
    Decomposition { alphabet: a.alphabet().clone(), parts }
}
