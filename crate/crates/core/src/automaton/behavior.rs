//! Behaviors of automata on infinite and biinfinite words.

use super::Automaton;
use crate::activation::{activation_bidiverging, activation_diverging, ActivationMethod, ActivationVerdict};
use crate::error::Result;
use crate::matrix::{unit, vec_mul, Matrix};
use crate::semiring::{BiWeightGrid, Semiring, WeightSequence};
use crate::words::{BiInfiniteWord, InfiniteWord};

/// `n ↦ I · V(w, M(w[0..n])) · F`, where `V` keeps only activated pairs.
/// The activation verdict is computed once, on construction.
#[derive(Clone, Debug)]
pub struct DivergingBehavior<S> {
    automaton: Automaton<S>,
    word: InfiniteWord,
    verdict: ActivationVerdict,
    prefix: Vec<usize>,
    cycle: Vec<usize>,
}

fn masked_sum<S: Semiring>(a: &Automaton<S>, verdict: &ActivationVerdict, i: usize, row: &[S]) -> S {
    let mut acc = S::zero();
    for (f, y) in row.iter().enumerate() {
        if verdict.at(i, f) && !y.is_zero() {
            acc = acc.add(&y.mul(&a.final_weights()[f]));
        }
    }
    a.initial()[i].mul(&acc)
}

fn initial_rows<S: Semiring>(a: &Automaton<S>) -> Vec<usize> {
    (0..a.num_states()).filter(|&i| !a.initial()[i].is_zero()).collect()
}

impl<S: Semiring> DivergingBehavior<S> {
    pub fn new(a: &Automaton<S>, w: &InfiniteWord, method: ActivationMethod) -> Result<Self> {
        Ok(DivergingBehavior {
            verdict: activation_diverging(a, w, method)?,
            prefix: a.letters(w.prefix())?,
            cycle: a.letters(w.cycle())?,
            automaton: a.clone(),
            word: w.clone(),
        })
    }

    pub fn verdict(&self) -> &ActivationVerdict {
        &self.verdict
    }

    pub fn word(&self) -> &InfiniteWord {
        &self.word
    }

    /// `M(w[0..n])`, using repeated squaring on the cycle.
    fn prefix_product(&self, n: usize) -> Matrix<S> {
        let a = &self.automaton;
        if n <= self.prefix.len() {
            return a.product(&self.prefix[..n]);
        }
        let rest = n - self.prefix.len();
        let (k, r) = (rest / self.cycle.len(), rest % self.cycle.len());
        a.product(&self.prefix).mul(&a.product(&self.cycle).pow(k as u64)).mul(&a.product(&self.cycle[..r]))
    }

    pub fn at(&self, n: usize) -> S {
        let p = self.prefix_product(n);
        let a = &self.automaton;
        initial_rows(a).into_iter().fold(S::zero(), |acc, i| acc.add(&masked_sum(a, &self.verdict, i, p.row(i))))
    }

    /// Values at `0..len`.
    pub fn values(&self, len: usize) -> Vec<S> {
        let a = &self.automaton;
        let mut out = vec![S::zero(); len];
        for i in initial_rows(a) {
            let mut y = unit(a.num_states(), i);
            for (n, slot) in out.iter_mut().enumerate() {
                *slot = slot.add(&masked_sum(a, &self.verdict, i, &y));
                y = vec_mul(&y, &a.matrices()[self.letter(n)]);
            }
        }
        out
    }

    fn letter(&self, n: usize) -> usize {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn sequence(self) -> WeightSequence<S> {
        WeightSequence::new(move |n| self.at(n))
    }
}

/// `(i, n) ↦ I · V(w, M(w[i..i+n])) · F` for a biinfinite word.
#[derive(Clone, Debug)]
pub struct BiDivergingBehavior<S> {
    automaton: Automaton<S>,
    word: BiInfiniteWord,
    verdict: ActivationVerdict,
}

impl<S: Semiring> BiDivergingBehavior<S> {
    pub fn new(a: &Automaton<S>, w: &BiInfiniteWord, method: ActivationMethod) -> Result<Self> {
        // Validates the alphabet before anything else.
        a.letters(w.left())?;
        a.letters(w.center())?;
        a.letters(w.right())?;
        Ok(BiDivergingBehavior {
            verdict: activation_bidiverging(a, w, method)?,
            automaton: a.clone(),
            word: w.clone(),
        })
    }

    pub fn verdict(&self) -> &ActivationVerdict {
        &self.verdict
    }

    pub fn word(&self) -> &BiInfiniteWord {
        &self.word
    }

    fn letter(&self, j: i64) -> usize {
        self.automaton.letter(self.word.at(j)).expect("validated")
    }

    pub fn at(&self, i: i64, n: usize) -> S {
        self.values(i, n + 1).pop().expect("non-empty")
    }

    /// Values at `(i, 0..len)`.
    pub fn values(&self, i: i64, len: usize) -> Vec<S> {
        let a = &self.automaton;
        let mut out = vec![S::zero(); len];
        for s in initial_rows(a) {
            let mut y = unit(a.num_states(), s);
            for (n, slot) in out.iter_mut().enumerate() {
                *slot = slot.add(&masked_sum(a, &self.verdict, s, &y));
                y = vec_mul(&y, &a.matrices()[self.letter(i + n as i64)]);
            }
        }
        out
    }

    pub fn grid(self) -> BiWeightGrid<S> {
        BiWeightGrid::new(move |i, n| self.at(i, n))
    }
}
