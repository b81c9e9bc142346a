//! Size reduction that preserves the series of finite words.

use super::Automaton;
use crate::error::{Error, Result};
use crate::matrix::{dot, vec_mul, Matrix};
use crate::semiring::Semiring;
use crate::words::Alphabet;

/// Drops states that are not both reachable from an initial state and able
/// to reach a final state. Every behavior is preserved.
pub fn trim<S: Semiring>(a: &Automaton<S>) -> Automaton<S> {
    let n = a.num_states();
    let edge = |i: usize, j: usize| a.matrices().iter().any(|m| !m.get(i, j).is_zero());
    let closure = |seed: Vec<bool>, forward: bool| {
        let mut mark = seed;
        let mut stack: Vec<usize> = (0..n).filter(|&k| mark[k]).collect();
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let e = if forward { edge(i, j) } else { edge(j, i) };
                if e && !mark[j] {
                    mark[j] = true;
                    stack.push(j);
                }
            }
        }
        mark
    };
    let acc = closure(a.initial().iter().map(|x| !x.is_zero()).collect(), true);
    let coacc = closure(a.final_weights().iter().map(|x| !x.is_zero()).collect(), false);
    let keep: Vec<usize> = (0..n).filter(|&k| acc[k] && coacc[k]).collect();
    Automaton::from_raw(
        a.alphabet().clone(),
        keep.iter().map(|&k| a.states()[k]).collect(),
        keep.iter().map(|&k| a.initial()[k].clone()).collect(),
        keep.iter().map(|&k| a.final_weights()[k].clone()).collect(),
        a.matrices().iter().map(|m| m.restrict(&keep)).collect(),
    )
}

/// Incremental row-echelon basis of a subspace of `Sⁿ`.
struct Basis<S> {
    vectors: Vec<Vec<S>>,
    /// Echelon rows with their pivot and their expression in `vectors`.
    echelon: Vec<(usize, Vec<S>, Vec<S>)>,
}

impl<S: Semiring> Basis<S> {
    fn new() -> Self {
        Basis { vectors: Vec::new(), echelon: Vec::new() }
    }

    /// Coordinates of `v` over the basis, or `None` if `v` is independent.
    fn coordinates(&self, v: &[S]) -> (Vec<S>, Option<Vec<S>>) {
        let mut r = v.to_vec();
        let mut coords = vec![S::zero(); self.vectors.len()];
        for (p, row, expr) in &self.echelon {
            let c = r[*p].clone();
            if c.is_zero() {
                continue;
            }
            let neg = c.negate().expect("field");
            for (x, y) in r.iter_mut().zip(row) {
                *x = x.add(&neg.mul(y));
            }
            for (x, y) in coords.iter_mut().zip(expr) {
                *x = x.add(&c.mul(y));
            }
        }
        let residual = r.iter().any(|x| !x.is_zero()).then_some(r);
        (coords, residual)
    }

    /// Adds `v` given its reduction; returns its index.
    fn push(&mut self, v: Vec<S>, coords: Vec<S>, residual: Vec<S>) -> usize {
        let k = self.vectors.len();
        self.vectors.push(v);
        let p = residual.iter().position(|x| !x.is_zero()).expect("non-zero");
        let inv = residual[p].inverse().expect("field");
        let mut expr: Vec<S> = coords.iter().map(|c| c.negate().expect("field")).collect();
        expr.push(S::one());
        let row = residual.iter().map(|x| x.mul(&inv)).collect();
        let expr = expr.iter().map(|x| x.mul(&inv)).collect();
        for (_, _, e) in &mut self.echelon {
            e.push(S::zero());
        }
        self.echelon.push((p, row, expr));
        k
    }
}

type Linear<S> = (Vec<S>, Vec<S>, Vec<Matrix<S>>);

/// Restriction to the span of the reachable vectors `I·M(w)`.
fn forward<S: Semiring>(init: &[S], fin: &[S], mats: &[Matrix<S>]) -> Linear<S> {
    let mut basis = Basis::new();
    let mut images: Vec<Vec<Vec<S>>> = Vec::new();
    if init.iter().any(|x| !x.is_zero()) {
        basis.push(init.to_vec(), Vec::new(), init.to_vec());
    }
    let mut k = 0;
    while k < basis.vectors.len() {
        let mut row = Vec::new();
        for m in mats {
            let v = vec_mul(&basis.vectors[k], m);
            let (coords, residual) = basis.coordinates(&v);
            match residual {
                None => row.push(coords),
                Some(r) => {
                    let idx = basis.push(v, coords, r);
                    let mut c = vec![S::zero(); idx + 1];
                    c[idx] = S::one();
                    row.push(c);
                }
            }
        }
        images.push(row);
        k += 1;
    }
    let d = basis.vectors.len();
    let mut new_mats = vec![Matrix::zero(d); mats.len()];
    for (i, row) in images.iter().enumerate() {
        for (a, coords) in row.iter().enumerate() {
            for (j, c) in coords.iter().enumerate() {
                new_mats[a].set(i, j, c.clone());
            }
        }
    }
    let mut new_init = vec![S::zero(); d];
    if d > 0 {
        new_init[0] = S::one();
    }
    let new_fin = basis.vectors.iter().map(|b| dot(b, fin)).collect();
    (new_init, new_fin, new_mats)
}

/// A minimal automaton with the same series of finite words. Requires a
/// field; the result has fresh state ids `0..d`.
pub fn reduce<S: Semiring>(a: &Automaton<S>) -> Result<Automaton<S>> {
    if S::one().inverse().is_none() {
        return Err(Error::NotAField("reduction"));
    }
    let (i, f, m) = forward(a.initial(), a.final_weights(), a.matrices());
    let transposed: Vec<Matrix<S>> = m.iter().map(Matrix::transpose).collect();
    let (f2, i2, m2) = forward(&f, &i, &transposed);
    let mats: Vec<Matrix<S>> = m2.iter().map(Matrix::transpose).collect();
    Ok(from_linear(a.alphabet(), i2, f2, mats))
}

fn from_linear<S: Semiring>(alphabet: &Alphabet, i: Vec<S>, f: Vec<S>, m: Vec<Matrix<S>>) -> Automaton<S> {
    let d = i.len();
    let mut out = Automaton::with_states(alphabet.clone(), d);
    out.initial = i;
    out.final_weights = f;
    out.transitions = m;
    out
}
