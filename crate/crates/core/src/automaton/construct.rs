//! Normalizing, rolling and gluing automata.

use super::{copy_block, Automaton, AutomatonClass, StateId};
use crate::error::{Error, Result};
use crate::matrix::{dot, mul_vec, unit, vec_mul, Matrix};
use crate::semiring::Semiring;

fn wrong_class<S: Semiring>(expected: &'static str, a: &Automaton<S>) -> Error {
    Error::WrongClass { expected, found: a.classify().name() }
}

/// Adds a fresh initial and a fresh final state so that the initial state has
/// no incoming and the final state no outgoing transitions.
pub fn normalize<S: Semiring>(a: &Automaton<S>) -> Result<Automaton<S>> {
    if !dot(a.initial(), a.final_weights()).is_zero() {
        return Err(Error::EmptyWordAccepted);
    }
    let n = a.num_states();
    let fresh = a.fresh_id().0;
    let mut states = vec![StateId(fresh)];
    states.extend_from_slice(a.states());
    states.push(StateId(fresh + 1));
    let (s, t) = (0, n + 1);
    let transitions = a
        .matrices()
        .iter()
        .map(|m| {
            let mut out = Matrix::zero(n + 2);
            copy_block(&mut out, m, 1);
            let from_initial = vec_mul(a.initial(), m);
            let into_final = mul_vec(m, a.final_weights());
            for k in 0..n {
                out.set(s, k + 1, from_initial[k].clone());
                out.set(k + 1, t, into_final[k].clone());
            }
            out.set(s, t, dot(&from_initial, a.final_weights()));
            out
        })
        .collect();
    Ok(Automaton::from_raw(a.alphabet().clone(), states, unit(n + 2, s), unit(n + 2, t), transitions))
}

/// Merges the final state of a normalized automaton into its initial state.
pub fn roll<S: Semiring>(a: &Automaton<S>) -> Result<Automaton<S>> {
    if !a.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let (s, f) = a.bridge_states().expect("normalized");
    let keep: Vec<usize> = (0..a.num_states()).filter(|&k| k != f).collect();
    let s_new = keep.iter().position(|&k| k == s).expect("kept");
    let transitions = a
        .matrices()
        .iter()
        .map(|m| {
            let mut out = m.restrict(&keep);
            for (row, &i) in keep.iter().enumerate() {
                out.set(row, s_new, m.get(i, f).clone());
            }
            out
        })
        .collect();
    let n = keep.len();
    Ok(Automaton::from_raw(
        a.alphabet().clone(),
        keep.iter().map(|&k| a.states()[k]).collect(),
        unit(n, s_new),
        unit(n, s_new),
        transitions,
    ))
}

/// Splits the loopback state of a loopback automaton into an initial state
/// and a fresh final state.
pub fn unroll<S: Semiring>(a: &Automaton<S>) -> Result<Automaton<S>> {
    if !a.is_loopback() {
        return Err(Error::NotLoopback);
    }
    let s = a.initial_state().expect("loopback");
    let n = a.num_states();
    let mut states = a.states().to_vec();
    states.push(a.fresh_id());
    let transitions = a
        .matrices()
        .iter()
        .map(|m| {
            let mut out = Matrix::zero(n + 1);
            for i in 0..n {
                for j in 0..n {
                    if j != s {
                        out.set(i, j, m.get(i, j).clone());
                    }
                }
                out.set(i, n, m.get(i, s).clone());
            }
            out
        })
        .collect();
    Ok(Automaton::from_raw(a.alphabet().clone(), states, unit(n + 1, s), unit(n + 1, n), transitions))
}

/// Builds an automaton whose states are `parts` (source automaton index,
/// source state position) with fresh sequential ids after `first_id`.
struct Glue<'a, S> {
    sources: Vec<&'a Automaton<S>>,
    layout: Vec<(usize, usize)>,
}

impl<'a, S: Semiring> Glue<'a, S> {
    fn position(&self, src: usize, state: usize) -> usize {
        self.layout.iter().position(|&p| p == (src, state)).expect("state in layout")
    }

    /// Copies transitions of `src` between states that are both in the layout.
    fn copy_internal(&self, src: usize, out: &mut [Matrix<S>]) {
        let a = self.sources[src];
        let members: Vec<(usize, usize)> =
            self.layout.iter().enumerate().filter(|(_, p)| p.0 == src).map(|(k, p)| (k, p.1)).collect();
        for (m, o) in a.matrices().iter().zip(out.iter_mut()) {
            for &(ki, i) in &members {
                for &(kj, j) in &members {
                    let w = m.get(i, j);
                    if !w.is_zero() {
                        o.add_at(ki, kj, w);
                    }
                }
            }
        }
    }

    fn states(&self, keep_ids_of: usize) -> Vec<StateId> {
        let base = self.sources[keep_ids_of];
        let mut next = base.fresh_id().0;
        self.layout
            .iter()
            .map(|&(src, st)| {
                if src == keep_ids_of {
                    base.states()[st]
                } else {
                    next += 1;
                    StateId(next - 1)
                }
            })
            .collect()
    }
}

/// `conjoin(X, Y)`: the loopback-with-prelude automaton for `x ★ y`.
pub fn conjoin2<S: Semiring>(x: &Automaton<S>, y: &Automaton<S>) -> Result<Automaton<S>> {
    x.check_alphabet(y)?;
    if !x.is_normalized() {
        return Err(wrong_class(AutomatonClass::Normalized.name(), x));
    }
    let b = roll(y)?;
    let (x1, x2) = x.bridge_states().expect("normalized");
    let b3 = b.initial_state().expect("loopback");

    let mut layout: Vec<(usize, usize)> = (0..x.num_states()).filter(|&k| k != x2).map(|k| (0, k)).collect();
    layout.extend((0..b.num_states()).map(|k| (1, k)));
    let glue = Glue { sources: vec![x, &b], layout };
    let n = glue.layout.len();
    let mut transitions = vec![Matrix::zero(n); x.alphabet().len()];
    glue.copy_internal(0, &mut transitions);
    glue.copy_internal(1, &mut transitions);
    let target = glue.position(1, b3);
    for (m, o) in x.matrices().iter().zip(transitions.iter_mut()) {
        for (k, &(src, i)) in glue.layout.iter().enumerate() {
            if src == 0 {
                o.add_at(k, target, m.get(i, x2));
            }
        }
    }
    Ok(Automaton::from_raw(
        x.alphabet().clone(),
        glue.states(0),
        unit(n, glue.position(0, x1)),
        unit(n, target),
        transitions,
    ))
}

/// `conjoin(X, M, Y)`: the bridge automaton for `x ★ m ★ y`.
///
/// A transition of `M` from its initial straight to its final state becomes
/// a transition between the two loopback states.
pub fn conjoin3<S: Semiring>(x: &Automaton<S>, mid: &Automaton<S>, y: &Automaton<S>) -> Result<Automaton<S>> {
    x.check_alphabet(mid)?;
    x.check_alphabet(y)?;
    if !mid.is_normalized() {
        return Err(wrong_class(AutomatonClass::Normalized.name(), mid));
    }
    let a = roll(x)?;
    let b = roll(y)?;
    let a1 = a.initial_state().expect("loopback");
    let b4 = b.initial_state().expect("loopback");
    let (m2, m3) = mid.bridge_states().expect("normalized");

    let mut layout: Vec<(usize, usize)> = (0..a.num_states()).map(|k| (0, k)).collect();
    layout.extend((0..mid.num_states()).filter(|&k| k != m2 && k != m3).map(|k| (1, k)));
    layout.extend((0..b.num_states()).map(|k| (2, k)));
    let glue = Glue { sources: vec![&a, mid, &b], layout };
    let n = glue.layout.len();
    let mut transitions = vec![Matrix::zero(n); x.alphabet().len()];
    glue.copy_internal(0, &mut transitions);
    glue.copy_internal(1, &mut transitions);
    glue.copy_internal(2, &mut transitions);
    let (p1, p4) = (glue.position(0, a1), glue.position(2, b4));
    for (m, o) in mid.matrices().iter().zip(transitions.iter_mut()) {
        for (k, &(src, j)) in glue.layout.iter().enumerate() {
            if src == 1 {
                o.add_at(p1, k, m.get(m2, j));
                o.add_at(k, p4, m.get(j, m3));
            }
        }
        o.add_at(p1, p4, m.get(m2, m3));
    }
    Ok(Automaton::from_raw(x.alphabet().clone(), glue.states(0), unit(n, p1), unit(n, p4), transitions))
}

/// Inverse of [`conjoin2`] up to behavior: splits a loopback automaton with
/// prelude into normalized automata for `x` and `y`.
pub fn disjoin2<S: Semiring>(a: &Automaton<S>) -> Result<(Automaton<S>, Automaton<S>)> {
    if !a.is_loopback_with_prelude() {
        return Err(wrong_class(AutomatonClass::LoopbackWithPrelude.name(), a));
    }
    let (_, f) = a.bridge_states().expect("bridge");
    let mut x = a.clone();
    zero_row(&mut x, f);
    let at_f = a.unit_vector(f);
    let y = unroll(&a.with_weights(at_f.clone(), at_f))?;
    Ok((x, y))
}

/// Inverse of [`conjoin3`] up to behavior: splits a bridge automaton into
/// normalized automata for `x`, `m` and `y`. A successful path is split at
/// its last visit to the initial state, so the loops for `y` must avoid it;
/// otherwise a path from the final state back to the initial one is counted
/// twice.
pub fn disjoin3<S: Semiring>(a: &Automaton<S>) -> Result<(Automaton<S>, Automaton<S>, Automaton<S>)> {
    let Some((i, f)) = a.bridge_states() else {
        return Err(wrong_class(AutomatonClass::Bridge.name(), a));
    };
    let at_i = a.unit_vector(i);
    let at_f = a.unit_vector(f);
    let x = unroll(&a.with_weights(at_i.clone(), at_i))?;
    let mut loops = a.with_weights(at_f.clone(), at_f);
    zero_row(&mut loops, i);
    zero_column(&mut loops, i);
    let y = unroll(&loops)?;
    let mut mid = a.clone();
    zero_row(&mut mid, f);
    zero_column(&mut mid, i);
    Ok((x, mid, y))
}

fn zero_row<S: Semiring>(a: &mut Automaton<S>, i: usize) {
    for m in &mut a.transitions {
        for j in 0..m.dim() {
            m.set(i, j, S::zero());
        }
    }
}

fn zero_column<S: Semiring>(a: &mut Automaton<S>, j: usize) {
    for m in &mut a.transitions {
        for i in 0..m.dim() {
            m.set(i, j, S::zero());
        }
    }
}
