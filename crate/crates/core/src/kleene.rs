//! Translations between expressions and automata at all three levels.

use std::collections::HashMap;

use crate::activation::{recurs_bidiverging, recurs_diverging, ActivationMethod};
use crate::automaton::{
    conjoin2, conjoin3, decompose_bidiverging, decompose_diverging, disjoin2, disjoin3, normalize, reduce, roll, trim,
    unroll, Automaton, StateId,
};
use crate::error::{Error, Result};
use crate::matrix::{dot, mul_vec, vec_mul, Matrix};
use crate::semiring::{Rational, Semiring};
use crate::series::{BiDivExpr, ConvExpr, ConvNode, DivExpr};
use crate::words::{Alphabet, BiInfiniteWord, InfiniteWord, Symbol};

fn is_field<S: Semiring>() -> bool {
    S::one().inverse().is_some()
}

/// Replaces `a` by a smaller automaton with the same series when one is
/// found; normalized inputs stay normalized.
fn shrink<S: Semiring>(a: Automaton<S>) -> Automaton<S> {
    let t = trim(&a);
    let t = if t.num_states() < a.num_states() && (!a.is_normalized() || t.is_normalized()) { t } else { a };
    if !is_field::<S>() || t.num_states() <= 4 {
        return t;
    }
    let Ok(r) = reduce(&t) else { return t };
    if t.is_normalized() {
        match normalize(&r) {
            Ok(n) if n.num_states() < t.num_states() => n,
            _ => t,
        }
    } else if r.num_states() < t.num_states() {
        r
    } else {
        t
    }
}

/// `l·a·r` keeping a normalized automaton normalized: the scalars go on the
/// edges leaving the initial and entering the final state.
fn scale_edges<S: Semiring>(a: &Automaton<S>, l: &S, r: &S) -> Automaton<S> {
    if l.is_zero() || r.is_zero() {
        return Automaton::with_states(a.alphabet().clone(), 0);
    }
    let (s, t) = a.bridge_states().expect("normalized");
    let mats = a
        .matrices()
        .iter()
        .map(|m| {
            let mut out = m.clone();
            for j in 0..m.dim() {
                out.set(s, j, l.mul(m.get(s, j)));
            }
            for i in 0..m.dim() {
                out.set(i, t, out.get(i, t).mul(r));
            }
            out
        })
        .collect();
    Automaton::from_raw(
        a.alphabet().clone(),
        a.states().to_vec(),
        a.initial().to_vec(),
        a.final_weights().to_vec(),
        mats,
    )
}

/// Layout of two automata glued along at most two pairs of states.
/// `merge[k]` is the position in `a` that position `k` of `b` is merged
/// into, if any.
fn glue<S: Semiring>(
    a: &Automaton<S>,
    b: &Automaton<S>,
    merge: &[Option<usize>],
) -> (Vec<usize>, Vec<Matrix<S>>, usize) {
    let n = a.num_states();
    let mut pos = Vec::with_capacity(b.num_states());
    let mut next = n;
    for m in merge {
        pos.push(m.unwrap_or_else(|| {
            next += 1;
            next - 1
        }));
    }
    let mats = a
        .matrices()
        .iter()
        .zip(b.matrices())
        .map(|(ma, mb)| {
            let mut out = Matrix::zero(next);
            crate::automaton::copy_block(&mut out, ma, 0);
            for i in 0..mb.dim() {
                for j in 0..mb.dim() {
                    let v = mb.get(i, j);
                    if !v.is_zero() {
                        out.add_at(pos[i], pos[j], v);
                    }
                }
            }
            out
        })
        .collect();
    (pos, mats, next)
}

fn ids(n: usize) -> Vec<StateId> {
    (0..n as u64).map(StateId).collect()
}

/// Sum of two normalized automata sharing their initial and final states.
fn merged_sum<S: Semiring>(a: &Automaton<S>, b: &Automaton<S>) -> Automaton<S> {
    let (sa, ta) = a.bridge_states().expect("normalized");
    let (sb, tb) = b.bridge_states().expect("normalized");
    let merge: Vec<Option<usize>> = (0..b.num_states())
        .map(|k| {
            if k == sb {
                Some(sa)
            } else if k == tb {
                Some(ta)
            } else {
                None
            }
        })
        .collect();
    let (_, mats, n) = glue(a, b, &merge);
    let mut i = vec![S::zero(); n];
    let mut f = vec![S::zero(); n];
    i[sa] = S::one();
    f[ta] = S::one();
    Automaton::from_raw(a.alphabet().clone(), ids(n), i, f, mats)
}

/// Concatenation of two normalized automata, merging the final state of
/// `a` with the initial state of `b`.
fn merged_cat<S: Semiring>(a: &Automaton<S>, b: &Automaton<S>) -> Automaton<S> {
    let (sa, ta) = a.bridge_states().expect("normalized");
    let (sb, tb) = b.bridge_states().expect("normalized");
    let merge: Vec<Option<usize>> = (0..b.num_states()).map(|k| (k == sb).then_some(ta)).collect();
    let (pos, mats, n) = glue(a, b, &merge);
    let mut i = vec![S::zero(); n];
    let mut f = vec![S::zero(); n];
    i[sa] = S::one();
    f[pos[tb]] = S::one();
    Automaton::from_raw(a.alphabet().clone(), ids(n), i, f, mats)
}

/// Concatenation in general. A fresh initial state `s` handles the splits
/// where `a` reads the empty word or only the first letter.
fn general_cat<S: Semiring>(a: &Automaton<S>, b: &Automaton<S>) -> Automaton<S> {
    let (na, nb) = (a.num_states(), b.num_states());
    let n = 1 + na + nb;
    let ca = dot(a.initial(), a.final_weights());
    let cb = dot(b.initial(), b.final_weights());
    let mats = a
        .matrices()
        .iter()
        .zip(b.matrices())
        .map(|(ma, mb)| {
            let mut out = Matrix::zero(n);
            crate::automaton::copy_block(&mut out, ma, 1);
            crate::automaton::copy_block(&mut out, mb, 1 + na);
            // Leaving `a` on this letter and entering `b`.
            let exit = mul_vec(ma, a.final_weights());
            let from_s_a = vec_mul(a.initial(), ma);
            let from_s_b = vec_mul(b.initial(), mb);
            let exit_s = dot(&from_s_a, a.final_weights());
            for q in 0..na {
                out.set(0, 1 + q, from_s_a[q].clone());
            }
            for r in 0..nb {
                let mut v = ca.mul(&from_s_b[r]);
                v = v.add(&exit_s.mul(&b.initial()[r]));
                out.set(0, 1 + na + r, v);
                for p in 0..na {
                    let jump = exit[p].mul(&b.initial()[r]);
                    if !jump.is_zero() {
                        out.add_at(1 + p, 1 + na + r, &jump);
                    }
                }
            }
            out
        })
        .collect();
    let mut i = vec![S::zero(); n];
    i[0] = S::one();
    let mut f = vec![ca.mul(&cb)];
    // `a` finishing is handled by the jump edges into `b`.
    f.extend(std::iter::repeat_n(S::zero(), na));
    f.extend(b.final_weights().iter().cloned());
    Automaton::from_raw(a.alphabet().clone(), ids(n), i, f, mats)
}

fn as_normalized<S: Semiring>(a: &Automaton<S>) -> Result<Automaton<S>> {
    if a.is_normalized() {
        Ok(a.clone())
    } else {
        normalize(a)
    }
}

fn compile_node<S: Semiring>(
    e: &ConvExpr<S>,
    alphabet: &Alphabet,
    memo: &mut HashMap<*const ConvNode<S>, Automaton<S>>,
) -> Result<Automaton<S>> {
    let key = e.node() as *const ConvNode<S>;
    if let Some(a) = memo.get(&key) {
        return Ok(a.clone());
    }
    let out = match e.node() {
        ConvNode::Atom(sym, c) => {
            let k = alphabet.index_of(sym).ok_or_else(|| Error::UnknownSymbol(sym.to_string()))?;
            let mut mats = vec![Matrix::zero(2); alphabet.len()];
            mats[k].set(0, 1, c.clone());
            Automaton::from_raw(alphabet.clone(), ids(2), vec![S::one(), S::zero()], vec![S::zero(), S::one()], mats)
        }
        ConvNode::Sum(terms) => {
            let mut acc: Option<Automaton<S>> = None;
            for t in terms {
                let b = compile_node(t, alphabet, memo)?;
                acc = Some(match acc {
                    None => b,
                    Some(a) if a.is_normalized() && b.is_normalized() => merged_sum(&a, &b),
                    Some(a) => a.sum(&b)?,
                });
            }
            acc.unwrap_or_else(|| Automaton::with_states(alphabet.clone(), 0))
        }
        ConvNode::Cat(x, y) => {
            let a = compile_node(x, alphabet, memo)?;
            let b = compile_node(y, alphabet, memo)?;
            if a.is_normalized() && b.is_normalized() {
                merged_cat(&a, &b)
            } else {
                general_cat(&a, &b)
            }
        }
        ConvNode::Star(x) => {
            let a = compile_node(x, alphabet, memo)?;
            if !dot(a.initial(), a.final_weights()).is_zero() {
                return Err(Error::ImproperStar);
            }
            roll(&as_normalized(&a)?)?
        }
        ConvNode::Scale(l, x, r) => {
            let a = compile_node(x, alphabet, memo)?;
            if a.is_normalized() {
                scale_edges(&a, l, r)
            } else {
                a.scale(l, r)
            }
        }
    };
    let out = shrink(out);
    memo.insert(key, out.clone());
    Ok(out)
}

/// An automaton over `alphabet` whose series is `e`. Atoms and their sums
/// and concatenations compile to normalized automata.
pub fn compile_conv<S: Semiring>(e: &ConvExpr<S>, alphabet: &Alphabet) -> Result<Automaton<S>> {
    compile_node(e, alphabet, &mut HashMap::new())
}

/// The automaton on which recurrence of a series is decided: reduced over a
/// field, reduced over the rationals through `support_witness` for
/// zero-sum-free semirings, trimmed otherwise.
#[derive(Clone, Debug)]
pub enum Recurrence<S> {
    Native(Automaton<S>),
    Rational(Automaton<Rational>),
}

/// Compiles `x` once for any number of recurrence tests.
pub fn compile_recurrence<S: Semiring>(x: &ConvExpr<S>) -> Result<Recurrence<S>> {
    let alphabet = Alphabet::new(x.symbols());
    if is_field::<S>() {
        return Ok(Recurrence::Native(reduce(&compile_conv(x, &alphabet)?)?));
    }
    if S::one().support_witness().is_some() {
        let xr = x.map(&|c: &S| c.support_witness().expect("zero-sum-free"));
        return Ok(Recurrence::Rational(reduce(&compile_conv(&xr, &alphabet)?)?));
    }
    Ok(Recurrence::Native(trim(&compile_conv(x, &alphabet)?)))
}

impl<S: Semiring> Recurrence<S> {
    /// Whether the series is non-zero on infinitely many prefixes of `w`.
    pub fn diverging(&self, w: &InfiniteWord, method: ActivationMethod) -> Result<bool> {
        let letters = [w.prefix(), w.cycle()];
        match self {
            Recurrence::Native(a) => recurs_diverging(&widen(a, &letters)?, w, method),
            Recurrence::Rational(a) => recurs_diverging(&widen(a, &letters)?, w, method),
        }
    }

    /// Whether every window of `w` lies in a factor with non-zero coefficient.
    pub fn bidiverging(&self, w: &BiInfiniteWord, method: ActivationMethod) -> Result<bool> {
        let letters = [w.left(), w.center(), w.right()];
        match self {
            Recurrence::Native(a) => recurs_bidiverging(&widen(a, &letters)?, w, method),
            Recurrence::Rational(a) => recurs_bidiverging(&widen(a, &letters)?, w, method),
        }
    }
}

fn widen<T: Semiring>(a: &Automaton<T>, letters: &[&[Symbol]]) -> Result<Automaton<T>> {
    let mut syms = a.alphabet().symbols().to_vec();
    syms.extend(letters.iter().flat_map(|l| l.iter().cloned()));
    a.widen_alphabet(&Alphabet::new(syms))
}

/// A rational expression for the series of `a`, by state elimination in
/// ascending state id order.
pub fn extract_conv<S: Semiring>(a: &Automaton<S>) -> ConvExpr<S> {
    let n = a.num_states();
    // Positions 0..n are states, n is the source and n + 1 the sink.
    let (src, snk) = (n, n + 1);
    let mut label: HashMap<(usize, usize), ConvExpr<S>> = HashMap::new();
    let eps = |c: &S| ConvExpr::scale(c.clone(), ConvExpr::epsilon(), S::one());
    for i in 0..n {
        for j in 0..n {
            let terms: Vec<ConvExpr<S>> = a
                .alphabet()
                .symbols()
                .iter()
                .zip(a.matrices())
                .filter(|(_, m)| !m.get(i, j).is_zero())
                .map(|(s, m)| ConvExpr::atom(s.clone(), m.get(i, j).clone()))
                .collect();
            match terms.len() {
                0 => {}
                1 => {
                    label.insert((i, j), terms.into_iter().next().expect("one"));
                }
                _ => {
                    label.insert((i, j), ConvExpr::sum(terms));
                }
            }
        }
        if !a.initial()[i].is_zero() {
            label.insert((src, i), eps(&a.initial()[i]));
        }
        if !a.final_weights()[i].is_zero() {
            label.insert((i, snk), eps(&a.final_weights()[i]));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| a.states()[k]);
    let mut alive: Vec<usize> = order.clone();
    for &k in &order {
        alive.retain(|&q| q != k);
        let loop_star = label.remove(&(k, k)).map(ConvExpr::star);
        let ins: Vec<(usize, ConvExpr<S>)> =
            alive.iter().copied().chain([src]).filter_map(|i| label.remove(&(i, k)).map(|l| (i, l))).collect();
        let outs: Vec<(usize, ConvExpr<S>)> =
            alive.iter().copied().chain([snk]).filter_map(|j| label.remove(&(k, j)).map(|l| (j, l))).collect();
        for (i, li) in &ins {
            let through = match &loop_star {
                Some(s) => ConvExpr::cat(li.clone(), s.clone()),
                None => li.clone(),
            };
            for (j, lj) in &outs {
                let path = ConvExpr::cat(through.clone(), lj.clone());
                let v = match label.remove(&(*i, *j)) {
                    Some(old) => ConvExpr::sum(vec![old, path]),
                    None => path,
                };
                label.insert((*i, *j), v);
            }
        }
    }
    label.remove(&(src, snk)).unwrap_or_else(ConvExpr::zero)
}

/// A loopback-with-prelude or loopback automaton sum for `e`.
pub fn compile_div<S: Semiring>(e: &DivExpr<S>, alphabet: &Alphabet) -> Result<Automaton<S>> {
    let c = e.to_characteristic()?;
    let mut acc = Automaton::with_states(alphabet.clone(), 0);
    for (l, x, y, r) in &c.conjoins {
        let xa = as_normalized(&compile_conv(x, alphabet)?)?;
        let ya = as_normalized(&compile_conv(y, alphabet)?)?;
        acc = acc.sum(&conjoin2(&xa, &ya)?.scale(l, r))?;
    }
    for (l, z, r) in &c.omegas {
        let za = as_normalized(&compile_conv(z, alphabet)?)?;
        acc = acc.sum(&roll(&za)?.scale(l, r))?;
    }
    Ok(acc)
}

/// A sum of bridge and loopback automata for `e`.
pub fn compile_bidiv<S: Semiring>(e: &BiDivExpr<S>, alphabet: &Alphabet) -> Result<Automaton<S>> {
    let c = e.to_characteristic()?;
    let mut acc = Automaton::with_states(alphabet.clone(), 0);
    for (l, x, m, y, r) in &c.conjoins {
        let xa = as_normalized(&compile_conv(x, alphabet)?)?;
        let ma = as_normalized(&compile_conv(m, alphabet)?)?;
        let ya = as_normalized(&compile_conv(y, alphabet)?)?;
        acc = acc.sum(&conjoin3(&xa, &ma, &ya)?.scale(l, r))?;
    }
    for (l, z, r) in &c.zetas {
        let za = as_normalized(&compile_conv(z, alphabet)?)?;
        acc = acc.sum(&roll(&za)?.scale(l, r))?;
    }
    Ok(acc)
}

/// A divergent expression for the diverging behavior of `a`.
pub fn extract_div<S: Semiring>(a: &Automaton<S>) -> Result<DivExpr<S>> {
    let mut terms = Vec::new();
    for p in decompose_diverging(a).parts {
        let e = if p.automaton.is_loopback() {
            DivExpr::omega(extract_conv(&unroll(&p.automaton)?))
        } else {
            let (x, y) = disjoin2(&p.automaton)?;
            DivExpr::conjoin(extract_conv(&x), extract_conv(&y))
        };
        terms.push(DivExpr::scale(p.left, e, p.right));
    }
    Ok(DivExpr::Sum(terms))
}

/// A bidivergent expression for the bidiverging behavior of `a`.
pub fn extract_bidiv<S: Semiring>(a: &Automaton<S>) -> Result<BiDivExpr<S>> {
    let mut terms = Vec::new();
    for p in decompose_bidiverging(a).parts {
        let e = if p.automaton.is_loopback() {
            BiDivExpr::zeta(extract_conv(&unroll(&p.automaton)?))
        } else {
            let (x, m, y) = disjoin3(&p.automaton)?;
            BiDivExpr::conjoin3(extract_conv(&x), extract_conv(&m), extract_conv(&y))
        };
        terms.push(BiDivExpr::scale(p.left, e, p.right));
    }
    Ok(BiDivExpr::Sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::ActivationMethod;
    use crate::automaton::tests::{figure1, path_sum};
    use crate::automaton::{AutomatonClass, BiDivergingBehavior, DivergingBehavior};
    use crate::semiring::Natural;
    use crate::series::{conv_coeff, BiDivEvaluation, ChiMethod, DivEvaluation};
    use crate::words::{symbols, BiInfiniteWord, FiniteWord, InfiniteWord, Symbol};

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"])
    }

    fn all_words(max: usize) -> Vec<Vec<Symbol>> {
        let mut out = vec![vec![]];
        let mut layer: Vec<Vec<Symbol>> = vec![vec![]];
        for _ in 0..max {
            layer = layer
                .iter()
                .flat_map(|w| {
                    ["a", "b"].map(|s| {
                        let mut v = w.clone();
                        v.push(Symbol::new(s));
                        v
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    fn n(c: u64) -> Natural {
        Natural::new(c)
    }

    #[test]
    fn atom_and_star() {
        let a = compile_conv(&ConvExpr::atom("a", n(3)), &ab()).unwrap();
        assert_eq!(a.num_states(), 2);
        assert_eq!(a.classify(), AutomatonClass::Normalized);
        let s = compile_conv(&ConvExpr::star(ConvExpr::atom("a", n(2))), &ab()).unwrap();
        assert_eq!(s.weight(&FiniteWord::new(symbols("a a a"))).unwrap(), n(8));
        assert_eq!(s.weight(&FiniteWord::empty()).unwrap(), n(1));
    }

    #[test]
    fn compiled_series_match_coefficients() {
        let a = |c| ConvExpr::atom("a", n(c));
        let b = |c| ConvExpr::atom("b", n(c));
        let exprs = vec![
            ConvExpr::cat(ConvExpr::star(a(2)), b(3)),
            ConvExpr::cat(ConvExpr::star(a(1)), ConvExpr::star(b(2))),
            ConvExpr::sum(vec![ConvExpr::epsilon(), ConvExpr::cat(a(1), ConvExpr::star(b(1)))]),
            ConvExpr::star(ConvExpr::sum(vec![a(1), ConvExpr::cat(b(2), a(1))])),
            ConvExpr::scale(n(2), ConvExpr::cat(ConvExpr::epsilon(), ConvExpr::star(a(3))), n(5)),
            ConvExpr::zero(),
        ];
        for e in exprs {
            let aut = compile_conv(&e, &ab()).unwrap();
            for w in all_words(5) {
                let fw = FiniteWord::new(w.clone());
                assert_eq!(path_sum(&aut, &w), conv_coeff(&e, &fw).unwrap(), "{e} on {fw}");
            }
        }
    }

    #[test]
    fn extraction_matches_weights() {
        let a = figure1();
        let e = extract_conv(&a);
        for w in all_words(6) {
            assert_eq!(conv_coeff(&e, &FiniteWord::new(w.clone())).unwrap(), path_sum(&a, &w));
        }
        let zero = Automaton::<Natural>::with_states(ab(), 3);
        assert_eq!(extract_conv(&zero), ConvExpr::zero());
        // Initial and final on the same state.
        let mut l = Automaton::<Natural>::with_states(ab(), 2);
        l.set_initial(StateId(0), n(2)).unwrap();
        l.set_final(StateId(0), n(3)).unwrap();
        l.set_final(StateId(1), n(1)).unwrap();
        l.add_transition(StateId(0), StateId(0), &"a".into(), n(2)).unwrap();
        l.add_transition(StateId(0), StateId(1), &"b".into(), n(1)).unwrap();
        l.add_transition(StateId(1), StateId(0), &"a".into(), n(1)).unwrap();
        let e = extract_conv(&l);
        for w in all_words(6) {
            assert_eq!(conv_coeff(&e, &FiniteWord::new(w.clone())).unwrap(), path_sum(&l, &w));
        }
    }

    #[test]
    fn div_round_trip_on_figure1() {
        let a = figure1();
        let e = extract_div(&a).unwrap();
        let back = compile_div(&e, a.alphabet()).unwrap();
        for (u, v) in [("a b", "a"), ("b b", "a"), ("", "a b"), ("", "b")] {
            let w = InfiniteWord::new(symbols(u), symbols(v)).unwrap();
            let x = DivergingBehavior::new(&a, &w, ActivationMethod::Exact).unwrap().values(12);
            let y = DivEvaluation::new(&e, &w, ChiMethod::default()).unwrap().values(12).unwrap();
            let z = DivergingBehavior::new(&back, &w, ActivationMethod::Exact).unwrap().values(12);
            assert_eq!(x, y, "{w}");
            assert_eq!(x, z, "{w}");
        }
    }

    #[test]
    fn bidiv_round_trip() {
        let one = n(1);
        let e = BiDivExpr::Sum(vec![
            BiDivExpr::conjoin3(
                ConvExpr::atom("a", one.clone()),
                ConvExpr::atom("b", n(2)),
                ConvExpr::atom("a", one.clone()),
            ),
            BiDivExpr::zeta(ConvExpr::atom("a", n(1))),
        ]);
        let a = compile_bidiv(&e, &ab()).unwrap();
        let back = extract_bidiv(&a).unwrap();
        for (l, m, r) in [("a", "b", "a"), ("a", "", "a"), ("b", "a", "a")] {
            let w = BiInfiniteWord::new(symbols(l), symbols(m), symbols(r)).unwrap();
            let x = BiDivEvaluation::new(&e, &w, ChiMethod::default()).unwrap();
            let y = BiDivergingBehavior::new(&a, &w, ActivationMethod::Exact).unwrap();
            let z = BiDivEvaluation::new(&back, &w, ChiMethod::default()).unwrap();
            for i in -3..=3 {
                let xs = x.values(i, 8).unwrap();
                assert_eq!(xs, y.values(i, 8), "{w} at {i}");
                assert_eq!(xs, z.values(i, 8).unwrap(), "{w} at {i}");
            }
        }
    }

    #[test]
    fn magnetization_shape_compiles_to_two_states() {
        let i = ConvExpr::sum(vec![ConvExpr::atom("a", n(1)), ConvExpr::atom("b", n(1))]);
        let e = BiDivExpr::conjoin3(i.clone(), ConvExpr::atom("a", n(1)), i);
        assert_eq!(compile_bidiv(&e, &ab()).unwrap().num_states(), 2);
    }
}
