//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::Path;

use divergent::automaton::{Automaton, StateId};
use divergent::format;
use divergent::semiring::{Boolean, Gaussian, Natural, Rational, Semiring};
use divergent::series::{BiDivExpr, ConvExpr, DivExpr};
use divergent::words::{Alphabet, BiInfiniteWord, FiniteWord, InfiniteWord, Symbol};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture<S: Semiring>(name: &str) -> Automaton<S> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    format::parse_automaton(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn ab() -> Alphabet {
    Alphabet::from_names(&["a", "b"])
}

/// Small non-zero weights.
pub trait Sample: Semiring {
    fn sample(rng: &mut ChaCha8Rng) -> Self;
}

impl Sample for Boolean {
    fn sample(_: &mut ChaCha8Rng) -> Self {
        Boolean(true)
    }
}

impl Sample for Natural {
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        Natural::new(rng.gen_range(1..=3))
    }
}

impl Sample for Rational {
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        let p = *[-2i64, -1, 1, 2, 3].choose(rng).unwrap();
        Rational::new(p, rng.gen_range(1..=2))
    }
}

impl Sample for Gaussian {
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        Gaussian::new(Rational::sample(rng), Rational::new(rng.gen_range(-1..=1), 1))
    }
}

/// Random automaton on states `0..n`; each transition is present with
/// probability `density`, and `forbid(from, to)` removes transitions.
pub fn random_automaton<S: Sample>(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    n: usize,
    density: f64,
    forbid: &dyn Fn(usize, usize) -> bool,
) -> Automaton<S> {
    let mut a = Automaton::with_states(alphabet.clone(), n);
    for s in alphabet.symbols() {
        for i in 0..n {
            for j in 0..n {
                if !forbid(i, j) && rng.gen_bool(density) {
                    a.add_transition(StateId(i as u64), StateId(j as u64), s, S::sample(rng)).unwrap();
                }
            }
        }
    }
    a
}

/// Random initial and final weights, each non-zero with probability one half.
pub fn random_general<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, n: usize) -> Automaton<S> {
    let mut a = random_automaton::<S>(rng, alphabet, n, 0.35, &|_, _| false);
    for k in 0..n {
        if rng.gen_bool(0.5) {
            a.set_initial(StateId(k as u64), S::sample(rng)).unwrap();
        }
        if rng.gen_bool(0.5) {
            a.set_final(StateId(k as u64), S::sample(rng)).unwrap();
        }
    }
    a
}

fn with_units<S: Semiring>(mut a: Automaton<S>, i: usize, f: usize) -> Automaton<S> {
    a.set_initial(StateId(i as u64), S::one()).unwrap();
    a.set_final(StateId(f as u64), S::one()).unwrap();
    a
}

/// Initial state 0, final state `n - 1`; no transitions into 0 or out of `n - 1`.
pub fn random_normalized<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, n: usize) -> Automaton<S> {
    assert!(n >= 2);
    let a = random_automaton::<S>(rng, alphabet, n, 0.45, &|i, j| j == 0 || i == n - 1);
    with_units(a, 0, n - 1)
}

/// Initial and final state 0.
pub fn random_loopback<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, n: usize) -> Automaton<S> {
    let a = random_automaton::<S>(rng, alphabet, n, 0.45, &|_, _| false);
    with_units(a, 0, 0)
}

/// Initial state 0 without incoming transitions, final state 1.
pub fn random_prelude<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, n: usize) -> Automaton<S> {
    assert!(n >= 2);
    let a = random_automaton::<S>(rng, alphabet, n, 0.45, &|_, j| j == 0);
    with_units(a, 0, 1)
}

/// Initial state 0, final state 1, any transitions.
pub fn random_bridge<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, n: usize) -> Automaton<S> {
    assert!(n >= 2);
    let a = random_automaton::<S>(rng, alphabet, n, 0.45, &|_, _| false);
    with_units(a, 0, 1)
}

fn random_symbol(rng: &mut ChaCha8Rng, alphabet: &Alphabet) -> Symbol {
    alphabet.symbols().choose(rng).unwrap().clone()
}

/// A converging expression with a zero empty-word coefficient.
pub fn random_proper<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, depth: usize) -> ConvExpr<S> {
    if depth == 0 {
        return ConvExpr::atom(random_symbol(rng, alphabet), S::sample(rng));
    }
    match rng.gen_range(0..4) {
        0 => ConvExpr::atom(random_symbol(rng, alphabet), S::sample(rng)),
        1 => ConvExpr::sum(vec![random_proper(rng, alphabet, depth - 1), random_proper(rng, alphabet, depth - 1)]),
        2 => {
            let (x, y) = (random_proper(rng, alphabet, depth - 1), random_conv(rng, alphabet, depth - 1));
            if rng.gen_bool(0.5) {
                ConvExpr::cat(x, y)
            } else {
                ConvExpr::cat(y, x)
            }
        }
        _ => ConvExpr::scale(S::sample(rng), random_proper(rng, alphabet, depth - 1), S::sample(rng)),
    }
}

/// A converging expression; stars only wrap proper operands.
pub fn random_conv<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, depth: usize) -> ConvExpr<S> {
    if depth > 0 && rng.gen_bool(0.3) {
        ConvExpr::star(random_proper(rng, alphabet, depth - 1))
    } else {
        random_proper(rng, alphabet, depth)
    }
}

pub fn random_div<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, depth: usize) -> DivExpr<S> {
    let d = depth.saturating_sub(1);
    match rng.gen_range(0..if depth > 1 { 4 } else { 2 }) {
        0 => DivExpr::omega(random_proper(rng, alphabet, d)),
        1 => DivExpr::conjoin(random_proper(rng, alphabet, d), random_proper(rng, alphabet, d)),
        2 => DivExpr::Sum(vec![random_div(rng, alphabet, d), random_div(rng, alphabet, d)]),
        _ => DivExpr::scale(S::sample(rng), random_div(rng, alphabet, d), S::sample(rng)),
    }
}

pub fn random_bidiv<S: Sample>(rng: &mut ChaCha8Rng, alphabet: &Alphabet, depth: usize) -> BiDivExpr<S> {
    let d = depth.saturating_sub(1);
    match rng.gen_range(0..if depth > 1 { 4 } else { 2 }) {
        0 => BiDivExpr::zeta(random_proper(rng, alphabet, d)),
        1 => BiDivExpr::conjoin3(
            random_proper(rng, alphabet, d),
            random_proper(rng, alphabet, d),
            random_proper(rng, alphabet, d),
        ),
        2 => BiDivExpr::Sum(vec![random_bidiv(rng, alphabet, d), random_bidiv(rng, alphabet, d)]),
        _ => BiDivExpr::scale(S::sample(rng), random_bidiv(rng, alphabet, d), S::sample(rng)),
    }
}

fn syms(text: &str) -> Vec<Symbol> {
    text.split_whitespace().map(Symbol::new).collect()
}

/// Ultimately periodic words over `{a, b}` used for sampling.
pub fn sample_words() -> Vec<InfiniteWord> {
    [("", "a"), ("", "b"), ("", "a b"), ("b", "a"), ("a", "b"), ("a b", "a a b"), ("b b", "a"), ("a a", "b a")]
        .iter()
        .map(|(p, c)| InfiniteWord::new(syms(p), syms(c)).unwrap())
        .collect()
}

pub fn sample_biwords() -> Vec<BiInfiniteWord> {
    [("a", "", "a"), ("b", "", "a"), ("a b", "", "b"), ("a", "b", "a"), ("b", "a b", "b a")]
        .iter()
        .map(|(l, m, r)| BiInfiniteWord::new(syms(l), syms(m), syms(r)).unwrap())
        .collect()
}

/// Oracle: sum over every path, by depth-first enumeration.
pub fn path_enumeration<S: Semiring>(a: &Automaton<S>, w: &[Symbol]) -> S {
    fn walk<S: Semiring>(a: &Automaton<S>, w: &[Symbol], q: usize, acc: S, total: &mut S) {
        if acc.is_zero() {
            return;
        }
        match w.split_first() {
            None => *total = total.add(&acc.mul(&a.final_weights()[q])),
            Some((s, rest)) => {
                let m = a.matrix(s).unwrap();
                for r in 0..a.num_states() {
                    walk(a, rest, r, acc.mul(m.get(q, r)), total);
                }
            }
        }
    }
    let mut total = S::zero();
    for q in 0..a.num_states() {
        walk(a, w, q, a.initial()[q].clone(), &mut total);
    }
    total
}

/// Oracle: `M(u)` as nested vectors, by plain products.
pub fn word_matrix<S: Semiring>(a: &Automaton<S>, u: &[Symbol]) -> Vec<Vec<S>> {
    let n = a.num_states();
    let mut acc: Vec<Vec<S>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
    for s in u {
        let m = a.matrix(s).unwrap();
        acc = (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(S::zero(), |t, k| t.add(&acc[i][k].mul(m.get(k, j))))).collect())
            .collect();
    }
    acc
}

/// Oracle for the diverging behavior on an ultimately periodic word: a pair
/// counts when its entry is non-zero somewhere in `[h, 2h)`.
pub fn masked_oracle<S: Semiring>(a: &Automaton<S>, w: &InfiniteWord, len: usize, h: usize) -> Vec<S> {
    let n = a.num_states();
    let mut live = vec![vec![false; n]; n];
    for m in h..2 * h {
        let wm = word_matrix(a, w.slice(0, m).unwrap().letters());
        for i in 0..n {
            for j in 0..n {
                live[i][j] |= !wm[i][j].is_zero();
            }
        }
    }
    (0..len)
        .map(|m| {
            let wm = word_matrix(a, w.slice(0, m).unwrap().letters());
            let mut total = S::zero();
            for i in 0..n {
                for j in (0..n).filter(|&j| live[i][j]) {
                    total = total.add(&a.initial()[i].mul(&wm[i][j]).mul(&a.final_weights()[j]));
                }
            }
            total
        })
        .collect()
}

pub fn prefix(w: &InfiniteWord, n: usize) -> FiniteWord {
    w.slice(0, n).unwrap()
}
