//! Spin chains as bidiverging series.
//!
//! States are automata over a configuration alphabet (`u` and `d` for spin
//! up and down); operators are automata over the endomorphism alphabet,
//! whose symbols are written `a->b`. A transducer applied to a state gives
//! a state over its output letters, and the dual maps every letter to `0`,
//! so a full sandwich `φ†(O(ψ))` lives over the one-letter alphabet `{0}`
//! and reduces to a sequence of scalars.

use std::collections::BTreeSet;

use crate::activation::{activation_bidiverging, ActivationMethod, ActivationVerdict};
use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::kleene::compile_bidiv;
use crate::matrix::{vec_mul, Matrix};
use crate::semiring::{Gaussian, Rational, Semiring};
use crate::series::{conv_coeff, BiDivExpr, ConvExpr};
use crate::words::{Alphabet, BiInfiniteWord, FiniteWord, Symbol};

pub const UP: &str = "u";
pub const DOWN: &str = "d";
/// The only letter of the scalar alphabet.
pub const SCALAR: &str = "0";

/// `a->b`.
pub fn endo(a: &Symbol, b: &Symbol) -> Symbol {
    Symbol::new(&format!("{a}->{b}"))
}

/// Splits `a->b` into `(a, b)`.
pub fn split_endo(s: &Symbol) -> Option<(Symbol, Symbol)> {
    let (a, b) = s.as_str().split_once("->")?;
    (!a.is_empty() && !b.is_empty()).then(|| (Symbol::new(a), Symbol::new(b)))
}

pub fn spin_alphabet() -> Alphabet {
    Alphabet::from_names(&[UP, DOWN])
}

/// All `a->b` with `a, b` in `configs`.
pub fn endo_alphabet(configs: &Alphabet) -> Alphabet {
    let s = configs.symbols();
    Alphabet::new(s.iter().flat_map(|a| s.iter().map(move |b| endo(a, b))))
}

fn endo_pairs(alphabet: &Alphabet) -> Result<Vec<(Symbol, Symbol)>> {
    alphabet
        .symbols()
        .iter()
        .map(|s| {
            split_endo(s).ok_or_else(|| Error::AlphabetMismatch(format!("`{s}` is not an endomorphism symbol `a->b`")))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// The one-site operator as a sum of weighted endomorphism atoms.
    pub fn atom(self) -> ConvExpr<Gaussian> {
        let (u, d) = (Symbol::new(UP), Symbol::new(DOWN));
        let g = Gaussian::from_integers;
        let terms = match self {
            Pauli::I => vec![(endo(&u, &u), g(1, 0)), (endo(&d, &d), g(1, 0))],
            Pauli::X => vec![(endo(&u, &d), g(1, 0)), (endo(&d, &u), g(1, 0))],
            Pauli::Y => vec![(endo(&u, &d), g(0, -1)), (endo(&d, &u), g(0, 1))],
            Pauli::Z => vec![(endo(&u, &u), g(1, 0)), (endo(&d, &d), g(-1, 0))],
        };
        ConvExpr::sum(terms.into_iter().map(|(s, c)| ConvExpr::atom(s, c)).collect())
    }
}

/// The image of the configuration `a` under a one-site operator, as
/// `(b, coefficient)` pairs with non-zero coefficients.
pub fn apply_site(op: &ConvExpr<Gaussian>, a: &Symbol) -> Result<Vec<(Symbol, Gaussian)>> {
    let targets: BTreeSet<Symbol> =
        op.symbols().iter().filter_map(split_endo).filter(|(x, _)| x == a).map(|(_, b)| b).collect();
    let mut out = Vec::new();
    for b in targets {
        let c = conv_coeff(op, &FiniteWord::new(vec![endo(a, &b)]))?;
        if !c.is_zero() {
            out.push((b, c));
        }
    }
    Ok(out)
}

fn product_ids(n: usize, m: usize) -> Vec<StateId> {
    (0..(n * m) as u64).map(StateId).collect()
}

fn kron<S: Semiring>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().flat_map(|a| y.iter().map(move |b| a.mul(b))).collect()
}

/// Adds `x ⊗ y` into `out`.
fn add_kron<S: Semiring>(out: &mut Matrix<S>, x: &Matrix<S>, y: &Matrix<S>) {
    let m = y.dim();
    for i in 0..x.dim() {
        for k in 0..x.dim() {
            let a = x.get(i, k);
            if a.is_zero() {
                continue;
            }
            for j in 0..m {
                for l in 0..m {
                    let b = y.get(j, l);
                    if !b.is_zero() {
                        out.add_at(i * m + j, k * m + l, &a.mul(b));
                    }
                }
            }
        }
    }
}

/// `O(A)`: states are pairs `(i, j)`, numbered `i·|Q_A| + j`, and
/// `M^b_{(i,j),(k,l)} = Σ_a M_O^{a->b}_{ik} · M_A^a_{jl}`.
pub fn apply_transducer<S: Semiring>(o: &Automaton<S>, a: &Automaton<S>) -> Result<Automaton<S>> {
    let pairs = endo_pairs(o.alphabet())?;
    let output = Alphabet::new(pairs.iter().map(|(_, b)| b.clone()));
    let (n, m) = (o.num_states(), a.num_states());
    let mut mats = vec![Matrix::zero(n * m); output.len()];
    for ((x, b), mo) in pairs.iter().zip(o.matrices()) {
        let Some(k) = a.alphabet().index_of(x) else { continue };
        let out = output.index_of(b).expect("collected");
        add_kron(&mut mats[out], mo, &a.matrices()[k]);
    }
    Ok(Automaton::from_raw(
        output,
        product_ids(n, m),
        kron(o.initial(), a.initial()),
        kron(o.final_weights(), a.final_weights()),
        mats,
    ))
}

/// `P ∘ O` for `O` over `A→B` and `P` over `B→C`:
/// `M^{a->c}_{(i,j),(k,l)} = Σ_b M_O^{a->b}_{ik} · M_P^{b->c}_{jl}`.
pub fn compose_transducers<S: Semiring>(p: &Automaton<S>, o: &Automaton<S>) -> Result<Automaton<S>> {
    let po = endo_pairs(o.alphabet())?;
    let pp = endo_pairs(p.alphabet())?;
    let mut symbols = BTreeSet::new();
    for (a, b) in &po {
        for (b2, c) in &pp {
            if b == b2 {
                symbols.insert(endo(a, c));
            }
        }
    }
    let alphabet = Alphabet::new(symbols);
    let (n, m) = (o.num_states(), p.num_states());
    let mut mats = vec![Matrix::zero(n * m); alphabet.len()];
    for ((a, b), mo) in po.iter().zip(o.matrices()) {
        for ((b2, c), mp) in pp.iter().zip(p.matrices()) {
            if b == b2 {
                let k = alphabet.index_of(&endo(a, c)).expect("collected");
                add_kron(&mut mats[k], mo, mp);
            }
        }
    }
    Ok(Automaton::from_raw(
        alphabet,
        product_ids(n, m),
        kron(o.initial(), p.initial()),
        kron(o.final_weights(), p.final_weights()),
        mats,
    ))
}

/// `A†`: every letter `a` becomes `a->0` and every weight is conjugated.
pub fn dual<S: Semiring>(a: &Automaton<S>) -> Automaton<S> {
    let zero = Symbol::new(SCALAR);
    let alphabet = Alphabet::new(a.alphabet().symbols().iter().map(|s| endo(s, &zero)));
    let conj = |v: &[S]| v.iter().map(Semiring::conj).collect::<Vec<S>>();
    let mats = alphabet
        .symbols()
        .iter()
        .map(|s| {
            let (x, _) = split_endo(s).expect("built above");
            a.matrix(&x).expect("same letters").map(Semiring::conj)
        })
        .collect();
    Automaton::from_raw(alphabet, a.states().to_vec(), conj(a.initial()), conj(a.final_weights()), mats)
}

/// The behavior of an automaton over `{0}` on `0^ζ`, which depends on the
/// window length only.
#[derive(Clone, Debug)]
pub struct ScalarSequence<S> {
    automaton: Automaton<S>,
    verdict: ActivationVerdict,
}

impl<S: Semiring> ScalarSequence<S> {
    pub fn new(a: &Automaton<S>, method: ActivationMethod) -> Result<Self> {
        let zero = Symbol::new(SCALAR);
        let alphabet = Alphabet::new([zero.clone()]);
        let a = a.widen_alphabet(&alphabet)?;
        let w = BiInfiniteWord::periodic(vec![zero])?;
        let verdict = activation_bidiverging(&a, &w, method)?;
        Ok(ScalarSequence { automaton: a, verdict })
    }

    pub fn automaton(&self) -> &Automaton<S> {
        &self.automaton
    }

    fn masked(&self, i: usize, row: &[S]) -> S {
        let a = &self.automaton;
        let mut acc = S::zero();
        for (f, y) in row.iter().enumerate() {
            if !y.is_zero() && self.verdict.at(i, f) {
                acc = acc.add(&y.mul(&a.final_weights()[f]));
            }
        }
        a.initial()[i].mul(&acc)
    }

    fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.automaton.num_states()).filter(|&i| !self.automaton.initial()[i].is_zero())
    }

    /// The value at window length `n`, by repeated squaring.
    pub fn at(&self, n: u64) -> S {
        let a = &self.automaton;
        let p = a.matrices()[0].pow(n);
        self.sources().fold(S::zero(), |acc, i| acc.add(&self.masked(i, p.row(i))))
    }

    /// Values at `0..len`.
    pub fn values(&self, len: usize) -> Vec<S> {
        let a = &self.automaton;
        let mut out = vec![S::zero(); len];
        for i in self.sources() {
            let mut y = a.unit_vector(i);
            for slot in out.iter_mut() {
                *slot = slot.add(&self.masked(i, &y));
                y = vec_mul(&y, &a.matrices()[0]);
            }
        }
        out
    }
}

/// `‖ψ‖²` as a sequence: `ψ†(ψ)`.
pub fn norm_sequence<S: Semiring>(psi: &Automaton<S>) -> Result<ScalarSequence<S>> {
    ScalarSequence::new(&apply_transducer(&dual(psi), psi)?, ActivationMethod::Exact)
}

/// Numerator `ψ†(O(ψ))` and denominator `ψ†(ψ)` of an expected value.
#[derive(Clone, Debug)]
pub struct ExpectedValue {
    pub numerator: ScalarSequence<Gaussian>,
    pub denominator: ScalarSequence<Gaussian>,
}

/// One row of an expected-value table; `ratio` is `None` where the
/// denominator vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedRow {
    pub n: usize,
    pub numerator: Gaussian,
    pub denominator: Gaussian,
    pub ratio: Option<Gaussian>,
}

pub fn ratio(num: &Gaussian, den: &Gaussian) -> Option<Gaussian> {
    den.inverse().map(|inv| num.mul(&inv))
}

impl ExpectedValue {
    pub fn rows(&self, len: usize) -> Vec<ExpectedRow> {
        let nums = self.numerator.values(len);
        let dens = self.denominator.values(len);
        nums.into_iter()
            .zip(dens)
            .enumerate()
            .map(|(n, (numerator, denominator))| ExpectedRow {
                n,
                ratio: ratio(&numerator, &denominator),
                numerator,
                denominator,
            })
            .collect()
    }

    pub fn ratio_at(&self, n: u64) -> Option<Gaussian> {
        ratio(&self.numerator.at(n), &self.denominator.at(n))
    }
}

/// The expected value of `O` (over `A→A`) in the state `ψ` (over `A`).
pub fn expected_value(psi: &Automaton<Gaussian>, o: &Automaton<Gaussian>) -> Result<ExpectedValue> {
    let ket = apply_transducer(o, psi)?;
    let bra = dual(psi);
    Ok(ExpectedValue {
        numerator: ScalarSequence::new(&apply_transducer(&bra, &ket)?, ActivationMethod::Exact)?,
        denominator: norm_sequence(psi)?,
    })
}

/// `I ★ Z ★ I`.
pub fn magnetization() -> BiDivExpr<Gaussian> {
    BiDivExpr::conjoin3(Pauli::I.atom(), Pauli::Z.atom(), Pauli::I.atom())
}

/// `I ★ Z I^k Z ★ I`.
pub fn correlator(k: usize) -> BiDivExpr<Gaussian> {
    let mut mid = Pauli::Z.atom();
    for _ in 0..k {
        mid = ConvExpr::cat(Pauli::I.atom(), mid);
    }
    BiDivExpr::conjoin3(Pauli::I.atom(), ConvExpr::cat(Pauli::Z.atom(), mid), Pauli::I.atom())
}

/// `Σ_t α_t Σ_{P ∈ {X, Y, Z}} I ★ P (β_t I)* P ★ I`.
pub fn haldane_shastry(terms: &[(Gaussian, Gaussian)]) -> Result<BiDivExpr<Gaussian>> {
    if terms.is_empty() {
        return Err(Error::EmptyTermList);
    }
    let one = Gaussian::one();
    let mut out = Vec::new();
    for (alpha, beta) in terms {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let decay = ConvExpr::star(ConvExpr::scale(beta.clone(), Pauli::I.atom(), one.clone()));
            let mid = ConvExpr::cat(p.atom(), ConvExpr::cat(decay, p.atom()));
            let term = BiDivExpr::conjoin3(Pauli::I.atom(), mid, Pauli::I.atom());
            out.push(BiDivExpr::scale(alpha.clone(), term, one.clone()));
        }
    }
    Ok(BiDivExpr::Sum(out))
}

/// An operator expression compiled over the spin endomorphism alphabet.
pub fn spin_operator(e: &BiDivExpr<Gaussian>) -> Result<Automaton<Gaussian>> {
    compile_bidiv(e, &endo_alphabet(&spin_alphabet()))
}

/// The product state `a^ζ`: one state, weight one everywhere.
pub fn product_state(configs: &Alphabet, a: &Symbol) -> Result<Automaton<Gaussian>> {
    let mut out = Automaton::with_states(configs.clone(), 1);
    out.set_initial(StateId(0), Gaussian::one())?;
    out.set_final(StateId(0), Gaussian::one())?;
    out.add_transition(StateId(0), StateId(0), a, Gaussian::one())?;
    Ok(out)
}

/// `s(n) − s(n − 1)`.
pub fn asymptotic_rate(s: impl Fn(u64) -> Result<Gaussian>, n_probe: u64) -> Result<Gaussian> {
    if n_probe < 2 {
        return Err(Error::Invalid(format!("probe point must be at least 2, got {n_probe}")));
    }
    let hi = s(n_probe)?;
    let lo = s(n_probe - 1)?;
    Ok(hi.sub(&lo).expect("field"))
}

/// Parses `a1,b1;a2,b2;...` into `(α, β)` pairs.
pub fn parse_terms(text: &str) -> Result<Vec<(Gaussian, Gaussian)>> {
    let mut out = Vec::new();
    for (k, part) in text.split(';').enumerate() {
        let lit = |s: &str| Gaussian::parse_literal(s.trim()).map_err(|m| Error::parse(1, k + 1, m));
        let (a, b) = part
            .split_once(',')
            .ok_or_else(|| Error::parse(1, k + 1, format!("expected `alpha,beta`, found `{part}`")))?;
        out.push((lit(a)?, lit(b)?));
    }
    Ok(out)
}

/// `Σ_t α_t Σ_{k=0}^{n-2} (n−1−k) β_t^k`: the two-site sum for `↑^ζ`.
pub fn hs_up_oracle(terms: &[(Gaussian, Gaussian)], n: u64) -> Gaussian {
    let mut total = Gaussian::zero();
    for (alpha, beta) in terms {
        let mut pow = Gaussian::one();
        for k in 0..n.saturating_sub(1) {
            let weight = Gaussian::real(Rational::from_integer((n - 1 - k) as i64));
            total = total.add(&alpha.mul(&weight).mul(&pow));
            pow = pow.mul(beta);
        }
    }
    total
}
