//! Rational series over finite words and their divergent counterparts.
//!
//! Expressions are immutable and share subterms through `Arc`, so large
//! expressions produced by state elimination stay compact in memory.
//! Coefficients are computed directly from the expression by dynamic
//! programming over the factors of the word, without building an automaton.
//! Only the recurrence test `χ` goes through a compiled automaton.

mod syntax;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::activation::ActivationMethod;
use crate::error::{Error, Result};
use crate::kleene::{compile_recurrence, Recurrence};
use crate::semiring::{BiWeightGrid, Semiring, WeightSequence};
use crate::words::{BiInfiniteWord, FiniteWord, InfiniteWord, Symbol};

pub use syntax::{parse_any, parse_bidiv, parse_conv, parse_div, AnyExpr, Level};

#[derive(Debug, PartialEq, Eq)]
pub enum ConvNode<S> {
    Atom(Symbol, S),
    Sum(Vec<ConvExpr<S>>),
    Cat(ConvExpr<S>, ConvExpr<S>),
    Star(ConvExpr<S>),
    Scale(S, ConvExpr<S>, S),
}

/// A rational expression for a series of finite words.
#[derive(Debug, PartialEq, Eq)]
pub struct ConvExpr<S>(Arc<ConvNode<S>>);

impl<S> Clone for ConvExpr<S> {
    fn clone(&self) -> Self {
        ConvExpr(Arc::clone(&self.0))
    }
}

impl<S: Semiring> ConvExpr<S> {
    pub fn atom(sym: impl Into<Symbol>, c: S) -> Self {
        ConvExpr(Arc::new(ConvNode::Atom(sym.into(), c)))
    }

    pub fn sum(terms: Vec<ConvExpr<S>>) -> Self {
        ConvExpr(Arc::new(ConvNode::Sum(terms)))
    }

    pub fn zero() -> Self {
        Self::sum(Vec::new())
    }

    pub fn cat(x: ConvExpr<S>, y: ConvExpr<S>) -> Self {
        ConvExpr(Arc::new(ConvNode::Cat(x, y)))
    }

    pub fn star(x: ConvExpr<S>) -> Self {
        ConvExpr(Arc::new(ConvNode::Star(x)))
    }

    pub fn scale(l: S, x: ConvExpr<S>, r: S) -> Self {
        ConvExpr(Arc::new(ConvNode::Scale(l, x, r)))
    }

    /// The series `1·ε`, written `star(sum())`.
    pub fn epsilon() -> Self {
        Self::star(Self::zero())
    }

    pub fn node(&self) -> &ConvNode<S> {
        &self.0
    }

    fn key(&self) -> *const ConvNode<S> {
        Arc::as_ptr(&self.0)
    }

    /// Symbols occurring in atoms.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.key()) {
                continue;
            }
            match e.node() {
                ConvNode::Atom(s, _) => {
                    out.insert(s.clone());
                }
                ConvNode::Sum(ts) => stack.extend(ts.iter().cloned()),
                ConvNode::Cat(x, y) => {
                    stack.push(x.clone());
                    stack.push(y.clone());
                }
                ConvNode::Star(x) | ConvNode::Scale(_, x, _) => stack.push(x.clone()),
            }
        }
        out
    }

    /// Coefficient of the empty word.
    pub fn epsilon_coeff(&self) -> Result<S> {
        conv_coeff(self, &FiniteWord::empty())
    }

    pub fn is_proper(&self) -> Result<bool> {
        Ok(self.epsilon_coeff()?.is_zero())
    }

    /// Number of distinct nodes.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.key()) {
                continue;
            }
            match e.node() {
                ConvNode::Atom(..) => {}
                ConvNode::Sum(ts) => stack.extend(ts.iter().cloned()),
                ConvNode::Cat(x, y) => {
                    stack.push(x.clone());
                    stack.push(y.clone());
                }
                ConvNode::Star(x) | ConvNode::Scale(_, x, _) => stack.push(x.clone()),
            }
        }
        seen.len()
    }

    /// The same expression with every weight mapped through `f`.
    pub fn map<T: Semiring>(&self, f: &dyn Fn(&S) -> T) -> ConvExpr<T> {
        let mut memo = HashMap::new();
        self.map_memo(f, &mut memo)
    }

    fn map_memo<T: Semiring>(
        &self,
        f: &dyn Fn(&S) -> T,
        memo: &mut HashMap<*const ConvNode<S>, ConvExpr<T>>,
    ) -> ConvExpr<T> {
        if let Some(done) = memo.get(&self.key()) {
            return done.clone();
        }
        let out = match self.node() {
            ConvNode::Atom(s, c) => ConvExpr::atom(s.clone(), f(c)),
            ConvNode::Sum(ts) => ConvExpr::sum(ts.iter().map(|t| t.map_memo(f, memo)).collect()),
            ConvNode::Cat(x, y) => ConvExpr::cat(x.map_memo(f, memo), y.map_memo(f, memo)),
            ConvNode::Star(x) => ConvExpr::star(x.map_memo(f, memo)),
            ConvNode::Scale(l, x, r) => ConvExpr::scale(f(l), x.map_memo(f, memo), f(r)),
        };
        memo.insert(self.key(), out.clone());
        out
    }
}

/// Coefficients of all factors `w[i..j]`, `i <= j`.
struct Table<S> {
    len: usize,
    data: Vec<S>,
}

impl<S: Semiring> Table<S> {
    fn new(len: usize) -> Self {
        Table { len, data: vec![S::zero(); (len + 1) * (len + 1)] }
    }

    fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * (self.len + 1) + j]
    }

    fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * (self.len + 1) + j] = v;
    }
}

type Memo<S> = HashMap<*const ConvNode<S>, Arc<Table<S>>>;

fn table<S: Semiring>(e: &ConvExpr<S>, w: &[Symbol], memo: &mut Memo<S>) -> Result<Arc<Table<S>>> {
    if let Some(t) = memo.get(&e.key()) {
        return Ok(Arc::clone(t));
    }
    let len = w.len();
    let mut t = Table::new(len);
    match e.node() {
        ConvNode::Atom(s, c) => {
            for i in 0..len {
                if &w[i] == s {
                    t.set(i, i + 1, c.clone());
                }
            }
        }
        ConvNode::Sum(terms) => {
            for term in terms {
                let u = table(term, w, memo)?;
                for (x, y) in t.data.iter_mut().zip(&u.data) {
                    *x = x.add(y);
                }
            }
        }
        ConvNode::Cat(x, y) => {
            let (tx, ty) = (table(x, w, memo)?, table(y, w, memo)?);
            for i in 0..=len {
                for k in i..=len {
                    let a = tx.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    for j in k..=len {
                        let b = ty.get(k, j);
                        if !b.is_zero() {
                            let v = t.get(i, j).add(&a.mul(b));
                            t.set(i, j, v);
                        }
                    }
                }
            }
        }
        ConvNode::Star(x) => {
            let tx = table(x, w, memo)?;
            if !tx.get(0, 0).is_zero() {
                return Err(Error::ImproperStar);
            }
            // x*(w[i..j]) = [i = j] + Σ_{i<k<=j} x(w[i..k]) · x*(w[k..j])
            for j in 0..=len {
                t.set(j, j, S::one());
                for i in (0..j).rev() {
                    let mut acc = S::zero();
                    for k in i + 1..=j {
                        let a = tx.get(i, k);
                        if !a.is_zero() {
                            acc = acc.add(&a.mul(t.get(k, j)));
                        }
                    }
                    t.set(i, j, acc);
                }
            }
        }
        ConvNode::Scale(l, x, r) => {
            let tx = table(x, w, memo)?;
            for (dst, src) in t.data.iter_mut().zip(&tx.data) {
                if !src.is_zero() {
                    *dst = l.mul(src).mul(r);
                }
            }
        }
    }
    let t = Arc::new(t);
    memo.insert(e.key(), Arc::clone(&t));
    Ok(t)
}

fn factor_table<S: Semiring>(e: &ConvExpr<S>, w: &[Symbol]) -> Result<Arc<Table<S>>> {
    table(e, w, &mut HashMap::new())
}

/// The coefficient `e(w)`.
pub fn conv_coeff<S: Semiring>(e: &ConvExpr<S>, w: &FiniteWord) -> Result<S> {
    let t = factor_table(e, w.letters())?;
    Ok(t.get(0, w.len()).clone())
}

/// Coefficients of every prefix `w[0..n]`, `n <= w.len()`.
pub fn prefix_coeffs<S: Semiring>(e: &ConvExpr<S>, w: &FiniteWord) -> Result<Vec<S>> {
    let t = factor_table(e, w.letters())?;
    Ok((0..=w.len()).map(|n| t.get(0, n).clone()).collect())
}

/// How `χ` is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiMethod {
    /// Compile the series and decide recurrence on the automaton.
    Compiled(ActivationMethod),
    /// Scan the coefficients of a window of `K` cycle repetitions after the
    /// first `K`, straight from the expression.
    Horizon(usize),
}

impl Default for ChiMethod {
    fn default() -> Self {
        ChiMethod::Compiled(ActivationMethod::Exact)
    }
}

impl ChiMethod {
    /// Parses `exact`, `compiled:horizon:<K>` or `horizon:<K>`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix("compiled:") {
            return ActivationMethod::parse(rest).map(ChiMethod::Compiled);
        }
        match ActivationMethod::parse(t)? {
            ActivationMethod::Exact => Ok(ChiMethod::default()),
            ActivationMethod::Horizon(k) => Ok(ChiMethod::Horizon(k)),
        }
    }
}

/// `χ→(w, x)`: whether `x(w[0..n]) != 0` for infinitely many `n`.
pub fn chi_diverging<S: Semiring>(x: &ConvExpr<S>, w: &InfiniteWord, method: ChiMethod) -> Result<bool> {
    match method {
        ChiMethod::Compiled(m) => compile_recurrence(x)?.diverging(w, m),
        ChiMethod::Horizon(k) => horizon_diverging(x, w, k),
    }
}

fn horizon_diverging<S: Semiring>(x: &ConvExpr<S>, w: &InfiniteWord, k: usize) -> Result<bool> {
    let (u, v) = (w.prefix().len(), w.cycle().len());
    let lo = u + k * v;
    let hi = lo + k * v;
    let coeffs = prefix_coeffs(x, &w.slice(0, hi)?)?;
    Ok(coeffs[lo..hi].iter().any(|c| !c.is_zero()))
}

/// `χ↔(w, x)`: whether every window of `w` lies inside a factor `w[i..j]`
/// with `x(w[i..j]) != 0`.
pub fn chi_bidiverging<S: Semiring>(x: &ConvExpr<S>, w: &BiInfiniteWord, method: ChiMethod) -> Result<bool> {
    match method {
        ChiMethod::Compiled(m) => compile_recurrence(x)?.bidiverging(w, m),
        ChiMethod::Horizon(k) => horizon_bidiverging(x, w, k),
    }
}

fn horizon_bidiverging<S: Semiring>(x: &ConvExpr<S>, w: &BiInfiniteWord, k: usize) -> Result<bool> {
    let (l, m, r) = (w.left().len() as i64, w.center().len() as i64, w.right().len() as i64);
    let k = k as i64;
    let b = w.boundary();
    let lo = b - (2 * k * l - 1);
    let hi = b + m + 2 * k * r - 1;
    let factor = w.slice(lo, hi)?;
    let t = factor_table(x, factor.letters())?;
    for el in k * l..2 * k * l {
        for er in k * r..2 * k * r {
            let (i, j) = ((b - el - lo) as usize, (b + m + er - lo) as usize);
            if !t.get(i, j).is_zero() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// One term `l · s · r` of a characteristic form with its `χ` test.
struct Term<S> {
    left: S,
    series: ConvExpr<S>,
    right: S,
    recurrence: Option<Recurrence<S>>,
}

fn prepare<S: Semiring>(series: Vec<(S, ConvExpr<S>, S)>, chi: ChiMethod) -> Result<Vec<Term<S>>> {
    series
        .into_iter()
        .map(|(left, series, right)| {
            let recurrence = match chi {
                ChiMethod::Compiled(_) => Some(compile_recurrence(&series)?),
                ChiMethod::Horizon(_) => None,
            };
            Ok(Term { left, series, right, recurrence })
        })
        .collect()
}

/// A series over infinite words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivExpr<S> {
    Omega(ConvExpr<S>),
    Conjoin(ConvExpr<S>, ConvExpr<S>),
    Sum(Vec<DivExpr<S>>),
    Scale(S, Box<DivExpr<S>>, S),
}

/// A series over biinfinite words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BiDivExpr<S> {
    Zeta(ConvExpr<S>),
    Conjoin3(ConvExpr<S>, ConvExpr<S>, ConvExpr<S>),
    Sum(Vec<BiDivExpr<S>>),
    Scale(S, Box<BiDivExpr<S>>, S),
}

/// `Σ a·(x ★ y)·b + Σ c·z^ω·d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivCharacteristic<S> {
    pub conjoins: Vec<(S, ConvExpr<S>, ConvExpr<S>, S)>,
    pub omegas: Vec<(S, ConvExpr<S>, S)>,
}

/// `Σ a·(x ★ m ★ y)·b + Σ c·z^ζ·d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiDivCharacteristic<S> {
    pub conjoins: Vec<(S, ConvExpr<S>, ConvExpr<S>, ConvExpr<S>, S)>,
    pub zetas: Vec<(S, ConvExpr<S>, S)>,
}

fn require_proper<S: Semiring>(x: &ConvExpr<S>) -> Result<()> {
    if x.is_proper()? {
        Ok(())
    } else {
        Err(Error::EmptyWordAccepted)
    }
}

fn require_star<S: Semiring>(x: &ConvExpr<S>) -> Result<()> {
    if x.is_proper()? {
        Ok(())
    } else {
        Err(Error::ImproperStar)
    }
}

impl<S: Semiring> DivExpr<S> {
    pub fn omega(s: ConvExpr<S>) -> Self {
        DivExpr::Omega(s)
    }

    pub fn conjoin(x: ConvExpr<S>, y: ConvExpr<S>) -> Self {
        DivExpr::Conjoin(x, y)
    }

    pub fn scale(l: S, e: DivExpr<S>, r: S) -> Self {
        DivExpr::Scale(l, Box::new(e), r)
    }

    /// Flattens sums and scalings. Fails on operands that are not proper.
    pub fn to_characteristic(&self) -> Result<DivCharacteristic<S>> {
        let mut out = DivCharacteristic { conjoins: Vec::new(), omegas: Vec::new() };
        self.collect(&S::one(), &S::one(), &mut out)?;
        Ok(out)
    }

    fn collect(&self, l: &S, r: &S, out: &mut DivCharacteristic<S>) -> Result<()> {
        match self {
            DivExpr::Omega(s) => {
                require_star(s)?;
                out.omegas.push((l.clone(), s.clone(), r.clone()));
            }
            DivExpr::Conjoin(x, y) => {
                require_proper(x)?;
                require_star(y)?;
                out.conjoins.push((l.clone(), x.clone(), y.clone(), r.clone()));
            }
            DivExpr::Sum(terms) => {
                for t in terms {
                    t.collect(l, r, out)?;
                }
            }
            DivExpr::Scale(a, e, b) => e.collect(&l.mul(a), &b.mul(r), out)?,
        }
        Ok(())
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        match self {
            DivExpr::Omega(s) => s.symbols(),
            DivExpr::Conjoin(x, y) => &x.symbols() | &y.symbols(),
            DivExpr::Sum(ts) => ts.iter().flat_map(|t| t.symbols()).collect(),
            DivExpr::Scale(_, e, _) => e.symbols(),
        }
    }
}

impl<S: Semiring> DivCharacteristic<S> {
    pub fn to_expr(&self) -> DivExpr<S> {
        let mut terms: Vec<DivExpr<S>> = self
            .conjoins
            .iter()
            .map(|(a, x, y, b)| DivExpr::scale(a.clone(), DivExpr::conjoin(x.clone(), y.clone()), b.clone()))
            .collect();
        terms.extend(
            self.omegas.iter().map(|(c, z, d)| DivExpr::scale(c.clone(), DivExpr::omega(z.clone()), d.clone())),
        );
        DivExpr::Sum(terms)
    }

    /// Each term as `(left, series, right)` with the series whose prefix
    /// coefficients it uses: `x·y*` or `z*`.
    fn series(&self) -> Vec<(S, ConvExpr<S>, S)> {
        let mut out: Vec<(S, ConvExpr<S>, S)> = self
            .conjoins
            .iter()
            .map(|(a, x, y, b)| (a.clone(), ConvExpr::cat(x.clone(), ConvExpr::star(y.clone())), b.clone()))
            .collect();
        out.extend(self.omegas.iter().map(|(c, z, d)| (c.clone(), ConvExpr::star(z.clone()), d.clone())));
        out
    }
}

impl<S: Semiring> BiDivExpr<S> {
    pub fn zeta(s: ConvExpr<S>) -> Self {
        BiDivExpr::Zeta(s)
    }

    pub fn conjoin3(x: ConvExpr<S>, m: ConvExpr<S>, y: ConvExpr<S>) -> Self {
        BiDivExpr::Conjoin3(x, m, y)
    }

    pub fn scale(l: S, e: BiDivExpr<S>, r: S) -> Self {
        BiDivExpr::Scale(l, Box::new(e), r)
    }

    pub fn to_characteristic(&self) -> Result<BiDivCharacteristic<S>> {
        let mut out = BiDivCharacteristic { conjoins: Vec::new(), zetas: Vec::new() };
        self.collect(&S::one(), &S::one(), &mut out)?;
        Ok(out)
    }

    fn collect(&self, l: &S, r: &S, out: &mut BiDivCharacteristic<S>) -> Result<()> {
        match self {
            BiDivExpr::Zeta(s) => {
                require_star(s)?;
                out.zetas.push((l.clone(), s.clone(), r.clone()));
            }
            BiDivExpr::Conjoin3(x, m, y) => {
                require_star(x)?;
                require_proper(m)?;
                require_star(y)?;
                out.conjoins.push((l.clone(), x.clone(), m.clone(), y.clone(), r.clone()));
            }
            BiDivExpr::Sum(terms) => {
                for t in terms {
                    t.collect(l, r, out)?;
                }
            }
            BiDivExpr::Scale(a, e, b) => e.collect(&l.mul(a), &b.mul(r), out)?,
        }
        Ok(())
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        match self {
            BiDivExpr::Zeta(s) => s.symbols(),
            BiDivExpr::Conjoin3(x, m, y) => {
                let mut s = x.symbols();
                s.extend(m.symbols());
                s.extend(y.symbols());
                s
            }
            BiDivExpr::Sum(ts) => ts.iter().flat_map(|t| t.symbols()).collect(),
            BiDivExpr::Scale(_, e, _) => e.symbols(),
        }
    }
}

impl<S: Semiring> BiDivCharacteristic<S> {
    pub fn to_expr(&self) -> BiDivExpr<S> {
        let mut terms: Vec<BiDivExpr<S>> = self
            .conjoins
            .iter()
            .map(|(a, x, m, y, b)| {
                BiDivExpr::scale(a.clone(), BiDivExpr::conjoin3(x.clone(), m.clone(), y.clone()), b.clone())
            })
            .collect();
        terms.extend(
            self.zetas.iter().map(|(c, z, d)| BiDivExpr::scale(c.clone(), BiDivExpr::zeta(z.clone()), d.clone())),
        );
        BiDivExpr::Sum(terms)
    }

    /// `x*·m·y*` or `z*` per term.
    fn series(&self) -> Vec<(S, ConvExpr<S>, S)> {
        let mut out: Vec<(S, ConvExpr<S>, S)> = self
            .conjoins
            .iter()
            .map(|(a, x, m, y, b)| {
                let s = ConvExpr::cat(ConvExpr::star(x.clone()), ConvExpr::cat(m.clone(), ConvExpr::star(y.clone())));
                (a.clone(), s, b.clone())
            })
            .collect();
        out.extend(self.zetas.iter().map(|(c, z, d)| (c.clone(), ConvExpr::star(z.clone()), d.clone())));
        out
    }
}

/// A divergent series prepared for evaluation on many words; the `χ`
/// automata are compiled once.
pub struct DivEvaluator<S> {
    terms: Vec<Term<S>>,
    chi: ChiMethod,
}

impl<S: Semiring> DivEvaluator<S> {
    pub fn new(e: &DivExpr<S>, chi: ChiMethod) -> Result<Self> {
        Ok(DivEvaluator { terms: prepare(e.to_characteristic()?.series(), chi)?, chi })
    }

    pub fn evaluate(&self, w: &InfiniteWord) -> Result<DivEvaluation<S>> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let live = match (self.chi, &t.recurrence) {
                (ChiMethod::Compiled(m), Some(r)) => r.diverging(w, m)?,
                (ChiMethod::Horizon(k), _) => horizon_diverging(&t.series, w, k)?,
                (ChiMethod::Compiled(_), None) => unreachable!("compiled on construction"),
            };
            if live {
                terms.push((t.left.clone(), t.series.clone(), t.right.clone()));
            }
        }
        Ok(DivEvaluation { word: w.clone(), terms })
    }
}

/// A divergent series evaluated on one infinite word; `χ` is decided once
/// per term on construction.
pub struct DivEvaluation<S> {
    word: InfiniteWord,
    terms: Vec<(S, ConvExpr<S>, S)>,
}

impl<S: Semiring> DivEvaluation<S> {
    pub fn new(e: &DivExpr<S>, w: &InfiniteWord, chi: ChiMethod) -> Result<Self> {
        DivEvaluator::new(e, chi)?.evaluate(w)
    }

    /// Values at `0..len`.
    pub fn values(&self, len: usize) -> Result<Vec<S>> {
        let mut out = vec![S::zero(); len];
        if len == 0 {
            return Ok(out);
        }
        let prefix = self.word.slice(0, len - 1)?;
        for (l, s, r) in &self.terms {
            for (slot, c) in out.iter_mut().zip(prefix_coeffs(s, &prefix)?) {
                *slot = slot.add(&l.mul(&c).mul(r));
            }
        }
        Ok(out)
    }

    pub fn at(&self, n: usize) -> Result<S> {
        Ok(self.values(n + 1)?.pop().expect("non-empty"))
    }

    pub fn sequence(self) -> WeightSequence<S> {
        WeightSequence::new(move |n| self.at(n).expect("validated on construction"))
    }
}

/// A bidivergent series prepared for evaluation on many words.
pub struct BiDivEvaluator<S> {
    terms: Vec<Term<S>>,
    chi: ChiMethod,
}

impl<S: Semiring> BiDivEvaluator<S> {
    pub fn new(e: &BiDivExpr<S>, chi: ChiMethod) -> Result<Self> {
        Ok(BiDivEvaluator { terms: prepare(e.to_characteristic()?.series(), chi)?, chi })
    }

    pub fn evaluate(&self, w: &BiInfiniteWord) -> Result<BiDivEvaluation<S>> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let live = match (self.chi, &t.recurrence) {
                (ChiMethod::Compiled(m), Some(r)) => r.bidiverging(w, m)?,
                (ChiMethod::Horizon(k), _) => horizon_bidiverging(&t.series, w, k)?,
                (ChiMethod::Compiled(_), None) => unreachable!("compiled on construction"),
            };
            if live {
                terms.push((t.left.clone(), t.series.clone(), t.right.clone()));
            }
        }
        Ok(BiDivEvaluation { word: w.clone(), terms })
    }
}

/// A bidivergent series evaluated on one biinfinite word.
pub struct BiDivEvaluation<S> {
    word: BiInfiniteWord,
    terms: Vec<(S, ConvExpr<S>, S)>,
}

impl<S: Semiring> BiDivEvaluation<S> {
    pub fn new(e: &BiDivExpr<S>, w: &BiInfiniteWord, chi: ChiMethod) -> Result<Self> {
        BiDivEvaluator::new(e, chi)?.evaluate(w)
    }

    /// Values at `(i, 0..len)`.
    pub fn values(&self, i: i64, len: usize) -> Result<Vec<S>> {
        let mut out = vec![S::zero(); len];
        if len == 0 {
            return Ok(out);
        }
        let factor = self.word.slice(i, i + len as i64 - 1)?;
        for (l, s, r) in &self.terms {
            for (slot, c) in out.iter_mut().zip(prefix_coeffs(s, &factor)?) {
                *slot = slot.add(&l.mul(&c).mul(r));
            }
        }
        Ok(out)
    }

    pub fn at(&self, i: i64, n: usize) -> Result<S> {
        Ok(self.values(i, n + 1)?.pop().expect("non-empty"))
    }

    pub fn grid(self) -> BiWeightGrid<S> {
        BiWeightGrid::new(move |i, n| self.at(i, n).expect("validated on construction"))
    }
}

/// `e(w, n)`.
pub fn div_coeff<S: Semiring>(e: &DivExpr<S>, w: &InfiniteWord, n: usize, chi: ChiMethod) -> Result<S> {
    DivEvaluation::new(e, w, chi)?.at(n)
}

/// `e(w, i, n)`.
pub fn bidiv_coeff<S: Semiring>(e: &BiDivExpr<S>, w: &BiInfiniteWord, i: i64, n: usize, chi: ChiMethod) -> Result<S> {
    BiDivEvaluation::new(e, w, chi)?.at(i, n)
}

impl<S: Semiring> fmt::Display for ConvExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        syntax::write_conv(f, self)
    }
}

impl<S: Semiring> fmt::Display for DivExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        syntax::write_div(f, self)
    }
}

impl<S: Semiring> fmt::Display for BiDivExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        syntax::write_bidiv(f, self)
    }
}
