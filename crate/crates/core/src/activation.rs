//! Deciding which initial/final pairs are activated by an infinite or
//! biinfinite word.
//!
//! A pair `(i, f)` is activated by `w` when the path sum from `i` to `f`
//! along `w[0..n]` is non-zero for infinitely many `n`. For biinfinite words
//! every window `[i0, j0]` must have an enclosing window `[i, j]` with a
//! non-zero path sum over `w[i..j]`.
//!
//! Exact procedures:
//!
//! * zero-sum-free semirings without zero divisors (Boolean, natural): only
//!   the support of a product matters, and the supports of the powers of the
//!   cycle matrix are eventually periodic.
//! * fields: for each residue the sequence `k ↦ a·Cᵏ·b` satisfies the
//!   Cayley-Hamilton recurrence of order `d = |Q|`, so it is eventually zero
//!   iff it vanishes on `k ∈ [d, 2d)`. The two-sided case applies the same
//!   argument in each direction and checks `[d, 2d)²`.
//!
//! The horizon procedure scans a fixed window of `K` cycle repetitions
//! beyond the first `K`, letter by letter.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::matrix::{dot, support, unit, vec_mul, Matrix};
use crate::semiring::{Boolean, Semiring};
use crate::words::{BiInfiniteWord, InfiniteWord};

/// Exact procedure a semiring supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactMethod {
    BooleanMonoid,
    NaturalReduction,
    FieldLrs,
}

/// Requested decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ActivationMethod {
    #[default]
    Exact,
    Horizon(usize),
}

impl ActivationMethod {
    /// Parses `exact` or `horizon:<K>`.
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "exact" => Ok(ActivationMethod::Exact),
            t => t
                .strip_prefix("horizon:")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k > 0)
                .map(ActivationMethod::Horizon)
                .ok_or_else(|| Error::parse(1, 1, format!("invalid method `{t}`"))),
        }
    }
}

/// Procedure that produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodTag {
    ExactBooleanMonoid,
    ExactNaturalReduction,
    ExactFieldLrs,
    BoundedHorizon(usize),
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodTag::ExactBooleanMonoid => f.write_str("exact-boolean-monoid"),
            MethodTag::ExactNaturalReduction => f.write_str("exact-natural-reduction"),
            MethodTag::ExactFieldLrs => f.write_str("exact-field-lrs"),
            MethodTag::BoundedHorizon(k) => write!(f, "horizon:{k}"),
        }
    }
}

/// Activation of every pair `(i, f)` with `I_i != 0` and `F_f != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivationVerdict {
    n: usize,
    mask: Vec<bool>,
    pairs: BTreeMap<(StateId, StateId), bool>,
    method: MethodTag,
}

impl ActivationVerdict {
    pub fn method(&self) -> MethodTag {
        self.method
    }

    /// Verdicts keyed by state ids.
    pub fn pairs(&self) -> &BTreeMap<(StateId, StateId), bool> {
        &self.pairs
    }

    pub fn is_activated(&self, i: StateId, f: StateId) -> bool {
        self.pairs.get(&(i, f)).copied().unwrap_or(false)
    }

    /// By state position. Pairs outside the initial/final support are false.
    pub fn at(&self, i: usize, f: usize) -> bool {
        self.mask[i * self.n + f]
    }
}

enum Plan {
    /// Cycle exponents to inspect, in the value domain.
    Cycles(Range<u64>),
    /// Repetitions skipped and then scanned, letter by letter.
    Horizon(u64),
}

/// Calls `visit` on `start · P(w[0..n])` for the relevant `n`; stops when
/// `visit` returns true.
fn scan_one_sided<T: Semiring>(
    mats: &[Matrix<T>],
    u: &[usize],
    v: &[usize],
    plan: &Plan,
    start: &[T],
    visit: &mut dyn FnMut(&[T]) -> bool,
) {
    let apply = |x: &[T], letters: &[usize]| letters.iter().fold(x.to_vec(), |acc, &a| vec_mul(&acc, &mats[a]));
    match plan {
        Plan::Cycles(range) => {
            let cycle = product(mats, v, start.len());
            let mut y = vec_mul(&apply(start, u), &cycle.pow(range.start));
            for _ in range.clone() {
                let mut z = y.clone();
                for &a in v {
                    if visit(&z) {
                        return;
                    }
                    z = vec_mul(&z, &mats[a]);
                }
                y = z;
            }
        }
        Plan::Horizon(k) => {
            let lo = u.len() as u64 + k * v.len() as u64;
            let hi = lo + k * v.len() as u64;
            let mut y = apply(start, u);
            for n in u.len() as u64..hi {
                if n >= lo && visit(&y) {
                    return;
                }
                y = vec_mul(&y, &mats[v[(n - u.len() as u64) as usize % v.len()]]);
            }
        }
    }
}

/// Calls `visit` on `start · P(w[i..j])` for windows whose left and right
/// extensions beyond the center are in the relevant ranges.
fn scan_two_sided<T: Semiring>(
    mats: &[Matrix<T>],
    l: &[usize],
    m: &[usize],
    r: &[usize],
    plans: (&Plan, &Plan),
    start: &[T],
    visit: &mut dyn FnMut(&[T]) -> bool,
) {
    let n = start.len();
    let apply = |x: &[T], letters: &[usize]| letters.iter().fold(x.to_vec(), |acc, &a| vec_mul(&acc, &mats[a]));
    let mut lefts: Vec<Vec<T>> = Vec::new();
    match plans.0 {
        Plan::Cycles(range) => {
            let cycle = product(mats, l, n);
            let first = cycle.pow(range.start);
            for a in 0..l.len() {
                let mut x = vec_mul(&apply(start, &l[l.len() - a..]), &first);
                for _ in range.clone() {
                    lefts.push(x.clone());
                    x = vec_mul(&x, &cycle);
                }
            }
        }
        Plan::Horizon(k) => {
            let k = *k as usize;
            for e in k * l.len()..2 * k * l.len() {
                let offset = (l.len() - e % l.len()) % l.len();
                let letters: Vec<usize> = (0..e).map(|t| l[(offset + t) % l.len()]).collect();
                lefts.push(apply(start, &letters));
            }
        }
    }
    let right_cycle = product(mats, r, n);
    for x in lefts {
        let z = apply(&x, m);
        match plans.1 {
            Plan::Cycles(range) => {
                let mut y = vec_mul(&z, &right_cycle.pow(range.start));
                for _ in range.clone() {
                    let mut t = y.clone();
                    for &b in r {
                        if visit(&t) {
                            return;
                        }
                        t = vec_mul(&t, &mats[b]);
                    }
                    y = t;
                }
            }
            Plan::Horizon(k) => {
                let k = *k as usize;
                let mut y = z;
                for e in 0..2 * k * r.len() {
                    if e >= k * r.len() && visit(&y) {
                        return;
                    }
                    y = vec_mul(&y, &mats[r[e % r.len()]]);
                }
            }
        }
    }
}

fn product<T: Semiring>(mats: &[Matrix<T>], letters: &[usize], n: usize) -> Matrix<T> {
    letters.iter().fold(Matrix::identity(n), |acc, &a| acc.mul(&mats[a]))
}

/// Preperiod and period of the powers of a Boolean matrix.
pub fn eventual_period(c: &Matrix<Boolean>) -> (u64, u64) {
    let mut seen: HashMap<Matrix<Boolean>, u64> = HashMap::new();
    let mut p = Matrix::identity(c.dim());
    let mut k = 0u64;
    loop {
        if let Some(&j) = seen.get(&p) {
            return (j, k - j);
        }
        let next = p.mul(c);
        seen.insert(p, k);
        p = next;
        k += 1;
    }
}

/// How a request is carried out for semiring `S`.
enum Domain {
    Support(MethodTag),
    Values(MethodTag),
    Horizon(usize),
}

fn domain<S: Semiring>(method: ActivationMethod) -> Result<Domain> {
    match (method, S::exact_activation()) {
        (ActivationMethod::Horizon(k), _) => Ok(Domain::Horizon(k)),
        (ActivationMethod::Exact, Some(ExactMethod::BooleanMonoid)) => {
            Ok(Domain::Support(MethodTag::ExactBooleanMonoid))
        }
        (ActivationMethod::Exact, Some(ExactMethod::NaturalReduction)) => {
            Ok(Domain::Support(MethodTag::ExactNaturalReduction))
        }
        (ActivationMethod::Exact, Some(ExactMethod::FieldLrs)) => Ok(Domain::Values(MethodTag::ExactFieldLrs)),
        (ActivationMethod::Exact, None) => Err(Error::UnsupportedExactDecision(S::NAME)),
    }
}

/// The letters of a one-sided word as alphabet indices.
struct OneSided {
    u: Vec<usize>,
    v: Vec<usize>,
}

struct TwoSided {
    l: Vec<usize>,
    m: Vec<usize>,
    r: Vec<usize>,
}

fn one_sided<S: Semiring>(a: &Automaton<S>, w: &InfiniteWord) -> Result<OneSided> {
    Ok(OneSided { u: a.letters(w.prefix())?, v: a.letters(w.cycle())? })
}

fn two_sided<S: Semiring>(a: &Automaton<S>, w: &BiInfiniteWord) -> Result<TwoSided> {
    Ok(TwoSided { l: a.letters(w.left())?, m: a.letters(w.center())?, r: a.letters(w.right())? })
}

/// A scanner specialised to one automaton, word shape and domain.
trait Scan<T> {
    fn run(&self, start: &[T], visit: &mut dyn FnMut(&[T]) -> bool);
}

struct DivScan<'a, T> {
    mats: &'a [Matrix<T>],
    word: &'a OneSided,
    plan: Plan,
}

impl<T: Semiring> Scan<T> for DivScan<'_, T> {
    fn run(&self, start: &[T], visit: &mut dyn FnMut(&[T]) -> bool) {
        scan_one_sided(self.mats, &self.word.u, &self.word.v, &self.plan, start, visit)
    }
}

struct BiScan<'a, T> {
    mats: &'a [Matrix<T>],
    word: &'a TwoSided,
    plans: (Plan, Plan),
}

impl<T: Semiring> Scan<T> for BiScan<'_, T> {
    fn run(&self, start: &[T], visit: &mut dyn FnMut(&[T]) -> bool) {
        let w = self.word;
        scan_two_sided(self.mats, &w.l, &w.m, &w.r, (&self.plans.0, &self.plans.1), start, visit)
    }
}

/// For each start position `i`, the positions `f` among `targets` reached
/// with a non-zero value by some scanned vector.
fn mask_rows<T: Semiring>(scan: &dyn Scan<T>, n: usize, rows: &[usize], targets: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n * n];
    for &i in rows {
        let mut open: Vec<usize> = targets.to_vec();
        scan.run(&unit(n, i), &mut |y| {
            open.retain(|&f| {
                let hit = !y[f].is_zero();
                if hit {
                    mask[i * n + f] = true;
                }
                !hit
            });
            open.is_empty()
        });
    }
    mask
}

fn recurs<T: Semiring>(scan: &dyn Scan<T>, a: &[T], b: &[T]) -> bool {
    let mut found = false;
    scan.run(a, &mut |y| {
        found = !dot(y, b).is_zero();
        found
    });
    found
}

fn support_mats<S: Semiring>(a: &Automaton<S>) -> Vec<Matrix<Boolean>> {
    a.matrices().iter().map(Matrix::support).collect()
}

fn cycle_range(mats: &[Matrix<Boolean>], letters: &[usize], n: usize) -> Range<u64> {
    let (t, p) = eventual_period(&product(mats, letters, n));
    t..t + p
}

fn field_range(n: usize) -> Range<u64> {
    n as u64..2 * n as u64
}

fn relevant<S: Semiring>(a: &Automaton<S>) -> (Vec<usize>, Vec<usize>) {
    let nz = |v: &[S]| (0..v.len()).filter(|&k| !v[k].is_zero()).collect::<Vec<_>>();
    (nz(a.initial()), nz(a.final_weights()))
}

fn verdict<S: Semiring>(a: &Automaton<S>, mask: Vec<bool>, method: MethodTag) -> ActivationVerdict {
    let n = a.num_states();
    let (rows, cols) = relevant(a);
    let mut pairs = BTreeMap::new();
    for &i in &rows {
        for &f in &cols {
            pairs.insert((a.states()[i], a.states()[f]), mask[i * n + f]);
        }
    }
    ActivationVerdict { n, mask, pairs, method }
}

/// Runs `job` with a scanner over the domain chosen for `method`.
fn with_div_scan<S: Semiring, R>(
    a: &Automaton<S>,
    w: &InfiniteWord,
    method: ActivationMethod,
    job_support: impl FnOnce(&dyn Scan<Boolean>) -> R,
    job_values: impl FnOnce(&dyn Scan<S>) -> R,
) -> Result<(R, MethodTag)> {
    let word = one_sided(a, w)?;
    let n = a.num_states();
    Ok(match domain::<S>(method)? {
        Domain::Support(tag) => {
            let mats = support_mats(a);
            let plan = Plan::Cycles(cycle_range(&mats, &word.v, n));
            (job_support(&DivScan { mats: &mats, word: &word, plan }), tag)
        }
        Domain::Values(tag) => {
            let plan = Plan::Cycles(field_range(n));
            (job_values(&DivScan { mats: a.matrices(), word: &word, plan }), tag)
        }
        Domain::Horizon(k) => {
            let plan = Plan::Horizon(k as u64);
            let scan = DivScan { mats: a.matrices(), word: &word, plan };
            (job_values(&scan), MethodTag::BoundedHorizon(k))
        }
    })
}

fn with_bi_scan<S: Semiring, R>(
    a: &Automaton<S>,
    w: &BiInfiniteWord,
    method: ActivationMethod,
    job_support: impl FnOnce(&dyn Scan<Boolean>) -> R,
    job_values: impl FnOnce(&dyn Scan<S>) -> R,
) -> Result<(R, MethodTag)> {
    let word = two_sided(a, w)?;
    let n = a.num_states();
    Ok(match domain::<S>(method)? {
        Domain::Support(tag) => {
            let mats = support_mats(a);
            let plans = (Plan::Cycles(cycle_range(&mats, &word.l, n)), Plan::Cycles(cycle_range(&mats, &word.r, n)));
            (job_support(&BiScan { mats: &mats, word: &word, plans }), tag)
        }
        Domain::Values(tag) => {
            let plans = (Plan::Cycles(field_range(n)), Plan::Cycles(field_range(n)));
            (job_values(&BiScan { mats: a.matrices(), word: &word, plans }), tag)
        }
        Domain::Horizon(k) => {
            let plans = (Plan::Horizon(k as u64), Plan::Horizon(k as u64));
            let scan = BiScan { mats: a.matrices(), word: &word, plans };
            (job_values(&scan), MethodTag::BoundedHorizon(k))
        }
    })
}

/// Activation of all initial/final pairs by an infinite word.
pub fn activation_diverging<S: Semiring>(
    a: &Automaton<S>,
    w: &InfiniteWord,
    method: ActivationMethod,
) -> Result<ActivationVerdict> {
    let n = a.num_states();
    let (rows, cols) = relevant(a);
    let (mask, tag) =
        with_div_scan(a, w, method, |s| mask_rows(s, n, &rows, &cols), |s| mask_rows(s, n, &rows, &cols))?;
    Ok(verdict(a, mask, tag))
}

/// Activation of all initial/final pairs by a biinfinite word.
pub fn activation_bidiverging<S: Semiring>(
    a: &Automaton<S>,
    w: &BiInfiniteWord,
    method: ActivationMethod,
) -> Result<ActivationVerdict> {
    let n = a.num_states();
    let (rows, cols) = relevant(a);
    let (mask, tag) = with_bi_scan(a, w, method, |s| mask_rows(s, n, &rows, &cols), |s| mask_rows(s, n, &rows, &cols))?;
    Ok(verdict(a, mask, tag))
}

/// Whether the single pair `(i, f)` is activated by `w`.
pub fn activates_diverging<S: Semiring>(
    a: &Automaton<S>,
    w: &InfiniteWord,
    i: StateId,
    f: StateId,
    method: ActivationMethod,
) -> Result<bool> {
    let (i, f) = (a.index_of(i)?, a.index_of(f)?);
    let n = a.num_states();
    let (hit, _) =
        with_div_scan(a, w, method, |s| recurs(s, &unit(n, i), &unit(n, f)), |s| recurs(s, &unit(n, i), &unit(n, f)))?;
    Ok(hit)
}

pub fn activates_bidiverging<S: Semiring>(
    a: &Automaton<S>,
    w: &BiInfiniteWord,
    i: StateId,
    f: StateId,
    method: ActivationMethod,
) -> Result<bool> {
    let (i, f) = (a.index_of(i)?, a.index_of(f)?);
    let n = a.num_states();
    let (hit, _) =
        with_bi_scan(a, w, method, |s| recurs(s, &unit(n, i), &unit(n, f)), |s| recurs(s, &unit(n, i), &unit(n, f)))?;
    Ok(hit)
}

/// Whether `I · P(w[0..n]) · F` is non-zero for infinitely many `n`.
pub fn recurs_diverging<S: Semiring>(a: &Automaton<S>, w: &InfiniteWord, method: ActivationMethod) -> Result<bool> {
    let (i, f) = (a.initial(), a.final_weights());
    with_div_scan(a, w, method, |s| recurs(s, &support(i), &support(f)), |s| recurs(s, i, f)).map(|r| r.0)
}

/// Whether every window of `w` is enclosed in one where
/// `I · P(w[i..j]) · F` is non-zero.
pub fn recurs_bidiverging<S: Semiring>(a: &Automaton<S>, w: &BiInfiniteWord, method: ActivationMethod) -> Result<bool> {
    let (i, f) = (a.initial(), a.final_weights());
    with_bi_scan(a, w, method, |s| recurs(s, &support(i), &support(f)), |s| recurs(s, i, f)).map(|r| r.0)
}
