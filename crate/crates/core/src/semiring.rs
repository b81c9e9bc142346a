//! Commutative semirings with exact arithmetic.
//!
//! Every value type implements [`Semiring`]. Field instances additionally
//! expose negation and inversion, which the reduction and rate code use.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::activation::ExactMethod;

/// A commutative semiring `(S, +, ·, 0, 1)`.
pub trait Semiring: Clone + Debug + Display + PartialEq + Eq + Hash + Send + Sync + 'static {
    /// Name used in the text formats.
    const NAME: &'static str;
    /// Whether `a + b = 0` is possible with `a, b != 0`.
    const HAS_CANCELLATION: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// The exact activation procedure available for this semiring, if any.
    fn exact_activation() -> Option<ExactMethod>;

    /// Additive inverse, for rings.
    fn negate(&self) -> Option<Self> {
        None
    }

    /// Multiplicative inverse, for fields. `None` for zero.
    fn inverse(&self) -> Option<Self> {
        None
    }

    /// For zero-sum-free semirings without zero divisors: a rational with
    /// the same zero pattern, so supports can be computed over a field.
    fn support_witness(&self) -> Option<Rational> {
        None
    }

    /// Involution used by the bra construction. Identity unless overridden.
    fn conj(&self) -> Self {
        self.clone()
    }

    fn parse_literal(text: &str) -> Result<Self, String>;

    fn from_u64(n: u64) -> Self {
        let mut acc = Self::zero();
        let one = Self::one();
        for _ in 0..n {
            acc = acc.add(&one);
        }
        acc
    }

    fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        items.into_iter().fold(Self::zero(), |acc, x| acc.add(x))
    }

    fn sub(&self, rhs: &Self) -> Option<Self> {
        rhs.negate().map(|n| self.add(&n))
    }
}

/// The Boolean semiring `({F, T}, or, and)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Boolean(pub bool);

impl Display for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "T" } else { "F" })
    }
}

impl Semiring for Boolean {
    const NAME: &'static str = "boolean";
    const HAS_CANCELLATION: bool = false;

    fn zero() -> Self {
        Boolean(false)
    }
    fn one() -> Self {
        Boolean(true)
    }
    fn add(&self, rhs: &Self) -> Self {
        Boolean(self.0 || rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Boolean(self.0 && rhs.0)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn exact_activation() -> Option<ExactMethod> {
        Some(ExactMethod::BooleanMonoid)
    }
    fn support_witness(&self) -> Option<Rational> {
        Some(Rational::from_integer(self.0 as i64))
    }
    fn parse_literal(text: &str) -> Result<Self, String> {
        match text.trim() {
            "T" | "true" | "1" => Ok(Boolean(true)),
            "F" | "false" | "0" => Ok(Boolean(false)),
            other => Err(format!("invalid boolean literal `{other}`")),
        }
    }
}

/// The natural numbers with unbounded precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Natural(pub BigUint);

impl Natural {
    pub fn new(n: u64) -> Self {
        Natural(BigUint::from(n))
    }

    pub fn pow(base: u64, exp: u32) -> Self {
        Natural(num_traits::pow(BigUint::from(base), exp as usize))
    }
}

impl Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&self.0, f)
    }
}

impl Semiring for Natural {
    const NAME: &'static str = "natural";
    const HAS_CANCELLATION: bool = false;

    fn zero() -> Self {
        Natural(BigUint::zero())
    }
    fn one() -> Self {
        Natural(BigUint::one())
    }
    fn add(&self, rhs: &Self) -> Self {
        Natural(&self.0 + &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Natural(&self.0 * &rhs.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn exact_activation() -> Option<ExactMethod> {
        Some(ExactMethod::NaturalReduction)
    }
    fn support_witness(&self) -> Option<Rational> {
        Some(Rational(BigRational::from_integer(BigInt::from(self.0.clone()))))
    }
    fn from_u64(n: u64) -> Self {
        Natural::new(n)
    }
    fn parse_literal(text: &str) -> Result<Self, String> {
        text.trim().parse::<BigUint>().map(Natural).map_err(|_| format!("invalid natural literal `{}`", text.trim()))
    }
}

/// Rationals `p/q` in lowest terms with `q > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(p: i64, q: i64) -> Self {
        Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_integer(p: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(p)))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }
}

impl Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&self.0, f)
    }
}

fn parse_big_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    let bad = || format!("invalid rational literal `{t}`");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t, None),
    };
    let num = num.strip_prefix('+').unwrap_or(num);
    let p: BigInt = num.parse().map_err(|_| bad())?;
    let q: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(format!("zero denominator in `{t}`"));
    }
    Ok(BigRational::new(p, q))
}

impl Semiring for Rational {
    const NAME: &'static str = "rational";
    const HAS_CANCELLATION: bool = true;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn exact_activation() -> Option<ExactMethod> {
        Some(ExactMethod::FieldLrs)
    }
    fn negate(&self) -> Option<Self> {
        Some(Rational(-&self.0))
    }
    fn inverse(&self) -> Option<Self> {
        (!self.0.is_zero()).then(|| Rational(self.0.recip()))
    }
    fn from_u64(n: u64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
    fn parse_literal(text: &str) -> Result<Self, String> {
        parse_big_rational(text).map(Rational)
    }
}

/// Gaussian rationals `a + b·i` with `a, b` rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gaussian(pub Complex<BigRational>);

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gaussian(Complex::new(re.0, im.0))
    }

    pub fn real(re: Rational) -> Self {
        Gaussian(Complex::new(re.0, BigRational::zero()))
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        Gaussian::new(Rational::from_integer(re), Rational::from_integer(im))
    }

    pub fn i() -> Self {
        Gaussian::from_integers(0, 1)
    }

    pub fn re(&self) -> Rational {
        Rational(self.0.re.clone())
    }

    pub fn im(&self) -> Rational {
        Rational(self.0.im.clone())
    }
}

impl Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (&self.0.re, &self.0.im);
        if im.is_zero() {
            return write!(f, "{re}");
        }
        let mag = im.abs();
        let coeff = if mag.is_one() { String::new() } else { mag.to_string() };
        match (re.is_zero(), im.is_negative()) {
            (true, false) => write!(f, "{coeff}i"),
            (true, true) => write!(f, "-{coeff}i"),
            (false, false) => write!(f, "{re}+{coeff}i"),
            (false, true) => write!(f, "{re}-{coeff}i"),
        }
    }
}

fn parse_gaussian(text: &str) -> Result<Gaussian, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid gaussian literal `{t}`");
    let Some(body) = t.strip_suffix('i') else {
        return parse_big_rational(&t).map(|r| Gaussian::real(Rational(r)));
    };
    // Split before the last sign that is not the leading one.
    let split = body.char_indices().filter(|&(k, c)| k > 0 && (c == '+' || c == '-')).map(|(k, _)| k).next_back();
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { BigRational::zero() } else { parse_big_rational(re_part).map_err(|_| bad())? };
    let im = match im_part {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        s => parse_big_rational(s).map_err(|_| bad())?,
    };
    Ok(Gaussian(Complex::new(re, im)))
}

impl Semiring for Gaussian {
    const NAME: &'static str = "gaussian";
    const HAS_CANCELLATION: bool = true;

    fn zero() -> Self {
        Gaussian(Complex::new(BigRational::zero(), BigRational::zero()))
    }
    fn one() -> Self {
        Gaussian(Complex::new(BigRational::one(), BigRational::zero()))
    }
    fn add(&self, rhs: &Self) -> Self {
        Gaussian(&self.0 + &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Gaussian(&self.0 * &rhs.0)
    }
    fn is_zero(&self) -> bool {
        self.0.re.is_zero() && self.0.im.is_zero()
    }
    fn exact_activation() -> Option<ExactMethod> {
        Some(ExactMethod::FieldLrs)
    }
    fn negate(&self) -> Option<Self> {
        Some(Gaussian(-&self.0))
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.0.re * &self.0.re + &self.0.im * &self.0.im;
        Some(Gaussian(Complex::new(&self.0.re / &norm, -(&self.0.im / &norm))))
    }
    fn conj(&self) -> Self {
        Gaussian(self.0.conj())
    }
    fn from_u64(n: u64) -> Self {
        Gaussian::from_integers(n as i64, 0)
    }
    fn parse_literal(text: &str) -> Result<Self, String> {
        parse_gaussian(text)
    }
}

/// Lazily evaluated sequence `n ↦ s(n)`.
#[derive(Clone)]
pub struct WeightSequence<S> {
    eval: Arc<dyn Fn(usize) -> S + Send + Sync>,
}

impl<S: Semiring> WeightSequence<S> {
    pub fn new(f: impl Fn(usize) -> S + Send + Sync + 'static) -> Self {
        WeightSequence { eval: Arc::new(f) }
    }

    pub fn zero() -> Self {
        Self::new(|_| S::zero())
    }

    pub fn at(&self, n: usize) -> S {
        (self.eval)(n)
    }

    /// The values at `0..len`.
    pub fn prefix(&self, len: usize) -> Vec<S> {
        (0..len).map(|n| self.at(n)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(move |n| a.at(n).add(&b.at(n)))
    }

    /// `n ↦ l · s(n) · r`.
    pub fn scale(&self, l: S, r: S) -> Self {
        let a = self.clone();
        Self::new(move |n| l.mul(&a.at(n)).mul(&r))
    }
}

impl<S: Semiring> Debug for WeightSequence<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.prefix(8)).finish()
    }
}

/// Lazily evaluated grid `(i, n) ↦ s(i, n)` for biinfinite behaviors.
#[derive(Clone)]
pub struct BiWeightGrid<S> {
    eval: Arc<dyn Fn(i64, usize) -> S + Send + Sync>,
}

impl<S: Semiring> BiWeightGrid<S> {
    pub fn new(f: impl Fn(i64, usize) -> S + Send + Sync + 'static) -> Self {
        BiWeightGrid { eval: Arc::new(f) }
    }

    pub fn zero() -> Self {
        Self::new(|_, _| S::zero())
    }

    pub fn at(&self, i: i64, n: usize) -> S {
        (self.eval)(i, n)
    }

    /// The sequence `n ↦ s(i, n)` for a fixed start.
    pub fn row(&self, i: i64) -> WeightSequence<S> {
        let g = self.clone();
        WeightSequence::new(move |n| g.at(i, n))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(move |i, n| a.at(i, n).add(&b.at(i, n)))
    }

    pub fn scale(&self, l: S, r: S) -> Self {
        let a = self.clone();
        Self::new(move |i, n| l.mul(&a.at(i, n)).mul(&r))
    }
}
