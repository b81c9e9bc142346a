//! Finite, ultimately periodic and biinfinite words.
//!
//! Infinite words are stored as `u·v^ω`, biinfinite ones as `l^~ω · m · r^ω`
//! together with the position of the first letter after the left-infinite
//! part. Equality is semantic: two representations are equal when they spell
//! the same sequence.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A letter of an alphabet.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Symbols may not contain whitespace or the characters used by the
    /// text formats.
    pub fn is_valid_name(name: &str) -> bool {
        !name.is_empty()
            && name != "."
            && !name.chars().any(|c| c.is_whitespace() || "()[]{},:#".contains(c) || c == '^')
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

pub fn symbols(names: &str) -> Vec<Symbol> {
    names.split_whitespace().map(Symbol::new).collect()
}

/// A sorted set of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet(Arc<Vec<Symbol>>);

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        let mut v: Vec<Symbol> = symbols.into_iter().collect();
        v.sort();
        v.dedup();
        Alphabet(Arc::new(v))
    }

    pub fn from_names(names: &[&str]) -> Self {
        Self::new(names.iter().map(|s| Symbol::new(s)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.0.binary_search(s).ok()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.index_of(s).is_some()
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet::new(self.0.iter().chain(other.0.iter()).cloned())
    }
}

/// A finite word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FiniteWord(Vec<Symbol>);

impl FiniteWord {
    pub fn new(letters: Vec<Symbol>) -> Self {
        FiniteWord(letters)
    }

    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Symbol] {
        &self.0
    }

    pub fn at(&self, i: usize) -> Result<&Symbol> {
        self.0.get(i).ok_or_else(|| Error::IndexOutOfRange(format!("{i} in word of length {}", self.len())))
    }

    /// `w[s..e]`.
    pub fn slice(&self, s: usize, e: usize) -> Result<FiniteWord> {
        if s > e || e > self.len() {
            return Err(Error::IndexOutOfRange(format!("slice {s}..{e} of word of length {}", self.len())));
        }
        Ok(FiniteWord(self.0[s..e].to_vec()))
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        FiniteWord(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn prepend_to(&self, w: &InfiniteWord) -> InfiniteWord {
        InfiniteWord { prefix: self.0.iter().chain(&w.prefix).cloned().collect(), cycle: w.cycle.clone() }
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        write_letters(f, &self.0)
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[Symbol]) -> fmt::Result {
    for (k, s) in letters.iter().enumerate() {
        if k > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

/// An ultimately periodic word `u·v^ω` with `v` non-empty.
#[derive(Clone, Debug)]
pub struct InfiniteWord {
    prefix: Vec<Symbol>,
    cycle: Vec<Symbol>,
}

impl InfiniteWord {
    pub fn new(prefix: Vec<Symbol>, cycle: Vec<Symbol>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidWord("empty cycle".into()));
        }
        Ok(InfiniteWord { prefix, cycle })
    }

    pub fn periodic(cycle: Vec<Symbol>) -> Result<Self> {
        Self::new(Vec::new(), cycle)
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Symbol] {
        &self.cycle
    }

    pub fn at(&self, i: usize) -> &Symbol {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// `w[s..e]`.
    pub fn slice(&self, s: usize, e: usize) -> Result<FiniteWord> {
        if s > e {
            return Err(Error::IndexOutOfRange(format!("slice {s}..{e}")));
        }
        Ok(FiniteWord((s..e).map(|i| self.at(i).clone()).collect()))
    }

    /// `w[s..∞]`.
    pub fn suffix(&self, s: usize) -> InfiniteWord {
        let start = s.max(self.prefix.len());
        let k = self.cycle.len();
        InfiniteWord {
            prefix: (s..start).map(|i| self.at(i).clone()).collect(),
            cycle: (start..start + k).map(|i| self.at(i).clone()).collect(),
        }
    }
}

impl PartialEq for InfiniteWord {
    fn eq(&self, other: &Self) -> bool {
        let window = self.prefix.len() + other.prefix.len() + 2 * self.cycle.len().lcm(&other.cycle.len());
        (0..window).all(|i| self.at(i) == other.at(i))
    }
}

impl Eq for InfiniteWord {}

impl fmt::Display for InfiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            write_letters(f, &self.prefix)?;
            f.write_str(" . ")?;
        }
        f.write_str("( ")?;
        write_letters(f, &self.cycle)?;
        f.write_str(" )^w")
    }
}

/// A biinfinite word `l^~ω · m · r^ω`; `boundary` is the position of the
/// first letter of `m` (of `r` when `m` is empty).
#[derive(Clone, Debug)]
pub struct BiInfiniteWord {
    left: Vec<Symbol>,
    center: Vec<Symbol>,
    right: Vec<Symbol>,
    boundary: i64,
}

impl BiInfiniteWord {
    pub fn new(left: Vec<Symbol>, center: Vec<Symbol>, right: Vec<Symbol>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidWord("empty cycle".into()));
        }
        Ok(BiInfiniteWord { left, center, right, boundary: 0 })
    }

    /// `v^ζ`, i.e. `v^~ω · v^ω`.
    pub fn periodic(cycle: Vec<Symbol>) -> Result<Self> {
        Self::new(cycle.clone(), Vec::new(), cycle)
    }

    pub fn left(&self) -> &[Symbol] {
        &self.left
    }

    pub fn center(&self) -> &[Symbol] {
        &self.center
    }

    pub fn right(&self) -> &[Symbol] {
        &self.right
    }

    pub fn boundary(&self) -> i64 {
        self.boundary
    }

    fn center_end(&self) -> i64 {
        self.boundary + self.center.len() as i64
    }

    pub fn at(&self, i: i64) -> &Symbol {
        if i < self.boundary {
            let back = (self.boundary - 1 - i) as usize;
            let k = self.left.len();
            &self.left[k - 1 - back % k]
        } else if i < self.center_end() {
            &self.center[(i - self.boundary) as usize]
        } else {
            &self.right[(i - self.center_end()) as usize % self.right.len()]
        }
    }

    /// `w^{→k}`, with `w^{→k}(i) = w(i - k)`.
    pub fn shift_by(&self, k: i64) -> BiInfiniteWord {
        BiInfiniteWord { boundary: self.boundary + k, ..self.clone() }
    }

    /// `w[s..e]`.
    pub fn slice(&self, s: i64, e: i64) -> Result<FiniteWord> {
        if s > e {
            return Err(Error::IndexOutOfRange(format!("slice {s}..{e}")));
        }
        Ok(FiniteWord((s..e).map(|i| self.at(i).clone()).collect()))
    }

    /// `w[s..∞]`.
    pub fn suffix(&self, s: i64) -> InfiniteWord {
        let start = s.max(self.center_end());
        let k = self.right.len() as i64;
        InfiniteWord {
            prefix: (s..start).map(|i| self.at(i).clone()).collect(),
            cycle: (start..start + k).map(|i| self.at(i).clone()).collect(),
        }
    }
}

impl PartialEq for BiInfiniteWord {
    fn eq(&self, other: &Self) -> bool {
        let lo = self.boundary.min(other.boundary) - self.left.len().lcm(&other.left.len()) as i64;
        let hi = self.center_end().max(other.center_end()) + self.right.len().lcm(&other.right.len()) as i64;
        (lo..hi).all(|i| self.at(i) == other.at(i))
    }
}

impl Eq for BiInfiniteWord {}

impl fmt::Display for BiInfiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("( ")?;
        write_letters(f, &self.left)?;
        f.write_str(" )^~w . ")?;
        if !self.center.is_empty() {
            write_letters(f, &self.center)?;
            f.write_str(" . ")?;
        }
        f.write_str("( ")?;
        write_letters(f, &self.right)?;
        f.write_str(" )^w")?;
        if self.boundary != 0 {
            write!(f, " @ {}", self.boundary)?;
        }
        Ok(())
    }
}

/// Any of the three word kinds, as produced by [`Word::parse`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Finite(FiniteWord),
    Infinite(InfiniteWord),
    BiInfinite(BiInfiniteWord),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Sym(String),
    Open,
    CloseOmega,
    CloseBackOmega,
    Dot,
    At,
}

fn lex_word(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c.is_whitespace() {
            k += 1;
        } else if c == '(' {
            out.push((Tok::Open, col));
            k += 1;
        } else if c == ')' {
            let rest: String = chars[k + 1..].iter().collect();
            if rest.starts_with("^~w") || rest.starts_with("^~ω") {
                out.push((Tok::CloseBackOmega, col));
                k += 4;
            } else if rest.starts_with("^w") || rest.starts_with("^ω") {
                out.push((Tok::CloseOmega, col));
                k += 3;
            } else {
                return Err(Error::parse(1, col, "expected `)^w` or `)^~w`"));
            }
        } else if c == '.' && chars.get(k + 1).is_none_or(|d| d.is_whitespace() || *d == '(') {
            out.push((Tok::Dot, col));
            k += 1;
        } else if c == '@' {
            out.push((Tok::At, col));
            k += 1;
        } else {
            let start = k;
            while k < chars.len() && !chars[k].is_whitespace() && !"()".contains(chars[k]) {
                k += 1;
            }
            let name: String = chars[start..k].iter().collect();
            if !Symbol::is_valid_name(&name) {
                return Err(Error::parse(1, col, format!("invalid symbol `{name}`")));
            }
            out.push((Tok::Sym(name), col));
        }
    }
    Ok(out)
}

impl Word {
    /// Parses `a b c`, `a b . ( c d )^w` or `( b )^~w . g . ( a )^w`.
    /// A trailing `@ k` on a biinfinite word shifts it by `k`.
    pub fn parse(text: &str) -> Result<Word> {
        let toks = lex_word(text)?;
        let end_col = text.chars().count() + 1;
        let mut pos = 0;
        let col = |p: usize| toks.get(p).map_or(end_col, |t| t.1);

        let take_syms = |pos: &mut usize| {
            let mut v = Vec::new();
            while let Some((Tok::Sym(s), _)) = toks.get(*pos) {
                if s != "ε" {
                    v.push(Symbol::new(s));
                }
                *pos += 1;
            }
            v
        };
        let skip_dot = |pos: &mut usize| {
            if matches!(toks.get(*pos), Some((Tok::Dot, _))) {
                *pos += 1;
            }
        };
        let cycle = |pos: &mut usize, close: Tok| -> Result<Vec<Symbol>> {
            if !matches!(toks.get(*pos), Some((Tok::Open, _))) {
                return Err(Error::parse(1, col(*pos), "expected `(`"));
            }
            *pos += 1;
            let v = take_syms(pos);
            match toks.get(*pos) {
                Some((t, _)) if *t == close => {}
                _ => return Err(Error::parse(1, col(*pos), "unterminated cycle")),
            }
            *pos += 1;
            if v.is_empty() {
                return Err(Error::parse(1, col(*pos - 1), "empty cycle"));
            }
            Ok(v)
        };

        let first = take_syms(&mut pos);
        let word = if pos == toks.len() {
            Word::Finite(FiniteWord(first))
        } else {
            skip_dot(&mut pos);
            let open_at = pos;
            // Look ahead for the closing token of this group.
            let close = toks[open_at..]
                .iter()
                .find(|t| matches!(t.0, Tok::CloseOmega | Tok::CloseBackOmega))
                .map(|t| t.0.clone());
            match close {
                Some(Tok::CloseBackOmega) if first.is_empty() => {
                    let left = cycle(&mut pos, Tok::CloseBackOmega)?;
                    skip_dot(&mut pos);
                    let center = take_syms(&mut pos);
                    skip_dot(&mut pos);
                    let right = cycle(&mut pos, Tok::CloseOmega)?;
                    let mut w = BiInfiniteWord::new(left, center, right)?;
                    if matches!(toks.get(pos), Some((Tok::At, _))) {
                        pos += 1;
                        let shift = match toks.get(pos) {
                            Some((Tok::Sym(s), _)) => s.parse::<i64>().ok(),
                            _ => None,
                        }
                        .ok_or_else(|| Error::parse(1, col(pos), "expected integer shift"))?;
                        pos += 1;
                        w = w.shift_by(shift);
                    }
                    Word::BiInfinite(w)
                }
                Some(Tok::CloseOmega) => {
                    let c = cycle(&mut pos, Tok::CloseOmega)?;
                    Word::Infinite(InfiniteWord::new(first, c)?)
                }
                _ => return Err(Error::parse(1, col(open_at), "malformed word")),
            }
        };
        if pos != toks.len() {
            return Err(Error::parse(1, col(pos), "trailing input after word"));
        }
        Ok(word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Finite(w) => w.fmt(f),
            Word::Infinite(w) => w.fmt(f),
            Word::BiInfinite(w) => w.fmt(f),
        }
    }
}
