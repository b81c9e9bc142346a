//! Text formats for automata and expressions.
//!
//! ```text
//! # Comments run to the end of the line.
//! semiring: natural
//! alphabet: [a, b]
//! states: [0, 1]
//! initial: {0: 1}
//! final: {1: 2}
//! transitions: [
//!   {from: 0, to: 1, symbol: a, weight: 3},
//!   {from: 1, to: 1, symbol: b, weight: 1},
//! ]
//! ```
//!
//! Expression files carry the same `semiring` and `alphabet` keys, an
//! optional `level` (`conv`, `div` or `bidiv`), and a final `expr:` key whose
//! value runs to the end of the file.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::semiring::{Boolean, Gaussian, Natural, Rational, Semiring};
use crate::series::{parse_any, AnyExpr, Level};
use crate::words::{Alphabet, Symbol};

#[derive(Clone, Debug)]
enum Value {
    Atom(String),
    List(Vec<Spanned>),
    Map(Vec<(Spanned, Spanned)>),
}

#[derive(Clone, Debug)]
struct Spanned {
    value: Value,
    line: usize,
    column: usize,
}

impl Spanned {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.column, msg)
    }

    fn atom(&self) -> Result<&str> {
        match &self.value {
            Value::Atom(s) => Ok(s),
            _ => Err(self.err("expected a single value")),
        }
    }

    fn list(&self) -> Result<&[Spanned]> {
        match &self.value {
            Value::List(v) => Ok(v),
            _ => Err(self.err("expected a list `[..]`")),
        }
    }

    fn map(&self) -> Result<&[(Spanned, Spanned)]> {
        match &self.value {
            Value::Map(v) => Ok(v),
            _ => Err(self.err("expected a map `{..}`")),
        }
    }

    fn literal<S: Semiring>(&self) -> Result<S> {
        S::parse_literal(self.atom()?).map_err(|m| self.err(m))
    }

    fn state(&self) -> Result<StateId> {
        let s = self.atom()?;
        s.parse::<u64>().map(StateId).map_err(|_| self.err(format!("invalid state id `{s}`")))
    }

    fn symbol(&self) -> Result<Symbol> {
        let s = self.atom()?;
        if Symbol::is_valid_name(s) {
            Ok(Symbol::new(s))
        } else {
            Err(self.err(format!("invalid symbol `{s}`")))
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok {
    Word(String),
    Punct(char),
    End,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer { chars: text.chars().collect(), pos: 0, line: 1, column: 1 }
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }

    fn next(&mut self) -> (Tok, usize, usize) {
        while self.pos < self.chars.len() {
            match self.chars[self.pos] {
                '#' => {
                    while self.pos < self.chars.len() && self.chars[self.pos] != '\n' {
                        self.bump();
                    }
                }
                c if c.is_whitespace() => {
                    self.bump();
                }
                _ => break,
            }
        }
        let (line, column) = (self.line, self.column);
        if self.pos == self.chars.len() {
            return (Tok::End, line, column);
        }
        let c = self.chars[self.pos];
        if "[]{},:".contains(c) {
            self.bump();
            return (Tok::Punct(c), line, column);
        }
        let mut s = String::new();
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_whitespace() || "[]{},:#".contains(c) {
                break;
            }
            s.push(self.bump());
        }
        (Tok::Word(s), line, column)
    }

    fn peek(&mut self) -> Tok {
        let saved = (self.pos, self.line, self.column);
        let (t, _, _) = self.next();
        (self.pos, self.line, self.column) = saved;
        t
    }

    fn expect(&mut self, p: char) -> Result<()> {
        match self.next() {
            (Tok::Punct(c), _, _) if c == p => Ok(()),
            (t, l, c) => Err(Error::parse(l, c, format!("expected `{p}`, found {}", show(&t)))),
        }
    }
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

fn parse_value(lx: &mut Lexer) -> Result<Spanned> {
    let (tok, line, column) = lx.next();
    let value = match tok {
        Tok::Word(w) => Value::Atom(w),
        Tok::Punct('[') => {
            let mut items = Vec::new();
            loop {
                if lx.peek() == Tok::Punct(']') {
                    lx.next();
                    break;
                }
                items.push(parse_value(lx)?);
                match lx.next() {
                    (Tok::Punct(','), _, _) => {}
                    (Tok::Punct(']'), _, _) => break,
                    (t, l, c) => return Err(Error::parse(l, c, format!("expected `,` or `]`, found {}", show(&t)))),
                }
            }
            Value::List(items)
        }
        Tok::Punct('{') => {
            let mut items = Vec::new();
            loop {
                if lx.peek() == Tok::Punct('}') {
                    lx.next();
                    break;
                }
                let key = parse_value(lx)?;
                key.atom()?;
                lx.expect(':')?;
                items.push((key, parse_value(lx)?));
                match lx.next() {
                    (Tok::Punct(','), _, _) => {}
                    (Tok::Punct('}'), _, _) => break,
                    (t, l, c) => return Err(Error::parse(l, c, format!("expected `,` or `}}`, found {}", show(&t)))),
                }
            }
            Value::Map(items)
        }
        t => return Err(Error::parse(line, column, format!("expected a value, found {}", show(&t)))),
    };
    Ok(Spanned { value, line, column })
}

/// Top-level `key: value` entries, in order; duplicate keys are rejected.
fn parse_block(text: &str) -> Result<BTreeMap<String, Spanned>> {
    let mut lx = Lexer::new(text);
    let mut out = BTreeMap::new();
    loop {
        let (tok, line, column) = lx.next();
        let key = match tok {
            Tok::End => return Ok(out),
            Tok::Word(w) => w,
            t => return Err(Error::parse(line, column, format!("expected a key, found {}", show(&t)))),
        };
        lx.expect(':')?;
        let value = parse_value(&mut lx)?;
        if out.insert(key.clone(), value).is_some() {
            return Err(Error::parse(line, column, format!("duplicate key `{key}`")));
        }
    }
}

fn required<'a>(block: &'a BTreeMap<String, Spanned>, key: &str) -> Result<&'a Spanned> {
    block.get(key).ok_or_else(|| Error::parse(1, 1, format!("missing key `{key}`")))
}

fn check_keys(block: &BTreeMap<String, Spanned>, allowed: &[&str]) -> Result<()> {
    match block.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, v)) => Err(v.err(format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

fn parse_alphabet(v: &Spanned) -> Result<Alphabet> {
    Ok(Alphabet::new(v.list()?.iter().map(Spanned::symbol).collect::<Result<Vec<_>>>()?))
}

/// Semiring names accepted in the `semiring:` key.
pub const SEMIRINGS: [&str; 4] = [Boolean::NAME, Natural::NAME, Rational::NAME, Gaussian::NAME];

/// The value of the `semiring:` key.
pub fn semiring_name(text: &str) -> Result<String> {
    let block = parse_block(header(text).0)?;
    let v = required(&block, "semiring")?;
    let name = v.atom()?;
    if !SEMIRINGS.contains(&name) {
        return Err(v.err(format!("unknown semiring `{name}`; expected one of {SEMIRINGS:?}")));
    }
    Ok(name.to_string())
}

fn check_semiring<S: Semiring>(block: &BTreeMap<String, Spanned>) -> Result<()> {
    let v = required(block, "semiring")?;
    let name = v.atom()?;
    if !SEMIRINGS.contains(&name) {
        return Err(v.err(format!("unknown semiring `{name}`")));
    }
    if name != S::NAME {
        return Err(Error::SemiringMismatch { expected: S::NAME.into(), found: name.into() });
    }
    Ok(())
}

/// Parses an automaton file whose semiring must be `S`.
pub fn parse_automaton<S: Semiring>(text: &str) -> Result<Automaton<S>> {
    let block = parse_block(text)?;
    check_keys(&block, &["semiring", "alphabet", "states", "initial", "final", "transitions"])?;
    check_semiring::<S>(&block)?;
    let alphabet = parse_alphabet(required(&block, "alphabet")?)?;
    let states_v = required(&block, "states")?;
    let states = states_v.list()?.iter().map(Spanned::state).collect::<Result<Vec<_>>>()?;
    let mut a = Automaton::new(alphabet, states)?;
    let locate = |v: &Spanned, e: Error| match e {
        Error::Parse { .. } => e,
        other => v.err(other.to_string()),
    };
    for (key, is_initial) in [("initial", true), ("final", false)] {
        if let Some(v) = block.get(key) {
            for (k, w) in v.map()? {
                let id = k.state()?;
                let weight = w.literal::<S>()?;
                let r = if is_initial { a.set_initial(id, weight) } else { a.set_final(id, weight) };
                r.map_err(|e| locate(k, e))?;
            }
        }
    }
    if let Some(v) = block.get("transitions") {
        for t in v.list()? {
            let fields = t.map()?;
            let get = |name: &str| {
                fields
                    .iter()
                    .find(|(k, _)| k.atom().ok() == Some(name))
                    .map(|(_, v)| v)
                    .ok_or_else(|| t.err(format!("transition is missing `{name}`")))
            };
            if let Some((k, _)) =
                fields.iter().find(|(k, _)| !["from", "to", "symbol", "weight"].contains(&k.atom().unwrap_or("")))
            {
                return Err(k.err(format!("unknown transition field `{}`", k.atom()?)));
            }
            let (from, to) = (get("from")?.state()?, get("to")?.state()?);
            let sym_v = get("symbol")?;
            let sym = sym_v.symbol()?;
            let weight = get("weight")?.literal::<S>()?;
            a.add_transition(from, to, &sym, weight).map_err(|e| locate(sym_v, e))?;
        }
    }
    Ok(a)
}

fn join<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> String) -> String {
    items.into_iter().map(f).collect::<Vec<_>>().join(", ")
}

fn write_alphabet(alphabet: &Alphabet) -> String {
    format!("[{}]", join(alphabet.symbols(), |s| s.to_string()))
}

/// Serializes with states by id and transitions in lexicographic order;
/// zero weights are omitted.
pub fn write_automaton<S: Semiring>(a: &Automaton<S>) -> String {
    let mut order: Vec<usize> = (0..a.num_states()).collect();
    order.sort_by_key(|&k| a.states()[k]);
    let weights =
        |v: &[S]| join(order.iter().filter(|&&k| !v[k].is_zero()), |&k| format!("{}: {}", a.states()[k], v[k]));
    let mut out = String::new();
    writeln!(out, "semiring: {}", S::NAME).unwrap();
    writeln!(out, "alphabet: {}", write_alphabet(a.alphabet())).unwrap();
    writeln!(out, "states: [{}]", join(&order, |&k| a.states()[k].to_string())).unwrap();
    writeln!(out, "initial: {{{}}}", weights(a.initial())).unwrap();
    writeln!(out, "final: {{{}}}", weights(a.final_weights())).unwrap();
    let ts = a.transition_list();
    if ts.is_empty() {
        out.push_str("transitions: []\n");
    } else {
        out.push_str("transitions: [\n");
        for (from, to, sym, w) in ts {
            writeln!(out, "  {{from: {from}, to: {to}, symbol: {sym}, weight: {w}}},").unwrap();
        }
        out.push_str("]\n");
    }
    out
}

/// Splits an expression file at the `expr:` key: the header, the
/// expression text and the position where it starts.
fn header(text: &str) -> (&str, Option<(&str, (usize, usize))>) {
    let mut offset = 0;
    for (k, line) in text.split_inclusive('\n').enumerate() {
        let trimmed = line.trim_start();
        if trimmed.starts_with("expr:") {
            let indent = line.len() - trimmed.len();
            let col = line[..indent].chars().count() + "expr:".len() + 1;
            let start = offset + indent + "expr:".len();
            return (&text[..offset], Some((&text[start..], (k + 1, col))));
        }
        offset += line.len();
    }
    (text, None)
}

/// Whether the text has an `expr:` key, making it an expression file.
pub fn is_expr_file(text: &str) -> bool {
    header(text).1.is_some()
}

/// An expression together with the alphabet it is read over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprFile<S> {
    pub alphabet: Alphabet,
    pub expr: AnyExpr<S>,
}

/// Parses an expression file; `level` overrides the `level:` key.
pub fn parse_expr_file<S: Semiring>(text: &str, level: Option<Level>) -> Result<ExprFile<S>> {
    let (head, body) = header(text);
    let block = parse_block(head)?;
    check_keys(&block, &["semiring", "alphabet", "level"])?;
    check_semiring::<S>(&block)?;
    let alphabet = parse_alphabet(required(&block, "alphabet")?)?;
    let level = match (level, block.get("level")) {
        (Some(l), _) => Some(l),
        (None, Some(v)) => {
            Some(Level::parse(v.atom()?).map_err(|_| v.err(format!("unknown level `{}`", v.atom().unwrap_or(""))))?)
        }
        (None, None) => None,
    };
    let (src, base) = body.ok_or_else(|| Error::parse(1, 1, "missing key `expr`"))?;
    let expr = parse_any::<S>(src, level, base)?;
    let symbols = match &expr {
        AnyExpr::Conv(e) => e.symbols(),
        AnyExpr::Div(e) => e.symbols(),
        AnyExpr::BiDiv(e) => e.symbols(),
    };
    if let Some(s) = symbols.iter().find(|s| !alphabet.contains(s)) {
        return Err(Error::UnknownSymbol(s.to_string()));
    }
    Ok(ExprFile { alphabet, expr })
}

pub fn write_expr_file<S: Semiring>(f: &ExprFile<S>) -> String {
    format!(
        "semiring: {}\nalphabet: {}\nlevel: {}\nexpr: {}\n",
        S::NAME,
        write_alphabet(&f.alphabet),
        f.expr.level().name(),
        f.expr
    )
}
