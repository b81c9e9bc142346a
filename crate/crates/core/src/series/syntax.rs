//! Surface syntax of expressions:
//!
//! ```text
//! conv  := sym(a, c) | sum(conv, ...) | cat(conv, conv, ...) | star(conv)
//!        | scale(c, conv, c)
//! div   := omega(conv) | conjoin(conv, conv) | sum(div, ...) | scale(c, div, c)
//! bidiv := zeta(conv) | conjoin3(conv, conv, conv) | sum(bidiv, ...)
//!        | scale(c, bidiv, c)
//! ```

use std::fmt;

use super::{BiDivExpr, ConvExpr, ConvNode, DivExpr};
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::words::Symbol;

/// Expression level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Conv,
    Div,
    BiDiv,
}

impl Level {
    pub fn parse(text: &str) -> Result<Level> {
        match text.trim() {
            "conv" => Ok(Level::Conv),
            "div" => Ok(Level::Div),
            "bidiv" => Ok(Level::BiDiv),
            t => Err(Error::parse(1, 1, format!("unknown level `{t}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::Conv => "conv",
            Level::Div => "div",
            Level::BiDiv => "bidiv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyExpr<S> {
    Conv(ConvExpr<S>),
    Div(DivExpr<S>),
    BiDiv(BiDivExpr<S>),
}

impl<S: Semiring> AnyExpr<S> {
    pub fn level(&self) -> Level {
        match self {
            AnyExpr::Conv(_) => Level::Conv,
            AnyExpr::Div(_) => Level::Div,
            AnyExpr::BiDiv(_) => Level::BiDiv,
        }
    }
}

impl<S: Semiring> fmt::Display for AnyExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyExpr::Conv(e) => e.fmt(f),
            AnyExpr::Div(e) => e.fmt(f),
            AnyExpr::BiDiv(e) => e.fmt(f),
        }
    }
}

/// Untyped call tree with source positions.
#[derive(Debug)]
struct Node {
    head: String,
    args: Option<Vec<Node>>,
    line: usize,
    column: usize,
}

impl Node {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.column, msg)
    }

    fn args(&self, arity: Option<usize>) -> Result<&[Node]> {
        let args = self.args.as_deref().ok_or_else(|| self.err(format!("`{}` needs arguments", self.head)))?;
        if let Some(k) = arity {
            if args.len() != k {
                return Err(self.err(format!("`{}` takes {k} arguments, got {}", self.head, args.len())));
            }
        }
        Ok(args)
    }

    fn leaf(&self) -> Result<&str> {
        match self.args {
            None => Ok(&self.head),
            Some(_) => Err(self.err(format!("expected a literal, found `{}(...)`", self.head))),
        }
    }

    fn literal<S: Semiring>(&self) -> Result<S> {
        S::parse_literal(self.leaf()?).map_err(|m| self.err(m))
    }
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    base: (usize, usize),
    _src: &'a str,
}

#[derive(Debug, PartialEq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Comma,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, base: (usize, usize)) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, line: 1, column: 1, base, _src: src }
    }

    fn here(&self) -> (usize, usize) {
        if self.line == 1 {
            (self.base.0, self.base.1 + self.column - 1)
        } else {
            (self.base.0 + self.line - 1, self.column)
        }
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

    fn skip_space(&mut self) {
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c == '#' {
                while self.pos < self.chars.len() && self.chars[self.pos] != '\n' {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// Next token and its position.
    fn next(&mut self) -> (Tok, (usize, usize)) {
        self.skip_space();
        let at = self.here();
        if self.pos == self.chars.len() {
            return (Tok::End, at);
        }
        let tok = match self.chars[self.pos] {
            '(' => {
                self.bump();
                Tok::Open
            }
            ')' => {
                self.bump();
                Tok::Close
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            _ => {
                let mut s = String::new();
                while self.pos < self.chars.len() {
                    let c = self.chars[self.pos];
                    if c.is_whitespace() || "(),#".contains(c) {
                        break;
                    }
                    s.push(self.bump());
                }
                Tok::Word(s)
            }
        };
        (tok, at)
    }

    fn peek(&mut self) -> Tok {
        let saved = (self.pos, self.line, self.column);
        let (t, _) = self.next();
        (self.pos, self.line, self.column) = saved;
        t
    }
}

fn parse_node(lx: &mut Lexer) -> Result<Node> {
    let (tok, (line, column)) = lx.next();
    let head = match tok {
        Tok::Word(w) => w,
        other => return Err(Error::parse(line, column, format!("unexpected {other:?}"))),
    };
    if lx.peek() != Tok::Open {
        return Ok(Node { head, args: None, line, column });
    }
    lx.next();
    let mut args = Vec::new();
    if lx.peek() == Tok::Close {
        lx.next();
        return Ok(Node { head, args: Some(args), line, column });
    }
    loop {
        args.push(parse_node(lx)?);
        let (t, (l, c)) = lx.next();
        match t {
            Tok::Comma => continue,
            Tok::Close => break,
            other => return Err(Error::parse(l, c, format!("expected `,` or `)`, found {other:?}"))),
        }
    }
    Ok(Node { head, args: Some(args), line, column })
}

fn parse_tree(src: &str, base: (usize, usize)) -> Result<Node> {
    let mut lx = Lexer::new(src, base);
    let node = parse_node(&mut lx)?;
    match lx.next() {
        (Tok::End, _) => Ok(node),
        (t, (l, c)) => Err(Error::parse(l, c, format!("trailing input {t:?}"))),
    }
}

fn to_conv<S: Semiring>(n: &Node) -> Result<ConvExpr<S>> {
    match n.head.as_str() {
        "sym" => {
            let a = n.args(Some(2))?;
            let name = a[0].leaf()?;
            if !Symbol::is_valid_name(name) {
                return Err(a[0].err(format!("invalid symbol `{name}`")));
            }
            Ok(ConvExpr::atom(Symbol::new(name), a[1].literal()?))
        }
        "sum" => Ok(ConvExpr::sum(n.args(None)?.iter().map(to_conv).collect::<Result<_>>()?)),
        "cat" => {
            let a = n.args(None)?;
            if a.len() < 2 {
                return Err(n.err("`cat` takes at least 2 arguments"));
            }
            let mut parts: Vec<ConvExpr<S>> = a.iter().map(to_conv).collect::<Result<_>>()?;
            let mut acc = parts.pop().expect("non-empty");
            while let Some(p) = parts.pop() {
                acc = ConvExpr::cat(p, acc);
            }
            Ok(acc)
        }
        "star" => Ok(ConvExpr::star(to_conv(&n.args(Some(1))?[0])?)),
        "scale" => {
            let a = n.args(Some(3))?;
            Ok(ConvExpr::scale(a[0].literal()?, to_conv(&a[1])?, a[2].literal()?))
        }
        other => Err(n.err(format!("unknown series constructor `{other}`"))),
    }
}

fn to_div<S: Semiring>(n: &Node) -> Result<DivExpr<S>> {
    match n.head.as_str() {
        "omega" => Ok(DivExpr::Omega(to_conv(&n.args(Some(1))?[0])?)),
        "conjoin" => {
            let a = n.args(Some(2))?;
            Ok(DivExpr::Conjoin(to_conv(&a[0])?, to_conv(&a[1])?))
        }
        "sum" => Ok(DivExpr::Sum(n.args(None)?.iter().map(to_div).collect::<Result<_>>()?)),
        "scale" => {
            let a = n.args(Some(3))?;
            Ok(DivExpr::scale(a[0].literal()?, to_div(&a[1])?, a[2].literal()?))
        }
        other => Err(n.err(format!("unknown divergent constructor `{other}`"))),
    }
}

fn to_bidiv<S: Semiring>(n: &Node) -> Result<BiDivExpr<S>> {
    match n.head.as_str() {
        "zeta" => Ok(BiDivExpr::Zeta(to_conv(&n.args(Some(1))?[0])?)),
        "conjoin3" | "conjoin" => {
            let a = n.args(Some(3))?;
            Ok(BiDivExpr::Conjoin3(to_conv(&a[0])?, to_conv(&a[1])?, to_conv(&a[2])?))
        }
        "sum" => Ok(BiDivExpr::Sum(n.args(None)?.iter().map(to_bidiv).collect::<Result<_>>()?)),
        "scale" => {
            let a = n.args(Some(3))?;
            Ok(BiDivExpr::scale(a[0].literal()?, to_bidiv(&a[1])?, a[2].literal()?))
        }
        other => Err(n.err(format!("unknown bidivergent constructor `{other}`"))),
    }
}

/// Level implied by the outermost non-sum, non-scale constructor.
fn infer_level(n: &Node) -> Level {
    match n.head.as_str() {
        "omega" => Level::Div,
        "conjoin" if n.args.as_ref().is_some_and(|a| a.len() == 2) => Level::Div,
        "zeta" | "conjoin3" | "conjoin" => Level::BiDiv,
        "sum" => {
            n.args.as_ref().and_then(|a| a.iter().map(infer_level).find(|l| *l != Level::Conv)).unwrap_or(Level::Conv)
        }
        "scale" => n.args.as_ref().and_then(|a| a.get(1)).map_or(Level::Conv, infer_level),
        _ => Level::Conv,
    }
}

pub fn parse_conv<S: Semiring>(src: &str) -> Result<ConvExpr<S>> {
    to_conv(&parse_tree(src, (1, 1))?)
}

pub fn parse_div<S: Semiring>(src: &str) -> Result<DivExpr<S>> {
    to_div(&parse_tree(src, (1, 1))?)
}

pub fn parse_bidiv<S: Semiring>(src: &str) -> Result<BiDivExpr<S>> {
    to_bidiv(&parse_tree(src, (1, 1))?)
}

/// Parses at the given level, or infers it from the constructors used.
/// `base` is the source position of the first character, for messages.
pub fn parse_any<S: Semiring>(src: &str, level: Option<Level>, base: (usize, usize)) -> Result<AnyExpr<S>> {
    let tree = parse_tree(src, base)?;
    match level.unwrap_or_else(|| infer_level(&tree)) {
        Level::Conv => to_conv(&tree).map(AnyExpr::Conv),
        Level::Div => to_div(&tree).map(AnyExpr::Div),
        Level::BiDiv => to_bidiv(&tree).map(AnyExpr::BiDiv),
    }
}

fn write_list<T>(
    f: &mut fmt::Formatter<'_>,
    head: &str,
    items: &[T],
    each: impl Fn(&mut fmt::Formatter<'_>, &T) -> fmt::Result,
) -> fmt::Result {
    write!(f, "{head}(")?;
    for (k, x) in items.iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        each(f, x)?;
    }
    f.write_str(")")
}

pub(super) fn write_conv<S: Semiring>(f: &mut fmt::Formatter<'_>, e: &ConvExpr<S>) -> fmt::Result {
    match e.node() {
        ConvNode::Atom(s, c) => write!(f, "sym({s}, {c})"),
        ConvNode::Sum(ts) => write_list(f, "sum", ts, |f, t| write_conv(f, t)),
        ConvNode::Cat(x, y) => {
            f.write_str("cat(")?;
            write_conv(f, x)?;
            f.write_str(", ")?;
            write_conv(f, y)?;
            f.write_str(")")
        }
        ConvNode::Star(x) => {
            f.write_str("star(")?;
            write_conv(f, x)?;
            f.write_str(")")
        }
        ConvNode::Scale(l, x, r) => {
            write!(f, "scale({l}, ")?;
            write_conv(f, x)?;
            write!(f, ", {r})")
        }
    }
}

pub(super) fn write_div<S: Semiring>(f: &mut fmt::Formatter<'_>, e: &DivExpr<S>) -> fmt::Result {
    match e {
        DivExpr::Omega(s) => write!(f, "omega({s})"),
        DivExpr::Conjoin(x, y) => write!(f, "conjoin({x}, {y})"),
        DivExpr::Sum(ts) => write_list(f, "sum", ts, |f, t| write_div(f, t)),
        DivExpr::Scale(l, x, r) => {
            write!(f, "scale({l}, ")?;
            write_div(f, x)?;
            write!(f, ", {r})")
        }
    }
}

pub(super) fn write_bidiv<S: Semiring>(f: &mut fmt::Formatter<'_>, e: &BiDivExpr<S>) -> fmt::Result {
    match e {
        BiDivExpr::Zeta(s) => write!(f, "zeta({s})"),
        BiDivExpr::Conjoin3(x, m, y) => write!(f, "conjoin3({x}, {m}, {y})"),
        BiDivExpr::Sum(ts) => write_list(f, "sum", ts, |f, t| write_bidiv(f, t)),
        BiDivExpr::Scale(l, x, r) => {
            write!(f, "scale({l}, ")?;
            write_bidiv(f, x)?;
            write!(f, ", {r})")
        }
    }
}
