//! `divergent`: constructions and evaluations on diverging and bidiverging
//! automata and rational series, over text files.
//!
//! Exit codes: 0 on success, 1 on a semantic error, 2 on a parse error.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use divergent::activation::ActivationMethod;
use divergent::automaton::{
    conjoin2, conjoin3, decompose_bidiverging, decompose_diverging, disjoin2, disjoin3, normalize, roll, unroll,
    Automaton, BiDivergingBehavior, DivergingBehavior,
};
use divergent::format::{self, ExprFile};
use divergent::kleene;
use divergent::quantum;
use divergent::semiring::{Boolean, Gaussian, Natural, Rational, Semiring};
use divergent::series::{conv_coeff, prefix_coeffs, AnyExpr, BiDivEvaluation, ChiMethod, DivEvaluation, Level};
use divergent::words::{Alphabet, BiInfiniteWord, InfiniteWord, Symbol, Word};
use divergent::Error;

#[derive(Parser)]
#[command(name = "divergent", version, about = "Diverging and bidiverging weighted automata")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Activation procedure: `exact` or `horizon:<K>`.
    #[arg(long, global = true, default_value = "exact", value_parser = parse_activation)]
    activation: ActivationMethod,
    /// Series level: `conv`, `div` or `bidiv`.
    #[arg(long, global = true, value_parser = parse_level)]
    level: Option<Level>,
    /// Largest `n` to evaluate (inclusive).
    #[arg(long, global = true, default_value_t = 10)]
    n_max: usize,
    /// Window start for biinfinite words.
    #[arg(long, global = true, default_value_t = 0, allow_negative_numbers = true)]
    i: i64,
    /// How χ is decided for expressions: `exact`, `compiled:horizon:<K>` or `horizon:<K>`.
    #[arg(long, global = true, default_value = "exact", value_parser = parse_chi)]
    chi: ChiMethod,
    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an automaton or expression file on a word.
    ///
    /// Finite words give one weight. Infinite words give rows `n value` of
    /// the diverging behavior; biinfinite words give rows of the
    /// bidiverging behavior at window start `--i`.
    Eval { file: PathBuf, word: String },
    /// Normalize an automaton that does not accept the empty word.
    Normalize { file: PathBuf },
    /// Roll a normalized automaton into a loopback automaton.
    Roll { file: PathBuf },
    /// Unroll a loopback automaton into a normalized automaton.
    Unroll { file: PathBuf },
    /// Conjoin two normalized automata (`x ω-conjoined y`).
    Conjoin { x: PathBuf, y: PathBuf },
    /// Conjoin three normalized automata (`x ζ-conjoined m, y`).
    Conjoin3 { x: PathBuf, m: PathBuf, y: PathBuf },
    /// Split a loopback automaton with prelude into `x.aut` and `y.aut`.
    Disjoin {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a bridge automaton into `x.aut`, `m.aut` and `y.aut`.
    Disjoin3 {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose into single-pair parts; writes `part-<k>.aut` and `manifest.tsv`.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile an expression file into an automaton.
    FromRational { file: PathBuf },
    /// Extract an expression file from an automaton (needs `--level`).
    ToRational { file: PathBuf },
    /// Compare two files on sampled words. A semi-decision: agreement on
    /// the samples does not prove equivalence.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Words to sample; generated ultimately periodic words if omitted.
        #[arg(long = "word")]
        words: Vec<String>,
        /// Cap on the number of generated words.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Expected values of spin operators.
    #[command(subcommand)]
    Quantum(QuantumCommand),
}

#[derive(Args)]
struct QuantumOpts {
    /// State automaton over `{u, d}`; defaults to the all-up state.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Largest `n` (inclusive).
    #[arg(long, default_value_t = 10)]
    n: usize,
}

#[derive(Subcommand)]
enum QuantumCommand {
    /// Rows `n numerator denominator ratio` for an operator file.
    Expect {
        #[arg(long)]
        operator: PathBuf,
        #[command(flatten)]
        opts: QuantumOpts,
    },
    /// Total magnetization `I ★ Z ★ I`.
    Magnetization {
        #[command(flatten)]
        opts: QuantumOpts,
    },
    /// Spin correlator `I ★ Z I^k Z ★ I`.
    Correlator {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        opts: QuantumOpts,
    },
    /// Haldane-Shastry hamiltonian with `1/r²` as `Σ α β^r`.
    Hs {
        /// `α1,β1;α2,β2;...`
        #[arg(long)]
        terms: String,
        /// Also print the energy per site `E(n) − E(n−1)` at this `n`.
        #[arg(long)]
        rate_at: Option<u64>,
        #[command(flatten)]
        opts: QuantumOpts,
    },
}

fn parse_activation(s: &str) -> Result<ActivationMethod, String> {
    ActivationMethod::parse(s).map_err(|_| format!("expected `exact` or `horizon:<K>`, found `{s}`"))
}

fn parse_chi(s: &str) -> Result<ChiMethod, String> {
    ChiMethod::parse(s).map_err(|_| format!("expected `exact`, `compiled:horizon:<K>` or `horizon:<K>`, found `{s}`"))
}

fn parse_level(s: &str) -> Result<Level, String> {
    Level::parse(s).map_err(|_| format!("expected `conv`, `div` or `bidiv`, found `{s}`"))
}

enum Failure {
    Parse(String),
    Semantic(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Parse(e.to_string()),
            _ => Failure::Semantic(e.to_string()),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

/// Attaches a source name to parse errors.
fn located(source: &str, e: Error) -> Failure {
    match e {
        Error::Parse { line, column, message } => Failure::Parse(format!("{source}:{line}:{column}: {message}")),
        other => Failure::Semantic(format!("{source}: {other}")),
    }
}

thread_local! {
    static SOURCES: RefCell<HashMap<PathBuf, String>> = RefCell::new(HashMap::new());
}

/// Reads `path` once, so pipes survive the semiring probe; `-` is stdin.
fn read(path: &Path) -> Outcome<String> {
    if let Some(text) = SOURCES.with(|c| c.borrow().get(path).cloned()) {
        return Ok(text);
    }
    let text = if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map(|_| text)
    } else {
        fs::read_to_string(path)
    }
    .map_err(|e| Failure::Semantic(format!("{}: {e}", path.display())))?;
    SOURCES.with(|c| c.borrow_mut().insert(path.to_path_buf(), text.clone()));
    Ok(text)
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Semantic(format!("{}: {e}", path.display())))
}

enum Input<S> {
    Automaton(Automaton<S>),
    Expr(ExprFile<S>),
}

impl<S: Semiring> Input<S> {
    fn alphabet(&self) -> &Alphabet {
        match self {
            Input::Automaton(a) => a.alphabet(),
            Input::Expr(f) => &f.alphabet,
        }
    }
}

fn load<S: Semiring>(path: &Path, level: Option<Level>) -> Outcome<Input<S>> {
    let text = read(path)?;
    let name = path.display().to_string();
    if format::is_expr_file(&text) {
        format::parse_expr_file(&text, level).map(Input::Expr).map_err(|e| located(&name, e))
    } else {
        format::parse_automaton(&text).map(Input::Automaton).map_err(|e| located(&name, e))
    }
}

fn load_automaton<S: Semiring>(path: &Path) -> Outcome<Automaton<S>> {
    match load(path, None)? {
        Input::Automaton(a) => Ok(a),
        Input::Expr(_) => Err(Failure::Semantic(format!("{}: expected an automaton file", path.display()))),
    }
}

fn parse_word(text: &str) -> Outcome<Word> {
    Word::parse(text).map_err(|e| located("word", e))
}

fn rows<S: Semiring>(out: &mut String, values: &[S]) {
    for (n, v) in values.iter().enumerate() {
        writeln!(out, "{n}\t{v}").unwrap();
    }
}

fn level_of(e: &AnyExpr<impl Semiring>) -> Level {
    e.level()
}

fn eval<S: Semiring>(g: &Global, file: &Path, word: &str, out: &mut String) -> Outcome {
    let input = load::<S>(file, g.level)?;
    let word = parse_word(word)?;
    let len = g.n_max + 1;
    match (input, word) {
        (Input::Automaton(a), Word::Finite(w)) => writeln!(out, "{}", a.weight(&w)?).unwrap(),
        (Input::Automaton(a), Word::Infinite(w)) => {
            rows(out, &DivergingBehavior::new(&a, &w, g.activation)?.values(len))
        }
        (Input::Automaton(a), Word::BiInfinite(w)) => {
            rows(out, &BiDivergingBehavior::new(&a, &w, g.activation)?.values(g.i, len))
        }
        (Input::Expr(f), word) => match (f.expr, word) {
            (AnyExpr::Conv(e), Word::Finite(w)) => writeln!(out, "{}", conv_coeff(&e, &w)?).unwrap(),
            (AnyExpr::Div(e), Word::Infinite(w)) => rows(out, &DivEvaluation::new(&e, &w, g.chi)?.values(len)?),
            (AnyExpr::BiDiv(e), Word::BiInfinite(w)) => {
                rows(out, &BiDivEvaluation::new(&e, &w, g.chi)?.values(g.i, len)?)
            }
            (e, w) => {
                return Err(Failure::Semantic(format!(
                    "a {} expression cannot be evaluated on the word `{w}`",
                    level_of(&e).name()
                )))
            }
        },
    }
    Ok(())
}

fn transform<S: Semiring>(command: &Command, g: &Global, out: &mut String) -> Outcome {
    let result = match command {
        Command::Normalize { file } => normalize(&load_automaton::<S>(file)?)?,
        Command::Roll { file } => roll(&load_automaton::<S>(file)?)?,
        Command::Unroll { file } => unroll(&load_automaton::<S>(file)?)?,
        Command::Conjoin { x, y } => conjoin2(&load_automaton::<S>(x)?, &load_automaton(y)?)?,
        Command::Conjoin3 { x, m, y } => conjoin3(&load_automaton::<S>(x)?, &load_automaton(m)?, &load_automaton(y)?)?,
        Command::FromRational { file } => match load::<S>(file, g.level)? {
            Input::Expr(f) => match &f.expr {
                AnyExpr::Conv(e) => kleene::compile_conv(e, &f.alphabet)?,
                AnyExpr::Div(e) => kleene::compile_div(e, &f.alphabet)?,
                AnyExpr::BiDiv(e) => kleene::compile_bidiv(e, &f.alphabet)?,
            },
            Input::Automaton(_) => {
                return Err(Failure::Semantic(format!("{}: expected an expression file", file.display())))
            }
        },
        Command::ToRational { file } => {
            let a = load_automaton::<S>(file)?;
            let level = g.level.ok_or_else(|| Failure::Semantic("to-rational needs --level".into()))?;
            let expr = match level {
                Level::Conv => AnyExpr::Conv(kleene::extract_conv(&a)),
                Level::Div => AnyExpr::Div(kleene::extract_div(&a)?),
                Level::BiDiv => AnyExpr::BiDiv(kleene::extract_bidiv(&a)?),
            };
            out.push_str(&format::write_expr_file(&ExprFile { alphabet: a.alphabet().clone(), expr }));
            return Ok(());
        }
        _ => unreachable!("not a single-output transform"),
    };
    out.push_str(&format::write_automaton(&result));
    Ok(())
}

fn split<S: Semiring>(command: &Command, g: &Global, out: &mut String) -> Outcome {
    let (file, dir) = match command {
        Command::Disjoin { file, out } | Command::Disjoin3 { file, out } | Command::Decompose { file, out } => {
            (file, out)
        }
        _ => unreachable!("not a multi-output transform"),
    };
    let a = load_automaton::<S>(file)?;
    let mut files: Vec<(String, Automaton<S>)> = Vec::new();
    let mut manifest = None;
    match command {
        Command::Disjoin { .. } => {
            let (x, y) = disjoin2(&a)?;
            files = vec![("x.aut".into(), x), ("y.aut".into(), y)];
        }
        Command::Disjoin3 { .. } => {
            let (x, m, y) = disjoin3(&a)?;
            files = vec![("x.aut".into(), x), ("m.aut".into(), m), ("y.aut".into(), y)];
        }
        _ => {
            let d = match g.level.unwrap_or(Level::Div) {
                Level::Div => decompose_diverging(&a),
                Level::BiDiv => decompose_bidiverging(&a),
                Level::Conv => return Err(Failure::Semantic("decompose needs --level div or bidiv".into())),
            };
            let mut m = String::from("# file\tleft\tright\tclass\tinitial\tfinal\n");
            for (k, p) in d.parts.into_iter().enumerate() {
                let name = format!("part-{k}.aut");
                writeln!(m, "{name}\t{}\t{}\t{}\t{}\t{}", p.left, p.right, p.class(), p.pair.0, p.pair.1).unwrap();
                files.push((name, p.automaton));
            }
            manifest = Some(m);
        }
    }
    fs::create_dir_all(dir).map_err(|e| Failure::Semantic(format!("{}: {e}", dir.display())))?;
    for (name, x) in &files {
        let path = dir.join(name);
        write_file(&path, &format::write_automaton(x))?;
        writeln!(out, "{}", path.display()).unwrap();
    }
    if let Some(m) = manifest {
        let path = dir.join("manifest.tsv");
        write_file(&path, &m)?;
        writeln!(out, "{}", path.display()).unwrap();
    }
    Ok(())
}

/// Deterministic sample words: short prefixes and cycles over the alphabet.
fn generated_words(level: Level, alphabet: &Alphabet, cap: usize) -> Vec<Word> {
    let syms = alphabet.symbols();
    let strings = |max: usize| {
        let mut all: Vec<Vec<Symbol>> = vec![vec![]];
        let mut layer: Vec<Vec<Symbol>> = vec![vec![]];
        for _ in 0..max {
            layer =
                layer.iter().flat_map(|w| syms.iter().map(move |s| [w.clone(), vec![s.clone()]].concat())).collect();
            all.extend(layer.iter().cloned());
        }
        all
    };
    let short = strings(1);
    let cycles: Vec<Vec<Symbol>> = strings(2).into_iter().filter(|c| !c.is_empty()).collect();
    let mut out = Vec::new();
    match level {
        Level::Conv | Level::Div => {
            for p in &short {
                for c in &cycles {
                    out.push(Word::Infinite(InfiniteWord::new(p.clone(), c.clone()).expect("non-empty cycle")));
                }
            }
        }
        Level::BiDiv => {
            for l in cycles.iter().filter(|c| c.len() == 1) {
                for m in &short {
                    for r in &cycles {
                        let w = BiInfiniteWord::new(l.clone(), m.clone(), r.clone()).expect("non-empty cycles");
                        out.push(Word::BiInfinite(w));
                    }
                }
            }
        }
    }
    if out.len() > cap && cap > 0 {
        let stride = out.len().div_ceil(cap);
        out = out.into_iter().step_by(stride).collect();
    }
    out
}

/// `(window start, values for n = 0..len)` of one input on one word.
fn sample<S: Semiring>(input: &Input<S>, level: Level, word: &Word, g: &Global) -> Outcome<Vec<(i64, Vec<S>)>> {
    let len = g.n_max + 1;
    let mismatch = || Failure::Semantic(format!("the word `{word}` does not fit level {}", level.name()));
    Ok(match (level, word) {
        (Level::Conv, Word::Finite(w)) => vec![(
            0,
            vec![match input {
                Input::Automaton(a) => a.weight(w)?,
                Input::Expr(f) => match &f.expr {
                    AnyExpr::Conv(e) => conv_coeff(e, w)?,
                    _ => return Err(mismatch()),
                },
            }],
        )],
        (Level::Conv, Word::Infinite(w)) => {
            let prefix = w.slice(0, g.n_max)?;
            let values = match input {
                Input::Automaton(a) => {
                    (0..len).map(|n| a.weight(&prefix.slice(0, n)?)).collect::<Result<Vec<_>, _>>()?
                }
                Input::Expr(f) => match &f.expr {
                    AnyExpr::Conv(e) => prefix_coeffs(e, &prefix)?,
                    _ => return Err(mismatch()),
                },
            };
            vec![(0, values)]
        }
        (Level::Div, Word::Infinite(w)) => vec![(
            0,
            match input {
                Input::Automaton(a) => DivergingBehavior::new(a, w, g.activation)?.values(len),
                Input::Expr(f) => match &f.expr {
                    AnyExpr::Div(e) => DivEvaluation::new(e, w, g.chi)?.values(len)?,
                    _ => return Err(mismatch()),
                },
            },
        )],
        (Level::BiDiv, Word::BiInfinite(w)) => {
            let mut out = Vec::new();
            for i in -3..=3 {
                out.push((
                    i,
                    match input {
                        Input::Automaton(a) => BiDivergingBehavior::new(a, w, g.activation)?.values(i, len),
                        Input::Expr(f) => match &f.expr {
                            AnyExpr::BiDiv(e) => BiDivEvaluation::new(e, w, g.chi)?.values(i, len)?,
                            _ => return Err(mismatch()),
                        },
                    },
                ));
            }
            out
        }
        _ => return Err(mismatch()),
    })
}

fn equiv<S: Semiring>(g: &Global, a: &Path, b: &Path, words: &[String], cap: usize, out: &mut String) -> Outcome {
    let x = load::<S>(a, g.level)?;
    let y = load::<S>(b, g.level)?;
    if x.alphabet() != y.alphabet() {
        return Err(Error::AlphabetMismatch(format!("{} vs {}", a.display(), b.display())).into());
    }
    let expr_level = |i: &Input<S>| match i {
        Input::Expr(f) => Some(f.expr.level()),
        Input::Automaton(_) => None,
    };
    let level = match (g.level, expr_level(&x), expr_level(&y)) {
        (Some(l), _, _) => l,
        (None, Some(l), Some(m)) if l != m => {
            return Err(Failure::Semantic(format!("level mismatch: {} vs {}", l.name(), m.name())))
        }
        (None, Some(l), _) | (None, None, Some(l)) => l,
        (None, None, None) => Level::Div,
    };
    let samples = if words.is_empty() {
        generated_words(level, x.alphabet(), cap)
    } else {
        words.iter().map(|w| parse_word(w)).collect::<Outcome<Vec<_>>>()?
    };
    for w in &samples {
        for ((i, u), (_, v)) in sample(&x, level, w, g)?.into_iter().zip(sample(&y, level, w, g)?) {
            if let Some(n) = (0..u.len()).find(|&n| u[n] != v[n]) {
                let window = if level == Level::BiDiv { format!("\ti={i}") } else { String::new() };
                writeln!(out, "disagree\tword={w}{window}\tn={n}\t{}\t{}", u[n], v[n]).unwrap();
                return Ok(());
            }
        }
    }
    writeln!(out, "agree on all {} sampled words for n <= {} (semi-decision, not a proof)", samples.len(), g.n_max)
        .unwrap();
    Ok(())
}

fn quantum_state(opts: &QuantumOpts) -> Outcome<Automaton<Gaussian>> {
    match &opts.state {
        Some(path) => load_automaton(path),
        None => Ok(quantum::product_state(&quantum::spin_alphabet(), &Symbol::new(quantum::UP))?),
    }
}

fn expected_rows(ev: &quantum::ExpectedValue, n: usize, out: &mut String) {
    for row in ev.rows(n + 1) {
        let ratio = row.ratio.map_or_else(|| "-".to_string(), |r| r.to_string());
        writeln!(out, "{}\t{}\t{}\t{ratio}", row.n, row.numerator, row.denominator).unwrap();
    }
}

fn run_quantum(command: &QuantumCommand, out: &mut String) -> Outcome {
    let (operator, opts) = match command {
        QuantumCommand::Expect { operator, opts } => {
            let o = match load::<Gaussian>(operator, Some(Level::BiDiv))? {
                Input::Automaton(a) => a,
                Input::Expr(f) => match &f.expr {
                    AnyExpr::BiDiv(e) => kleene::compile_bidiv(e, &f.alphabet)?,
                    _ => return Err(Failure::Semantic("operator expressions must be bidiverging".into())),
                },
            };
            (o, opts)
        }
        QuantumCommand::Magnetization { opts } => (quantum::spin_operator(&quantum::magnetization())?, opts),
        QuantumCommand::Correlator { k, opts } => (quantum::spin_operator(&quantum::correlator(*k))?, opts),
        QuantumCommand::Hs { terms, opts, .. } => {
            let terms = quantum::parse_terms(terms).map_err(|e| located("terms", e))?;
            (quantum::spin_operator(&quantum::haldane_shastry(&terms)?)?, opts)
        }
    };
    let ev = quantum::expected_value(&quantum_state(opts)?, &operator)?;
    expected_rows(&ev, opts.n, out);
    if let QuantumCommand::Hs { rate_at: Some(p), .. } = command {
        let rate = quantum::asymptotic_rate(
            |n| ev.ratio_at(n).ok_or_else(|| Error::Invalid(format!("zero norm at n = {n}"))),
            *p,
        )?;
        writeln!(out, "rate\t{p}\t{rate}").unwrap();
    }
    Ok(())
}

macro_rules! dispatch {
    ($name:expr, $f:ident($($arg:expr),*)) => {
        match $name.as_str() {
            "boolean" => $f::<Boolean>($($arg),*),
            "natural" => $f::<Natural>($($arg),*),
            "rational" => $f::<Rational>($($arg),*),
            "gaussian" => $f::<Gaussian>($($arg),*),
            other => unreachable!("unchecked semiring {other}"),
        }
    };
}

fn semiring_of(path: &Path) -> Outcome<String> {
    let text = read(path)?;
    format::semiring_name(&text).map_err(|e| located(&path.display().to_string(), e))
}

fn run(cli: &Cli) -> Outcome<String> {
    let g = &cli.global;
    let mut out = String::new();
    match &cli.command {
        Command::Eval { file, word } => dispatch!(semiring_of(file)?, eval(g, file, word, &mut out))?,
        c @ (Command::Normalize { file }
        | Command::Roll { file }
        | Command::Unroll { file }
        | Command::Conjoin { x: file, .. }
        | Command::Conjoin3 { x: file, .. }
        | Command::FromRational { file }
        | Command::ToRational { file }) => dispatch!(semiring_of(file)?, transform(c, g, &mut out))?,
        c @ (Command::Disjoin { file, .. } | Command::Disjoin3 { file, .. } | Command::Decompose { file, .. }) => {
            dispatch!(semiring_of(file)?, split(c, g, &mut out))?
        }
        Command::Equiv { a, b, words, samples } => {
            dispatch!(semiring_of(a)?, equiv(g, a, b, words, *samples, &mut out))?
        }
        Command::Quantum(q) => run_quantum(q, &mut out)?,
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.global.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Semantic(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(m)) => {
            eprintln!("parse error: {m}");
            ExitCode::from(2)
        }
    }
}
