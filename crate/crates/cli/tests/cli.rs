use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use divergent::automaton::{Automaton, AutomatonClass};
use divergent::format;
use divergent::semiring::{Boolean, Gaussian};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn divergent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divergent")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn table(rows: &[(usize, &str)]) -> String {
    rows.iter().map(|(n, v)| format!("{n}\t{v}\n")).collect()
}

#[test]
fn eval_rejection_fixture_is_all_false() {
    let o = divergent(&["eval", p(&fixture("figure1.aut")), "b b . ( a )^w", "--n-max", "5"]);
    assert_eq!(stdout(&o), table(&(0..=5).map(|n| (n, "F")).collect::<Vec<_>>()));
}

#[test]
fn eval_counts_paths_on_figure3() {
    let o = divergent(&["eval", p(&fixture("figure3.aut")), "( a )^w", "--n-max", "5"]);
    let expected: String = (0..=5).map(|n| format!("{n}\t{n}\n")).collect();
    assert_eq!(stdout(&o), expected);
}

#[test]
fn eval_finite_and_biinfinite_words() {
    assert_eq!(stdout(&divergent(&["eval", p(&fixture("figure1.aut")), "a b a"])), "T\n");
    let o = divergent(&[
        "eval",
        p(&fixture("magnetization.expr")),
        "( u->u )^~w . ( u->u )^w",
        "--n-max",
        "3",
        "--i",
        "-2",
    ]);
    assert_eq!(stdout(&o), table(&[(0, "0"), (1, "1"), (2, "2"), (3, "3")]));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.aut");
    std::fs::write(&bad, "semiring: natural\nalphabet: [a]\nstates: [0]\ninitial: {0: x}\n").unwrap();
    let o = divergent(&["eval", p(&bad), "a"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.aut:4:14"));
    let o = divergent(&["eval", p(&fixture("figure1.aut")), "( a"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn semantic_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let eps = dir.path().join("eps.aut");
    std::fs::write(&eps, "semiring: boolean\nalphabet: [a]\nstates: [0]\ninitial: {0: T}\nfinal: {0: T}\n").unwrap();
    let o = divergent(&["normalize", p(&eps)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty word"));
    let o = divergent(&["eval", p(&fixture("figure1.aut")), "c"]);
    assert_eq!(o.status.code(), Some(1));
    let o = divergent(&["roll", p(&fixture("figure2.aut"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn roll_then_unroll_agrees_with_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let (n, r, u) = (dir.path().join("n.aut"), dir.path().join("r.aut"), dir.path().join("u.aut"));
    stdout(&divergent(&["normalize", p(&fixture("figure3.aut")), "-o", p(&n)]));
    stdout(&divergent(&["roll", p(&n), "-o", p(&r)]));
    stdout(&divergent(&["unroll", p(&r), "-o", p(&u)]));
    let verdict = stdout(&divergent(&["equiv", p(&n), p(&u)]));
    assert!(verdict.starts_with("agree"), "{verdict}");
    for w in ["( a )^w", "b . ( a b )^w"] {
        let x = stdout(&divergent(&["eval", p(&n), w]));
        assert_eq!(x, stdout(&divergent(&["eval", p(&u), w])));
    }
}

#[test]
fn emitted_files_reparse_to_the_same_text() {
    let text = stdout(&divergent(&["normalize", p(&fixture("figure1.aut"))]));
    let a: Automaton<Boolean> = format::parse_automaton(&text).unwrap();
    assert_eq!(format::write_automaton(&a), text);
    let expr = stdout(&divergent(&["to-rational", "--level", "div", p(&fixture("figure1.aut"))]));
    let f: format::ExprFile<Boolean> = format::parse_expr_file(&expr, None).unwrap();
    assert_eq!(format::write_expr_file(&f), expr);
}

#[test]
fn decompose_magnetization_gives_one_bridge_part() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.aut");
    stdout(&divergent(&["from-rational", p(&fixture("magnetization.expr")), "-o", p(&m)]));
    let parts = dir.path().join("parts");
    stdout(&divergent(&["decompose", "--level", "bidiv", p(&m), "--out", p(&parts)]));
    let manifest = std::fs::read_to_string(parts.join("manifest.tsv")).unwrap();
    let rows: Vec<&str> = manifest.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["part-0.aut\t1\t1\tbridge\t0\t1"]);
    let pieces = dir.path().join("pieces");
    stdout(&divergent(&["disjoin3", p(&parts.join("part-0.aut")), "--out", p(&pieces)]));
    for (name, class) in [("x.aut", AutomatonClass::Normalized), ("y.aut", AutomatonClass::Normalized)] {
        let a: Automaton<Gaussian> =
            format::parse_automaton(&std::fs::read_to_string(pieces.join(name)).unwrap()).unwrap();
        assert_eq!(a.classify(), class, "{name}");
    }
    let back = dir.path().join("back.aut");
    let (x, mid, y) = (pieces.join("x.aut"), pieces.join("m.aut"), pieces.join("y.aut"));
    stdout(&divergent(&["conjoin3", p(&x), p(&mid), p(&y), "-o", p(&back)]));
    let verdict = stdout(&divergent(&["equiv", "--level", "bidiv", p(&back), p(&m)]));
    assert!(verdict.starts_with("agree"), "{verdict}");
}

#[test]
fn disjoin_then_conjoin_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (n, r) = (dir.path().join("n.aut"), dir.path().join("r.aut"));
    stdout(&divergent(&["normalize", p(&fixture("figure2.aut")), "-o", p(&n)]));
    stdout(&divergent(&["conjoin", p(&n), p(&n), "-o", p(&r)]));
    let parts = dir.path().join("parts");
    stdout(&divergent(&["disjoin", p(&r), "--out", p(&parts)]));
    let back = dir.path().join("back.aut");
    stdout(&divergent(&["conjoin", p(&parts.join("x.aut")), p(&parts.join("y.aut")), "-o", p(&back)]));
    assert!(stdout(&divergent(&["equiv", p(&back), p(&r)])).starts_with("agree"));
}

#[test]
fn equiv_round_trip_mismatch_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let (e, a) = (dir.path().join("f3.expr"), dir.path().join("f3.aut"));
    stdout(&divergent(&["to-rational", "--level", "div", p(&fixture("figure3.aut")), "-o", p(&e)]));
    stdout(&divergent(&["from-rational", p(&e), "-o", p(&a)]));
    assert!(stdout(&divergent(&["equiv", p(&fixture("figure3.aut")), p(&a)])).starts_with("agree"));
    assert!(stdout(&divergent(&["equiv", p(&fixture("figure3.aut")), p(&e)])).starts_with("agree"));

    let o = divergent(&["equiv", p(&fixture("figure1.aut")), p(&fixture("figure2.aut"))]);
    assert_eq!(o.status.code(), Some(1));

    let o = divergent(&["equiv", p(&fixture("figure2.aut")), p(&fixture("figure3.aut"))]);
    assert_eq!(stdout(&o), "disagree\tword=( a )^w\tn=1\t0\t1\n");
}

#[test]
fn horizon_methods_agree_with_exact() {
    let exact = stdout(&divergent(&["eval", p(&fixture("figure3.aut")), "b b . ( a )^w"]));
    let horizon =
        stdout(&divergent(&["eval", "--activation", "horizon:16", p(&fixture("figure3.aut")), "b b . ( a )^w"]));
    assert_eq!(exact, horizon);
    let w = "( u->u )^~w . ( u->u )^w";
    let exact = stdout(&divergent(&["eval", p(&fixture("magnetization.expr")), w]));
    let horizon = stdout(&divergent(&["eval", "--chi", "horizon:8", p(&fixture("magnetization.expr")), w]));
    assert_eq!(exact, horizon);
}

#[test]
fn quantum_tables() {
    let o = stdout(&divergent(&["quantum", "magnetization", "--n", "3"]));
    assert_eq!(o, "0\t0\t1\t0\n1\t1\t1\t1\n2\t2\t1\t2\n3\t3\t1\t3\n");
    let o = stdout(&divergent(&["quantum", "correlator", "--k", "1", "--n", "4"]));
    let nums: Vec<&str> = o.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(nums, ["0", "0", "0", "1", "2"]);
    let o = stdout(&divergent(&["quantum", "expect", "--operator", p(&fixture("magnetization.expr")), "--n", "2"]));
    assert_eq!(o, "0\t0\t1\t0\n1\t1\t1\t1\n2\t2\t1\t2\n");
    let o = stdout(&divergent(&["quantum", "hs", "--terms", "1,1/2", "--n", "3", "--rate-at", "6"]));
    // Σ_{k=0}^{n-2} (n-1-k) 2^{-k}; the rate at 6 is Σ_{k=0}^{4} 2^{-k}.
    assert_eq!(o, "0\t0\t1\t0\n1\t0\t1\t0\n2\t1\t1\t1\n3\t5/2\t1\t5/2\nrate\t6\t31/16\n");
    let o = divergent(&["quantum", "hs", "--terms", "1;2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_lists_every_command() {
    let help = stdout(&divergent(&["--help"]));
    for c in [
        "eval",
        "normalize",
        "roll",
        "unroll",
        "conjoin",
        "conjoin3",
        "disjoin",
        "disjoin3",
        "decompose",
        "from-rational",
        "to-rational",
        "equiv",
        "quantum",
    ] {
        assert!(help.contains(c), "{c}");
    }
    let help = stdout(&divergent(&["eval", "--help"]));
    assert!(help.contains("--activation") && help.contains("--level"));
}

#[test]
fn dash_reads_standard_input() {
    use std::io::Write;
    use std::process::Stdio;
    let text = std::fs::read_to_string(fixture("figure1.aut")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_divergent"))
        .args(["eval", "-", "a b a"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    assert_eq!(stdout(&child.wait_with_output().unwrap()), "T\n");
}
