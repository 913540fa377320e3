use std::path::PathBuf;
use std::process::{Command, Output};

fn ctc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctc")).args(args).env_remove("CTC_SEED").output().expect("ctc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const TOGGLE: &str = "atoms: p q\nstate s0:\nstate s1: p\nstate s2: q\nstate s3: p q\n\
effect a s0 -> s1\neffect a s1 -> s0\neffect a s2 -> s3\neffect a s3 -> s2\n\
effect b s0 -> s2\neffect b s2 -> s0\neffect b s1 -> s3\neffect b s3 -> s1\n";

#[test]
fn parse_prints_the_canonical_form() {
    let o = ctc(&["parse", "a.nil+nil"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a.nil + nil\n");
}

#[test]
fn parse_error_exits_with_two() {
    let o = ctc(&["parse", "a.+"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(ctc(&["check", "nil", "nil", "--bogus"]).status.code(), Some(2));
    assert_eq!(ctc(&["check", "nil", "nil", "--mode", "sideways"]).status.code(), Some(2));
}

#[test]
fn sum_commutes_exits_zero() {
    let o = ctc(&["check", "a.nil+b.nil", "b.nil+a.nil", "--equiv", "step", "--strength", "strong", "--mode", "fr"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "equivalent\n");
}

#[test]
fn sequence_is_not_concurrency_exits_one() {
    let o = ctc(&["check", "a.b.nil", "(a||b).nil", "--equiv", "pomset"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "not equivalent\n");
}

#[test]
fn every_equivalence_is_reflexive() {
    for e in ["step", "pomset", "hp", "hhp"] {
        let o = ctc(&["check", "a.nil || b.nil", "a.nil || b.nil", "--equiv", e]);
        assert_eq!(o.status.code(), Some(0), "{e}");
    }
}

#[test]
fn weak_check_absorbs_tau() {
    let args = ["check", "a.tau.nil", "a.nil", "--mode", "fwd"];
    assert_eq!(ctc(&args).status.code(), Some(1));
    let weak: Vec<&str> = args.iter().copied().chain(["--strength", "weak"]).collect();
    assert_eq!(ctc(&weak).status.code(), Some(0));
}

#[test]
fn witness_file_lists_blocks() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("witness.txt");
    let o = ctc(&["check", "a.nil", "b.nil", "--witness", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let w = std::fs::read_to_string(&out).unwrap();
    assert!(w.starts_with("block 0:"), "{w}");
}

#[test]
fn lts_with_a_model_and_state() {
    let model = scratch("toggle.model", TOGGLE);
    let o = ctc(&["lts", "a.nil", "--model", model.to_str().unwrap(), "--state", "s1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("state=s1"));
    assert!(text.contains("state=s0 done=true"), "{text}");
    assert!(text.contains("edge fwd"));
    assert!(text.contains("edge rev"));
}

#[test]
fn lts_reads_terms_and_definitions_from_files() {
    let defs = scratch("loop.defs", "X := a.X\n");
    let term = scratch("loop.term", "X");
    // without reversibility the loop closes on itself
    let o = ctc(&["--chapter", "5", "lts", term.to_str().unwrap(), "--defs", defs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("edge fwd"));
}

#[test]
fn configuration_bound_is_reported() {
    let o = ctc(&["lts", "a.b.c.nil || a.b.c.nil", "--max-configs", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn chapter_presets_gate_syntax() {
    let o = ctc(&["--chapter", "5", "parse", "nil.a[1]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reversibility"));
    assert_eq!(ctc(&["--chapter", "6", "parse", "a.nil [+1/2] b.nil"]).status.code(), Some(2));
    assert_eq!(ctc(&["--chapter", "4", "parse", "<p>.nil"]).status.code(), Some(2));
    assert_eq!(ctc(&["--chapter", "7", "parse", "nil.a[1]"]).status.code(), Some(0));
    assert_eq!(ctc(&["--chapter", "9", "parse", "nil"]).status.code(), Some(2));
}

#[test]
fn faithful_parallel_resolution_changes_the_system() {
    let a = stdout(&ctc(&["lts", "a.nil || b.nil"]));
    let b = stdout(&ctc(&["lts", "a.nil || b.nil", "--faithful-pcomp"]));
    assert_ne!(a, b);
}

#[test]
fn normalize_expands_parallel_composition() {
    let o = ctc(&["normalize", "a.nil || b.nil"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "b.a.nil + a.b.nil + (a||b).nil\n");
    assert_eq!(ctc(&["normalize", "nil.a[1]"]).status.code(), Some(2));
}

#[test]
fn laws_report_holds_and_failures() {
    let o = ctc(&["laws", "--law", "monoid.1", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("monoid.1"));
    // `P + nil ~ P` breaks on dead P
    let o = ctc(&["laws", "--law", "monoid.4", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILS"));
    assert_eq!(ctc(&["laws", "--law", "nope"]).status.code(), Some(2));
}

#[test]
fn laws_list_names_every_law() {
    let o = ctc(&["laws", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() > 50);
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_ctc"))
            .args(["laws", "--law", "monoid.4", "--trials", "20"])
            .env("CTC_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(run("7").stdout, run("7").stdout);
    let flag = ctc(&["laws", "--law", "monoid.4", "--trials", "20", "--seed", "7"]);
    assert_eq!(run("7").stdout, flag.stdout);
    assert_eq!(run("x").status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let model = scratch("det.model", TOGGLE);
    let m = model.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["lts", "(a.nil [+1/3] b.nil) || (a||b).nil", "--model", m],
        vec!["lts", "a.nil || 'a.nil", "--format", "doc"],
        vec!["check", "a.nil || b.nil", "(a||b).nil + a.b.nil + b.a.nil", "--equiv", "step", "--model", m],
        vec!["check", "a.nil || b.nil", "(a||b).nil + a.b.nil + b.a.nil", "--equiv", "hp", "--mode", "fwd"],
    ];
    for args in cases {
        let first = ctc(&args);
        for _ in 0..2 {
            let again = ctc(&args);
            assert_eq!(first.stdout, again.stdout, "{args:?}");
            assert_eq!(first.status.code(), again.status.code());
        }
    }
}
