//! Exit codes and diagnostics of the `cup` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use cuproof::corpus::ENTRIES;

fn cup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cup"))
        .args(args)
        .env_remove("CUP_DEPTH")
        .env_remove("CUP_FIXBETA_BOUND")
        .env_remove("CUP_MODEL_DEPTH")
        .env_remove("CUP_WORD_BUDGET")
        .output()
        .expect("cup runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn corpus_runs_as_expected() {
    let o = cup(&["examples", "--all"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("as expected").count(), ENTRIES.len());
    let o = cup(&["examples"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("from-successors"));
}

#[test]
fn emitted_proofs_check() {
    for e in ENTRIES.iter().filter(|e| e.clauses.is_none() && e.expect == cuproof::corpus::Expect::Proved) {
        let path = scratch(&format!("{}.json", e.name));
        let p = path.to_str().unwrap();
        let calc = e.calculus.to_string();
        let o = cup(&["coprove", "--calculus", &calc, "--program", e.file, "--goal", e.goal, "--emit-proof", p]);
        assert_eq!(code(&o), 0, "{}: {}", e.name, stderr(&o));
        let o = cup(&["check-proof", "--calculus", &calc, "--program", e.file, "--proof", p]);
        assert_eq!(code(&o), 0, "{}: {}", e.name, stdout(&o));
        assert_eq!(stdout(&o), format!("valid {calc} proof\n"));
    }
}

#[test]
fn tampered_proof_is_rejected() {
    let path = scratch("tampered.json");
    let p = path.to_str().unwrap();
    let goal = "forall x. from x (fr_str x)";
    let o = cup(&["coprove", "--program", "from.cup", "--goal", goal, "--emit-proof", p]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap().replace("\"s _X1\"", "\"_X1\"");
    std::fs::write(&path, text).unwrap();
    let o = cup(&["check-proof", "--program", "from.cup", "--proof", p]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("invalid: at "));
}

#[test]
fn atomic_from_goal_is_inconclusive() {
    let o = cup(&["coprove", "--calculus", "co-hohc", "--program", "from.cup", "--goal", "from 0 (fr_str 0)"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("inconclusive (co-hohc,"));
}

#[test]
fn fibs_points_at_the_limitation() {
    let goal = "forall x y z. add x y z => fibs x y [x|fib_str y z]";
    let o = cup(&["coprove", "--program", "fibs.cup", "--goal", goal]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("note: this program has a documented limitation:"));
    let o = cup(&["coprove", "--program", "fibs.cup", "--goal", goal, "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "inconclusive");
    assert!(v["limitation"].as_str().unwrap().contains("induction"));
    let o = cup(&["model", "--program", "fibs.cup", "--goal", "fibs 0 (s 0) (fib_str 0 (s 0))"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("member: "));
    let o = cup(&["model", "--program", "fibs.cup", "--goal", "fibs 0 (s 0) [s 0|*]"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn lemmas_extend_the_program() {
    let goal = "exists y. bitstream [0|y]";
    let o = cup(&["prove", "--calculus", "co-hohc", "--program", "bitstream.cup", "--goal", goal]);
    assert_eq!(code(&o), 2);
    let path = scratch("lemma.json");
    let p = path.to_str().unwrap();
    let lemma = "bitstream [0|n_str 0]";
    let o = cup(&["prove", "--calculus", "co-hohc", "--program", "bitstream.cup", "--lemma", lemma, "--goal", goal, "--emit-proof", p]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = cup(&["check-proof", "--calculus", "co-hohc", "--program", "bitstream.cup", "--lemma", lemma, "--proof", p]);
    assert_eq!(code(&o), 0);
    let o = cup(&["check-proof", "--calculus", "co-hohc", "--program", "bitstream.cup", "--proof", p]);
    assert_eq!(code(&o), 1);
}

#[test]
fn parse_errors_carry_positions() {
    let path = scratch("bad.cup");
    std::fs::write(&path, "const 0 : i.\nconst p : i -> o.\np 0 0.\n").unwrap();
    let p = path.to_str().unwrap();
    let o = cup(&["check-syntax", p]);
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(err.starts_with(&format!("cup: {p}:3:")), "{err}");
    assert!(err.contains("type error"), "{err}");

    std::fs::write(&path, "const 0 : i.\ndef bad = fix \\x. x.\n").unwrap();
    let o = cup(&["check-syntax", p]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("guardedness violation"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(code(&cup(&["bogus"])), 3);
    assert_eq!(code(&cup(&["coprove", "--calculus", "co-xyz", "--program", "from.cup", "--goal", "x"])), 3);
    assert_eq!(code(&cup(&["coprove", "--program", "from.cup", "--goal", "from 0"])), 3);
    assert_eq!(code(&cup(&["check-syntax", "no/such/file.cup"])), 3);
    assert_eq!(code(&cup(&["--depth", "0", "examples"])), 3);
    assert_eq!(code(&cup(&["--help"])), 0);
}

#[test]
fn environment_defaults_yield_to_flags() {
    let goal = "forall x. from x (fr_str x)";
    let run = |env: &str, extra: &[&str]| {
        let mut args = vec!["coprove", "--program", "from.cup", "--goal", goal];
        args.extend_from_slice(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_cup")).args(&args).env("CUP_DEPTH", env).output().unwrap();
        code(&o)
    };
    assert_eq!(run("1", &[]), 2);
    assert_eq!(run("1", &["--depth", "32"]), 0);
}

#[test]
fn classify_and_soundness() {
    let o = cup(&["classify", "--program", "from.cup", "--role", "core", "--formula", "forall x. from x (fr_str x)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "forall x. from x (fr_str x)\n  co-hohh\n");
    let o = cup(&[
        "soundness",
        "--calculus",
        "co-fohh",
        "--program",
        "comember.cup",
        "--goal",
        "forall y s. bit y => comember_bit y s",
        "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["hypothesis_uses"], 1);
    assert_eq!(v["deltas"][0], "δ1 = [y := _Y1, s := f _S1]");
}
