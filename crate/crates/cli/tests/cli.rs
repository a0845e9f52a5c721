use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hml(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_hml"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// `a.(b + c)` and `a.b + a.c`.
fn pair(dir: &Path) -> (String, String) {
    (
        write(dir, "abc.aut", "des (0, 3, 4)\n(0, \"a\", 1)\n(1, \"b\", 2)\n(1, \"c\", 3)\n"),
        write(
            dir,
            "ab_ac.aut",
            "des (0, 4, 5)\n(0, \"a\", 1)\n(0, \"a\", 2)\n(1, \"b\", 3)\n(2, \"c\", 4)\n",
        ),
    )
}

#[test]
fn eval_truth() {
    let dir = TempDir::new().unwrap();
    let (abc, _) = pair(dir.path());
    let r = hml(&["eval", "--lts", &abc, "--state", "0", "--formula", "T"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "true\n"));
    let r = hml(&["eval", "--lts", &abc, "--state", "1", "--formula", "<a> T"]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "false\n"));
    let r = hml(&["eval", "--lts", &abc, "--state", "pi_1(0)", "--formula", "<a> <b> T"]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "false\n"));
    let r = hml(&["eval", "--lts", &abc, "--formula", "[a] or(<b> T, F)"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "true\n"));
}

#[test]
fn eval_fixtures() {
    let f = "<a> AND{n in N} <a>^n T";
    let r = hml(&["eval", "--lts", "@left-counterexample", "--formula", f]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "false\n"));
    let r = hml(&["eval", "--lts", "@right-counterexample", "--formula", f]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "true\n"));
    let r = hml(&["eval", "--lts", "@left-counterexample", "--formula", "<a> AND{n in {0,3,8}} <a>^n T"]);
    assert_eq!(r.stdout, "true\n");
}

#[test]
fn equiv_verdicts() {
    let dir = TempDir::new().unwrap();
    let (abc, ab_ac) = pair(dir.path());
    let r = hml(&["equiv", "--lts1", &abc, "--lts2", &ab_ac, "--semantics", "trace"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "equivalent under trace (bound 20)\n");
    let r = hml(&[
        "equiv", "--lts1", &abc, "--lts2", &ab_ac, "--semantics", "bisimulation", "--bound", "2",
    ]);
    assert_eq!(r.code, 1);
    assert_eq!(
        r.stdout,
        "distinguished under bisimulation (bound 2)\nwitness: <a> and(<b> T, <c> T)\n"
    );
}

#[test]
fn cut_output() {
    let r = hml(&["cut", "--n", "0", "--formula", "<a> T"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "not T\n"));
    let r = hml(&["cut", "--n", "1", "--formula", "<a> <a> T"]);
    assert_eq!(r.stdout, "<a> not T\n");
    let r = hml(&["cut", "--n", "0", "--formula", "<a> F"]);
    assert_eq!(r.stdout, "F\n");
    let r = hml(&["cut", "--n", "1", "--formula", "AND{n in N} <a>^n T"]);
    assert_eq!(r.stdout, "and(T, <a> T, <a> not T)\n");
}

#[test]
fn project_output() {
    let dir = TempDir::new().unwrap();
    let (abc, _) = pair(dir.path());
    let r = hml(&["project", "--lts", &abc, "--state", "0", "--n", "1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "pi_1(0)\n(pi_1(0), \"a\", pi_0(1))\n");
    let r = hml(&["project", "--lts", "@left-counterexample", "--n", "2"]);
    assert_eq!(
        r.stdout,
        "pi_2(root)\n(pi_2(root), \"a\", pi_1(chain(0)))\n(pi_2(root), \"a\", pi_1(chain(1)))\n\
         (pi_1(chain(1)), \"a\", pi_0(chain(0)))\n"
    );
}

#[test]
fn spectrum_report_matrix() {
    let dir = TempDir::new().unwrap();
    let (abc, ab_ac) = pair(dir.path());
    let r = hml(&["spectrum-report", "--lts1", &abc, "--lts2", &ab_ac]);
    assert_eq!(r.code, 0);
    let rows: Vec<Vec<&str>> = r
        .stdout
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().take(3).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert_eq!(row[1], row[2], "{row:?}");
    }
    let verdict = |name: &str| rows.iter().find(|r| r[0] == name).unwrap()[1];
    assert_eq!(verdict("trace"), "equivalent");
    assert_eq!(verdict("completed-trace"), "equivalent");
    assert_eq!(verdict("failures"), "distinguished");
    assert_eq!(verdict("bisimulation"), "distinguished");
}

#[test]
fn input_errors() {
    let dir = TempDir::new().unwrap();
    let (abc, _) = pair(dir.path());
    let r = hml(&["eval", "--lts", &abc, "--formula", "<a> and(T"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 1, column 10"), "{}", r.stderr);
    let r = hml(&["equiv", "--lts1", &abc, "--lts2", &abc, "--semantics", "weak"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("trace, completed-trace, failures"), "{}", r.stderr);
    let r = hml(&["eval", "--lts", &abc, "--state", "9", "--formula", "T"]);
    assert_eq!(r.code, 2);
    let bad = write(dir.path(), "bad.aut", "des (0, 2, 2)\n(0, \"a\", 1)\n");
    let r = hml(&["eval", "--lts", &bad, "--formula", "T"]);
    assert_eq!(r.code, 2);
    let r = hml(&["eval", "--lts", "@nowhere", "--formula", "T"]);
    assert_eq!(r.code, 2);
    let r = hml(&["frobnicate"]);
    assert_eq!(r.code, 2);
}

#[test]
fn check_all_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("reports.json");
    let first = hml(&["check-all", "--seed", "11", "--json", json.to_str().unwrap()]);
    let second = hml(&["check-all", "--seed", "11"]);
    assert_eq!(first.code, 0, "{}", first.stdout);
    assert_eq!(first.stdout, second.stdout);
    let lines: Vec<&str> = first.stdout.lines().collect();
    assert!(lines.iter().any(|l| l.starts_with("aip-bisimulation pass ")));
    assert!(lines.iter().any(|l| l.starts_with("necessity-reachability vacuous ")));
    let dumped: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(dumped.as_array().unwrap().len(), lines.len());
    assert_eq!(dumped[0]["name"], "counterexample");
}
