use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layered"))
        .current_dir(root())
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_layered"))
        .current_dir(root())
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn member_both_engines() {
    let o = run(&["member", "fixtures/L1.layered", "--loop", "aa", "--engine", "both"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "accepted (layers agree)");
}

#[test]
fn canonical_piped_into_iso() {
    let c = run(&["canonical", "fixtures/L2.dpa"]);
    assert!(c.status.success());
    let o = run_stdin(&["iso", "-", "fixtures/L2-alt.canonical"], &c.stdout);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("isomorphic"));
}

#[test]
fn inconsistent_exit_status() {
    let o = run(&["consistent", "fixtures/inconsistent.layered", "--exit-status"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness (p, t)"));
    // without the flag a negative answer is still a successful run
    assert_eq!(run(&["consistent", "fixtures/inconsistent.layered"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["member", "fixtures/L1.layered"]).status.code(), Some(2));
}

#[test]
fn missing_file_is_an_error() {
    let o = run(&["empty", "fixtures/nope.dpa"]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}

#[test]
fn json_lines_carry_command() {
    let o = run(&["--format", "json-lines", "empty", "fixtures/L1.layered"]);
    assert!(o.status.success());
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["command"], "empty");
        assert_eq!(v["empty"], false);
    }
}

#[test]
fn gen_matches_bundled_fixtures() {
    let cases: &[(&[&str], &str)] = &[
        (&["gen", "fixture", "L1"], "L1.dpa"),
        (&["gen", "fixture", "L1-layered"], "L1.layered"),
        (&["gen", "fixture", "L2"], "L2.dpa"),
        (&["gen", "fixture", "inconsistent"], "inconsistent.layered"),
        (&["gen", "fixture", "cobuchi-cc"], "cobuchi-cc.alt"),
        (&["gen", "parity", "2"], "parity2.dpa"),
        (&["gen", "two-strand", "2"], "two-strand2.layered"),
    ];
    for (args, file) in cases {
        let o = run(args);
        assert!(o.status.success(), "{args:?}");
        let want = std::fs::read(root().join("fixtures").join(file)).unwrap();
        assert_eq!(o.stdout, want, "{file}");
    }
}

#[test]
fn outputs_are_byte_stable() {
    for args in [
        &["canonical", "fixtures/L4.dpa"][..],
        &["congruence", "fixtures/L2.dpa"],
        &["cocoa", "fixtures/two-strand2.layered"],
        &["dot", "fixtures/L1.layered"],
        &["gen", "random", "--seed", "7"],
    ] {
        let a = run(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn conversion_round_trip_through_stdin() {
    let d = run(&["from-dpa", "fixtures/L3.dpa"]);
    assert!(d.status.success());
    let v = run_stdin(&["validate", "-"], &d.stdout);
    assert!(v.status.success());
    let e = run_stdin(&["--exit-status", "equiv", "-", "fixtures/L3.dpa"], &d.stdout);
    assert_eq!(e.status.code(), Some(0));
}
