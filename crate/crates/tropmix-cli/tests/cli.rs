use std::path::PathBuf;
use std::process::{Command, Output};

use tropmix::mpg::implies;
use tropmix::system::parse_system;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn tropmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropmix")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn projection_with_exact_reduction() {
    let out = tropmix(&["project", &path("running.sys"), "--eliminate", "x1", "--reduce", "exact"]);
    assert!(out.status.success());
    let got = parse_system(&stdout(&out)).unwrap();
    let want = parse_system("dim 1\n-2 <= x1\n").unwrap();
    assert!(want.rows().iter().all(|r| implies(&got, r).unwrap()));
    assert!(got.rows().iter().all(|r| implies(&want, r).unwrap()));
}

#[test]
fn projection_output_reparses() {
    let out = tropmix(&["project", &path("running.sys"), "--eliminate", "x2,x1"]);
    assert!(out.status.success());
    let sys = parse_system(&stdout(&out)).unwrap();
    assert_eq!(sys.dim(), 0);
    let hull = tropmix(&["hull", &path("running.sys"), &path("strict_pair.sys"), "--reduce", "weak"]);
    assert!(hull.status.success());
    assert_eq!(parse_system(&stdout(&hull)).unwrap().dim(), 2);
}

#[test]
fn emptiness_verdicts() {
    let out = tropmix(&["empty", &path("contradiction.sys")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "EMPTY\n");
    let out = tropmix(&["empty", &path("running.sys"), "--certificate"]);
    let text = stdout(&out);
    assert!(text.starts_with("NONEMPTY\n\nwinner: max"));
    assert!(text.contains("cycle: c"));
}

#[test]
fn implication_goal() {
    let out = tropmix(&["implies", &path("running.sys"), "--goal", "-2 <= x2"]);
    assert_eq!(stdout(&out), "IMPLIED\n");
    let out = tropmix(&["implies", &path("running.sys"), "--goal", "-1 <= x2"]);
    assert_eq!(stdout(&out), "NOT-IMPLIED\n");
}

#[test]
fn zones_and_cap() {
    let out = tropmix(&["zones", &path("strict_pair.sys")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 2);
    let capped = tropmix(&["zones", &path("running.sys"), "--max-zones", "1"]);
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn reachability() {
    assert_eq!(stdout(&tropmix(&["reach", &path("fig6.ta")])), "UNREACHABLE\n");
    assert_eq!(stdout(&tropmix(&["reach", &path("fig6.ta"), "--approx-union"])), "UNREACHABLE\n");
    let relaxed = tropmix(&["reach", &path("fig6_relaxed.ta"), "--trace"]);
    let text = stdout(&relaxed);
    assert!(text.starts_with("REACHABLE\n\nlocation l0\ndim 2\n"));
    assert!(text.contains("location lf"));
    let capped = tropmix(&["reach", &path("fig6.ta"), "--max-steps", "2"]);
    assert_eq!(capped.status.code(), Some(3));
    assert_eq!(stdout(&capped), "INCONCLUSIVE\n");
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(tropmix(&["project", &path("running.sys"), "--eliminate", "x9"]).status.code(), Some(2));
    assert_eq!(tropmix(&["empty", &path("missing.sys")]).status.code(), Some(2));
    assert_eq!(tropmix(&["reach", &path("running.sys")]).status.code(), Some(2));
    assert_eq!(tropmix(&["implies", &path("running.sys"), "--goal", "x3 <= 0"]).status.code(), Some(2));
    assert_eq!(tropmix(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["zones", &path("running.sys")];
    assert_eq!(stdout(&tropmix(&args)), stdout(&tropmix(&args)));
}
