// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use actlat::corpus::{canonical_star_identity, corrupted_cyclic};
use actlat::io::{cyclic_to_file, to_json};

fn actlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actlat"))
        .args(args)
        .env("ACTLAT_COLOR", "0")
        .output()
        .expect("run actlat")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn quasiequation_of_cut() {
    let o = actlat(&["rules", "quasieq", "Cut"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "(x <= y & z.y.w <= u) => z.x.w <= u");
}

#[test]
fn classify_verdicts() {
    let o = actlat(&["rules", "classify", "C", "Wk", "Cut", "c"]);
    let out = stdout(&o);
    assert!(out.contains("C: structural, linear, analytic"));
    assert!(out.contains("Wk: structural, linear, analytic"));
    assert!(out.contains("Cut: structural, linear, not analytic"));
    assert!(out.contains("c: structural, not linear"));
}

#[test]
fn check_canonical_and_corrupted() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("astar_id.cyclic");
    std::fs::write(&good, to_json(&cyclic_to_file(&canonical_star_identity()))).unwrap();
    let o = actlat(&["check", path(&good)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("accepted"));

    let (_, bad) = corrupted_cyclic().remove(0);
    let badp = dir.path().join("corrupted.cyclic");
    std::fs::write(&badp, to_json(&cyclic_to_file(&bad))).unwrap();
    let o = actlat(&["check", path(&badp)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("cycle"), "{}", stdout(&o));

    let o = actlat(&["--json", "check", path(&badp)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "rejected");
    let cycle = v["cycle"].as_array().unwrap();
    assert!(cycle.len() >= 2);
    assert_eq!(cycle.first(), cycle.last());
}

#[test]
fn prove_translate_check() {
    let dir = tempfile::tempdir().unwrap();
    let cyc = dir.path().join("aa.cyclic");
    let wf = dir.path().join("aa.wf");
    let o = actlat(&["prove", "a*, a* |- a*", "-o", path(&cyc)]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&actlat(&["check", path(&cyc)])), 0);
    let o = actlat(&["translate", path(&cyc), path(&wf), "--to", "wf", "--omega-fuel", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = actlat(&["--json", "check", path(&wf)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["system"], "womega");
    assert_eq!(v["conclusion"], "a*, a* |- a*");
}

#[test]
fn projection_writes_a_checked_proof() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("a.cyclic");
    let out = dir.path().join("p.cyclic");
    std::fs::write(&src, to_json(&cyclic_to_file(&canonical_star_identity()))).unwrap();
    let o = actlat(&["project", path(&src), path(&out), "--assign", "0:2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&actlat(&["check", path(&out)])), 0);
}

#[test]
fn refutation_exit_codes() {
    let o = actlat(&["refute", "a . b |- b . a"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("refuted"));
    assert_eq!(code(&actlat(&["refute", "a* |- a*"])), 0);
    assert_eq!(code(&actlat(&["models", "check-seq", "two-chain", "a |- b"])), 1);
    assert_eq!(code(&actlat(&["models", "check-seq", "two-chain", "a . b |- b . a"])), 0);
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(code(&actlat(&["fmt", "a . ("])), 3);
    assert_eq!(code(&actlat(&["prove", "a |-"])), 3);
    assert_eq!(code(&actlat(&["check", "/nonexistent/file"])), 3);
    assert_eq!(code(&actlat(&["no-such-command"])), 3);
    let o = actlat(&["--json", "fmt", "a . ("]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exit"], 3);
}

#[test]
fn frame_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("dual.json");
    assert_eq!(code(&actlat(&["frames", "dual", "three-chain", "-o", path(&d)])), 0);
    assert_eq!(code(&actlat(&["models", "validate", path(&d)])), 0);
    assert_eq!(code(&actlat(&["frames", "gentzen-check", "two-chain"])), 0);
    assert_eq!(code(&actlat(&["frames", "macneille", "rel_algebra(1)"])), 0);
    let o = actlat(&["frames", "transfer", "three-chain", "--rules", "C,Wk"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("agree")).count(), 2);
}

#[test]
fn fmt_is_idempotent() {
    let once = stdout(&actlat(&["fmt", "a.b|-(a|b)*"]));
    let twice = stdout(&actlat(&["fmt", once.trim()]));
    assert_eq!(once, twice);
}
