mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{corpus, corpus_dir, corpus_files, same_text, MSG_UNIT};

fn lqh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lqh")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(name: &str) -> String {
    corpus_dir().join(name).display().to_string()
}

#[test]
fn check_exit_codes() {
    let o = lqh(&["check", &path("list_length_proof_done.lqh")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(lqh(&["check", &path("empty.lqh")]).status.code(), Some(0));
    let o = lqh(&["check", &path("odd_add_bad.lqh")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("error[INVALID_VC]"));
    let o = lqh(&["check", &path("list_length_proof.lqh")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("error[HOLE]: Found hole `_0'"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lqh(&["check", "/no/such/file.lqh"]).status.code(), Some(2));
    assert_eq!(lqh(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        lqh(&["hole", &path("list_length_proof.lqh"), "_3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        lqh(&["fill", &path("list_length_proof.lqh"), "_0", "1 +"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn missing_solver_exits_4() {
    let o = lqh(&["--solver", "/no/such/z3", "check", &path("odd_add.lqh")]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn hole_prints_message_block() {
    let o = lqh(&["hole", &path("list_length_proof_split.lqh"), "_0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let block: String = text.lines().take(2).collect::<Vec<_>>().join("\n");
    assert!(same_text(&block, MSG_UNIT), "{text}");
    assert!(text.contains("Raw goal:"));
    assert!(text.contains("fill_unit"));
}

#[test]
fn holes_lists_simplified_goals() {
    let o = lqh(&["holes", &path("list_length_holes.lqh")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("_0 : { v:Nat | v == 0 }"), "{text}");
    assert!(text.contains("_1 : { v:Nat | v == len ys }"), "{text}");
}

#[test]
fn split_prints_listing() {
    let o = lqh(&["split", &path("list_length_proof.lqh"), "_0", "xs"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(same_text(&stdout(&o), &corpus("list_length_proof_split.lqh")));
}

#[test]
fn scripted_session_with_write() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("proof.lqh");
    std::fs::write(&f, corpus("list_length_proof.lqh")).unwrap();
    let f = f.display().to_string();
    let run = |args: &[&str]| {
        let o = lqh(args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    };
    run(&["split", &f, "_0", "xs", "--write"]);
    assert_eq!(lqh(&["check", &f]).status.code(), Some(1));
    run(&["fill", &f, "_0", "()", "--write"]);
    run(&["fill", &f, "_1", "listLengthProof ys", "--write"]);
    assert_eq!(lqh(&["check", &f]).status.code(), Some(0));
    assert!(same_text(
        &std::fs::read_to_string(&f).unwrap(),
        &corpus("list_length_proof_done.lqh")
    ));
}

#[test]
fn json_validates_for_every_corpus_file() {
    for (name, _) in corpus_files() {
        for cmd in ["check", "holes"] {
            let o = lqh(&["--json", cmd, &path(&name)]);
            let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{name}: {e}"));
            lqh::report::validate(&v).unwrap_or_else(|e| panic!("{name} {cmd}: {e}"));
        }
    }
    let o = lqh(&["--json", "split", &path("list_length_proof.lqh"), "_0", "xs"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    lqh::report::validate(&v).unwrap();
    assert!(v["new_source"]
        .as_str()
        .unwrap()
        .contains("listLengthProof (y:ys) = _1"));
}

#[test]
fn schema_file_matches_validator_vocabulary() {
    let schema = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&schema).unwrap();
    assert_eq!(v["properties"]["schema"]["const"], "lqh/1");
    for k in ["fill_unit", "split", "fill_expr", "unfold_view"] {
        assert!(schema.contains(k), "{k}");
    }
}

#[test]
fn flags_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let o = lqh(&[
        "--fuel",
        "4",
        "--smt-timeout-ms",
        "2000",
        "--no-auto-unit",
        "--dump-smt",
        &d,
        "hole",
        &path("list_length_proof_split.lqh"),
        "_0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // no background probe: `()` is not suggested
    assert!(!stdout(&o).contains("fill_unit"));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0, "no SMT dumps");
}
