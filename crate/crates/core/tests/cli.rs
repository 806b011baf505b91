use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn skilltree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skilltree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_reference_manifest() {
    let o = skilltree(&["validate", "--manifest", p(&data("reference_tree.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("5 kits, 104 tools"));
}

#[test]
fn validate_failures() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        skilltree(&["validate", "--manifest", p(&missing)])
            .status
            .code(),
        Some(1)
    );

    let mut manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("reference_tree.json")).unwrap())
            .unwrap();
    let dup = manifest["kits"][0]["tools"][0].clone();
    manifest["kits"][1]["tools"]
        .as_array_mut()
        .unwrap()
        .push(dup);
    let path = dir.path().join("dup.json");
    std::fs::write(&path, manifest.to_string()).unwrap();
    let o = skilltree(&["validate", "--manifest", p(&path)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate tool"));
}

#[test]
fn oracle_run_prints_perfect_means() {
    let dir = tempfile::tempdir().unwrap();
    let o = skilltree(&[
        "run",
        "--paradigm",
        "active",
        "--policy",
        "oracle",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for m in ["accuracy", "efficiency", "tao", "tio", "tem", "params"] {
        assert!(out.contains(&format!("{m}=1.0000")), "{m} in {out}");
    }
    let jsonl = std::fs::read_to_string(dir.path().join("trajectories.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 4);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with(
        "question_id,accuracy,efficiency,tao,tio,tem,params,tokens_q,turns,tokens_turn_mean\n"
    ));
}

#[test]
fn wrong_scripted_answer_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = skilltree(&[
        "run",
        "--fixtures",
        p(&data("fixtures/a1_split_window.json")),
        "--policy",
        &format!("scripted:{}", p(&data("traces/a1_wrong_answer.json"))),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["questions"][0]["accuracy"], 0.0);
}

#[test]
fn scripted_replays_of_appendix_traces() {
    for (fixture, trace, paradigm) in [
        ("a1_split_window", "a1_split_window_active", "active"),
        ("a1_split_window", "a1_split_window_2layers", "2layers"),
        ("a2_water_vapor", "a2_water_vapor_active", "active"),
        ("a2_water_vapor", "a2_water_vapor_2layers", "2layers"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let o = skilltree(&[
            "run",
            "--paradigm",
            paradigm,
            "--fixtures",
            p(&data(&format!("fixtures/{fixture}.json"))),
            "--policy",
            &format!("scripted:{}", p(&data(&format!("traces/{trace}.json")))),
            "--out",
            p(dir.path()),
        ]);
        assert_eq!(o.status.code(), Some(0), "{trace}");
        assert!(
            stdout(&o).contains("tao=1.0000 tio=1.0000"),
            "{trace}: {}",
            stdout(&o)
        );
    }
}

#[test]
fn episode_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("s.json");
    std::fs::write(&script, r#"[{"type":"filelist","path":"."}]"#).unwrap();
    let o = skilltree(&[
        "run",
        "--policy",
        &format!("scripted:{}", p(&script)),
        "--out",
        p(&dir.path().join("out")),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn rag_needs_embedding_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = skilltree(&["run", "--paradigm", "rag", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    let o = skilltree(&[
        "run",
        "--paradigm",
        "rag",
        "--embedding",
        "builtin",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn unknown_paradigm_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = skilltree(&["run", "--paradigm", "tree", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scale_same_domain_writes_twelve_cells() {
    let dir = tempfile::tempdir().unwrap();
    let o = skilltree(&[
        "scale",
        "--plan",
        p(&data("plans/same_domain.json")),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(
        std::fs::read_dir(dir.path().join("reports"))
            .unwrap()
            .count(),
        12
    );
    assert_eq!(
        std::fs::read_dir(dir.path().join("trajectories"))
            .unwrap()
            .count(),
        12
    );
    let curves = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 13);
}

#[test]
fn scale_cross_domain_has_three_stages() {
    let dir = tempfile::tempdir().unwrap();
    let o = skilltree(&[
        "scale",
        "--plan",
        p(&data("plans/cross_domain.json")),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let curves = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let sizes: std::collections::BTreeSet<&str> = curves
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(sizes.into_iter().collect::<Vec<_>>(), ["104", "179", "234"]);
}

#[test]
fn invalid_plan_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(&plan, r#"{"mode":"same_domain","increments":[40,20]}"#).unwrap();
    let o = skilltree(&["scale", "--plan", p(&plan), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let o = skilltree(&[
        "eval",
        "--trajectories",
        p(&empty),
        "--out",
        p(&dir.path().join("e")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("e/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["questions"].as_array().unwrap().len(), 0);

    let run = dir.path().join("run");
    assert_eq!(skilltree(&["run", "--out", p(&run)]).status.code(), Some(0));
    let text = std::fs::read_to_string(run.join("trajectories.jsonl")).unwrap();
    let first = text
        .lines()
        .next()
        .unwrap()
        .replacen("question42", "question999", 1);
    let mixed = dir.path().join("mixed.jsonl");
    std::fs::write(&mixed, format!("{first}\n{text}")).unwrap();
    let o = skilltree(&[
        "eval",
        "--trajectories",
        p(&mixed),
        "--out",
        p(&dir.path().join("m")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["errors"].as_array().unwrap().len(), 1);
    assert_eq!(report["questions"].as_array().unwrap().len(), 4);
}
