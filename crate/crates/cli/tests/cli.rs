use std::process::{Command, Output};

use serde_json::Value;

fn bredon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bredon"))
        .args(args)
        .env_remove("BREDON_MAX_ORDER")
        .env_remove("BREDON_MAX_RANK")
        .env_remove("BREDON_MAX_CLASSES")
        .env_remove("BREDON_TIME_LIMIT")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn cd_of_a5_proper_is_two() {
    let o = bredon(&["cd", "--group", "a5", "--family", "proper", "--n-max", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["report"]["value"], 2);
    assert_eq!(v["inputs"]["group"], "a5");
}

#[test]
fn cd_from_group_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s3.json");
    std::fs::write(&path, r#"{"degree":3,"generators":[[1,0,2],[1,2,0]]}"#).unwrap();
    let o = bredon(&["cd", "--group", path.to_str().unwrap(), "--family", "all"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["value"], 0);
}

#[test]
fn h1_of_inversion_action() {
    let o = bredon(&["h1", "--pi", "z3", "--g", "z2", "--action", "invert"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert_eq!(r["class_count"], 1);
    assert_eq!(r["cocycle_count"], 3);
    assert_eq!(r["principal_class_size"], 3);
}

#[test]
fn h1_with_explicit_generator_images() {
    let o = bredon(&[
        "h1",
        "--pi",
        "z2",
        "--g",
        "z2",
        "--action",
        r#"{"generator_images":{"0":[0,1]}}"#,
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["class_count"], 2);
    let bad = bredon(&[
        "h1",
        "--pi",
        "z2",
        "--g",
        "z2",
        "--action",
        r#"{"generator_images":{"3":[0,1]}}"#,
    ]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn verify_mainalg_on_s3() {
    let o = bredon(&["verify", "mainalg", "--group", "s3"]);
    assert_eq!(code(&o), 0);
    let detail = &json(&o)["report"]["cases"][0]["detail"];
    assert_eq!(detail["entries"].as_array().unwrap().len(), 5);
}

#[test]
fn input_errors_exit_two() {
    let o = bredon(&["cd", "--group", "nosuchgroup", "--family", "proper"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["error"]["category"], "invalid_input");
    let o = bredon(&[
        "cd",
        "--group",
        r#"{"degree":3,"gens":[]}"#,
        "--family",
        "all",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn budgets_exit_three() {
    let o = bredon(&[
        "cd",
        "--group",
        "a6",
        "--family",
        "proper",
        "--max-order",
        "100",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["error"]["category"], "budget");
    let o = Command::new(env!("CARGO_BIN_EXE_bredon"))
        .args(["subgroups", "--group", "a5"])
        .env("BREDON_MAX_ORDER", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let args = ["orbitcat", "--group", "d4", "--family", "proper"];
    let a = bredon(&args);
    let b = bredon(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn inputs_reparse_to_a_job() {
    let dir = tempfile::tempdir().unwrap();
    let o = bredon(&[
        "cohomology",
        "--group",
        "z6",
        "--family",
        "all",
        "--coefficients",
        "z/2",
    ]);
    assert_eq!(code(&o), 0);
    let inputs = json(&o)["inputs"].clone();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        serde_json::to_string(&serde_json::json!({ "jobs": [inputs] })).unwrap(),
    )
    .unwrap();
    let b = bredon(&["batch", manifest.to_str().unwrap()]);
    assert_eq!(code(&b), 0);
    let job = &json(&b)["jobs"][0];
    assert_eq!(job["report"], json(&o)["report"]);
}

#[test]
fn batch_is_ordered_and_isolates_bad_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"jobs":[
            {"id":"c","command":"h1","pi":"z2","g":"z2","action":"trivial"},
            {"id":"a","command":"cd","group":"s3","family":"all","colour":"red"},
            {"id":"b","command":"cd","group":"s3","family":"all"}
        ]}"#,
    )
    .unwrap();
    let o = bredon(&["batch", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    let jobs = v["jobs"].as_array().unwrap();
    let ids: Vec<&str> = jobs.iter().map(|j| j["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["a", "b", "c"]);
    assert_eq!(jobs[0]["exit_code"], 2);
    assert_eq!(jobs[1]["exit_code"], 0);
    assert_eq!(jobs[1]["report"]["value"], 0);
    assert_eq!(jobs[2]["exit_code"], 0);
}

#[test]
fn empty_batch_passes() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(&manifest, r#"{"jobs":[]}"#).unwrap();
    let o = bredon(&["batch", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["jobs"].as_array().unwrap().len(), 0);
}

#[test]
fn batch_worst_status_wins() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"[{"id":"ok","command":"families","group":"z4"},
            {"id":"big","command":"subgroups","group":"a5","max_order":10}]"#,
    )
    .unwrap();
    let o = bredon(&["batch", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn ereduce_and_crown() {
    let o = bredon(&["ereduce", "--poset", "chain:4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["is_point"], true);
    let o = bredon(&["ereduce", "--poset", "crown:2,2", "--regime", "random:7"]);
    assert_eq!(json(&o)["report"]["reduced_size"], 5);
    let o = bredon(&["crown", "--group", "a5"]);
    assert_eq!(code(&o), 0);
    let o = bredon(&["crown", "--group", "s4"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn semidirect_reports_complements() {
    let o = bredon(&[
        "semidirect",
        "--pi",
        "z3",
        "--g",
        "z2",
        "--action",
        "invert",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["order"], 6);
}

#[test]
fn text_format_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.txt");
    let o = bredon(&[
        "families",
        "--group",
        "s3",
        "--format",
        "text",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let t = std::fs::read_to_string(out).unwrap();
    assert!(t.starts_with("families pass"));
}
