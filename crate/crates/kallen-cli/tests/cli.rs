//! End-to-end tests for the `kallen` binary: exact output for the
//! documented examples, exit codes, config merging, and determinism
//! across parallelism degrees.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kallen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn json_of(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout_of(args)).expect("valid JSON output")
}

fn temp_path(tag: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("kallen-cli-test-{}-{}", std::process::id(), tag));
    p
}

#[test]
fn macdonald_a1_single_element_is_exact() {
    let text = stdout_of(&["macdonald", "--type", "A1", "--lambda", "1", "--w", "s1"]);
    assert_eq!(text, "e^(-w1) + q^-1 e^(w1)\n");
}

#[test]
fn eqb_longest_element_lists_whole_group() {
    let text = stdout_of(&["eqb", "--type", "A2", "--w", "s1 s2 s1"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "e");
    assert!(lines.contains(&"s1 s2 s1"));
}

#[test]
fn qbg_vertex_and_edge_counts() {
    let a1 = json_of(&["qbg", "--type", "A1"]);
    assert_eq!(a1["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(a1["edges"].as_array().unwrap().len(), 2);

    let full = json_of(&["qbg", "--type", "A2", "--J", ""]);
    assert_eq!(full["vertices"].as_array().unwrap().len(), 6);

    let par = json_of(&["qbg", "--type", "A2", "--J", "2"]);
    assert_eq!(par["vertices"].as_array().unwrap().len(), 3);
}

#[test]
fn qbg_json_round_trips() {
    let text = stdout_of(&["qbg", "--type", "B2"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    let reparsed: serde_json::Value = serde_json::from_str(&again).unwrap();
    assert_eq!(v, reparsed);
    for e in v["edges"].as_array().unwrap() {
        let kind = e["kind"].as_str().unwrap();
        assert!(kind == "bruhat" || kind == "quantum");
    }
}

#[test]
fn rootsys_json_reports_group_data() {
    let v = json_of(&["rootsys", "--type", "A2", "--format", "json"]);
    assert_eq!(v["type"], "A2");
    assert_eq!(v["rank"], 2);
    assert_eq!(v["order"], 6);
    assert_eq!(v["coxeter_number"], 3);
    assert_eq!(v["positive_roots"].as_array().unwrap().len(), 3);
}

#[test]
fn gch_text_forms() {
    let k = stdout_of(&["gch", "--type", "A1", "--lambda", "1", "--w", "s1", "--kind", "K"]);
    assert_eq!(k, "(e^(-w1) + q^-1 e^(w1)) / (1 - q^-1)\n");
    let d = stdout_of(&[
        "gch", "--type", "A1", "--lambda", "1", "--w", "s1", "--kind", "direct", "--trunc", "0",
    ]);
    assert_eq!(d, "e^(-w1)\n");
}

#[test]
fn verify_passes_and_reports_json() {
    let out = run(&["verify", "--suite", "all", "--type", "A2", "--lambda", "1,1"]);
    assert_eq!(out.status.code(), Some(0));

    let v = json_of(&[
        "verify", "--suite", "dem1", "--type", "A1", "--lambda", "2", "--format", "json",
    ]);
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["identity"], "dem1");
    assert_eq!(arr[0]["status"], "ok");
    assert!(arr[0]["cases"].as_u64().unwrap() > 0);
    assert!(arr[0]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn kset_partition_box_is_clean() {
    let out = run(&["kset", "--type", "A2", "--lambda", "1,1", "--w", "e", "--box", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("violations: 0"), "unexpected output: {}", text);
}

#[test]
fn kset_membership_answers() {
    let yes = stdout_of(&[
        "kset", "--type", "A1", "--lambda", "1", "--w", "s1", "--x", "s1",
    ]);
    assert!(yes.contains("member=true"), "{}", yes);
    let no = stdout_of(&["kset", "--type", "A1", "--lambda", "1", "--w", "s1", "--x", "e"]);
    assert!(no.contains("member=false"), "{}", no);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["qbg", "--type", "Z9"]).status.code(), Some(2));
    assert_eq!(run(&["qbg"]).status.code(), Some(2));
    assert_eq!(
        run(&["macdonald", "--type", "A2", "--lambda", "1"]).status.code(),
        Some(2),
        "wrong-length lambda must be a usage error"
    );
    assert_eq!(
        run(&["macdonald", "--type", "A2", "--lambda", "1,0", "--J", "1"]).status.code(),
        Some(2),
        "J conflicting with lambda must be a usage error"
    );
    assert_eq!(
        run(&["eqb", "--type", "A2", "--w", "s9"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic_across_runs_and_jobs() {
    let args = ["verify", "--type", "B2", "--lambda", "1,1"];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second);
    let mut par = args.to_vec();
    par.extend(["--jobs", "4"]);
    assert_eq!(first, stdout_of(&par));

    let sweep = ["macdonald", "--type", "B2", "--lambda", "1,0", "--w", "all"];
    let serial = stdout_of(&sweep);
    let mut wide = sweep.to_vec();
    wide.extend(["--jobs", "3"]);
    assert_eq!(serial, stdout_of(&wide));
}

#[test]
fn config_file_matches_flags_and_flags_win() {
    let cfg = temp_path("cfg.toml");
    std::fs::write(&cfg, "type = \"A1\"\nlambda = \"1\"\nw = \"s1\"\n").unwrap();
    let from_cfg = stdout_of(&["macdonald", "--config", cfg.to_str().unwrap()]);
    let from_flags = stdout_of(&["macdonald", "--type", "A1", "--lambda", "1", "--w", "s1"]);
    assert_eq!(from_cfg, from_flags);

    let overridden = stdout_of(&["macdonald", "--config", cfg.to_str().unwrap(), "--w", "e"]);
    assert_eq!(overridden, "e^(w1)\n");
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_empty() {
    let path = temp_path("qbg.json");
    let out = run(&["qbg", "--type", "A1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 2);
    std::fs::remove_file(&path).ok();
}

#[test]
fn qls_lists_paths_with_degrees() {
    let text = stdout_of(&["qls", "--type", "A1", "--lambda", "2"]);
    assert!(text.contains("paths: 4"), "{}", text);
    assert!(text.contains("deg=-1"), "{}", text);

    let filtered = stdout_of(&["qls", "--type", "A1", "--lambda", "2", "--w", "s1"]);
    assert!(filtered.contains("paths: 4"), "{}", filtered);
}

#[test]
fn macdonald_methods_agree_via_cli() {
    let qls = stdout_of(&[
        "macdonald", "--type", "B2", "--lambda", "1,1", "--w", "all", "--method", "qls",
    ]);
    let rec = stdout_of(&[
        "macdonald", "--type", "B2", "--lambda", "1,1", "--w", "all", "--method", "recursion",
    ]);
    assert_eq!(qls, rec);
}
