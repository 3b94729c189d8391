use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motivic-dtpt")).args(args).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn json_stderr(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn coefficient<'a>(result: &'a Value, exps: &[i64]) -> &'a Value {
    let terms = result["result"]["terms"].as_array().unwrap();
    let hit = terms.iter().find(|t| t["exps"].as_array().unwrap().iter().map(|e| e.as_i64().unwrap()).eq(exps.iter().copied()));
    &hit.unwrap_or_else(|| panic!("no term {exps:?}"))["coeff"]
}

#[test]
fn conifold_pt_leading_term() {
    let out = run(&["compute", "--n0", "1", "--n1", "1", "--partition", "BT", "--series", "pt", "-r", "1", "--max-s-degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(coefficient(&v, &[1, 1]), &serde_json::json!([[0, "1"]]));
}

#[test]
fn rank_two_points_series() {
    let args = ["compute", "--n0", "1", "--n1", "0", "--partition", "B", "--series", "points", "-r", "2", "--max-s-degree", "1"];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(coefficient(&json_stdout(&out), &[1]), &serde_json::json!([[2, "1"], [4, "1"]]));

    let mut euler = args.to_vec();
    euler.push("--euler");
    let out = run(&euler);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(coefficient(&json_stdout(&out), &[1]), &serde_json::json!("2"));
}

#[test]
fn text_format_one_monomial_per_line() {
    let out = run(&["compute", "--n0", "1", "--n1", "0", "--series", "points", "-r", "2", "--max-s-degree", "1", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "s^1 : 1*L^(1) + 1*L^(2)"), "{text}");
}

#[test]
fn verify_conifold_all_partitions() {
    let out = run(&["verify", "--n0", "1", "--n1", "1", "--all-partitions", "-r", "2", "--max-s-degree", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_stdout(&out);
    let reports = reports.as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["pass"] == true && r["compared"].as_u64().unwrap() > 0));
}

#[test]
fn verify_includes_rank_one_dt_check() {
    let out = run(&["verify", "--n0", "2", "--n1", "1", "--all-partitions", "-r", "1", "--max-s-degree", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_stdout(&out);
    let ids: Vec<&str> = reports.as_array().unwrap().iter().map(|r| r["identity"].as_str().unwrap()).collect();
    assert!(ids.contains(&"rank1-dt"));
    assert!(ids.contains(&"dt-pt-correspondence"));
}

#[test]
fn verify_with_generic_custom_zeta() {
    let out = run(&["verify", "--partition", "BT", "-r", "1", "--max-s-degree", "2", "--custom-zeta", "1,-3+eps"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = json_stdout(&out);
    let reports = reports.as_array().unwrap();
    assert!(reports.iter().any(|r| r["identity"] == "universal-split" && r["pass"] == true));
    assert!(reports.iter().any(|r| r["identity"] == "strategy-agreement" && r["params"]["chamber"] == "1,-3+eps"));
}

#[test]
fn non_generic_zeta_is_a_configuration_error() {
    let out = run(&["verify", "--custom-zeta", "1,-1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = json_stderr(&out);
    assert_eq!(err["code"], "NonGenericZeta");
    assert_eq!(err["module"], "root-system");
    assert!(err["message"].is_string());
}

#[test]
fn bad_labels_report_module_and_code() {
    let out = run(&["compute", "--n0", "2", "--n1", "1", "--partition", "BTT"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_stderr(&out)["code"], "BadCounts");
}

#[test]
fn euler_of_floored_output_is_rejected() {
    let out = run(&["compute", "--partition", "BT", "--series", "universal", "--l-floor", "-2", "--euler"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_stderr(&out)["code"], "FlooredValue");
}

#[test]
fn ratio_strategy_needs_a_floor() {
    let out = run(&["compute", "--partition", "BT", "--strategy", "ratio"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_stderr(&out)["code"], "MissingFloor");

    let out = run(&["compute", "--partition", "BT", "--strategy", "both", "--l-floor", "-6"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn custom_series_needs_zeta() {
    let out = run(&["compute", "--partition", "BT", "--series", "custom"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_stderr(&out)["code"], "MissingZeta");
}

#[test]
fn usage_errors_are_json() {
    let out = run(&["compute", "--series", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_stderr(&out)["code"], "Usage");
}

#[test]
fn output_is_deterministic() {
    let args = ["compute", "--n0", "2", "--n1", "1", "--all-partitions", "--series", "dt", "-r", "2", "--max-s-degree", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_stdout(&a).as_array().unwrap().len(), 3);
}

#[test]
fn thread_cap_from_environment() {
    let run_with = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_motivic-dtpt"))
            .args(["compute", "--partition", "BT", "--series", "dt", "--max-s-degree", "3"])
            .env("MOTIVIC_DTPT_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run_with("1");
    let four = run_with("4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let bad = run_with("zero");
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json_stderr(&bad)["code"], "BadThreads");
}

#[test]
fn writes_to_output_file() {
    let path = std::env::temp_dir().join(format!("motivic-dtpt-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = run(&["partitions", "--n0", "2", "--n1", "2", "--output", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["partitions"].as_array().unwrap().len(), 6);
}

#[test]
fn partitions_text_listing() {
    let out = run(&["partitions", "--n0", "2", "--n1", "1", "--format", "text"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "BBT\nBTB\nTBB\n");
}

#[test]
fn quiver_json_and_dot() {
    let out = run(&["quiver", "--n0", "1", "--n1", "1", "--partition", "BT", "-r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_stdout(&out).is_object());
    let dot = run(&["quiver", "--partition", "BT", "--dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph"));
}
