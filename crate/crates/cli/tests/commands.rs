use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rookcong"))
        .args(args)
        .env_remove("RCL_BUDGET_ELEMENTS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn element_counts() {
    for (family, n, size) in [("or", "4", 37), ("sr", "4", 57), ("or", "2", 4), ("sr", "2", 7), ("r", "4", 209)] {
        let v = json(&["elements", "--family", family, "--n", n, "--format", "json"]);
        assert_eq!(v["size"], size, "{family} {n}");
        assert_eq!(v["elements"].as_array().unwrap().len(), size);
    }
    let v = json(&["elements", "--family", "or", "--n", "4", "--format", "json"]);
    assert_eq!(v["strata"], serde_json::json!([1, 16, 16, 0, 4]));
    assert_eq!(v["elements"][0]["map"], serde_json::json!([]));
}

#[test]
fn text_uses_two_line_notation() {
    let out = run(&["elements", "--family", "or", "--n", "2"]);
    let text = stdout(&out);
    assert!(text.starts_with("OR_2: 4 elements"));
    assert!(text.contains("1 2 / 1 2"));
}

#[test]
fn green_reports() {
    let v = json(&["green", "--family", "or", "--n", "4", "--format", "json"]);
    assert_eq!(v["counts"]["J"], 5);
    assert_eq!(v["counts"]["D"], 5);
    assert_eq!(v["classes"]["L"].as_array().unwrap().len(), 10);
    let disc = v["discrepancies"].as_array().unwrap();
    assert_eq!(disc.len(), 1);
    assert_eq!(disc[0]["quantity"], "D-class size");
    assert_eq!(disc[0]["rank"], 2);
    assert_eq!(disc[0]["formula"], 16);
    assert_eq!(disc[0]["observed"], serde_json::json!([8]));
    let v6 = json(&["green", "--family", "or", "--n", "6", "--format", "json"]);
    assert_eq!(v6["counts"]["H"], 214);
    assert!(v6["formulas"].is_object());
    let sr = json(&["green", "--family", "sr", "--n", "4", "--format", "json"]);
    assert!(sr["formulas"].is_null());
}

#[test]
fn green_dot_is_the_j_order() {
    let out = run(&["green", "--family", "or", "--n", "4", "--format", "dot"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("->").count(), 5);
}

#[test]
fn ideals_list_the_union() {
    let v = json(&["ideals", "--family", "or", "--n", "4", "--format", "json"]);
    let ideals = v["ideals"].as_array().unwrap();
    assert_eq!(ideals.len(), 6);
    let unlisted: Vec<&Value> = ideals.iter().filter(|d| d["listed"] == false).collect();
    assert_eq!(unlisted.len(), 1);
    assert_eq!(unlisted[0]["kind"], "union");
}

#[test]
fn verify_exit_codes() {
    for (family, n) in [("sr", "2"), ("or", "4"), ("or", "2"), ("sr", "4")] {
        let out = run(&["congruences", "verify", "--family", family, "--n", n]);
        assert_eq!(out.status.code(), Some(0), "{family} {n}");
    }
    let out = run(&["congruences", "verify", "--family", "or", "--n", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["congruences", "verify", "--family", "r", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_report_shape() {
    let v = json(&["congruences", "verify", "--family", "or", "--n", "4", "--format", "json"]);
    assert_eq!(v["family"], "OR");
    assert_eq!(v["n"], 4);
    assert_eq!(v["predicted_not_found"], serde_json::json!([]));
    let extra = v["found_not_predicted"].as_array().unwrap();
    assert_eq!(extra.len(), 5);
    for x in extra {
        assert!(x["classes"].is_array());
        assert_eq!(x["zero_class_kind"]["kind"], "union");
        assert!(x["unit_classes"].is_array());
    }
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

#[test]
fn predictions_and_lattice() {
    let p = json(&["congruences", "predict", "--family", "sr", "--n", "4", "--format", "json"]);
    assert_eq!(p["predicted"].as_array().unwrap().len(), 10);
    let l = json(&["congruences", "enumerate", "--family", "sr", "--n", "4", "--format", "json"]);
    assert_eq!(l["size"], 10);
    let dot = run(&["congruences", "enumerate", "--family", "or", "--n", "4", "--format", "dot"]);
    assert!(stdout(&dot).starts_with("digraph"));
}

#[test]
fn json_is_identical_across_thread_counts() {
    for args in [
        vec!["congruences", "enumerate", "--family", "or", "--n", "4", "--format", "json"],
        vec!["congruences", "verify", "--family", "sr", "--n", "4", "--format", "json"],
        vec!["green", "--family", "or", "--n", "4", "--format", "json"],
    ] {
        let with = |t: &str| {
            let mut a = args.clone();
            a.extend(["--threads", t]);
            run(&a).stdout
        };
        let one = with("1");
        assert_eq!(one, with("3"));
        assert_eq!(one, run(&args).stdout);
    }
}

#[test]
fn counterexample_text() {
    let out = run(&["counterexample"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("membership violated at i = 1"));
    assert!(text.contains("in OR_8: true"));
    assert!(text.contains("in W: false"));
    let v = json(&["counterexample", "--format", "json"]);
    assert_eq!(v["conjugate_in_sr"], false);
    assert_eq!(v["first_violation"], 1);
}

#[test]
fn erratum_lists_discrepancies() {
    let v = json(&["erratum", "--format", "json"]);
    assert_eq!(v["formula_discrepancies"].as_array().unwrap().len(), 1);
    assert_eq!(v["unlisted_ideals"].as_array().unwrap().len(), 1);
    assert_eq!(v["unpredicted_congruences"], 5);
    let big = json(&["erratum", "--n", "8", "--format", "json"]);
    assert!(big["lattice_skipped"].is_string());
}

#[test]
fn budgets_and_usage_errors() {
    let out = Command::new(env!("CARGO_BIN_EXE_rookcong"))
        .args(["elements", "--family", "or", "--n", "4"])
        .env("RCL_BUDGET_ELEMENTS", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let forced = Command::new(env!("CARGO_BIN_EXE_rookcong"))
        .args(["elements", "--family", "or", "--n", "4", "--force-budget"])
        .env("RCL_BUDGET_ELEMENTS", "10")
        .output()
        .unwrap();
    assert_eq!(forced.status.code(), Some(2), "explicit limits still apply over --force-budget");
    assert_eq!(run(&["elements", "--family", "or", "--n", "3"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["elements", "--family", "or", "--n", "4", "--format", "dot"]).status.code(), Some(1));
    assert_eq!(run(&["congruences", "enumerate", "--family", "or", "--n", "6", "--lattice-limit", "100"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("rookcong-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("or4.json");
    let out = run(&["elements", "--family", "or", "--n", "4", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["size"], 37);
    std::fs::remove_dir_all(&dir).unwrap();
}
