//! End-to-end checks of the command-line front end on the bundled problems.

use hypertrans::cli::run_command;
use serde_json::Value;

fn run(args: &[&str]) -> (Value, i32) {
    let mut argv = vec!["hypertrans"];
    argv.extend_from_slice(args);
    let (out, code) = run_command(argv);
    let j = serde_json::from_str(&out).unwrap_or_else(|e| panic!("not JSON ({e}): {out}"));
    (j, code)
}

fn problem(name: &str) -> String {
    format!("{}/problems/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn classify(name: &str) -> (Value, i32) {
    run(&["classify", &problem(name)])
}

#[test]
fn corpus_verdicts() {
    let expected = [
        (
            "f1.problem",
            "HYPERTRANSCENDENTAL",
            Some("ORDER1_EXACT"),
            None,
        ),
        (
            "f2.problem",
            "HYPERTRANSCENDENTAL",
            Some("NO_RATIONAL_MATCH"),
            None,
        ),
        (
            "product.problem",
            "HYPERTRANSCENDENTAL",
            Some("MAHLER_MULT_FAIL"),
            None,
        ),
        (
            "trigamma.problem",
            "HYPERTRANSCENDENTAL",
            Some("TELESCOPER_ABSENT"),
            None,
        ),
        ("mahler_mult.problem", "RATIONAL", None, Some("1-x")),
        ("planted_shift.problem", "RATIONAL", None, Some("1+x")),
    ];
    for (file, outcome, kind, witness) in expected {
        let (j, code) = classify(file);
        assert_eq!(code, 0, "{file}: {j}");
        assert_eq!(j["schema_version"], 1);
        assert_eq!(j["command"], "classify");
        assert_eq!(j["outcome"], outcome, "{file}");
        assert_eq!(j["exactness"], "EXACT", "{file}");
        if let Some(k) = kind {
            assert_eq!(j["certificate"]["kind"], k, "{file}");
        }
        if let Some(w) = witness {
            assert_eq!(j["witness"], w, "{file}");
        }
    }
}

#[test]
fn inconclusive_exits_with_two() {
    let (j, code) = classify("theta_q.problem");
    assert_eq!(code, 2);
    assert_eq!(j["status"], "inconclusive");
    assert_eq!(j["exactness"], "CONDITIONAL");
}

#[test]
fn batch_classification_keeps_file_order() {
    let (out, code) = run_command([
        "hypertrans",
        "classify",
        &problem("f1.problem"),
        &problem("theta_q.problem"),
    ]);
    assert_eq!(code, 2, "worst status wins");
    let j: Value = serde_json::from_str(&out).unwrap();
    let results = j["reports"].as_array().expect("batch report");
    assert!(results[0]["file"].as_str().unwrap().ends_with("f1.problem"));
    assert_eq!(results[1]["status"], "inconclusive");
}

#[test]
fn knobs_are_reported() {
    let (j, _) = run(&[
        "--truncation",
        "80",
        "--seed",
        "3",
        "classify",
        &problem("f1.problem"),
    ]);
    assert_eq!(j["config"]["N"], 80);
    assert_eq!(j["config"]["seed"], 3);
}

#[test]
fn errors_are_json_with_positions() {
    let dir = std::env::temp_dir().join(format!("hypertrans-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.problem");
    std::fs::write(&bad, "case = mahler p=2\neq: f(x^2) - * f(x) = 0\n").unwrap();
    let (j, code) = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(j["status"], "error");
    assert_eq!(j["error"]["kind"], "Parse");
    assert_eq!(j["error"]["line"], 2);

    let (j, code) = run(&["classify", dir.join("missing.problem").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(j["status"], "error");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn ratsols_and_certify1() {
    let (j, code) = run(&["ratsols", &problem("planted_shift.problem")]);
    assert_eq!(code, 0, "{j}");
    assert_eq!(j["space"]["complete"], true);
    assert!(j["space"]["basis"]
        .as_array()
        .unwrap()
        .iter()
        .any(|b| b == "1+x"));

    let (j, code) = run(&["certify1", &problem("trigamma.problem")]);
    assert_eq!(code, 0, "{j}");
    assert!(j.to_string().contains("TELESCOPER_ABSENT"));
}

#[test]
fn ore_and_system_subcommands() {
    let (j, code) = run(&["ore", "mul", "--case", "shift:1", "S - x", "x*S + 1"]);
    assert_eq!(code, 0, "{j}");
    assert_eq!(j["result"]["text"], "(1+x)S^2 + (1-x^2)S - x");

    let (j, code) = run(&["ore", "divmod", "--case", "q:2", "S^2 - 1", "S + 1"]);
    assert_eq!(code, 0, "{j}");
    assert_eq!(j["quotient"]["text"], "S - 1");
    assert_eq!(j["remainder"]["text"], "0");

    let (j, code) = run(&[
        "system", "det", "--case", "mahler:2", "--row", "0, 1", "--row", "x, 1+x",
    ]);
    assert_eq!(code, 0, "{j}");
    assert_eq!(j["system"]["det"], "-x");
    assert_eq!(j["det_operator"]["text"], "S + x");
}

#[test]
fn eval_reports_enclosures() {
    let (j, code) = run(&[
        "eval",
        &problem("f1.problem"),
        "--at",
        "1/2",
        "--derivs",
        "1",
    ]);
    assert_eq!(code, 0, "{j}");
    let values = j["values"].as_array().unwrap();
    assert_eq!(values.len(), 2);
    assert!(values[0]["lo"].as_str().unwrap().starts_with("0.8164215"));
}

#[test]
fn selftest_passes() {
    let (j, code) = run(&["selftest"]);
    assert_eq!(code, 0, "{j}");
    assert!(j["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
}
