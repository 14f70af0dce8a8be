//! End-to-end runs of the `coprod` binary: outputs, exit codes and the
//! infer/oracle smoke suite on the shipped fixtures.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn coprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coprod")).args(args).env_remove("COPROD_SEED").output().expect("run coprod")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

/// Runs to exit 0 and returns the first stdout line.
fn value(args: &[&str]) -> String {
    let o = coprod(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o).lines().next().unwrap_or_default().to_string()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = coprod(&all);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    serde_json::from_str(&stdout(&o)).expect("JSON")
}

#[test]
fn infer_reproduces_the_fig4_value() {
    assert_eq!(value(&["infer", "fig4-mc", "fig2-dfa", "mc-dfa", "--mode", "exact"]), "4/25");
    assert_eq!(value(&["infer", "fig4-mc", "fig2-dfa", "--decimal", "4"]), "0.1600");
    let doc = json(&["infer", "fig4-mc", "fig2-dfa", "--vector"]);
    assert_eq!(doc["value"], "4/25");
    assert_eq!(doc["method"], "exact-linear");
    assert_eq!(doc["values"]["x1|y0"], "0");
}

#[test]
fn infer_modes() {
    assert_eq!(value(&["infer", "fig4-mc", "fig2-dfa", "--mode", "iterate:2"]), "0");
    assert_eq!(value(&["infer", "fig4-mc", "fig2-dfa", "--mode", "iterate:4"]), "4/25");
    assert_eq!(value(&["infer", "fig4-mc", "fig2-dfa", "--mode", "epsilon:1/1000"]), "4/25");
    assert_eq!(value(&["infer", "travel-wts", "fig5-nfa", "--mode", "iterate:1"]), "inf");
    assert_eq!(coprod(&["infer", "fig4-mc", "fig2-dfa", "--mode", "bellman"]).status.code(), Some(2));
}

/// Pipeline and oracle agree on every shipped fixture pairing whose
/// semantics is reached at finite depth.
#[test]
fn infer_and_oracle_agree_on_fixtures() {
    let cases: [(&[&str], &[&str]); 6] = [
        (&["fig4-mc", "fig2-dfa"], &["--depth", "4"]),
        (&["fig4-mrm", "fig2-dfa"], &["--depth", "4"]),
        (&["fig4-mc", "fig4-rm", "--bound", "4"], &["--depth", "4"]),
        (&["travel-wts", "fig5-nfa"], &["--depth", "8"]),
        (&["travel-wts", "travel-wmm"], &["--depth", "8"]),
        (&["travel", "fig5-nfa"], &["--depth", "8"]),
    ];
    for (inputs, depth) in cases {
        let infer = value(&[&["infer"], inputs].concat());
        let oracle = value(&[&["oracle"], inputs, depth].concat());
        assert_eq!(infer, oracle, "{inputs:?}");
    }
    // The never-terminating product agrees iterate by iterate.
    for k in ["0", "3", "6"] {
        let infer = value(&["infer", "fig3-reactive", "fig3-dfa", "--mode", &format!("iterate:{k}")]);
        assert_eq!(infer, value(&["oracle", "fig3-reactive", "fig3-dfa", "--depth", k]));
    }
}

#[test]
fn oracle_semantics_and_bottom() {
    let o = coprod(&["oracle", "fig4-mc", "--depth", "3"]);
    let mut lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    lines.sort();
    assert_eq!(lines, ["sand·lake·recharge 4/5", "sand·sand·recharge 4/25", "sand·sand·volcano 1/25"]);
    assert_eq!(value(&["oracle", "fig4-mc", "fig2-dfa", "--depth", "0"]), "0");
    assert_eq!(value(&["oracle", "fig4-mrm", "fig2-dfa", "--depth", "0"]), "(0, 0)");
    assert_eq!(value(&["oracle", "travel-wts", "fig5-nfa", "--depth", "0"]), "inf");
    assert_eq!(stdout(&coprod(&["oracle", "fig4-mc", "--depth", "0"])), "");
}

#[test]
fn conditional_oracle() {
    assert_eq!(value(&["oracle", "fig4-mc", "fig2-dfa", "--condition", "fig2-dfa", "--depth", "4"]), "1");
    let doc = json(&["oracle", "fig4-mc", "fig2-dfa", "--condition", "fig2-dfa", "--depth", "1"]);
    assert_eq!(doc["value"], Value::Null);
}

#[test]
fn product_lists_fig6b_edges() {
    let out = stdout(&coprod(&["product", "fig4-mc", "fig2-dfa", "mc-dfa"]));
    for edge in ["x0|y0 -> x1|y0 @ 4/5", "x1|y0 -> x3|y2 @ 1", "x3|y2 -> #reject @ 1", "x3|y0 -> #accept @ 1"] {
        assert!(out.lines().any(|l| l == edge), "missing {edge} in\n{out}");
    }
    let full = json(&["product", "fig4-mc", "fig2-dfa", "--all-pairs"]);
    // 5 × 4 pairs and the two sinks.
    assert_eq!(full["states"].as_array().unwrap().len(), 22);
}

#[test]
fn compile_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    let o = coprod(&["compile", "fig2-grid", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("14 states"));
    assert_eq!(value(&["validate", path.to_str().unwrap()]), "valid mc with 14 states");
    assert_eq!(value(&["infer", path.to_str().unwrap(), "fig2-dfa"]), value(&["infer", "fig2-grid", "fig2-dfa"]));

    let doc = json(&["compile", "fig3-reactive"]);
    assert_eq!(doc["report"]["kind"], "ntmc");
    // (1, 1) violates the guard, so it is ★ rather than a state.
    let all = json(&["compile", "fig2-grid", "--all-states"]);
    assert_eq!(all["model"]["states"].as_array().unwrap().len(), 14);
    assert_eq!(all["report"]["state_count"], 15);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn usage_and_validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_mc = write(
        dir.path(),
        "bad.json",
        r#"{"kind": "mc", "alphabet": ["a"], "states": ["x"], "initial": "x",
            "label": {"x": "a"}, "trans": {"x": {"*": "1/2"}}}"#,
    );
    let o = coprod(&["validate", &bad_mc]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("is invalid"), "{}", stderr(&o));
    assert_eq!(coprod(&["infer", &bad_mc, "fig2-dfa"]).status.code(), Some(2));

    let bad_program = write(dir.path(), "bad.qtp", "var i in [1, 3];\nlabels a;\ninit i = 1;\nwhile (i < 3 { i <- i + 1; }\n");
    let o = coprod(&["compile", &bad_program]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":4:"), "location missing: {}", stderr(&o));

    for args in [
        &["infer", "missing.json", "fig2-dfa"][..],
        &["infer", "travel-wts", "fig2-dfa"],
        &["infer", "fig4-mc", "fig5-nfa"],
        &["infer", "fig4-mc", "fig2-dfa", "wts-nfa"],
        &["infer", "fig4-mc", "fig4-rm"],
        &["lawcheck", "mc-nfa"],
        &["lawcheck", "all", "--mutate", "nonsense"],
        &["oracle", "fig4-mc"],
    ] {
        assert_eq!(coprod(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn lawcheck_passes_and_reports() {
    let doc = json(&["lawcheck", "all", "--seed", "7", "--instances", "25", "--kmax", "8"]);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["seed"], 7);
    let names: Vec<&str> = doc["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"step-equality/ntmc-dfa"));
    assert!(names.contains(&"diagram/wts-wmm"));
    assert!(!names.contains(&"diagram/ntmc-dfa"));
}

#[test]
fn lawcheck_seed_from_environment_and_parallel_is_identical() {
    let args = ["lawcheck", "mrm-dfa", "--instances", "10", "--check", "step", "--format", "json"];
    let run = |extra: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_coprod")).args(args).args(extra).env("COPROD_SEED", "11").output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        serde_json::from_slice::<Value>(&o.stdout).unwrap()
    };
    let seq = run(&[]);
    assert_eq!(seq["seed"], 11);
    assert_eq!(seq, run(&["--parallel"]));
}

#[test]
fn mutated_law_fails_with_counterexample() {
    let o = coprod(&["lawcheck", "mc-dfa", "--check", "step", "--mutate", "mc-dfa-flip-flag", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["passed"], false);
    let cx = &doc["checks"][0]["counterexample"];
    assert!(cx["state"].is_string() && cx["step"].is_u64(), "{cx}");
}

#[test]
fn ntmc_diagram_is_refused() {
    let o = coprod(&["lawcheck", "ntmc-dfa", "--check", "diagram"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("weaker criterion only"));
}
