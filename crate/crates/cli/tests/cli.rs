//! End-to-end tests of the `ppwave` binary: JSON contracts, exit codes and
//! byte-level output determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ppwave"))
}

fn tmp_file(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ppwave-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn metric_json(n: usize, h: &str) -> String {
    let p = ppwave::Poly::parse(h, n + 2).unwrap();
    serde_json::to_string(&ppwave::metric::MetricDoc {
        n,
        h: p.to_doc(),
    })
    .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn analyze_reports_two_symmetric() {
    let m = tmp_file("two_sym.json", &metric_json(1, "u * x1^2"));
    let out = bin().arg("analyze").arg(&m).output().unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["order"], "two_symmetric");
    assert_eq!(v["witness"], "nabla_r");
    assert_eq!(v["screen_span"]["dimension"], 1);
}

#[test]
fn output_is_byte_deterministic() {
    let m = tmp_file("det.json", &metric_json(2, "u * x1^2 + 3 * x1 x2 + u^7"));
    let a = bin().arg("analyze").arg(&m).output().unwrap();
    let b = bin().arg("analyze").arg(&m).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = bin().args(["verify", "--bianchi"]).env("PPWAVE_VERIFY_BUDGET", "4").output().unwrap();
    let d = bin().args(["verify", "--bianchi"]).env("PPWAVE_VERIFY_BUDGET", "4").output().unwrap();
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn curvature_tensor_dump() {
    let m = tmp_file("curv.json", &metric_json(1, "x1^2"));
    let out = bin().args(["curvature"]).arg(&m).output().unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["rank"], 4);
    assert_eq!(v["components"].as_array().unwrap().len(), 4);
    // ricci of a vacuum wave is empty
    let m2 = tmp_file("vac.json", &metric_json(2, "x1^2 - x2^2"));
    let out2 = bin().args(["curvature", "--tensor", "ricci"]).arg(&m2).output().unwrap();
    let v2 = stdout_json(&out2);
    assert_eq!(v2["components"].as_array().unwrap().len(), 0);
    // weyl refuses n = 1 with a domain error
    let out3 = bin().args(["curvature", "--tensor", "weyl"]).arg(&m).output().unwrap();
    assert_eq!(out3.status.code(), Some(1));
    assert_eq!(stdout_json(&out3)["error"]["kind"], "dimension_too_small_for_weyl");
}

#[test]
fn transform_applies_exact_document() {
    let m = tmp_file("tr_m.json", &metric_json(1, "x1^2"));
    let t = tmp_file(
        "tr_t.json",
        r#"{
            "a": [["1"]],
            "b": [{"num_vars": 3, "terms": [{"coef": "1", "exps": [0, 0, 1]}]}],
            "c": "0",
            "d": {"num_vars": 3, "terms": []},
            "exact": true
        }"#,
    );
    let out = bin().arg("transform").arg(&m).arg(&t).output().unwrap();
    assert!(out.status.success());
    let doc: ppwave::metric::MetricDoc = serde_json::from_slice(&out.stdout).unwrap();
    let got = ppwave::ExactMetric::from_doc(&doc).unwrap();
    let expected = ppwave::ExactMetric::new(
        1,
        ppwave::Poly::parse("x1^2 + 2 * u x1 + u^2 + 1", 3).unwrap(),
    )
    .unwrap();
    assert_eq!(got, expected);
}

#[test]
fn canonicalize_then_equiv_round_trip() {
    let dir = std::env::temp_dir().join(format!("ppwave-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let m = tmp_file("canon_m.json", &metric_json(2, "2 * u x1 x2"));
    let c_path = dir.join("canon_out.json");
    let out = bin()
        .arg("canonicalize")
        .arg(&m)
        .arg("-o")
        .arg(&c_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&c_path).unwrap()).unwrap();
    let lambdas = v["lambdas"].as_array().unwrap();
    assert!((lambdas[0].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!((lambdas[1].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out2 = bin().arg("equiv").arg(&c_path).arg(&c_path).output().unwrap();
    assert!(out2.status.success());
    let verdict = stdout_json(&out2);
    assert_eq!(verdict["equivalent"], true);
    assert_eq!(verdict["c"], 0.0);
    assert_eq!(verdict["a"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
}

#[test]
fn domain_errors_exit_one_with_machine_readable_json() {
    // flat metric is not two-symmetric
    let m = tmp_file("flat.json", &metric_json(1, "x1"));
    let out = bin().arg("canonicalize").arg(&m).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "not_two_symmetric");

    // v-dependent potential fails validation
    let bad = tmp_file("bad_v.json", &metric_json_raw());
    let out2 = bin().arg("analyze").arg(&bad).output().unwrap();
    assert_eq!(out2.status.code(), Some(1));
    assert_eq!(stdout_json(&out2)["error"]["kind"], "potential_depends_on_v");
}

fn metric_json_raw() -> String {
    r#"{"n": 1, "H": {"num_vars": 3, "terms": [{"coef": "1", "exps": [1, 1, 0]}]}}"#.to_string()
}

#[test]
fn exact_commands_refuse_floating_input() {
    let m = tmp_file(
        "float.json",
        r#"{"n": 1, "H": {"num_vars": 3, "terms": [{"coef": 0.5, "exps": [0, 2, 0]}]}}"#,
    );
    let out = bin().arg("analyze").arg(&m).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "exactness_required");
    // but canonicalize falls back to the numeric path
    let out2 = bin().arg("canonicalize").arg(&m).output().unwrap();
    assert_eq!(out2.status.code(), Some(1)); // x1^2/2 alone is symmetric, not two-symmetric
    assert_eq!(stdout_json(&out2)["error"]["kind"], "not_two_symmetric");
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().arg("definitely-not-a-command").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out2 = bin().output().unwrap();
    assert_eq!(out2.status.code(), Some(2));
}

#[test]
fn verify_reports_suites() {
    let out = bin()
        .args(["verify", "--bianchi", "--lemma2", "--n", "2"])
        .env("PPWAVE_VERIFY_BUDGET", "4")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["first_bianchi"], "pass");
    assert_eq!(v["second_bianchi"], "pass");
    assert_eq!(v["lemma2"], "pass");
    assert_eq!(v["lemma2_dimension"], 1);
    // empty selection is a trivial pass
    let out2 = bin().arg("verify").output().unwrap();
    assert!(out2.status.success());
    assert_eq!(stdout_json(&out2), serde_json::json!({}));
}

#[test]
fn spaces_dimensions() {
    let out = bin()
        .args(["spaces", "--n", "2", "--g-type", "II", "--dims-only"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["r"]["dim"], 6);
    assert_eq!(v["p"]["dim"], 2);
    assert_eq!(v["nabla_r"]["dim"], 15);
    assert_eq!(v["nabla_r_annihilator"]["dim"], 1);
    let out2 = bin()
        .args(["spaces", "--n", "2", "--g-type", "ppwave", "--dims-only"])
        .output()
        .unwrap();
    let v2 = stdout_json(&out2);
    assert_eq!(v2["r"]["dim"], 3);
    assert_eq!(v2["nabla_r"]["dim"], 7);
}
