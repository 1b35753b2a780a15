use std::fs;

use tempfile::TempDir;

use super::*;
use crate::fixtures::{bow, front_door};

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn call(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("idlearn").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn put(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn identify_example_and_hedge() {
    let dir = TempDir::new().unwrap();
    let g = put(&dir, "g.json", &front_door().to_json());
    let q = put(&dir, "q.json", r#"{"intervene":[{"var":"X","value":1}]}"#);
    let r = call(&["identify", "--graph", &g, "--query", &q]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["formula"], "P[z1|x]P[y|x,z1,z2] · (Σ_x' P[x']P[z2|x',z1])");
    assert_eq!(v["trace"][0]["step"], "step4");

    let b = put(&dir, "b.json", &bow().to_json());
    let r = call(&["identify", "--graph", &b, "--query", &q]);
    assert_eq!(r.code, EXIT_NOT_IDENTIFIABLE);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["trace"][0]["step"], "step5a");
    let e: Value = serde_json::from_str(r.err.trim()).unwrap();
    assert_eq!(e["error"]["kind"], "not_identifiable");
}

#[test]
fn input_errors_exit_4() {
    let r = call(&["identify", "--graph", "/nonexistent/g.json", "--query", "/nonexistent/q.json"]);
    assert_eq!(r.code, EXIT_INPUT);
    let e: Value = serde_json::from_str(r.err.trim()).unwrap();
    assert_eq!(e["error"]["kind"], "input");
    assert_eq!(call(&["simulate", "--net", "x.json", "--m", "3"]).code, EXIT_INPUT);
    assert_eq!(call(&["frobnicate"]).code, EXIT_INPUT);
}

#[test]
fn help_documents_schemas() {
    let r = call(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    for needle in ["GRAPH (ADMG JSON)", "QUERY JSON", "NET (causal Bayes net JSON)", "MODEL", "Exit codes"] {
        assert!(r.out.contains(needle), "missing {needle}");
    }
    assert!(call(&["learn", "--help"]).out.contains("SAMPLES CSV"));
}

#[test]
fn learn_eval_sample_verify_pipeline() {
    let dir = TempDir::new().unwrap();
    let g = front_door();
    let net = random_net(&g, &CptShape::default(), &mut seeded(3));
    let net_path = put(&dir, "net.json", &net.to_json());
    let g_path = put(&dir, "g.json", &g.to_json());
    let q = put(&dir, "q.json", r#"{"intervene":[{"var":"X","value":0}]}"#);
    let csv = dir.path().join("s.csv");
    let r = call(&["simulate", "--net", &net_path, "--seed", "4", "--m", "50000", "--out", csv.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);

    let model = dir.path().join("li.json");
    let r = call(&[
        "--threads", "2", "learn", "--graph", &g_path, "--samples", csv.to_str().unwrap(), "--query", &q, "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let model = model.to_str().unwrap();

    // learning straight from the net with the same seed gives the same model
    let again = call(&["learn", "--net", &net_path, "--seed", "4", "--m", "50000", "--query", &q]);
    assert_eq!(again.code, EXIT_OK, "{}", again.err);
    let a = LearnedInterventional::from_json(&again.out).unwrap();
    let b = LearnedInterventional::from_json(&fs::read_to_string(model).unwrap()).unwrap();
    assert_eq!(a.factors(), b.factors());

    let r = call(&["eval", "--model", model, "--point", r#"{"Z1":0,"Z2":1,"Y":1}"#]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let p: Value = serde_json::from_str(&r.out).unwrap();
    assert!(p["probability"].as_f64().unwrap() > 0.0);
    assert_eq!(call(&["eval", "--model", model, "--point", r#"{"Z1":0}"#]).code, EXIT_INPUT);

    let r = call(&["sample", "--model", model, "--seed", "1", "--m", "5", "--targets", "Y,Z1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(r.out.lines().next().unwrap(), "Z1,Y");
    assert_eq!(r.out.lines().count(), 6);
    assert_eq!(r.out, call(&["sample", "--model", model, "--seed", "1", "--m", "5", "--targets", "Y,Z1"]).out);

    let r = call(&["verify", "--model", model, "--net", &net_path, "--query", &q, "--seed", "2", "--tv-epsilon", "0.05"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert!(v["tv"].as_f64().unwrap() < 0.05);
    assert!(v["sampled_tv"]["estimate"].as_f64().unwrap() < 0.25);

    let r = call(&["oracle", "--net", &net_path, "--query", &q]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["table"].as_array().unwrap().len(), 8);
}

#[test]
fn positivity_violation_exits_3() {
    let dir = TempDir::new().unwrap();
    let g = put(&dir, "g.json", &front_door().to_json());
    let s = put(&dir, "s.csv", "X,Z1,Z2,Y\n1,0,0,0\n1,1,1,1\n");
    let q = put(&dir, "q.json", r#"{"intervene":[{"var":"X","value":0}]}"#);
    let r = call(&["learn", "--graph", &g, "--samples", &s, "--query", &q]);
    assert_eq!(r.code, EXIT_POSITIVITY, "{}", r.err);
}

#[test]
fn demo_runs() {
    let r = call(&["demo", "example1", "--seed", "1", "--m", "20000"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["formula"], "P[z1|x]P[y|x,z1,z2] · (Σ_x' P[x']P[z2|x',z1])");
    assert!(v["estimand_vs_oracle_max_error"].as_f64().unwrap() < 1e-9);
    let r = call(&["demo", "example2", "--seed", "1", "--m", "20000"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(call(&["demo", "example3", "--seed", "1"]).code, EXIT_INPUT);
}
