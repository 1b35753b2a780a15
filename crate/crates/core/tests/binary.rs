use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use idlearn::fixtures::{bow, front_door};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idlearn")).args(args).output().unwrap()
}

fn put(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

#[test]
fn front_door_demo_at_a_million_samples() {
    let o = run(&["demo", "example1", "--seed", "11", "--m", "1000000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!(v["estimand_vs_oracle_max_error"].as_f64().unwrap() < 1e-9);
    let tv = v["learned"]["report"]["tv"].as_f64().unwrap();
    assert!(tv <= 0.05, "tv {tv}");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let q = put(&dir, "q.json", r#"{"intervene":[{"var":"X","value":0}]}"#);

    let g = put(&dir, "bow.json", &bow().to_json());
    let o = run(&["identify", "--graph", &g, "--query", &q]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout_json(&o)["identifiable"], false);

    let g = put(&dir, "front_door.json", &front_door().to_json());
    let s = put(&dir, "s.csv", "X,Z1,Z2,Y\n1,0,1,0\n1,1,0,1\n");
    let o = run(&["learn", "--graph", &g, "--samples", &s, "--query", &q]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"]["exit_code"], 3);

    let o = run(&["identify", "--graph", "/nonexistent/graph.json", "--query", &q]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"]["exit_code"], 4);

    let o = run(&["identify", "--graph", &g, "--query", &q]);
    assert_eq!(o.status.code(), Some(0));
    assert!(Path::new(&g).exists());
}

#[test]
fn thread_flag_gives_identical_output() {
    let one = run(&["--threads", "1", "demo", "example2", "--seed", "3", "--m", "10000"]);
    let two = run(&["--threads", "2", "demo", "example2", "--seed", "3", "--m", "10000"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
}
