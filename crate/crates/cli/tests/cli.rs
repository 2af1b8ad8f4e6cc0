use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn qcrystal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcrystal"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn assert_valid(schema: &str, doc: &Value) {
    let text = std::fs::read_to_string(root().join("schemas").join(schema)).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{schema} rejects output: {msgs:?}");
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn exported(dir: &Path, lambda: &str) -> PathBuf {
    let p = dir.join("space.json");
    let o = qcrystal(&["global", "--datum", "data/a2.json", "--lambda", lambda, "--depth", "5", "--export-space", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_valid("global.schema.json", &stdout_json(&o));
    p
}

#[test]
fn crystal_dot_is_a_three_node_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.dot");
    let o = qcrystal(&["crystal", "--datum", "data/sl2.json", "--lambda", "[2]", "--depth", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let dot = std::fs::read_to_string(out).unwrap();
    assert_eq!(dot.matches("->").count(), 2);
    assert!(dot.contains("0 -> 1") && dot.contains("1 -> 2"));
}

#[test]
fn crystal_json_matches_schema() {
    let o = qcrystal(&["crystal", "--datum", "a2", "--binf", "--depth", "3"]);
    assert_eq!(code(&o), 0);
    let doc = stdout_json(&o);
    assert_valid("crystal.schema.json", &doc);
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 1 + 2 + 4 + 6);
}

#[test]
fn dimensions() {
    let o = qcrystal(&["halfalg", "--datum", "sl2", "--depth", "4", "--dims", "--check"]);
    assert_eq!(code(&o), 0);
    let doc = stdout_json(&o);
    assert_valid("dims.schema.json", &doc);
    assert_eq!(doc["dims"].as_object().unwrap().len(), 5);
    let o = qcrystal(&["module", "--datum", "data/a2.json", "--lambda", "[1,1]", "--depth", "5", "--dims", "--check-oint"]);
    assert_eq!(code(&o), 0);
    let doc = stdout_json(&o);
    assert_valid("dims.schema.json", &doc);
    assert_eq!(doc["total"], 8);
}

#[test]
fn export_verify_graph_strings_match_duality() {
    let dir = tempfile::tempdir().unwrap();
    let space = exported(dir.path(), "[1,1]");
    let text = std::fs::read_to_string(&space).unwrap();
    assert_valid("space.schema.json", &serde_json::from_str(&text).unwrap());
    let s = space.to_str().unwrap();

    let o = qcrystal(&["dpb", "verify", s]);
    assert_eq!(code(&o), 0);
    let doc = stdout_json(&o);
    assert_valid("verdict.schema.json", &doc);
    assert_eq!(doc["verdict"], "certified");

    let dot = dir.path().join("g.dot");
    let o = qcrystal(&["dpb", "graph", s, "--out", dot.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(dot).unwrap().matches("->").count(), 8);

    let o = qcrystal(&["strings", "--space", s, "--basis", "global", "--seq", "2,1", "--check", "4"]);
    assert_eq!(code(&o), 0);
    assert_valid("strings.schema.json", &stdout_json(&o));

    let psi = dir.path().join("psi.json");
    let o = qcrystal(&["match", "--space", s, "--basis", "global", "--basis", "global", "--out", psi.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(psi).unwrap()).unwrap();
    assert_valid("matching.schema.json", &doc);
    assert_eq!(doc["psi"], serde_json::json!([0, 1, 2, 3, 4, 5, 6, 7]));

    let o = qcrystal(&["duality", "--space", s, "--roundtrip"]);
    assert_eq!(code(&o), 0);
    assert_valid("report.schema.json", &stdout_json(&o));
    let o = qcrystal(&["duality", "--space", s]);
    assert_eq!(code(&o), 0);
    assert_valid("verdict.schema.json", &stdout_json(&o));
}

#[test]
fn refuted_basis_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    std::fs::write(
        &p,
        r#"{"version":1,"field":"Q","datum":{"A":[[2]]},
            "weights":[{"mu":[1],"dim":1},{"mu":[-1],"dim":2},{"mu":[-3],"dim":1}],
            "f":[{"i":1,"mu":[1],"matrix":[["1"],["0"]]},{"i":1,"mu":[-1],"matrix":[["0","1"]]}],
            "bases":{"mixed":[{"mu":[1],"matrix":[["1"]]},{"mu":[-1],"matrix":[["1","0"],["1","1"]]},{"mu":[-3],"matrix":[["1"]]}]}}"#,
    )
    .unwrap();
    let o = qcrystal(&["dpb", "verify", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    let doc = stdout_json(&o);
    assert_valid("verdict.schema.json", &doc);
    assert_eq!(doc["verdict"], "refuted");
}

#[test]
fn usage_errors_exit_two() {
    let o = qcrystal(&["--json-errors", "module", "--datum", "a2", "--lambda", "[-1,0]", "--depth", "2"]);
    assert_eq!(code(&o), 2);
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_valid("error.schema.json", &err);
    assert_eq!(qcrystal(&["crystal", "--datum", "sl2", "--depth", "2"]).status.code(), Some(2));
    assert_eq!(qcrystal(&["frobnicate"]).status.code(), Some(2));
    let o = qcrystal(&["--json-errors", "frobnicate"]);
    assert_valid("error.schema.json", &serde_json::from_slice(&o.stderr).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    assert_eq!(code(&qcrystal(&["corpus", empty.to_str().unwrap()])), 2);
}

#[test]
fn corpus_is_deterministic_and_catches_faults() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.json");
    std::fs::write(
        &corpus,
        r#"[{"name":"sl2","datum":{"A":[[2]]},"lambda":[2],"depth":4},
            {"name":"a2","datum":{"A":[[2,-1],[-1,2]]},"lambda":[1,0],"depth":4}]"#,
    )
    .unwrap();
    assert_valid("corpus.schema.json", &serde_json::from_str(&std::fs::read_to_string(&corpus).unwrap()).unwrap());
    let c = corpus.to_str().unwrap();
    let a = qcrystal(&["corpus", c, "--seed", "7"]);
    let b = qcrystal(&["corpus", c, "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_valid("corpus_report.schema.json", &stdout_json(&a));
    let m = qcrystal(&["corpus", c, "--mutate"]);
    assert_eq!(code(&m), 1);
    assert_eq!(stdout_json(&m)["passed"], false);
}

#[test]
fn expansion_report_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.json");
    let o = qcrystal(&["global", "--datum", "a2", "--lambda", "[1,1]", "--depth", "5", "--expansion-report", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_valid("expansion.schema.json", &doc);
}

#[test]
fn thread_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qcrystal"))
        .args(["halfalg", "--datum", "a2", "--depth", "3"])
        .env("QCRYSTAL_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_qcrystal"))
        .args(["halfalg", "--datum", "a2", "--depth", "3"])
        .env("QCRYSTAL_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
