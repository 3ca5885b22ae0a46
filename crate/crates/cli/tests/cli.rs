//! End-to-end runs of the `reconf` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reconf_core::zoo;
use serde_json::Value;

fn reconf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reconf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn circuit_file(dir: &Path, name: &str, c: &reconf_core::BoolCircuit) -> String {
    write(dir, name, &serde_json::to_string(c).unwrap()).to_str().unwrap().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Every key the schema requires is present in `v`.
fn conforms(name: &str, v: &Value) {
    let s = reconf(&["schema", name]);
    assert!(s.status.success());
    let schema = json(&s);
    for key in schema["required"].as_array().unwrap() {
        assert!(v.get(key.as_str().unwrap()).is_some(), "{name}: missing {key}");
    }
}

#[test]
fn example_formula_value() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "ex1.cnf", zoo::EXAMPLE_DIMACS);
    let o = reconf(&["solve-csp", "--dimacs", cnf.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2/3");
    let o = reconf(&["solve-csp", "--dimacs", cnf.to_str().unwrap(), "--goal", "010", "--witness", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["value"], "1");
    conforms("solve-csp", &v);
}

#[test]
fn identity_circuit_is_no() {
    let dir = tempfile::tempdir().unwrap();
    let c = circuit_file(dir.path(), "identity2.json", &zoo::identity_circuit(2));
    let o = reconf(&["succinct", "decide", "--circuit", &c]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "NO");
    let c = circuit_file(dir.path(), "inc.json", &zoo::increment_circuit(2));
    let o = reconf(&["succinct", "decide", "--circuit", &c, "--path", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["steps"], 3);
    conforms("succinct-decide", &v);
}

#[test]
fn machine_circuit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let tm = write(dir.path(), "counter.json", &serde_json::to_string(&zoo::counter_tm()).unwrap());
    let o = reconf(&["succinct", "from-tm", "--tm", tm.to_str().unwrap(), "--input", "01", "--space", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let circuit = write(dir.path(), "c.json", &stdout(&o));
    conforms("succinct-from-tm", &json(&o));
    let o = reconf(&["succinct", "decide", "--circuit", circuit.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "YES");
}

#[test]
fn yes_instance_audit_reports_no_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let c = circuit_file(dir.path(), "inc.json", &zoo::increment_circuit(2));
    let o = reconf(&["pcrp", "complete-seq", "--circuit", &c, "--format", "json"]);
    assert!(o.status.success());
    conforms("pcrp-complete-seq", &json(&o));
    let seq = write(dir.path(), "seq.json", &stdout(&o));
    let o = reconf(&["pcrp", "audit", "--circuit", &c, "--sequence", seq.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("no rejection below bound"));
}

#[test]
fn no_instance_audit_finds_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let c = circuit_file(dir.path(), "id.json", &zoo::identity_circuit(2));
    for family in ["bitwise", "random-walk", "blank-heavy"] {
        let o = reconf(&["pcrp", "audit", "--circuit", &c, "--pcpp", "sampled:1", "--family", family, "--format", "json"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v = json(&o);
        conforms("pcrp-audit", &v);
        assert!(v["witness"].is_object());
    }
}

#[test]
fn pcrp_build_and_acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let c = circuit_file(dir.path(), "toggle.json", &zoo::toggle_circuit(2));
    let o = reconf(&["pcrp", "build", "--circuit", &c, "--format", "json"]);
    let v = json(&o);
    conforms("pcrp-build", &v);
    let proof = write(dir.path(), "start.json", &v["start"].to_string());
    let o = reconf(&["pcrp", "accept-prob", "--circuit", &c, "--proof", proof.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "1");
    let blank = "B".repeat(v["ell"].as_u64().unwrap() as usize * 2 + v["p"].as_u64().unwrap() as usize);
    let o = reconf(&["pcrp", "accept-prob", "--circuit", &c, "--word", &blank, "--format", "json"]);
    assert_eq!(json(&o)["acceptance"], "0");
}

#[test]
fn pcrp_to_csp_and_pcpp() {
    let dir = tempfile::tempdir().unwrap();
    let c = circuit_file(dir.path(), "id1.json", &zoo::identity_circuit(1));
    let o = reconf(&["pcrp", "to-csp", "--circuit", &c, "--reps", "1", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    conforms("pcrp-to-csp", &v);
    assert_eq!(v["csp"]["alphabet_size"], 3);
    let o = reconf(&["pcpp", "--circuit", &c, "--pair", "0:0", "--format", "json"]);
    let v = json(&o);
    conforms("pcpp", &v);
    assert_eq!(v["acceptance"], "1");
}

#[test]
fn codes_commands() {
    let o = reconf(&["codes", "encode", "--n", "3", "--msg", "101"]);
    assert_eq!(stdout(&o).trim(), "01011010");
    let o = reconf(&["codes", "kappa", "--n", "2", "--bot-free", "--format", "json"]);
    conforms("codes-kappa", &json(&o));
    let o = reconf(&["codes", "encode", "--n", "3", "--msg", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn amplify_commands() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"n": 5, "edges": [[0,1],[0,2],[1,2],[1,3],[2,3],[3,4]]}"#);
    let o = reconf(&[
        "amplify", "build", "--graph", g.to_str().unwrap(), "--ell", "2", "--start", "0,1,2", "--goal", "1,2,3",
        "--format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    conforms("amplify-build", &v);
    assert_eq!(v["N"], 20);
    assert_eq!(v["nu"], "7/5");
    assert!(v["lemma_checks"]["completeness"].is_object());
    let o = reconf(&["amplify", "check-bounds", "--n", "8", "--expander", "random:3:1", "--ell", "3", "--format", "json"]);
    assert!(o.status.success());
    conforms("amplify-check-bounds", &json(&o));
}

#[test]
fn clique_command() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"n": 4, "edges": [[0,1],[1,2],[2,3]]}"#);
    let o = reconf(&["solve-clique", "--graph", g.to_str().unwrap(), "--start", "0,1", "--goal", "2,3"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn exit_codes_and_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"n": 2, "gates": [], "outputs": [0, 0]}"#);
    let o = reconf(&["succinct", "decide", "--circuit", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["exit_code"], 2);
    let cnf = write(dir.path(), "ex1.cnf", zoo::EXAMPLE_DIMACS);
    let o = reconf(&["solve-csp", "--dimacs", cnf.to_str().unwrap(), "--state-cap", "4"]);
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "capacity");
    let o = reconf(&["solve-csp", "--dimacs", "/nonexistent/file.cnf"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let c = circuit_file(dir.path(), "t.json", &zoo::toggle_circuit(2));
    let run = |seed: &str| {
        reconf(&["pcrp", "audit", "--circuit", &c, "--family", "random-walk", "--seed", seed, "--format", "json", "--threads", "2"])
            .stdout
    };
    assert_eq!(run("7"), run("7"));
}

#[test]
fn help_and_version() {
    for args in [
        &["--help"][..],
        &["solve-csp", "--help"],
        &["solve-clique", "--help"],
        &["succinct", "decide", "--help"],
        &["succinct", "from-tm", "--help"],
        &["codes", "kappa", "--help"],
        &["pcpp", "--help"],
        &["pcrp", "audit", "--help"],
        &["pcrp", "to-csp", "--help"],
        &["amplify", "build", "--help"],
        &["amplify", "check-bounds", "--help"],
        &["schema", "--help"],
    ] {
        assert!(reconf(args).status.success(), "{args:?}");
    }
    let o = reconf(&["--version"]);
    assert!(stdout(&o).contains(env!("CARGO_PKG_VERSION")));
    let o = reconf(&["schema", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
