//! End-to-end checks of the command-line surface, exit codes included.

use std::path::PathBuf;
use std::process::{Command, Output};

use crispc::fixtures;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crispc"))
}

fn write_temp(dir: &std::path::Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> TempDir {
        let path = std::env::temp_dir().join(format!("crispc-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&path).unwrap();
        TempDir(path)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

#[test]
fn crispify_example1_to_stdout() {
    let dir = TempDir::new("crispify");
    let input = write_temp(&dir.0, "ex1.fz", fixtures::EXAMPLE1);
    let out = bin()
        .args(["crispify", "-i"])
        .arg(&input)
        .args(["-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("chain 2 goedel\n"));
    assert!(text.contains("assert Overused_geq_4(cpuA) >= 1"));
    assert!(text.contains("gci and(and(Server,some(hasPart,and(Overused_geq_5,CPU))),some(hasPart,and(Overused_geq_5,Memory))) ServerWithLimitedResources_geq_4 >= 1"));
}

#[test]
fn crispify_zadeh_is_a_semantic_rejection() {
    let dir = TempDir::new("zadeh");
    let input = write_temp(
        &dir.0,
        "z.fz",
        "chain 6 zadeh\nconcept A\nindividual a\nassert A(a) >= 0.8\n",
    );
    let out = bin()
        .args(["crispify", "-i"])
        .arg(&input)
        .args(["-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("Zadeh"), "{}", stderr(&out));
}

#[test]
fn crispify_no_normalize_guards_two_valued_input() {
    let dir = TempDir::new("guard");
    let input = write_temp(
        &dir.0,
        "c.fz",
        "chain 2 goedel\nconcept A\nindividual a\nassert A(a) >= 1\n",
    );
    let out = bin()
        .args(["crispify", "--no-normalize", "-i"])
        .arg(&input)
        .args(["-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("two-valued"), "{}", stderr(&out));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let dir = TempDir::new("parse");
    let input = write_temp(
        &dir.0,
        "bad.fz",
        "chain 6 lukasiewicz\nconcept A\nindividual a\nassert A(a) >= 0.3\n",
    );
    let out = bin()
        .args(["normalize", "-i"])
        .arg(&input)
        .args(["-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("4:"), "{}", stderr(&out));
    assert!(stderr(&out).contains("not on chain of 6"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_1() {
    let out = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn normalize_is_idempotent_byte_for_byte() {
    let dir = TempDir::new("norm");
    let input = write_temp(&dir.0, "ex1.fz", fixtures::EXAMPLE1);
    let once_path = dir.0.join("once.fz");
    let out = bin()
        .args(["normalize", "--no-skip-small", "-i"])
        .arg(&input)
        .arg("-o")
        .arg(&once_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = bin()
        .args(["normalize", "--no-skip-small", "-i"])
        .arg(&once_path)
        .args(["-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), std::fs::read_to_string(&once_path).unwrap());
}

#[test]
fn translate_query_goldens() {
    let dir = TempDir::new("tq");
    let onto = write_temp(&dir.0, "ex1.fz", fixtures::EXAMPLE1);
    let q = write_temp(&dir.0, "q.tq", fixtures::QUERY_THRESHOLD);
    let out = bin()
        .args(["translate-query", "-i"])
        .arg(&q)
        .arg("--ontology")
        .arg(&onto)
        .args(["-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "ucq 2\nServerWithLimitedResources_geq_4(?x1)\nisConnectedTo_geq_3(?x1,?x2)\nServerWithAvailableResources_geq_3(?x2)\n"
    );

    let q = write_temp(&dir.0, "qf.tq", fixtures::QUERY_FUZZY);
    let out = bin()
        .args(["translate-query", "-i"])
        .arg(&q)
        .arg("--ontology")
        .arg(&onto)
        .args(["--degree", "0.8", "-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).matches("union").count(), 2);

    // Missing --degree on a fuzzy query is a usage error.
    let out = bin()
        .args(["translate-query", "-i"])
        .arg(&q)
        .arg("--ontology")
        .arg(&onto)
        .args(["-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_reports_model_and_answers() {
    let dir = TempDir::new("eval");
    let onto = write_temp(&dir.0, "ex1.fz", fixtures::EXAMPLE1);
    let fixture = write_temp(&dir.0, "ex1.interp", fixtures::EXAMPLE1_INTERP);
    let q = write_temp(&dir.0, "q.tq", fixtures::QUERY_PARTS_FUZZY);
    let out = bin()
        .arg("eval")
        .arg("--ontology")
        .arg(&onto)
        .arg("--interp")
        .arg(&fixture)
        .arg("--query")
        .arg(&q)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("model: yes\n"), "{text}");
    assert!(text.contains("answer (serverA,cpuA) degree 0.8"), "{text}");
    assert!(text.contains("answer (serverA,memA) degree 1"), "{text}");
}

#[test]
fn search_model_verdicts_and_exit_codes() {
    let dir = TempDir::new("search");
    let onto = write_temp(&dir.0, "ex3.fz", fixtures::EXAMPLE3);
    let out = bin()
        .arg("search-model")
        .arg("--ontology")
        .arg(&onto)
        .args(["--max-domain", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("found domain=3\n"), "{}", stdout(&out));

    // The legacy encoding of the same ontology has no model at domain 3.
    let legacy_path = dir.0.join("legacy.fz");
    let out = bin()
        .args(["crispify", "--legacy-qnr", "--emit-fuzzy", "-i"])
        .arg(&onto)
        .arg("-o")
        .arg(&legacy_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = bin()
        .arg("search-model")
        .arg("--ontology")
        .arg(&legacy_path)
        .args(["--max-domain", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(
        stdout(&out).starts_with("exhausted max-domain=3"),
        "{}",
        stdout(&out)
    );

    // A starved budget is the inconclusive exit code; CRISPC_BUDGET is the
    // environment override.
    let out = bin()
        .arg("search-model")
        .arg("--ontology")
        .arg(&onto)
        .args(["--max-domain", "3"])
        .env("CRISPC_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("budget-exceeded"), "{}", stdout(&out));
}

#[test]
fn gen_stats_pipeline_produces_csv() {
    let dir = TempDir::new("gen");
    let onto_path = dir.0.join("bench.fz");
    let out = bin()
        .args([
            "gen", "--units", "1", "--chain", "3", "--crisp", "20", "--seed", "7",
        ])
        .arg("-o")
        .arg(&onto_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = bin()
        .args(["stats", "--crispify", "-i"])
        .arg(&onto_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "chain,normalized,crisp_pct,tbox_occurrences,abox_occurrences,gen_seed"
    );
    assert_eq!(text.lines().count(), 3, "{text}");

    // Determinism: regenerating with the same seed gives identical output.
    let out2 = bin()
        .args([
            "gen", "--units", "1", "--chain", "3", "--crisp", "20", "--seed", "7", "-o", "-",
        ])
        .output()
        .unwrap();
    let regenerated = stdout(&out2);
    assert_eq!(regenerated, std::fs::read_to_string(&onto_path).unwrap());
}

#[test]
fn gen_nested_and_provenance() {
    let dir = TempDir::new("nested");
    let out = bin()
        .args(["gen-nested", "--depth", "3", "--chain", "4", "-o", "-"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("gci Root"), "{}", stdout(&out));

    let input = write_temp(&dir.0, "ex1.fz", fixtures::EXAMPLE1);
    let prov_path = dir.0.join("prov.tsv");
    let out = bin()
        .args(["crispify", "-i"])
        .arg(&input)
        .args(["-o", "-"])
        .arg("--provenance")
        .arg(&prov_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let prov = std::fs::read_to_string(&prov_path).unwrap();
    assert!(prov.starts_with("0\tabox[0]"), "{prov}");
    assert!(prov.contains("link:Overused:1"), "{prov}");
}
