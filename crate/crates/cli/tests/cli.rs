use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn core_tests() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests")
}

fn fixture(db: &str) -> PathBuf {
    core_tests().join("fixtures").join(db)
}

fn golden(db: &str) -> PathBuf {
    core_tests().join("golden").join(db)
}

fn rdbridge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdbridge"))
        .args(args)
        .env_remove("RDBRIDGE_PREFIX")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn transpile_intersect_writes_membership_filter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.sparql");
    let sql = golden("flight_2").join("city_intersect.sql");
    let o = rdbridge(&["transpile", "--schema", s(&fixture("flight_2")), "--sql", s(&sql), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sparql = std::fs::read_to_string(&out).unwrap();
    assert!(sparql.contains("FILTER(?t1_city IN (?t2_city))"), "{sparql}");
}

#[test]
fn transpile_can_emit_semql_and_prefixed_names() {
    let dir = tempfile::tempdir().unwrap();
    let semql = dir.path().join("q.semql");
    let sql = golden("flight_2").join("city_intersect.sql");
    let o = rdbridge(&[
        "transpile",
        "--schema",
        s(&fixture("flight_2")),
        "--sql",
        s(&sql),
        "--semql",
        s(&semql),
        "--emit-prefixed-iris",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("PREFIX : <http://valuenet/ontop/>"));
    assert!(std::fs::read_to_string(&semql).unwrap().contains("intersect"));
}

#[test]
fn eval_over_golden_suite_is_exact() {
    for db in ["flight_2", "world_1", "concert_singer"] {
        let dir = tempfile::tempdir().unwrap();
        let report = dir.path().join("report.json");
        let o = rdbridge(&[
            "eval",
            "--schema",
            s(&fixture(db)),
            "--corpus",
            s(&golden(db)),
            "--out",
            s(&report),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(json["accuracy"], 1.0, "{db}: {json}");
        assert!(stdout(&o).contains("accuracy"));
    }
}

#[test]
fn window_function_is_rejected_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let sql = dir.path().join("w.sql");
    std::fs::write(&sql, "SELECT rank() OVER (ORDER BY city) FROM airports").unwrap();
    let o = rdbridge(&["transpile", "--schema", s(&fixture("flight_2")), "--sql", s(&sql)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("UnsupportedConstruct"), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.sql");
    let o = rdbridge(&["transpile", "--schema", s(&fixture("flight_2")), "--sql", s(&missing)]);
    assert_eq!(o.status.code(), Some(1));

    let o = rdbridge(&["map", "--schema", s(&dir.path().join("nowhere.json"))]);
    assert_eq!(o.status.code(), Some(1));

    let sql = dir.path().join("u.sql");
    std::fs::write(&sql, "SELECT nope FROM airports").unwrap();
    let o = rdbridge(&["transpile", "--schema", s(&fixture("flight_2")), "--sql", s(&sql)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnknownIdentifier"));

    let o = rdbridge(&["prompt", "--schema", s(&fixture("flight_2")), "--prefix", "not an iri"]);
    assert_eq!(o.status.code(), Some(1));

    let o = rdbridge(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn prefix_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_rdbridge"))
        .args(["prompt", "--schema", s(&fixture("flight_2"))])
        .env("RDBRIDGE_PREFIX", "http://example.org/db#")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("PREFIX : <http://example.org/db#>"));
}

#[test]
fn run_agrees_across_engines() {
    let sql = golden("flight_2").join("airline_route_details.sql");
    let by = |engine| {
        let o = rdbridge(&[
            "run",
            "--schema",
            s(&fixture("flight_2")),
            "--sql",
            s(&sql),
            "--engine",
            engine,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut lines: Vec<String> = stdout(&o).lines().skip(1).map(String::from).collect();
        lines.sort();
        lines
    };
    let sql_rows = by("sql");
    assert!(!sql_rows.is_empty());
    assert_eq!(sql_rows, by("sparql"));
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

#[test]
fn outputs_are_byte_deterministic() {
    let schema = fixture("world_1");
    let corpus = golden("world_1");
    let runs: Vec<Vec<Vec<u8>>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let p = |name: &str| dir.path().join(name);
            let cmds: [Vec<&str>; 4] = [
                vec!["map", "--schema", s(&schema), "--out"],
                vec!["materialize", "--schema", s(&schema), "--out"],
                vec!["eval", "--schema", s(&schema), "--corpus", s(&corpus), "--out"],
                vec!["analyze", "--schema", s(&schema), "--corpus", s(&corpus), "--out"],
            ];
            cmds.iter()
                .enumerate()
                .map(|(i, args)| {
                    let out = p(&format!("out{i}"));
                    let mut args = args.clone();
                    args.push(s(&out));
                    let o = rdbridge(&args);
                    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
                    digest(&out)
                })
                .collect()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn materialize_reports_triples() {
    let dir = tempfile::tempdir().unwrap();
    let nt = dir.path().join("g.nt");
    let report = dir.path().join("r.json");
    let o = rdbridge(&[
        "materialize",
        "--schema",
        s(&fixture("flight_2")),
        "--data",
        s(&fixture("flight_2").join("data_small")),
        "--out",
        s(&nt),
        "--report",
        s(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&nt).unwrap().lines().count(), 23);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["triples"], 23);
}
