#![allow(dead_code)]

pub mod gen;

use std::path::{Path, PathBuf};

use rdbridge_core::pipeline::Dataset;

pub const PREFIX: &str = "http://valuenet/ontop/";

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Loads `tests/fixtures/<db>/` with its `data` directory (or `data_dir`).
pub fn load_fixture_with(db: &str, data_dir: &str) -> Dataset {
    let dir = fixtures_dir().join(db);
    let hints = dir.join("hints.json");
    let hints = hints.exists().then_some(hints);
    Dataset::load(&dir.join("schema.json"), hints.as_deref(), &dir.join(data_dir), PREFIX)
        .unwrap_or_else(|e| panic!("fixture {db}/{data_dir}: {e}"))
}

pub fn load_fixture(db: &str) -> Dataset {
    load_fixture_with(db, "data")
}

pub const FIXTURE_DBS: [&str; 3] = ["flight_2", "world_1", "concert_singer"];

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rdbridge_core::engines::{eval_sparql, eval_sql};
use rdbridge_core::eval::compare_results;
use rdbridge_core::mapping::{derive_ontology, materialize};
use rdbridge_core::pipeline::translate;
use rdbridge_core::sparql::{serialize_sparql, Projected, SparqlQuery};

/// Independent statement of the grouping rule: in every grouped (sub)query
/// each projected variable, and every variable of a projected expression
/// outside aggregates, is a GROUP BY key.
pub fn group_rule_violations(q: &SparqlQuery) -> Vec<String> {
    let mut out = Vec::new();
    q.walk(&mut |sub| {
        if sub.group_by.is_empty() && !sub.has_aggregate() {
            return;
        }
        for p in &sub.projections {
            let mut vars = Vec::new();
            match p {
                Projected::Var(v) => vars.push(v.clone()),
                Projected::Expr(e, _) => e.free_vars(&mut vars),
            }
            for v in vars {
                if !sub.group_by.contains(&v) {
                    out.push(format!("?{v} projected but not grouped"));
                }
            }
        }
    });
    out
}

#[derive(Debug, Default)]
pub struct OracleStats {
    pub total: usize,
    pub rejected: usize,
    pub agreed: usize,
    /// Agreeing cases with at least one row.
    pub non_empty: usize,
    pub disagreements: Vec<String>,
    pub errors: Vec<String>,
    pub group_violations: Vec<String>,
}

/// Generates `schemas` random null-free databases with `per_schema` queries
/// each, translates every query and runs both engines.
pub fn run_oracle_corpus(seed: u64, schemas: usize, per_schema: usize) -> OracleStats {
    let mut stats = OracleStats::default();
    let mut rng = StdRng::seed_from_u64(seed);
    let opts = gen::SchemaOptions {
        max_tables: 4,
        nulls: false,
        varied_keys: false,
    };
    for i in 0..schemas {
        let schema = gen::random_schema(&mut rng, opts);
        let max_rows = if i % 10 == 9 { 200 } else { rng.gen_range(0..=30) };
        let instance = gen::random_instance(&mut rng, &schema, max_rows);
        let ontology = derive_ontology(&schema, PREFIX).unwrap();
        let (graph, _) = materialize(&schema, &instance, &ontology).unwrap();
        for _ in 0..per_schema {
            let sql = gen::QueryGen::new(&mut rng, &schema).query();
            stats.total += 1;
            let t = match translate(&sql, &schema, &ontology) {
                Ok(t) => t,
                Err(e) if e.is_rejection() => {
                    stats.rejected += 1;
                    continue;
                }
                Err(e) => {
                    stats.errors.push(format!("{sql}\n  {e}"));
                    continue;
                }
            };
            for v in group_rule_violations(&t.sparql) {
                stats.group_violations.push(format!("{sql}\n  {v}"));
            }
            let expected = eval_sql(&t.resolved, &instance);
            let actual = eval_sparql(&t.sparql, &graph);
            match (expected, actual) {
                (Ok(a), Ok(b)) if compare_results(&a, &b) => {
                    stats.agreed += 1;
                    if !a.rows.is_empty() {
                        stats.non_empty += 1;
                    }
                }
                (Ok(a), Ok(b)) => stats.disagreements.push(format!(
                    "{sql}\n{}\n--- sql\n{}--- sparql\n{}",
                    serialize_sparql(&t.sparql).unwrap_or_default(),
                    a.to_csv(),
                    b.to_csv()
                )),
                (a, b) => stats.errors.push(format!("{sql}\n  sql: {:?}\n  sparql: {:?}", a.err(), b.err())),
            }
        }
    }
    stats
}
