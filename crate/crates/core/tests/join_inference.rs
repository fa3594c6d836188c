mod common;

use common::load_fixture;
use rdbridge_core::engines::{eval_sparql, eval_sql};
use rdbridge_core::eval::compare_results;
use rdbridge_core::pipeline::PipelineError;
use rdbridge_core::sql::{to_sql, SqlError};

#[test]
fn sole_foreign_key_becomes_the_join_condition() {
    let d = load_fixture("world_1");
    let t = d
        .translate("SELECT T1.Name FROM city AS T1 JOIN country AS T2 WHERE T2.Continent = 'Europe'")
        .unwrap();
    let printed = to_sql(&t.resolved);
    assert!(printed.contains("ON t1.countrycode = t2.code"), "{printed}");
    let sql = eval_sql(&t.resolved, &d.instance).unwrap();
    let sparql = eval_sparql(&t.sparql, &d.graph).unwrap();
    assert!(!sql.rows.is_empty());
    assert!(compare_results(&sql, &sparql));
}

#[test]
fn inference_walks_through_a_bridge_table() {
    let d = load_fixture("concert_singer");
    let t = d
        .translate("SELECT count(*) FROM singer AS S JOIN singer_in_concert AS X JOIN concert AS C")
        .unwrap();
    let explicit = d
        .translate(
            "SELECT count(*) FROM singer AS S JOIN singer_in_concert AS X ON X.Singer_ID = S.Singer_ID \
             JOIN concert AS C ON X.concert_ID = C.concert_ID",
        )
        .unwrap();
    let a = eval_sql(&t.resolved, &d.instance).unwrap();
    let b = eval_sql(&explicit.resolved, &d.instance).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(t.sparql, explicit.sparql);
}

#[test]
fn two_candidate_keys_are_refused() {
    let d = load_fixture("flight_2");
    let err = d.translate("SELECT City FROM airports JOIN flights").unwrap_err();
    assert!(matches!(err, PipelineError::Sql(SqlError::Unsupported(_))), "{err}");
    assert!(err.is_rejection());
}

#[test]
fn a_where_equality_already_links_the_tables() {
    let d = load_fixture("flight_2");
    let t = d
        .translate("SELECT T1.City FROM airports AS T1, flights AS T2 WHERE T1.AirportCode = T2.DestAirport")
        .unwrap();
    let printed = to_sql(&t.resolved);
    assert!(!printed.contains(" ON "), "{printed}");
    let sql = eval_sql(&t.resolved, &d.instance).unwrap();
    let sparql = eval_sparql(&t.sparql, &d.graph).unwrap();
    assert!(compare_results(&sql, &sparql));
}

#[test]
fn unrelated_tables_are_refused_at_lowering() {
    let d = load_fixture("concert_singer");
    let err = d.translate("SELECT count(*) FROM singer JOIN stadium").unwrap_err();
    assert!(err.is_rejection(), "{err}");
}
