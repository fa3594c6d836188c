//! The four worked example queries, with results derived by hand from the
//! fixture CSVs.

mod common;

use rdbridge_core::engines::{eval_sparql, eval_sql, ResultSet};
use rdbridge_core::eval::compare_results;
use rdbridge_core::pipeline::Dataset;
use rdbridge_core::value::Value;

fn text(s: &str) -> Value {
    Value::Text(s.to_string())
}

fn int(i: i64) -> Value {
    Value::Integer(i)
}

fn expected(columns: &[&str], rows: Vec<Vec<Value>>) -> ResultSet {
    ResultSet {
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
        ordered: false,
    }
}

/// Runs `sql` through both engines and checks both against `want`.
fn check(data: &Dataset, sql: &str, want: &ResultSet) -> String {
    let t = data.translate(sql).unwrap();
    let oracle = eval_sql(&t.resolved, &data.instance).unwrap();
    let answer = eval_sparql(&t.sparql, &data.graph).unwrap();
    assert!(compare_results(&oracle, want), "sql engine:\n{}", oracle.to_csv());
    assert!(compare_results(&answer, want), "sparql engine:\n{}", answer.to_csv());
    rdbridge_core::sparql::serialize_sparql(&t.sparql).unwrap()
}

#[test]
fn grouped_count_keeps_one_row_per_source_airport() {
    let data = common::load_fixture("flight_2");
    let want = expected(
        &["city", "count(*)"],
        vec![
            vec![text("Honolulu"), int(2)],
            vec![text("Honolulu"), int(1)],
            vec![text("Boston"), int(3)],
            vec![text("Denver"), int(1)],
            vec![text("Anchorage"), int(1)],
            vec![text("Aberdeen"), int(1)],
            vec![text("Kahului"), int(1)],
        ],
    );
    let sparql = check(
        &data,
        "SELECT t1.City, count(*) FROM airports AS t1 JOIN flights as t2 ON t1.AirportCode = t2.SourceAirport GROUP BY t2.SourceAirport",
        &want,
    );
    // The projected city has to join the grouping keys.
    assert!(sparql.contains("GROUP BY ?t1_city ?t2_sourceairport"), "{sparql}");
}

#[test]
fn intersect_of_two_airports_is_their_shared_city() {
    let data = common::load_fixture("flight_2");
    let want = expected(&["city"], vec![vec![text("Honolulu")]]);
    check(
        &data,
        "SELECT City FROM airports WHERE AirportCode = 'MMI' INTERSECT SELECT City FROM airports WHERE AirportCode = 'AHN'",
        &want,
    );
}

#[test]
fn districts_above_average_population() {
    let data = common::load_fixture("world_1");
    let rows = [
        ("Berliini", 1),
        ("California", 1),
        ("Distrito Federal", 1),
        ("Kairo", 1),
        ("Maharashtra", 1),
        ("New South Wales", 1),
        ("New York", 1),
        ("Shanghai", 1),
        ("São Paulo", 2),
        ("Tokyo-to", 1),
    ]
    .iter()
    .map(|(d, n)| vec![int(*n), text(d)])
    .collect();
    let want = expected(&["count(*)", "district"], rows);
    let sparql = check(
        &data,
        "SELECT count(*), district FROM city WHERE population > (SELECT avg(population) FROM city) GROUP BY district",
        &want,
    );
    assert!(sparql.contains("AVG(?t2_population)"), "{sparql}");
}

#[test]
fn three_aggregates_over_french_singers() {
    let data = common::load_fixture("concert_singer");
    // ages 29, 41, 43, 25
    let want = expected(
        &["avg(age)", "min(age)", "max(age)"],
        vec![vec![Value::Real(34.5), int(25), int(43)]],
    );
    check(
        &data,
        "SELECT avg(age), min(age), max(age) FROM singer WHERE country = 'France'",
        &want,
    );
}
