#![no_main]

use libfuzzer_sys::fuzz_target;
use rdbridge_core::schema::{parse_hints, parse_schema, repair_schema};
use rdbridge_core::sql::{normalize_sql, parse_statement, resolve_query, to_sql, tokenize};

const SCHEMA: &str = include_str!("../../tests/fixtures/flight_2/schema.json");
const HINTS: &str = include_str!("../../tests/fixtures/flight_2/hints.json");

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = tokenize(text);
    let Ok(query) = parse_statement(text) else {
        return;
    };
    // Printing must round-trip through the parser.
    let printed = to_sql(&query);
    let reparsed = parse_statement(&printed).expect("printed SQL parses");
    assert_eq!(to_sql(&reparsed), printed);
    let raw = parse_schema(SCHEMA).expect("fixture schema parses");
    let hints = parse_hints(HINTS).expect("fixture hints parse");
    let (schema, _) = repair_schema(&raw, Some(&hints)).expect("fixture schema repairs");
    if let Ok(resolved) = resolve_query(query, &schema) {
        if let Ok(once) = normalize_sql(&resolved, &schema) {
            let twice = normalize_sql(&once, &schema).expect("normalized SQL normalizes");
            assert_eq!(to_sql(&once), to_sql(&twice));
        }
    }
});
