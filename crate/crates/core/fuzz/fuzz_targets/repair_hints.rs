#![no_main]

use libfuzzer_sys::fuzz_target;
use rdbridge_core::schema::{parse_hints, parse_schema, repair_schema};

const SCHEMA: &str = include_str!("../../tests/fixtures/flight_2/schema.json");

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(hints) = parse_hints(text) else {
        return;
    };
    let schema = parse_schema(SCHEMA).expect("fixture schema parses");
    let _ = repair_schema(&schema, Some(&hints));
});
