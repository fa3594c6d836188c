#![no_main]

use libfuzzer_sys::fuzz_target;
use rdbridge_core::schema::{parse_schema, parse_table_csv, repair_schema, table_to_csv};

const SCHEMA: &str = include_str!("../../tests/fixtures/concert_singer/schema.json");

fuzz_target!(|data: &[u8]| {
    let schema = parse_schema(SCHEMA).expect("fixture schema parses");
    let (schema, _) = repair_schema(&schema, None).expect("fixture schema repairs");
    // The first byte picks the table, the rest is the file.
    let Some((&pick, body)) = data.split_first() else {
        return;
    };
    let table = &schema.tables[pick as usize % schema.tables.len()];
    let Ok(rows) = parse_table_csv(table, body) else {
        return;
    };
    // Written rows read back identically.
    let text = table_to_csv(table, &rows);
    let again = parse_table_csv(table, text.as_bytes()).expect("written CSV parses");
    assert_eq!(rows, again);
});
