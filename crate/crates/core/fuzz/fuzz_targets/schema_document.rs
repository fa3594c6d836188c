#![no_main]

use libfuzzer_sys::fuzz_target;
use rdbridge_core::mapping::derive_ontology;
use rdbridge_core::schema::{parse_schema, repair_schema};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(schema) = parse_schema(text) else {
        return;
    };
    if let Ok((repaired, _)) = repair_schema(&schema, None) {
        let _ = derive_ontology(&repaired, "http://example.org/");
    }
});
