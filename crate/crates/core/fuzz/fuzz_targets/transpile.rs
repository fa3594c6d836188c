#![no_main]

use libfuzzer_sys::fuzz_target;
use rdbridge_core::mapping::derive_ontology;
use rdbridge_core::pipeline::{translate, PipelineError};
use rdbridge_core::schema::{parse_hints, parse_schema, repair_schema};
use rdbridge_core::sparql::{serialize_sparql, SparqlError};

const SCHEMA: &str = include_str!("../../tests/fixtures/flight_2/schema.json");
const HINTS: &str = include_str!("../../tests/fixtures/flight_2/hints.json");

fuzz_target!(|data: &[u8]| {
    let Ok(sql) = std::str::from_utf8(data) else {
        return;
    };
    let raw = parse_schema(SCHEMA).expect("fixture schema parses");
    let hints = parse_hints(HINTS).expect("fixture hints parse");
    let (schema, _) = repair_schema(&raw, Some(&hints)).expect("fixture schema repairs");
    let ontology = derive_ontology(&schema, "http://valuenet/ontop/").expect("ontology derives");
    match translate(sql, &schema, &ontology) {
        Ok(t) => {
            serialize_sparql(&t.sparql).expect("emitted SPARQL serializes");
        }
        Err(PipelineError::Sparql(e @ (SparqlError::EmissionBug(_) | SparqlError::InvariantViolation(_)))) => {
            panic!("internal error on accepted SQL: {e}")
        }
        Err(_) => {}
    }
});
