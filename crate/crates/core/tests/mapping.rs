//! Direct mapping over the fixtures, and the triple-count law against a
//! brute-force enumerator.

mod common;

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::gen::{random_instance, random_schema, SchemaOptions};
use rdbridge_core::mapping::{
    derive_ontology, materialize, ontology_prompt_summary, serialize_graph, Literal, LiteralType, Term, Triple,
    RDF_TYPE,
};
use rdbridge_core::schema::{RelationalInstance, RelationalSchema};
use rdbridge_core::value::{format_real, Value};

/// Percent-encodes every byte outside ASCII letters, digits, `-`, `_`, `~`.
fn encode_key(raw: &str) -> String {
    let mut out = String::new();
    for b in raw.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn lexical(v: &Value) -> String {
    match v {
        Value::Real(r) => format_real(*r),
        Value::Integer(i) => i.to_string(),
        Value::Text(s) => s.clone(),
        Value::Boolean(b) => b.to_string(),
        Value::Null => unreachable!("nulls have no literal"),
    }
}

/// Every triple the mapping should produce, written out row by row.
fn brute_force(schema: &RelationalSchema, instance: &RelationalInstance, prefix: &str) -> BTreeSet<Triple> {
    let subject = |table: &str, row: &[Value]| {
        let t = schema.table(table).unwrap();
        let parts: Vec<String> = t
            .primary_key
            .iter()
            .map(|k| encode_key(&lexical(&row[t.column_index(k).unwrap()])))
            .collect();
        format!("{prefix}{table}/{}", parts.join("."))
    };
    let mut out = BTreeSet::new();
    for t in &schema.tables {
        for row in instance.rows(&t.name) {
            let s = subject(&t.name, row);
            out.insert(Triple {
                subject: s.clone(),
                predicate: RDF_TYPE.to_string(),
                object: Term::Iri(format!("{prefix}{}", t.name)),
            });
            for (c, v) in t.columns.iter().zip(row) {
                if v.is_null() {
                    continue;
                }
                let datatype = match v {
                    Value::Integer(_) => LiteralType::Integer,
                    Value::Real(_) => LiteralType::Decimal,
                    Value::Boolean(_) => LiteralType::Boolean,
                    _ => LiteralType::String,
                };
                out.insert(Triple {
                    subject: s.clone(),
                    predicate: format!("{prefix}{}#{}", t.name, c.name),
                    object: Term::Literal(Literal {
                        lexical: lexical(v),
                        datatype,
                    }),
                });
            }
            for fk in &t.foreign_keys {
                let v = &row[t.column_index(&fk.column).unwrap()];
                if v.is_null() {
                    continue;
                }
                let target = schema.table(&fk.ref_table).unwrap();
                let ti = target.column_index(&fk.ref_column).unwrap();
                for other in instance.rows(&target.name) {
                    if lexical(&other[ti]) == lexical(v) {
                        out.insert(Triple {
                            subject: s.clone(),
                            predicate: format!("{prefix}{}#ref-{}", t.name, fk.column),
                            object: Term::Iri(subject(&target.name, other)),
                        });
                    }
                }
            }
        }
    }
    out
}

#[test]
fn triple_count_law_on_random_databases() {
    let mut rng = StdRng::seed_from_u64(11);
    let opts = SchemaOptions {
        max_tables: 4,
        nulls: true,
        varied_keys: true,
    };
    let (mut skipped, mut composite, mut nulls) = (0, 0, 0);
    for case in 0..100 {
        let schema = random_schema(&mut rng, opts);
        let instance = random_instance(&mut rng, &schema, 25);
        let ontology = derive_ontology(&schema, common::PREFIX).unwrap();
        let (graph, report) = materialize(&schema, &instance, &ontology).unwrap();
        let expected = brute_force(&schema, &instance, common::PREFIX);
        let actual: BTreeSet<Triple> = graph.iter().cloned().collect();
        assert_eq!(actual, expected, "case {case}");
        assert_eq!(report.triples, expected.len(), "case {case}");
        skipped += report.skipped_references.len();
        composite += schema.tables.iter().filter(|t| t.primary_key.len() > 1).count();
        nulls += instance.tables.iter().flat_map(|t| &t.rows).flatten().filter(|v| v.is_null()).count();
    }
    // the corpus exercises dangling links, composite keys and nulls
    assert!(skipped > 0 && composite > 0 && nulls > 0, "{skipped} {composite} {nulls}");
}

#[test]
fn flight_2_ontology_has_three_classes_and_hinted_links() {
    let data = common::load_fixture("flight_2");
    let classes: Vec<&str> = data.ontology.classes.iter().map(|c| c.local_name.as_str()).collect();
    assert_eq!(classes, ["airlines", "airports", "flights"]);
    let mut links: Vec<&str> = data.ontology.object_properties.iter().map(|p| p.local_name.as_str()).collect();
    links.sort();
    assert_eq!(links, ["flights#ref-airline", "flights#ref-destairport", "flights#ref-sourceairport"]);
    assert_eq!(data.ontology.data_properties.len(), 12);
}

#[test]
fn small_flight_fixture_has_23_triples() {
    // 1 airline (1 type + 4 values), 2 airports (2 x 5), 1 flight (1 + 4 + 3 links)
    let data = common::load_fixture_with("flight_2", "data_small");
    assert_eq!(data.graph.len(), 5 + 10 + 8);
    assert_eq!(data.materialization.triples, 23);
    assert!(data.materialization.skipped_references.is_empty());
}

#[test]
fn dangling_references_are_reported_not_linked() {
    let data = common::load_fixture("flight_2");
    // airline 5 has no flights, every flight points at a known airport
    assert!(data.materialization.skipped_references.is_empty());
    let links = data
        .graph
        .iter()
        .filter(|t| t.predicate.ends_with("#ref-sourceairport"))
        .count();
    assert_eq!(links, data.instance.rows("flights").len());
}

#[test]
fn world_foreign_keys_are_inferred_from_names() {
    let data = common::load_fixture("world_1");
    let mut links: Vec<&str> = data.ontology.object_properties.iter().map(|p| p.local_name.as_str()).collect();
    links.sort();
    assert_eq!(links, ["city#ref-countrycode", "countrylanguage#ref-countrycode"]);
    assert_eq!(data.repair.added_foreign_keys(), 2);
}

#[test]
fn ntriples_are_sorted_and_stable() {
    let data = common::load_fixture_with("flight_2", "data_small");
    let text = serialize_graph(&data.graph);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 23);
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
    assert!(text.contains("<http://valuenet/ontop/flights#ref-airline>"));
    let again = common::load_fixture_with("flight_2", "data_small");
    assert_eq!(serialize_graph(&again.graph), text);
}

#[test]
fn prompt_summary_lists_the_ontology() {
    let data = common::load_fixture("flight_2");
    let text = ontology_prompt_summary(&data.ontology);
    assert!(text.contains("PREFIX : <http://valuenet/ontop/>"));
    assert!(text.contains("'classes': ['airlines', 'airports', 'flights']"));
    assert!(text.contains("'object_properties': ['flights#ref-airline', 'flights#ref-destairport', 'flights#ref-sourceairport']"));
}
