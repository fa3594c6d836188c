use std::collections::HashMap;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::Serialize;

use super::graph::{Graph, Literal, Term, Triple, RDF_TYPE};
use super::ontology::{MappingError, Ontology};
use crate::schema::{RelationalInstance, RelationalSchema, Row, Table};
use crate::value::{SqlKey, Value};

/// Everything outside the unreserved URI characters is escaped. `.` is
/// escaped as well because it separates the parts of a composite key.
const KEY_ENCODE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'~');

/// Foreign-key cell whose value matches no referenced row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedReference {
    pub table: String,
    pub row_key: String,
    pub column: String,
    pub value: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MaterializationReport {
    pub triples: usize,
    pub skipped_references: Vec<SkippedReference>,
}

/// `<prefix><table>/<key>`, with composite keys joined by `.` in key order.
pub fn subject_iri(prefix: &str, table: &str, key: &[&Value]) -> String {
    let parts: Vec<String> = key
        .iter()
        .map(|v| utf8_percent_encode(&v.to_field(), KEY_ENCODE).to_string())
        .collect();
    format!("{prefix}{table}/{}", parts.join("."))
}

fn row_subject(prefix: &str, table: &Table, row: &Row) -> String {
    let key: Vec<&Value> = table.primary_key_indices().into_iter().map(|i| &row[i]).collect();
    subject_iri(prefix, &table.name, &key)
}

/// Turns every row into a typed entity: one `rdf:type` triple, one data
/// triple per non-null cell and one object triple per resolvable
/// foreign-key cell. Unresolvable references are reported, not fatal.
pub fn materialize(
    schema: &RelationalSchema,
    instance: &RelationalInstance,
    ontology: &Ontology,
) -> Result<(Graph, MaterializationReport), MappingError> {
    if instance.tables.len() != schema.tables.len() {
        return Err(MappingError::InstanceMismatch(format!(
            "instance has {} tables, schema has {}",
            instance.tables.len(),
            schema.tables.len()
        )));
    }
    if let Some(t) = schema.tables.iter().find(|t| t.primary_key.is_empty()) {
        return Err(MappingError::UnrepairedSchema(format!(
            "table '{}' has no primary key",
            t.name
        )));
    }
    let prefix = ontology.prefix.as_str();

    // (table, column) -> value key -> subjects of rows holding that value
    let mut targets: HashMap<(String, String), HashMap<SqlKey, Vec<String>>> = HashMap::new();
    for table in &schema.tables {
        for fk in &table.foreign_keys {
            let entry = (fk.ref_table.clone(), fk.ref_column.clone());
            if targets.contains_key(&entry) {
                continue;
            }
            let ref_table = schema.table(&fk.ref_table).ok_or_else(|| {
                MappingError::UnrepairedSchema(format!("unknown table '{}'", fk.ref_table))
            })?;
            let col = ref_table.column_index(&fk.ref_column).ok_or_else(|| {
                MappingError::UnrepairedSchema(format!(
                    "unknown column '{}.{}'",
                    fk.ref_table, fk.ref_column
                ))
            })?;
            let mut index: HashMap<SqlKey, Vec<String>> = HashMap::new();
            for row in instance.rows(&ref_table.name) {
                if !row[col].is_null() {
                    index
                        .entry(SqlKey::of(&row[col]))
                        .or_default()
                        .push(row_subject(prefix, ref_table, row));
                }
            }
            targets.insert(entry, index);
        }
    }

    let mut graph = Graph::new();
    let mut report = MaterializationReport::default();
    for (table, data) in schema.tables.iter().zip(&instance.tables) {
        let class = ontology.class(&table.name).ok_or_else(|| {
            MappingError::InstanceMismatch(format!("ontology has no class for '{}'", table.name))
        })?;
        for row in &data.rows {
            if row.len() != table.columns.len() {
                return Err(MappingError::InstanceMismatch(format!(
                    "row of '{}' has {} cells, expected {}",
                    table.name,
                    row.len(),
                    table.columns.len()
                )));
            }
            let subject = row_subject(prefix, table, row);
            graph.insert(Triple {
                subject: subject.clone(),
                predicate: RDF_TYPE.to_string(),
                object: Term::Iri(class.iri.clone()),
            });
            for (cell, column) in row.iter().zip(&table.columns) {
                let Some(literal) = Literal::from_value(cell) else {
                    continue;
                };
                let property = ontology.data_property(&table.name, &column.name).ok_or_else(|| {
                    MappingError::InstanceMismatch(format!(
                        "ontology has no data property for '{}.{}'",
                        table.name, column.name
                    ))
                })?;
                graph.insert(Triple {
                    subject: subject.clone(),
                    predicate: property.iri.clone(),
                    object: Term::Literal(literal),
                });
            }
            for fk in &table.foreign_keys {
                let col = table.column_index(&fk.column).expect("validated foreign key");
                let cell = &row[col];
                if cell.is_null() {
                    continue;
                }
                let property = ontology.object_property(&table.name, &fk.column).ok_or_else(|| {
                    MappingError::InstanceMismatch(format!(
                        "ontology has no object property for '{}.{}'",
                        table.name, fk.column
                    ))
                })?;
                let matches = targets
                    .get(&(fk.ref_table.clone(), fk.ref_column.clone()))
                    .and_then(|index| index.get(&SqlKey::of(cell)));
                match matches {
                    Some(objects) => {
                        for object in objects {
                            graph.insert(Triple {
                                subject: subject.clone(),
                                predicate: property.iri.clone(),
                                object: Term::Iri(object.clone()),
                            });
                        }
                    }
                    None => report.skipped_references.push(SkippedReference {
                        table: table.name.clone(),
                        row_key: subject.rsplit('/').next().unwrap_or_default().to_string(),
                        column: fk.column.clone(),
                        value: cell.to_field(),
                    }),
                }
            }
        }
    }
    report.triples = graph.len();
    Ok((graph, report))
}
