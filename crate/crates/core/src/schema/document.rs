//! Schema and repair-hint documents (JSON).
//!
//! ```json
//! { "db_id": "flight_2",
//!   "tables": [ { "name": "airports",
//!                 "columns": [ { "name": "AirportCode", "type": "text", "nullable": false } ],
//!                 "primary_key": ["AirportCode"],
//!                 "foreign_keys": [] } ] }
//! ```

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::error::SchemaError;
use super::model::{is_valid_ident, normalize_ident, Column, ForeignKey, RelationalSchema, Table};
use crate::value::Datatype;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaDocument {
    pub db_id: String,
    #[serde(default)]
    pub tables: Vec<TableDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDocument {
    pub name: String,
    pub columns: Vec<ColumnDocument>,
    #[serde(default)]
    pub primary_key: Vec<String>,
    #[serde(default)]
    pub foreign_keys: Vec<ForeignKeyDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnDocument {
    pub name: String,
    #[serde(rename = "type")]
    pub datatype: String,
    #[serde(default = "default_nullable")]
    pub nullable: bool,
}

fn default_nullable() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForeignKeyDocument {
    pub column: String,
    pub ref_table: String,
    pub ref_column: String,
}

/// Explicit keys to add during repair, plus inferred foreign keys to skip.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepairHints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub db_id: Option<String>,
    #[serde(default)]
    pub add_primary_keys: Vec<PrimaryKeyHint>,
    #[serde(default)]
    pub add_foreign_keys: Vec<ForeignKeyHint>,
    #[serde(default)]
    pub suppress_inferred: Vec<ColumnHint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimaryKeyHint {
    pub table: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForeignKeyHint {
    pub table: String,
    pub column: String,
    pub ref_table: String,
    pub ref_column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnHint {
    pub table: String,
    pub column: String,
}

/// Reads and validates a schema document. No repair is performed; call
/// [`RelationalSchema::diagnostics`] to see what still needs fixing.
pub fn load_schema(path: &Path) -> Result<RelationalSchema, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_schema(&text)
}

pub fn parse_schema(text: &str) -> Result<RelationalSchema, SchemaError> {
    let doc: SchemaDocument =
        serde_json::from_str(text).map_err(|e| SchemaError::Parse(e.to_string()))?;
    schema_from_document(&doc)
}

pub fn load_hints(path: &Path) -> Result<RepairHints, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_hints(&text)
}

pub fn parse_hints(text: &str) -> Result<RepairHints, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError::Parse(e.to_string()))
}

fn check_ident(name: &str) -> Result<(), SchemaError> {
    if is_valid_ident(name) {
        Ok(())
    } else {
        Err(SchemaError::Parse(format!("invalid identifier '{name}'")))
    }
}

pub fn schema_from_document(doc: &SchemaDocument) -> Result<RelationalSchema, SchemaError> {
    let mut tables = Vec::with_capacity(doc.tables.len());
    let mut table_names = HashSet::new();
    for t in &doc.tables {
        check_ident(&t.name)?;
        if !table_names.insert(normalize_ident(&t.name)) {
            return Err(SchemaError::DuplicateName {
                kind: "table",
                name: t.name.clone(),
            });
        }
        let mut columns = Vec::with_capacity(t.columns.len());
        let mut column_names = HashSet::new();
        for c in &t.columns {
            check_ident(&c.name)?;
            if !column_names.insert(normalize_ident(&c.name)) {
                return Err(SchemaError::DuplicateName {
                    kind: "column",
                    name: format!("{}.{}", t.name, c.name),
                });
            }
            let datatype = Datatype::from_name(&c.datatype).ok_or_else(|| {
                SchemaError::Parse(format!(
                    "column {}.{} has unknown type '{}'",
                    t.name, c.name, c.datatype
                ))
            })?;
            columns.push(Column::new(&c.name, datatype, c.nullable));
        }
        let mut primary_key = Vec::new();
        for k in &t.primary_key {
            let k = normalize_ident(k);
            if !column_names.contains(&k) {
                return Err(SchemaError::DanglingReference(format!(
                    "primary key column '{}.{k}' does not exist",
                    t.name
                )));
            }
            if primary_key.contains(&k) {
                return Err(SchemaError::DuplicateName {
                    kind: "primary key column",
                    name: format!("{}.{k}", t.name),
                });
            }
            primary_key.push(k);
        }
        let foreign_keys = t
            .foreign_keys
            .iter()
            .map(|fk| ForeignKey {
                column: normalize_ident(&fk.column),
                ref_table: normalize_ident(&fk.ref_table),
                ref_column: normalize_ident(&fk.ref_column),
            })
            .collect();
        tables.push(Table {
            name: normalize_ident(&t.name),
            display: t.name.clone(),
            columns,
            primary_key,
            foreign_keys,
        });
    }
    let schema = RelationalSchema {
        name: doc.db_id.clone(),
        tables,
    };
    for table in &schema.tables {
        let mut seen = HashSet::new();
        for fk in &table.foreign_keys {
            check_foreign_key(&schema, &table.name, fk)?;
            if !seen.insert(&fk.column) {
                return Err(SchemaError::DuplicateName {
                    kind: "foreign key column",
                    name: format!("{}.{}", table.name, fk.column),
                });
            }
        }
    }
    Ok(schema)
}

pub(crate) fn check_foreign_key(
    schema: &RelationalSchema,
    table: &str,
    fk: &ForeignKey,
) -> Result<(), SchemaError> {
    let owner = schema
        .table(table)
        .ok_or_else(|| SchemaError::DanglingReference(format!("table '{table}' does not exist")))?;
    if owner.column(&fk.column).is_none() {
        return Err(SchemaError::DanglingReference(format!(
            "foreign key column '{table}.{}' does not exist",
            fk.column
        )));
    }
    let target = schema.table(&fk.ref_table).ok_or_else(|| {
        SchemaError::DanglingReference(format!(
            "'{table}.{}' references unknown table '{}'",
            fk.column, fk.ref_table
        ))
    })?;
    if target.column(&fk.ref_column).is_none() {
        return Err(SchemaError::DanglingReference(format!(
            "'{table}.{}' references unknown column '{}.{}'",
            fk.column, fk.ref_table, fk.ref_column
        )));
    }
    Ok(())
}

/// Inverse of [`schema_from_document`]; surrogate columns are kept.
pub fn schema_to_document(schema: &RelationalSchema) -> SchemaDocument {
    SchemaDocument {
        db_id: schema.name.clone(),
        tables: schema
            .tables
            .iter()
            .map(|t| TableDocument {
                name: t.display.clone(),
                columns: t
                    .columns
                    .iter()
                    .map(|c| ColumnDocument {
                        name: c.display.clone(),
                        datatype: c.datatype.name().to_string(),
                        nullable: c.nullable,
                    })
                    .collect(),
                primary_key: t.primary_key.clone(),
                foreign_keys: t
                    .foreign_keys
                    .iter()
                    .map(|fk| ForeignKeyDocument {
                        column: fk.column.clone(),
                        ref_table: fk.ref_table.clone(),
                        ref_column: fk.ref_column.clone(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document() {
        let schema = parse_schema(r#"{"db_id": "empty", "tables": []}"#).unwrap();
        assert!(schema.tables.is_empty());
        assert!(schema.diagnostics().is_empty());
    }

    #[test]
    fn names_are_normalized_but_spelling_kept() {
        let schema = parse_schema(
            r#"{"db_id":"d","tables":[{"name":"Flights","columns":[{"name":"FlightNo","type":"int"}],"primary_key":["flightno"]}]}"#,
        )
        .unwrap();
        let t = schema.table("FLIGHTS").unwrap();
        assert_eq!(t.name, "flights");
        assert_eq!(t.display, "Flights");
        assert_eq!(t.columns[0].name, "flightno");
        assert_eq!(t.columns[0].display, "FlightNo");
        assert_eq!(t.primary_key, vec!["flightno"]);
    }

    #[test]
    fn duplicate_table_is_rejected() {
        let err = parse_schema(
            r#"{"db_id":"d","tables":[{"name":"a","columns":[]},{"name":"A","columns":[]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, SchemaError::DuplicateName { kind: "table", .. }));
    }

    #[test]
    fn duplicate_column_is_rejected() {
        let err = parse_schema(
            r#"{"db_id":"d","tables":[{"name":"a","columns":[{"name":"x","type":"text"},{"name":"X","type":"text"}]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, SchemaError::DuplicateName { kind: "column", .. }));
    }

    #[test]
    fn dangling_foreign_key_table() {
        let err = parse_schema(
            r#"{"db_id":"d","tables":[{"name":"flights","columns":[{"name":"SourceAirport","type":"text"}],
                "foreign_keys":[{"column":"SourceAirport","ref_table":"nowhere","ref_column":"code"}]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, SchemaError::DanglingReference(_)), "{err}");
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(parse_schema("{"), Err(SchemaError::Parse(_))));
        assert!(matches!(
            parse_schema(r#"{"db_id":"d","tables":[{"name":"a b","columns":[]}]}"#),
            Err(SchemaError::Parse(_))
        ));
        assert!(matches!(
            parse_schema(r#"{"db_id":"d","tables":[{"name":"a","columns":[{"name":"x","type":"blob"}]}]}"#),
            Err(SchemaError::Parse(_))
        ));
    }

    #[test]
    fn unkeyed_reference_is_a_diagnostic() {
        let schema = parse_schema(
            r#"{"db_id":"d","tables":[
                {"name":"a","columns":[{"name":"id","type":"integer"}]},
                {"name":"b","columns":[{"name":"a_id","type":"text"}],
                 "foreign_keys":[{"column":"a_id","ref_table":"a","ref_column":"id"}]}]}"#,
        )
        .unwrap();
        let diags = schema.diagnostics();
        assert_eq!(diags.len(), 2, "{diags:?}");
    }
}
