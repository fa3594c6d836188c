use serde::Serialize;
use thiserror::Error;

use crate::schema::RelationalSchema;
use crate::value::Datatype;

/// Namespace used when none is configured.
pub const DEFAULT_PREFIX: &str = "http://valuenet/ontop/";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MappingError {
    #[error("UnrepairedSchema: {0}")]
    UnrepairedSchema(String),
    #[error("InstanceMismatch: {0}")]
    InstanceMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OntologyClass {
    pub iri: String,
    pub local_name: String,
    pub table: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataProperty {
    pub iri: String,
    /// `<table>#<column>`
    pub local_name: String,
    pub domain: String,
    pub range: Datatype,
    pub table: String,
    pub column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectProperty {
    pub iri: String,
    /// `<table>#ref-<column>`
    pub local_name: String,
    pub domain: String,
    pub range: String,
    pub table: String,
    pub column: String,
    pub ref_column: String,
}

/// Classes and properties derived from a schema by direct mapping. All
/// local names use the normalized (lowercase) identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ontology {
    pub prefix: String,
    pub classes: Vec<OntologyClass>,
    pub data_properties: Vec<DataProperty>,
    pub object_properties: Vec<ObjectProperty>,
}

impl Ontology {
    pub fn class(&self, table: &str) -> Option<&OntologyClass> {
        self.classes.iter().find(|c| c.table == table)
    }

    pub fn data_property(&self, table: &str, column: &str) -> Option<&DataProperty> {
        self.data_properties
            .iter()
            .find(|p| p.table == table && p.column == column)
    }

    pub fn object_property(&self, table: &str, column: &str) -> Option<&ObjectProperty> {
        self.object_properties
            .iter()
            .find(|p| p.table == table && p.column == column)
    }
}

pub fn data_property_name(table: &str, column: &str) -> String {
    format!("{table}#{column}")
}

pub fn object_property_name(table: &str, column: &str) -> String {
    format!("{table}#ref-{column}")
}

/// One class per table, one data property per column, one object property
/// per foreign key, all in schema order.
pub fn derive_ontology(schema: &RelationalSchema, prefix: &str) -> Result<Ontology, MappingError> {
    for table in &schema.tables {
        for fk in &table.foreign_keys {
            let keyed = schema
                .table(&fk.ref_table)
                .is_some_and(|t| !t.primary_key.is_empty());
            if !keyed {
                return Err(MappingError::UnrepairedSchema(format!(
                    "table '{}' is referenced by '{}.{}' but has no primary key",
                    fk.ref_table, table.name, fk.column
                )));
            }
        }
    }

    let mut ontology = Ontology {
        prefix: prefix.to_string(),
        classes: Vec::new(),
        data_properties: Vec::new(),
        object_properties: Vec::new(),
    };
    for table in &schema.tables {
        ontology.classes.push(OntologyClass {
            iri: format!("{prefix}{}", table.name),
            local_name: table.name.clone(),
            table: table.name.clone(),
        });
        for column in &table.columns {
            let local = data_property_name(&table.name, &column.name);
            ontology.data_properties.push(DataProperty {
                iri: format!("{prefix}{local}"),
                local_name: local,
                domain: table.name.clone(),
                range: column.datatype,
                table: table.name.clone(),
                column: column.name.clone(),
            });
        }
        for fk in &table.foreign_keys {
            let local = object_property_name(&table.name, &fk.column);
            ontology.object_properties.push(ObjectProperty {
                iri: format!("{prefix}{local}"),
                local_name: local,
                domain: table.name.clone(),
                range: fk.ref_table.clone(),
                table: table.name.clone(),
                column: fk.column.clone(),
                ref_column: fk.ref_column.clone(),
            });
        }
    }
    Ok(ontology)
}
