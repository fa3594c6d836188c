//! Relational schemas and instances: loading, validation and repair.

mod data;
mod document;
mod error;
mod model;
mod repair;

pub use data::{
    load_data, parse_table_csv, table_to_csv, write_data, RelationalInstance, Row, TableRows,
};
pub use document::{
    load_hints, load_schema, parse_hints, parse_schema, schema_from_document, schema_to_document,
    ColumnDocument, ColumnHint, ForeignKeyDocument, ForeignKeyHint, PrimaryKeyHint, RepairHints,
    SchemaDocument, TableDocument,
};
pub use error::{DataError, SchemaError};
pub use model::{is_valid_ident, normalize_ident, Column, ForeignKey, RelationalSchema, Table};
pub use repair::{repair_schema, ChangeSource, RepairChange, RepairReport, SURROGATE_KEY};
