use std::path::PathBuf;

use thiserror::Error;

use crate::value::Datatype;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("DuplicateName: {kind} '{name}' declared twice")]
    DuplicateName { kind: &'static str, name: String },
    #[error("DanglingReference: {0}")]
    DanglingReference(String),
    #[error("ConflictingHints: {0}")]
    ConflictingHints(String),
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("MissingTableFile: no data file for table '{table}' in {dir}")]
    MissingTableFile { table: String, dir: PathBuf },
    #[error("HeaderMismatch: table '{table}': {detail}")]
    HeaderMismatch { table: String, detail: String },
    #[error("ArityMismatch: table '{table}' row {row}: expected {expected} fields, found {found}")]
    ArityMismatch {
        table: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("TypeParseError: table '{table}' column '{column}' row {row}: '{value}' is not {datatype}")]
    TypeParseError {
        table: String,
        column: String,
        row: usize,
        value: String,
        datatype: Datatype,
    },
    #[error("UnexpectedNull: table '{table}' column '{column}' row {row} is null")]
    UnexpectedNull {
        table: String,
        column: String,
        row: usize,
    },
    #[error("DuplicateKey: table '{table}' key ({key}) appears twice")]
    DuplicateKey { table: String, key: String },
    #[error("CsvError: table '{table}': {message}")]
    Csv { table: String, message: String },
}
