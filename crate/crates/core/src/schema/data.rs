//! Row data: one comma-separated file per table, header first, empty field
//! for null.

use std::collections::HashSet;
use std::io::Read;
use std::path::{Path, PathBuf};

use super::error::DataError;
use super::model::{normalize_ident, RelationalSchema, Table};
use crate::value::{SqlKey, Value};

pub type Row = Vec<Value>;

#[derive(Debug, Clone, PartialEq)]
pub struct TableRows {
    pub table: String,
    pub rows: Vec<Row>,
}

/// Rows for every table of a schema, in schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationalInstance {
    pub tables: Vec<TableRows>,
}

impl RelationalInstance {
    /// An instance with no rows at all.
    pub fn empty(schema: &RelationalSchema) -> RelationalInstance {
        RelationalInstance {
            tables: schema
                .tables
                .iter()
                .map(|t| TableRows {
                    table: t.name.clone(),
                    rows: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn rows(&self, table: &str) -> &[Row] {
        let table = normalize_ident(table);
        self.tables
            .iter()
            .find(|t| t.table == table)
            .map(|t| t.rows.as_slice())
            .unwrap_or(&[])
    }

    pub fn row_counts(&self) -> Vec<(String, usize)> {
        self.tables
            .iter()
            .map(|t| (t.table.clone(), t.rows.len()))
            .collect()
    }

    /// Builds an instance from in-memory rows and checks it against the
    /// schema.
    pub fn from_rows(
        schema: &RelationalSchema,
        tables: Vec<(String, Vec<Row>)>,
    ) -> Result<RelationalInstance, DataError> {
        let mut out = RelationalInstance::empty(schema);
        for (name, rows) in tables {
            let name = normalize_ident(&name);
            if let Some(slot) = out.tables.iter_mut().find(|t| t.table == name) {
                slot.rows = rows;
            }
        }
        out.validate(schema)?;
        Ok(out)
    }

    /// Checks arity, cell types, nullability and key uniqueness.
    pub fn validate(&self, schema: &RelationalSchema) -> Result<(), DataError> {
        for (table, data) in schema.tables.iter().zip(&self.tables) {
            for (i, row) in data.rows.iter().enumerate() {
                if row.len() != table.columns.len() {
                    return Err(DataError::ArityMismatch {
                        table: table.name.clone(),
                        row: i + 1,
                        expected: table.columns.len(),
                        found: row.len(),
                    });
                }
                for (cell, col) in row.iter().zip(&table.columns) {
                    if let Some(dt) = cell.datatype() {
                        if dt != col.datatype {
                            return Err(DataError::TypeParseError {
                                table: table.name.clone(),
                                column: col.name.clone(),
                                row: i + 1,
                                value: cell.to_field(),
                                datatype: col.datatype,
                            });
                        }
                    }
                }
            }
            check_rows(table, &data.rows)?;
        }
        Ok(())
    }
}

fn check_rows(table: &Table, rows: &[Row]) -> Result<(), DataError> {
    let key_idx = table.primary_key_indices();
    let mut seen = HashSet::new();
    for (i, row) in rows.iter().enumerate() {
        for (cell, col) in row.iter().zip(&table.columns) {
            let in_key = table.primary_key.contains(&col.name);
            if cell.is_null() && (in_key || !col.nullable) {
                return Err(DataError::UnexpectedNull {
                    table: table.name.clone(),
                    column: col.name.clone(),
                    row: i + 1,
                });
            }
        }
        if key_idx.is_empty() {
            continue;
        }
        let key: Vec<SqlKey> = key_idx.iter().map(|&k| SqlKey::of(&row[k])).collect();
        if !seen.insert(key) {
            let shown: Vec<String> = key_idx.iter().map(|&k| row[k].to_field()).collect();
            return Err(DataError::DuplicateKey {
                table: table.name.clone(),
                key: shown.join(", "),
            });
        }
    }
    Ok(())
}

/// Decodes one table's data file. Surrogate key columns may be absent from
/// the header, in which case they are numbered from 1 in file order.
pub fn parse_table_csv<R: Read>(table: &Table, reader: R) -> Result<Vec<Row>, DataError> {
    let csv_err = |e: csv::Error| DataError::Csv {
        table: table.name.clone(),
        message: e.to_string(),
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();

    // positions[i] = index of schema column i within the file, if present
    let mut positions: Vec<Option<usize>> = vec![None; table.columns.len()];
    for (pos, name) in header.iter().enumerate() {
        let idx = table.column_index(name.trim()).ok_or_else(|| DataError::HeaderMismatch {
            table: table.name.clone(),
            detail: format!("unknown column '{name}'"),
        })?;
        if positions[idx].is_some() {
            return Err(DataError::HeaderMismatch {
                table: table.name.clone(),
                detail: format!("column '{name}' appears twice"),
            });
        }
        positions[idx] = Some(pos);
    }
    for (col, pos) in table.columns.iter().zip(&positions) {
        if pos.is_none() && !col.surrogate {
            return Err(DataError::HeaderMismatch {
                table: table.name.clone(),
                detail: format!("missing column '{}'", col.display),
            });
        }
    }

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = i + 1;
        if record.len() != header.len() {
            return Err(DataError::ArityMismatch {
                table: table.name.clone(),
                row: line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(table.columns.len());
        for (col, pos) in table.columns.iter().zip(&positions) {
            let cell = match pos {
                None => Value::Integer(line as i64),
                Some(p) => {
                    let raw = &record[*p];
                    Value::parse_as(raw, col.datatype).ok_or_else(|| DataError::TypeParseError {
                        table: table.name.clone(),
                        column: col.name.clone(),
                        row: line,
                        value: raw.to_string(),
                        datatype: col.datatype,
                    })?
                }
            };
            row.push(cell);
        }
        rows.push(row);
    }
    check_rows(table, &rows)?;
    Ok(rows)
}

fn find_table_file(dir: &Path, table: &Table) -> Result<Option<PathBuf>, DataError> {
    let io = |source| DataError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut matches: Vec<PathBuf> = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        let is_csv = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let stem_matches = path
            .file_stem()
            .and_then(|s| s.to_str())
            .is_some_and(|s| normalize_ident(s) == table.name);
        if is_csv && stem_matches {
            matches.push(path);
        }
    }
    matches.sort();
    Ok(matches.into_iter().next())
}

/// Loads one data file per table from `dir` (file stem = table name,
/// case-insensitive, extension `.csv`).
pub fn load_data(schema: &RelationalSchema, dir: &Path) -> Result<RelationalInstance, DataError> {
    let mut tables = Vec::with_capacity(schema.tables.len());
    for table in &schema.tables {
        let path = find_table_file(dir, table)?.ok_or_else(|| DataError::MissingTableFile {
            table: table.name.clone(),
            dir: dir.to_path_buf(),
        })?;
        let file = std::fs::File::open(&path).map_err(|source| DataError::Io {
            path: path.clone(),
            source,
        })?;
        let rows = parse_table_csv(table, file)?;
        tables.push(TableRows {
            table: table.name.clone(),
            rows,
        });
    }
    Ok(RelationalInstance { tables })
}

/// Encodes one table as CSV text (header included).
pub fn table_to_csv(table: &Table, rows: &[Row]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    w.write_record(table.columns.iter().map(|c| c.display.as_str()))
        .expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(Value::to_field))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Writes `<table>.csv` for every table into `dir`.
pub fn write_data(
    schema: &RelationalSchema,
    instance: &RelationalInstance,
    dir: &Path,
) -> Result<(), DataError> {
    for (table, data) in schema.tables.iter().zip(&instance.tables) {
        let path = dir.join(format!("{}.csv", table.display));
        std::fs::write(&path, table_to_csv(table, &data.rows))
            .map_err(|source| DataError::Io { path, source })?;
    }
    Ok(())
}
