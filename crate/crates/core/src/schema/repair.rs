//! Deterministic schema repair: add missing primary keys, add hinted and
//! name-inferred foreign keys, and reconcile foreign-key datatypes.
//!
//! Rules, applied in order:
//! 1. A table without a primary key takes the hinted key, else its single
//!    column named `id`, `<table>id` or `<table>_id`, else a surrogate
//!    integer column `_rowid` appended to the table.
//! 2. Hinted foreign keys are added.
//! 3. Column `A.x` gets a foreign key to `B` when `B` has a single-column
//!    key `p` and `x` is `p` or `<B>p`, unless `x` is already a foreign key,
//!    `x` is `A`'s whole primary key, the match is ambiguous, or a hint
//!    suppresses it.
//! 4. Foreign-key endpoints with different datatypes are widened: to real
//!    when both are numeric, to text otherwise. Repeated to a fixpoint.

use std::collections::BTreeSet;

use serde::Serialize;

use super::document::{check_foreign_key, RepairHints};
use super::error::SchemaError;
use super::model::{normalize_ident, Column, ForeignKey, RelationalSchema};
use crate::value::Datatype;

pub const SURROGATE_KEY: &str = "_rowid";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeSource {
    Hint,
    Convention,
    Inferred,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "change", rename_all = "snake_case")]
pub enum RepairChange {
    AddedPrimaryKey {
        table: String,
        columns: Vec<String>,
        source: ChangeSource,
    },
    AddedSurrogateKey {
        table: String,
        column: String,
    },
    AddedForeignKey {
        table: String,
        column: String,
        ref_table: String,
        ref_column: String,
        source: ChangeSource,
    },
    WidenedColumn {
        table: String,
        column: String,
        from: Datatype,
        to: Datatype,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RepairReport {
    pub changes: Vec<RepairChange>,
}

impl RepairReport {
    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn added_foreign_keys(&self) -> usize {
        self.changes
            .iter()
            .filter(|c| matches!(c, RepairChange::AddedForeignKey { .. }))
            .count()
    }
}

pub fn repair_schema(
    schema: &RelationalSchema,
    hints: Option<&RepairHints>,
) -> Result<(RelationalSchema, RepairReport), SchemaError> {
    let empty = RepairHints::default();
    let hints = hints.unwrap_or(&empty);
    let mut out = schema.clone();
    let mut report = RepairReport::default();

    let pk_hints = collect_pk_hints(schema, hints)?;
    add_primary_keys(&mut out, &pk_hints, &mut report);
    add_hinted_foreign_keys(&mut out, hints, &mut report)?;
    infer_foreign_keys(&mut out, hints, &mut report);
    widen_mismatches(&mut out, &mut report);

    Ok((out, report))
}

fn collect_pk_hints(
    schema: &RelationalSchema,
    hints: &RepairHints,
) -> Result<Vec<(String, Vec<String>)>, SchemaError> {
    let mut out: Vec<(String, Vec<String>)> = Vec::new();
    for h in &hints.add_primary_keys {
        let table_name = normalize_ident(&h.table);
        let table = schema.table(&table_name).ok_or_else(|| {
            SchemaError::DanglingReference(format!("hint names unknown table '{}'", h.table))
        })?;
        let cols: Vec<String> = h.columns.iter().map(|c| normalize_ident(c)).collect();
        if cols.is_empty() {
            return Err(SchemaError::ConflictingHints(format!(
                "empty primary key hint for '{table_name}'"
            )));
        }
        for c in &cols {
            if table.column(c).is_none() {
                return Err(SchemaError::DanglingReference(format!(
                    "hint names unknown column '{table_name}.{c}'"
                )));
            }
        }
        match out.iter().find(|(t, _)| *t == table_name) {
            Some((_, existing)) if *existing != cols => {
                return Err(SchemaError::ConflictingHints(format!(
                    "table '{table_name}' is given primary keys {existing:?} and {cols:?}"
                )));
            }
            Some(_) => {}
            None => out.push((table_name, cols)),
        }
    }
    Ok(out)
}

fn add_primary_keys(
    schema: &mut RelationalSchema,
    pk_hints: &[(String, Vec<String>)],
    report: &mut RepairReport,
) {
    for table in &mut schema.tables {
        if !table.primary_key.is_empty() {
            continue;
        }
        if let Some((_, cols)) = pk_hints.iter().find(|(t, _)| *t == table.name) {
            table.primary_key = cols.clone();
            report.changes.push(RepairChange::AddedPrimaryKey {
                table: table.name.clone(),
                columns: cols.clone(),
                source: ChangeSource::Hint,
            });
            continue;
        }
        let conventional = [
            "id".to_string(),
            format!("{}id", table.name),
            format!("{}_id", table.name),
        ];
        let candidates: Vec<&Column> = table
            .columns
            .iter()
            .filter(|c| conventional.contains(&c.name))
            .collect();
        if let [only] = candidates.as_slice() {
            let col = only.name.clone();
            table.primary_key = vec![col.clone()];
            report.changes.push(RepairChange::AddedPrimaryKey {
                table: table.name.clone(),
                columns: vec![col],
                source: ChangeSource::Convention,
            });
            continue;
        }
        let mut name = SURROGATE_KEY.to_string();
        let mut n = 2;
        while table.column(&name).is_some() {
            name = format!("{SURROGATE_KEY}{n}");
            n += 1;
        }
        let mut column = Column::new(&name, Datatype::Integer, false);
        column.surrogate = true;
        table.columns.push(column);
        table.primary_key = vec![name.clone()];
        report.changes.push(RepairChange::AddedSurrogateKey {
            table: table.name.clone(),
            column: name,
        });
    }
}

fn add_hinted_foreign_keys(
    schema: &mut RelationalSchema,
    hints: &RepairHints,
    report: &mut RepairReport,
) -> Result<(), SchemaError> {
    for h in &hints.add_foreign_keys {
        let table = normalize_ident(&h.table);
        let fk = ForeignKey {
            column: normalize_ident(&h.column),
            ref_table: normalize_ident(&h.ref_table),
            ref_column: normalize_ident(&h.ref_column),
        };
        check_foreign_key(schema, &table, &fk)?;
        let owner = schema.table_mut(&table).expect("checked above");
        match owner.foreign_key(&fk.column) {
            Some(existing) if *existing == fk => continue,
            Some(existing) => {
                return Err(SchemaError::ConflictingHints(format!(
                    "'{table}.{}' already references '{}.{}'",
                    fk.column, existing.ref_table, existing.ref_column
                )));
            }
            None => {}
        }
        owner.foreign_keys.push(fk.clone());
        report.changes.push(RepairChange::AddedForeignKey {
            table,
            column: fk.column,
            ref_table: fk.ref_table,
            ref_column: fk.ref_column,
            source: ChangeSource::Hint,
        });
    }
    Ok(())
}

fn infer_foreign_keys(schema: &mut RelationalSchema, hints: &RepairHints, report: &mut RepairReport) {
    let suppressed: BTreeSet<(String, String)> = hints
        .suppress_inferred
        .iter()
        .map(|h| (normalize_ident(&h.table), normalize_ident(&h.column)))
        .collect();
    // (table name, single key column)
    let keyed: Vec<(String, String)> = schema
        .tables
        .iter()
        .filter(|t| t.primary_key.len() == 1)
        .map(|t| (t.name.clone(), t.primary_key[0].clone()))
        .collect();

    let mut additions = Vec::new();
    for table in &schema.tables {
        for column in &table.columns {
            if table.foreign_key(&column.name).is_some()
                || table.primary_key == [column.name.clone()]
                || suppressed.contains(&(table.name.clone(), column.name.clone()))
            {
                continue;
            }
            let targets: Vec<&(String, String)> = keyed
                .iter()
                .filter(|(b, p)| column.name == *p || column.name == format!("{b}{p}"))
                .collect();
            if let [(b, p)] = targets.as_slice() {
                additions.push((
                    table.name.clone(),
                    ForeignKey {
                        column: column.name.clone(),
                        ref_table: b.clone(),
                        ref_column: p.clone(),
                    },
                ));
            }
        }
    }
    for (table, fk) in additions {
        report.changes.push(RepairChange::AddedForeignKey {
            table: table.clone(),
            column: fk.column.clone(),
            ref_table: fk.ref_table.clone(),
            ref_column: fk.ref_column.clone(),
            source: ChangeSource::Inferred,
        });
        schema
            .table_mut(&table)
            .expect("table exists")
            .foreign_keys
            .push(fk);
    }
}

fn widen_mismatches(schema: &mut RelationalSchema, report: &mut RepairReport) {
    loop {
        let mut pending = None;
        'search: for table in &schema.tables {
            for fk in &table.foreign_keys {
                let local = schema.column_type(&table.name, &fk.column);
                let remote = schema.column_type(&fk.ref_table, &fk.ref_column);
                if let (Some(l), Some(r)) = (local, remote) {
                    if l != r {
                        let target = if l.is_numeric() && r.is_numeric() {
                            Datatype::Real
                        } else {
                            Datatype::Text
                        };
                        pending = Some((
                            (table.name.clone(), fk.column.clone()),
                            (fk.ref_table.clone(), fk.ref_column.clone()),
                            target,
                        ));
                        break 'search;
                    }
                }
            }
        }
        let Some((a, b, target)) = pending else {
            return;
        };
        for (t, c) in [a, b] {
            let column = schema
                .table_mut(&t)
                .and_then(|tab| tab.columns.iter_mut().find(|col| col.name == c))
                .expect("foreign key endpoints exist");
            if column.datatype != target {
                report.changes.push(RepairChange::WidenedColumn {
                    table: t,
                    column: c,
                    from: column.datatype,
                    to: target,
                });
                column.datatype = target;
            }
        }
    }
}
