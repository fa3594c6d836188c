use serde::Serialize;

use crate::value::Datatype;

/// Lowercases an identifier. Applied once at load time; original spellings
/// stay available through the `display` fields.
pub fn normalize_ident(name: &str) -> String {
    name.to_ascii_lowercase()
}

/// Identifiers must start with a letter or underscore and contain only
/// ASCII letters, digits and underscores, so they can be embedded verbatim
/// in IRIs and SQL text.
pub fn is_valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    /// Normalized (lowercase) name.
    pub name: String,
    /// Spelling from the source document.
    pub display: String,
    pub datatype: Datatype,
    pub nullable: bool,
    /// Synthetic key column appended by repair; data files may omit it.
    pub surrogate: bool,
}

impl Column {
    pub fn new(display: &str, datatype: Datatype, nullable: bool) -> Column {
        Column {
            name: normalize_ident(display),
            display: display.to_string(),
            datatype,
            nullable,
            surrogate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ForeignKey {
    pub column: String,
    pub ref_table: String,
    pub ref_column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub name: String,
    pub display: String,
    pub columns: Vec<Column>,
    /// Normalized column names, possibly empty before repair.
    pub primary_key: Vec<String>,
    pub foreign_keys: Vec<ForeignKey>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&Column> {
        let name = normalize_ident(name);
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        let name = normalize_ident(name);
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn primary_key_indices(&self) -> Vec<usize> {
        self.primary_key
            .iter()
            .filter_map(|k| self.column_index(k))
            .collect()
    }

    pub fn foreign_key(&self, column: &str) -> Option<&ForeignKey> {
        let column = normalize_ident(column);
        self.foreign_keys.iter().find(|fk| fk.column == column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationalSchema {
    pub name: String,
    pub tables: Vec<Table>,
}

impl RelationalSchema {
    pub fn table(&self, name: &str) -> Option<&Table> {
        let name = normalize_ident(name);
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn table_mut(&mut self, name: &str) -> Option<&mut Table> {
        let name = normalize_ident(name);
        self.tables.iter_mut().find(|t| t.name == name)
    }

    pub fn table_index(&self, name: &str) -> Option<usize> {
        let name = normalize_ident(name);
        self.tables.iter().position(|t| t.name == name)
    }

    pub fn column_type(&self, table: &str, column: &str) -> Option<Datatype> {
        self.table(table)?.column(column).map(|c| c.datatype)
    }

    /// Invariant violations that do not prevent loading but must be repaired
    /// before the schema can be mapped.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        for table in &self.tables {
            for fk in &table.foreign_keys {
                let Some(target) = self.table(&fk.ref_table) else {
                    continue;
                };
                if target.primary_key.is_empty() {
                    out.push(format!(
                        "table '{}' is referenced by '{}.{}' but has no primary key",
                        target.name, table.name, fk.column
                    ));
                }
                let local = table.column(&fk.column).map(|c| c.datatype);
                let remote = target.column(&fk.ref_column).map(|c| c.datatype);
                if let (Some(l), Some(r)) = (local, remote) {
                    if l != r {
                        out.push(format!(
                            "foreign key '{}.{}' ({l}) references '{}.{}' ({r})",
                            table.name, fk.column, fk.ref_table, fk.ref_column
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn is_repaired(&self) -> bool {
        self.tables.iter().all(|t| !t.primary_key.is_empty()) && self.diagnostics().is_empty()
    }
}
