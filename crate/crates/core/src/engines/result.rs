use serde::Serialize;

use crate::value::Value;

/// Rows produced by either engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Whether the producing query had an ORDER BY.
    pub ordered: bool,
}

impl ResultSet {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    /// Comma-separated text: a header line, then one line per row in
    /// order, with nulls as empty fields.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        // Writing into a Vec cannot fail.
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Value::to_field)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
    }
}
